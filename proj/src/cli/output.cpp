#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "mgk/error.hpp"

namespace mgk::cli {
namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_cell(const Cell& c) {
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(double d) const { return format_number(d); }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(const std::string& s) const { return csv_escape(s); }
    };
    return std::visit(Visitor{}, c);
}

nlohmann::json json_cell(const Cell& c) {
    struct Visitor {
        nlohmann::json operator()(std::monostate) const { return nullptr; }
        nlohmann::json operator()(double d) const {
            if (std::isfinite(d)) return d;
            return std::isnan(d) ? "nan" : (d > 0 ? "inf" : "-inf");
        }
        nlohmann::json operator()(std::int64_t i) const { return i; }
        nlohmann::json operator()(const std::string& s) const { return s; }
    };
    return std::visit(Visitor{}, c);
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void write_csv(std::ostream& out, const Report& report) {
    out << "# metadata: " << report.metadata.dump() << "\n";
    for (std::size_t i = 0; i < report.table.columns.size(); ++i)
        out << (i ? "," : "") << csv_escape(report.table.columns[i]);
    out << "\n";
    for (const auto& row : report.table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
        out << "\n";
    }
}

void write_json(std::ostream& out, const Report& report) {
    nlohmann::json doc = nlohmann::json::object();
    doc["metadata"] = report.metadata;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.table.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size() && i < report.table.columns.size(); ++i)
            obj[report.table.columns[i]] = json_cell(row[i]);
        rows.push_back(std::move(obj));
    }
    doc[report.table_name] = std::move(rows);
    for (auto it = report.extra.begin(); it != report.extra.end(); ++it) doc[it.key()] = it.value();
    out << doc.dump(2) << "\n";
}

void emit(const std::string& text, const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open output file '" + path + "'");
    f << text;
    if (!f) throw IoError("failed writing output file '" + path + "'");
}

}  // namespace mgk::cli
