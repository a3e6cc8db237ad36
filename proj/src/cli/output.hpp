#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace mgk::cli {

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// One command's result. CSV carries the metadata as a leading `#` line
/// followed by `table`; JSON carries metadata, the table as an array of
/// objects under `table_name`, and everything in `extra`.
struct Report {
    nlohmann::json metadata;
    std::string table_name = "rows";
    Table table;
    nlohmann::json extra = nlohmann::json::object();
};

/// %.6g; non-finite values print as inf/-inf/nan.
std::string format_number(double v);

void write_csv(std::ostream& out, const Report& report);
void write_json(std::ostream& out, const Report& report);

/// Writes to `path`, or to `fallback` when path is empty. Throws IoError.
void emit(const std::string& text, const std::string& path, std::ostream& fallback);

}  // namespace mgk::cli
