#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mgk/cli.hpp"
#include "mgk/error.hpp"

using nlohmann::json;

namespace mgk::cli {
namespace {

constexpr double kDefaultLongServiceMs = 95.20;

// Top-level sections that are carried along but not interpreted, so a
// calibrate output file can be fed back as a config.
bool passthrough_section(const std::string& key) {
    return key == "metadata" || key == "calibration";
}

void merge_into(json& base, const json& user, const std::string& prefix) {
    if (!user.is_object()) throw ValidationError(prefix.empty() ? "<root>" : prefix, "expected an object");
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (prefix.empty() && passthrough_section(it.key())) {
            base[it.key()] = it.value();
            continue;
        }
        if (!base.contains(it.key())) throw ValidationError(path, "unknown key");
        json& slot = base[it.key()];
        if (slot.is_object()) {
            merge_into(slot, it.value(), path);
        } else {
            slot = it.value();
        }
    }
}

std::string dotted(const std::string& section, const std::string& key) { return section + "." + key; }

double get_number(const json& sec, const std::string& section, const std::string& key) {
    const json& v = sec.at(key);
    if (!v.is_number()) throw ValidationError(dotted(section, key), "expected a number");
    double d = v.get<double>();
    if (!std::isfinite(d)) throw ValidationError(dotted(section, key), "must be finite");
    return d;
}

std::optional<double> get_opt_number(const json& sec, const std::string& section,
                                     const std::string& key) {
    if (sec.at(key).is_null()) return std::nullopt;
    return get_number(sec, section, key);
}

std::int64_t get_int(const json& sec, const std::string& section, const std::string& key) {
    const json& v = sec.at(key);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
        double d = v.get<double>();
        if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9e15) return static_cast<std::int64_t>(d);
    }
    throw ValidationError(dotted(section, key), "expected an integer");
}

std::size_t get_count(const json& sec, const std::string& section, const std::string& key,
                      std::int64_t min) {
    auto v = get_int(sec, section, key);
    if (v < min) throw ValidationError(dotted(section, key), "must be >= " + std::to_string(min));
    return static_cast<std::size_t>(v);
}

std::uint64_t get_seed(const json& sec, const std::string& section, const std::string& key) {
    const json& v = sec.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    auto i = get_int(sec, section, key);
    if (i < 0) throw ValidationError(dotted(section, key), "must be nonnegative");
    return static_cast<std::uint64_t>(i);
}

bool get_bool(const json& sec, const std::string& section, const std::string& key) {
    const json& v = sec.at(key);
    if (!v.is_boolean()) throw ValidationError(dotted(section, key), "expected true or false");
    return v.get<bool>();
}

std::string get_string(const json& sec, const std::string& section, const std::string& key) {
    const json& v = sec.at(key);
    if (!v.is_string()) throw ValidationError(dotted(section, key), "expected a string");
    return v.get<std::string>();
}

template <class E, std::size_t N>
E get_enum(const json& sec, const std::string& section, const std::string& key,
           const std::pair<const char*, E> (&table)[N]) {
    std::string s = get_string(sec, section, key);
    std::string allowed;
    for (const auto& [name, value] : table) {
        if (s == name) return value;
        allowed += allowed.empty() ? name : std::string("|") + name;
    }
    throw ValidationError(dotted(section, key), "expected one of " + allowed + ", got '" + s + "'");
}

template <class T, class Get>
std::vector<T> get_array(const json& sec, const std::string& section, const std::string& key, Get get) {
    const json& v = sec.at(key);
    if (!v.is_array()) throw ValidationError(dotted(section, key), "expected an array");
    std::vector<T> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        json wrapper = json::object();
        wrapper["v"] = v[i];
        try {
            out.push_back(get(wrapper, "v"));
        } catch (const ValidationError& e) {
            throw ValidationError(dotted(section, key) + "[" + std::to_string(i) + "]", e.what());
        }
    }
    return out;
}

constexpr std::pair<const char*, analytic::PbStrategy> kPbNames[] = {
    {"erlang_c", analytic::PbStrategy::ErlangC},
    {"simulated", analytic::PbStrategy::Simulated},
};
constexpr std::pair<const char*, analytic::VarianceVariant> kVarNames[] = {
    {"heavy_tail", analytic::VarianceVariant::HeavyTail},
    {"exact", analytic::VarianceVariant::Exact},
};
constexpr std::pair<const char*, analytic::WaitTerm> kWaitNames[] = {
    {"pk_consistent", analytic::WaitTerm::PkConsistent},
    {"rho_ratio", analytic::WaitTerm::RhoRatio},
};
constexpr std::pair<const char*, detect::Trainer> kTrainerNames[] = {
    {"max_margin", detect::Trainer::MaxMargin},
    {"gaussian_nb", detect::Trainer::GaussianNB},
    {"stump", detect::Trainer::Stump},
};
constexpr std::pair<const char*, detect::Feature> kFeatureNames[] = {
    {"response", detect::Feature::ResponseTime},
    {"waiting", detect::Feature::WaitingTime},
};

}  // namespace

WorkloadSpec WorkloadConfig::build() const {
    if (ex_long && ratio) throw ValidationError("workload.ratio", "set either workload.ex_long or workload.ratio, not both");
    if (!rho && !lambda) throw ValidationError("workload.rho", "one of workload.rho or workload.lambda is required");
    double long_ms = kDefaultLongServiceMs;
    if (ex_long) long_ms = *ex_long;
    if (ratio) {
        if (!(*ratio > 0.0 && *ratio <= 1.0)) throw ValidationError("workload.ratio", "must be in (0, 1]");
        long_ms = ex_short / *ratio;
    }
    try {
        return make_workload(alpha, ex_short, long_ms, rho, lambda);
    } catch (const ValidationError& e) {
        std::string msg = e.what();
        auto colon = msg.find(": ");
        if (colon != std::string::npos) msg = msg.substr(colon + 2);
        throw ValidationError("workload." + e.field(), msg);
    }
}

std::vector<int> ServersConfig::range() const {
    std::vector<int> ks;
    for (int k = k_min; k <= k_max; ++k) ks.push_back(k);
    return ks;
}

json default_config_json() {
    return json{
        {"workload",
         {{"alpha", 0.99},
          {"ex_short", kReferenceShortServiceMs},
          {"ex_long", nullptr},
          {"ratio", nullptr},
          {"rho", 0.5},
          {"lambda", nullptr}}},
        {"servers", {{"k_min", 1}, {"k_max", 20}}},
        {"analytic",
         {{"pb_strategy", "erlang_c"},
          {"variance_variant", "heavy_tail"},
          {"wait_term", "pk_consistent"},
          {"pb_sim_jobs", 1000000}}},
        {"simulation",
         {{"rounds", 5},
          {"n", 1000000},
          {"seed", 1},
          {"warmup_fraction", sim::kDefaultWarmupFraction},
          {"ci_level", sim::kDefaultCiLevel},
          {"trace_path", nullptr}}},
        {"detection",
         {{"n_samples", 50000},
          {"test_fraction", 0.2},
          {"trainer", "max_margin"},
          {"feature", "response"},
          {"binary", false},
          {"threshold_trainer", "gaussian_nb"}}},
        {"sweep",
         {{"ratios", {0.0005, 0.005, 0.05}},
          {"alphas", {0.99, 0.8, 0.6}},
          {"rhos", {0.95, 0.8, 0.5}},
          {"k_max", 200},
          {"simulate", false},
          {"sim_k_max", 20},
          {"rows", json::array()}}},
        {"output", {{"format", "csv"}, {"path", nullptr}}},
    };
}

void apply_override(json& doc, const std::string& dotted_key, const std::string& value) {
    json parsed = json::parse(value, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) {
        // Bare words and comma lists ("0.5,0.8") are accepted for convenience.
        if (value.find(',') != std::string::npos) {
            parsed = json::array();
            std::size_t start = 0;
            while (start <= value.size()) {
                auto end = value.find(',', start);
                if (end == std::string::npos) end = value.size();
                std::string item = value.substr(start, end - start);
                json p = json::parse(item, nullptr, false);
                parsed.push_back(p.is_discarded() ? json(item) : p);
                start = end + 1;
            }
        } else {
            parsed = value;
        }
    }
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        auto dot = dotted_key.find('.', start);
        std::string part = dotted_key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ValidationError(dotted_key, "malformed key");
        if (dot == std::string::npos) {
            // "--sweep.rhos 0.5" means a one-element list.
            std::string pointer = "/" + dotted_key;
            std::replace(pointer.begin(), pointer.end(), '.', '/');
            const json defaults = default_config_json();
            const json::json_pointer ptr(pointer);
            if (!parsed.is_array() && defaults.contains(ptr) && defaults.at(ptr).is_array()) {
                parsed = json::array({parsed});
            }
            (*node)[part] = parsed;
            return;
        }
        json& next = (*node)[part];
        if (next.is_null()) next = json::object();
        if (!next.is_object()) throw ValidationError(dotted_key.substr(0, dot), "is not a section");
        node = &next;
        start = dot + 1;
    }
}

RunConfig parse_config(const json& user) {
    json doc = default_config_json();
    merge_into(doc, user, "");

    RunConfig cfg;
    cfg.effective = doc;

    const json& w = doc.at("workload");
    cfg.workload.alpha = get_number(w, "workload", "alpha");
    cfg.workload.ex_short = get_number(w, "workload", "ex_short");
    cfg.workload.ex_long = get_opt_number(w, "workload", "ex_long");
    cfg.workload.ratio = get_opt_number(w, "workload", "ratio");
    cfg.workload.rho = get_opt_number(w, "workload", "rho");
    cfg.workload.lambda = get_opt_number(w, "workload", "lambda");
    // rho has a default; an explicit lambda replaces it unless both were given.
    if (cfg.workload.lambda && !(user.contains("workload") && user["workload"].contains("rho") &&
                                 !user["workload"]["rho"].is_null())) {
        cfg.workload.rho.reset();
        cfg.effective["workload"]["rho"] = nullptr;
    }

    const json& s = doc.at("servers");
    auto k_min = get_int(s, "servers", "k_min");
    auto k_max = get_int(s, "servers", "k_max");
    if (k_min < 1) throw ValidationError("servers.k_min", "must be >= 1");
    if (k_max > 100000) throw ValidationError("servers.k_max", "must be <= 100000");
    cfg.servers.k_min = static_cast<int>(k_min);
    cfg.servers.k_max = static_cast<int>(k_max);

    const json& a = doc.at("analytic");
    cfg.analytic.pb_strategy = get_enum(a, "analytic", "pb_strategy", kPbNames);
    cfg.analytic.variance_variant = get_enum(a, "analytic", "variance_variant", kVarNames);
    cfg.analytic.wait_term = get_enum(a, "analytic", "wait_term", kWaitNames);
    cfg.analytic.pb_sim_jobs = get_count(a, "analytic", "pb_sim_jobs", 10);

    const json& m = doc.at("simulation");
    cfg.simulation.rounds = get_count(m, "simulation", "rounds", 2);
    cfg.simulation.n = get_count(m, "simulation", "n", 2);
    cfg.simulation.seed = get_seed(m, "simulation", "seed");
    cfg.simulation.warmup_fraction = get_number(m, "simulation", "warmup_fraction");
    if (!(cfg.simulation.warmup_fraction >= 0.0 && cfg.simulation.warmup_fraction < 1.0))
        throw ValidationError("simulation.warmup_fraction", "must be in [0, 1)");
    cfg.simulation.ci_level = get_number(m, "simulation", "ci_level");
    if (!(cfg.simulation.ci_level > 0.0 && cfg.simulation.ci_level < 1.0))
        throw ValidationError("simulation.ci_level", "must be in (0, 1)");
    if (!m.at("trace_path").is_null()) cfg.simulation.trace_path = get_string(m, "simulation", "trace_path");

    const json& d = doc.at("detection");
    cfg.detection.n_samples = get_count(d, "detection", "n_samples", 10);
    cfg.detection.test_fraction = get_number(d, "detection", "test_fraction");
    if (!(cfg.detection.test_fraction > 0.0 && cfg.detection.test_fraction < 1.0))
        throw ValidationError("detection.test_fraction", "must be in (0, 1)");
    cfg.detection.trainer = get_enum(d, "detection", "trainer", kTrainerNames);
    cfg.detection.feature = get_enum(d, "detection", "feature", kFeatureNames);
    cfg.detection.binary = get_bool(d, "detection", "binary");
    cfg.detection.threshold_trainer = get_enum(d, "detection", "threshold_trainer", kTrainerNames);

    const json& g = doc.at("sweep");
    auto num = [](const json& j, const std::string& k) { return get_number(j, "", k); };
    cfg.sweep.ratios = get_array<double>(g, "sweep", "ratios", num);
    cfg.sweep.alphas = get_array<double>(g, "sweep", "alphas", num);
    cfg.sweep.rhos = get_array<double>(g, "sweep", "rhos", num);
    auto gk = get_int(g, "sweep", "k_max");
    if (gk < 1 || gk > 100000) throw ValidationError("sweep.k_max", "must be in [1, 100000]");
    cfg.sweep.k_max = static_cast<int>(gk);
    cfg.sweep.simulate = get_bool(g, "sweep", "simulate");
    auto sk = get_int(g, "sweep", "sim_k_max");
    if (sk < 1 || sk > 100000) throw ValidationError("sweep.sim_k_max", "must be in [1, 100000]");
    cfg.sweep.sim_k_max = static_cast<int>(sk);
    cfg.sweep.rows = get_array<int>(g, "sweep", "rows", [](const json& j, const std::string& k) {
        auto v = get_int(j, "", k);
        if (v < 1) throw ValidationError(k, "row numbers are 1-based");
        return static_cast<int>(v);
    });

    const json& o = doc.at("output");
    cfg.output.format = get_string(o, "output", "format");
    if (cfg.output.format != "csv" && cfg.output.format != "json")
        throw ValidationError("output.format", "expected csv or json");
    if (!o.at("path").is_null()) cfg.output.path = get_string(o, "output", "path");

    return cfg;
}

}  // namespace mgk::cli
