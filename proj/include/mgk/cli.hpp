#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mgk/analytic.hpp"
#include "mgk/detect.hpp"
#include "mgk/sim.hpp"
#include "mgk/workload.hpp"

namespace mgk::cli {

inline constexpr const char* kToolName = "mgk-plan";
inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kUsage = 2, kRuntime = 3 };

struct WorkloadConfig {
    double alpha = 0.99;
    double ex_short = kReferenceShortServiceMs;
    std::optional<double> ex_long;  ///< defaults to 95.20 when neither ex_long nor ratio is set
    std::optional<double> ratio;
    std::optional<double> rho;
    std::optional<double> lambda;

    WorkloadSpec build() const;
};

struct ServersConfig {
    int k_min = 1;
    int k_max = 20;

    std::vector<int> range() const;
};

struct AnalyticConfig {
    analytic::PbStrategy pb_strategy = analytic::PbStrategy::ErlangC;
    analytic::VarianceVariant variance_variant = analytic::VarianceVariant::HeavyTail;
    analytic::WaitTerm wait_term = analytic::WaitTerm::PkConsistent;
    std::size_t pb_sim_jobs = 1'000'000;
};

struct SimulationConfig {
    std::size_t rounds = 5;
    std::size_t n = 1'000'000;
    std::uint64_t seed = 1;
    double warmup_fraction = sim::kDefaultWarmupFraction;
    double ci_level = sim::kDefaultCiLevel;
    std::optional<std::string> trace_path;
};

struct DetectionConfig {
    std::size_t n_samples = 50'000;
    double test_fraction = 0.2;
    detect::Trainer trainer = detect::Trainer::MaxMargin;
    detect::Feature feature = detect::Feature::ResponseTime;
    bool binary = false;
    detect::Trainer threshold_trainer = detect::Trainer::GaussianNB;
};

struct SweepConfig {
    std::vector<double> ratios{0.0005, 0.005, 0.05};
    std::vector<double> alphas{0.99, 0.8, 0.6};
    std::vector<double> rhos{0.95, 0.8, 0.5};
    int k_max = 200;
    bool simulate = false;
    int sim_k_max = 20;
    std::vector<int> rows;  ///< 1-based indices into the ordered grid; empty = all
};

struct OutputConfig {
    std::string format = "csv";  ///< csv | json
    std::optional<std::string> path;  ///< stdout when unset
};

/// Parsed and validated configuration. `effective` is the merged JSON
/// document (defaults + file + flags) echoed into output metadata.
struct RunConfig {
    WorkloadConfig workload;
    ServersConfig servers;
    AnalyticConfig analytic;
    SimulationConfig simulation;
    DetectionConfig detection;
    SweepConfig sweep;
    OutputConfig output;
    nlohmann::json effective;
};

/// The full default document; every accepted key appears here.
nlohmann::json default_config_json();

/// Sets the value at a dotted path such as "workload.alpha". The value is
/// parsed as JSON when possible, otherwise kept as a string.
void apply_override(nlohmann::json& doc, const std::string& dotted_key, const std::string& value);

/// Merges `user` over the defaults and validates. Unknown keys and type
/// errors throw ValidationError carrying the dotted key path.
RunConfig parse_config(const nlohmann::json& user);

/// Entry point shared by the executable and tests. Returns an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mgk::cli
