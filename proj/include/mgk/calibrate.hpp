#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mgk::calibrate {

enum class RunLabel { Baseline, UnderAttack };

const char* to_string(RunLabel l);

/// Response-time samples from one measurement run.
struct MeasurementSet {
    RunLabel label = RunLabel::Baseline;
    std::vector<double> samples;  ///< ms, all > 0
    double mean = 0.0;
    double sd = 0.0;  ///< sample standard deviation (n - 1)

    static MeasurementSet from_samples(RunLabel label, std::vector<double> samples);
};

/// Reads one positive decimal per line. Blank lines and lines starting with
/// '#' are skipped; the first data line may be the header `response_time_ms`.
/// Throws IoError when the file cannot be read and ValidationError (field
/// "<path>:<line>") for malformed or non-positive values or an empty file.
MeasurementSet load_samples(const std::filesystem::path& path, RunLabel label);

struct CalibratedParams {
    double ex_short = 0.0;
    double ex_long = 0.0;
    double sd_short = 0.0;
    double sd_long = 0.0;
    std::size_t n_short = 0;
    std::size_t n_long = 0;
    std::vector<std::string> warnings;

    double ratio() const { return ex_short / ex_long; }
};

/// Baseline mean becomes E(X_S), under-attack mean becomes E(X_L). This is
/// only sound when the baseline run had low utilization; pass the measured
/// utilization to get a warning above 0.2.
CalibratedParams estimate_params(const MeasurementSet& baseline, const MeasurementSet& attack,
                                 std::optional<double> baseline_rho = std::nullopt);

}  // namespace mgk::calibrate
