#include "mgk/calibrate.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mgk/error.hpp"
#include "mgk/stats.hpp"

namespace mgk::calibrate {

namespace {

constexpr double kLowUtilization = 0.2;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace

const char* to_string(RunLabel l) {
    return l == RunLabel::Baseline ? "baseline" : "under_attack";
}

MeasurementSet MeasurementSet::from_samples(RunLabel label, std::vector<double> samples) {
    if (samples.empty()) throw ValidationError("samples", "measurement set is empty");
    MeasurementSet m;
    m.label = label;
    stats::RunningMoments acc;
    for (double x : samples) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            throw ValidationError("samples", "response times must be positive and finite");
        }
        acc.push(x);
    }
    m.samples = std::move(samples);
    m.mean = acc.mean();
    m.sd = acc.sd();
    return m;
}

MeasurementSet load_samples(const std::filesystem::path& path, RunLabel label) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open sample file " + path.string());

    std::vector<double> samples;
    std::string line;
    std::size_t line_no = 0;
    bool seen_data = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        if (!seen_data && text == "response_time_ms") {
            seen_data = true;
            continue;
        }
        seen_data = true;
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            throw ValidationError(where, "not a decimal number: '" + std::string(text) + "'");
        }
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw ValidationError(where, "response time must be positive: '" + std::string(text) + "'");
        }
        samples.push_back(value);
    }
    if (in.bad()) throw IoError("read error on " + path.string());
    if (samples.empty()) throw ValidationError(path.string(), "no samples in file");
    return MeasurementSet::from_samples(label, std::move(samples));
}

CalibratedParams estimate_params(const MeasurementSet& baseline, const MeasurementSet& attack,
                                 std::optional<double> baseline_rho) {
    if (baseline.samples.empty()) throw ValidationError("baseline", "no samples");
    if (attack.samples.empty()) throw ValidationError("attack", "no samples");
    CalibratedParams p;
    p.ex_short = baseline.mean;
    p.ex_long = attack.mean;
    p.sd_short = baseline.sd;
    p.sd_long = attack.sd;
    p.n_short = baseline.samples.size();
    p.n_long = attack.samples.size();
    if (attack.mean < baseline.mean) {
        std::ostringstream msg;
        msg << "under-attack mean " << attack.mean << " ms is below baseline mean "
            << baseline.mean << " ms; the low-utilization assumption may not hold";
        p.warnings.push_back(msg.str());
    }
    if (baseline_rho && *baseline_rho > kLowUtilization) {
        std::ostringstream msg;
        msg << "baseline utilization " << *baseline_rho
            << " exceeds 0.2; measured response times include queueing and overstate service times";
        p.warnings.push_back(msg.str());
    }
    return p;
}

}  // namespace mgk::calibrate
