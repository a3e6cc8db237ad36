#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mgk/metrics.hpp"
#include "mgk/workload.hpp"

namespace mgk::sim {

inline constexpr double kDefaultWarmupFraction = 0.01;
inline constexpr double kDefaultCiLevel = 0.95;

enum class JobClass : std::uint8_t { Short, Long };

const char* to_string(JobClass c);

struct JobRecord {
    std::uint64_t index = 0;
    JobClass job_class = JobClass::Short;
    double arrival = 0.0;    ///< ms, absolute
    double wait = 0.0;       ///< ms in queue
    double service = 0.0;    ///< ms, k * E(X_class)
    double departure = 0.0;  ///< arrival + wait + service
    bool impaired = false;   ///< Short only: sojourn overlaps some Long sojourn
    bool warmup = false;     ///< excluded from summaries and datasets
};

/// Remaining work per server, kept sorted ascending (Kiefer-Wolfowitz state).
class WorkloadVector {
public:
    explicit WorkloadVector(int servers);
    /// Throws ValidationError unless `work` is nonempty, sorted and nonnegative.
    explicit WorkloadVector(std::vector<double> work);

    std::span<const double> values() const noexcept { return work_; }
    int servers() const noexcept { return static_cast<int>(work_.size()); }

    /// Admits a job of length `service` to the least-loaded server, then lets
    /// `interarrival` ms elapse. Returns the job's wait (the old minimum).
    double admit(double service, double interarrival);

private:
    std::vector<double> work_;
};

struct KwStep {
    double wait;
    WorkloadVector next;
};

/// Pure form of WorkloadVector::admit.
KwStep kw_step(const WorkloadVector& state, double service, double interarrival);

/// Simulates `n` consecutive jobs of an M/G/k FIFO queue starting empty.
///
/// The first arrival time is one exponential draw; then, per job, one uniform
/// for the class (short iff u <= alpha) and one exponential interarrival. Stream `stream_id` of `seed` is used, so the
/// same arguments always give the same records. The first
/// ceil(warmup_fraction * n) records carry warmup = true. Impaired flags are
/// left false; see label_impaired.
std::vector<JobRecord> simulate(const WorkloadSpec& spec, int k, std::size_t n,
                                std::uint64_t seed,
                                double warmup_fraction = kDefaultWarmupFraction,
                                std::uint64_t stream_id = 0);

/// Sets `impaired` on every Short record whose [arrival, departure) interval
/// intersects that of some Long record. Linear sweep; throws ValidationError
/// when arrivals are not strictly increasing.
void label_impaired(std::span<JobRecord> jobs);

std::size_t warmup_count(std::size_t n, double warmup_fraction);

struct SimSummary {
    std::size_t n = 0;  ///< retained (post warm-up) jobs over all rounds
    std::size_t rounds = 0;
    double mean_t = 0.0;
    double sd_t = 0.0;
    double mean_w = 0.0;
    double sd_w = 0.0;
    double p_wait = 0.0;
    double cond_wait = 0.0;  ///< mean wait over jobs with wait > 0
    std::optional<double> impaired_fraction;
    std::vector<double> round_mean_t;
    std::vector<double> round_sd_t;
    double ci_halfwidth = 0.0;     ///< on mean_t
    double sd_ci_halfwidth = 0.0;  ///< on sd_t
    double ci_level = kDefaultCiLevel;
    double warmup_fraction = kDefaultWarmupFraction;
    std::uint64_t seed = 0;
};

struct RoundOptions {
    std::size_t rounds = 5;
    std::size_t n_per_round = 1'000'000;
    std::uint64_t seed = 1;
    double warmup_fraction = kDefaultWarmupFraction;
    double ci_level = kDefaultCiLevel;
    /// Labelling needs the whole trace in memory; skip it for pure
    /// mean/variance sweeps.
    bool label = true;
};

/// Round r simulates stream r of `seed` (identical across k, so server
/// counts are compared under common random numbers). Rounds run in
/// parallel; the result does not depend on scheduling.
SimSummary run_rounds(const WorkloadSpec& spec, int k, const RoundOptions& opts);

/// run_rounds for every k in `k_range`, in the given order.
std::vector<SimSummary> run_rounds_over(const WorkloadSpec& spec, std::span<const int> k_range,
                                        const RoundOptions& opts);

/// Argmins over simulated mean and sd for the k in `k_range`.
OptimalServers select_simulated(std::span<const int> k_range,
                                std::span<const SimSummary> summaries);

/// run_rounds for every k in `k_range`; argmins over simulated mean and sd.
OptimalServers sim_optimal_servers(const WorkloadSpec& spec, std::span<const int> k_range,
                                   const RoundOptions& opts);

/// CSV header `index,class,arrival,wait,service,departure,impaired`, times in
/// fixed-point ms with 6 decimals.
void write_trace_csv(std::ostream& out, std::span<const JobRecord> jobs);

}  // namespace mgk::sim
