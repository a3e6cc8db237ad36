#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgk/metrics.hpp"
#include "mgk/sim.hpp"
#include "mgk/workload.hpp"

namespace mgk::analytic {

/// Probability that an arrival waits in an M/M/k queue with per-server
/// utilization rho (offered load k * rho). Uses the Erlang-B recurrence, so
/// k in the tens of thousands is fine. Throws SaturationError for rho >= 1.
double erlang_c(int k, double rho);

enum class PbStrategy { ErlangC, Simulated };

/// How p_B is obtained. Simulated runs the queue for `sim_jobs` jobs and
/// reports the fraction that waited.
struct BlockingModel {
    PbStrategy strategy = PbStrategy::ErlangC;
    std::uint64_t seed = 1;
    std::size_t sim_jobs = 1'000'000;
    double warmup_fraction = sim::kDefaultWarmupFraction;
};

double blocking_probability(const WorkloadSpec& spec, int k, const BlockingModel& model = {});

/// Scaling of the queueing term for a blocked job.
///
/// PkConsistent: E(W | W > 0) = E(X_r) / (1 - rho), the third-moment term of
/// the variance scaled the same way. With p_B = rho at k = 1 this is exactly
/// Pollaczek-Khinchine, and it reproduces the reference optimal-server
/// tables wherever the optimum is k = 1.
///
/// RhoRatio: E(W | W > 0) = rho / (1 - rho) * E(X_r), i.e. the M/G/1 mean
/// wait used as the conditional wait, and likewise rho / (1 - rho) on the
/// variance term.
enum class WaitTerm { PkConsistent, RhoRatio };

enum class VarianceVariant {
    HeavyTail,  ///< V(T) ~ k^2 E(X^2) + c * E(X^3) / (3 E(X)) * p_B
    Exact,      ///< V(T) = k^2 V(X) + c * E(X^3) / (3 E(X)) * p_B
};

struct Options {
    BlockingModel pb;
    VarianceVariant variance = VarianceVariant::HeavyTail;
    WaitTerm wait = WaitTerm::PkConsistent;
};

/// E(W | W > 0) for the given scaling.
double conditional_wait(const WorkloadSpec& spec, WaitTerm wait = WaitTerm::PkConsistent);

/// k E(X) + pb E(W | W > 0).
double mean_response_time(const WorkloadSpec& spec, int k, double pb,
                          WaitTerm wait = WaitTerm::PkConsistent);

double var_response_time(const WorkloadSpec& spec, int k, double pb,
                         VarianceVariant variant = VarianceVariant::HeavyTail,
                         WaitTerm wait = WaitTerm::PkConsistent);

/// Exact M/G/1 response time (Pollaczek-Khinchine mean and variance).
struct Mg1Metrics {
    double mean_w = 0.0;
    double var_w = 0.0;
    double mean_t = 0.0;
    double var_t = 0.0;
    double sd_t = 0.0;
};

Mg1Metrics mg1_exact(const WorkloadSpec& spec);

QueueMetrics queue_metrics(const WorkloadSpec& spec, int k, const Options& opts = {});

/// Exhaustive search over k = 1..k_max, smallest k on ties.
OptimalServers optimal_servers(const WorkloadSpec& spec, int k_max = 200,
                               const Options& opts = {});

struct GridPoint {
    double ratio = 1.0;  ///< ex_short / ex_long
    double alpha = 1.0;
    double rho = 0.5;
};

/// The 27-point grid {0.0005, 0.005, 0.05} x {0.99, 0.8, 0.6} x {0.95, 0.8, 0.5}
/// in table order: ratio ascending, then alpha and rho descending.
std::vector<GridPoint> reference_grid();

/// Sorts by ratio ascending, alpha descending, rho descending.
void sort_table_order(std::vector<GridPoint>& grid);

struct SweepOptions {
    int k_max = 200;
    Options analytic;
    double ex_short = kReferenceShortServiceMs;
    /// When set, every row also gets simulated argmins over k = 1..sim_k_max.
    std::optional<sim::RoundOptions> simulate;
    int sim_k_max = 20;
};

struct SweepRow {
    GridPoint point;
    std::optional<OptimalServers> analytic;
    std::optional<OptimalServers> simulated;
    std::vector<sim::SimSummary> simulated_detail;  ///< per k, ascending
    std::optional<Mg1Metrics> mg1;
    std::optional<std::string> error;  ///< set when the row could not be evaluated
};

/// Row-wise optimal_servers. A row that fails records its error and the
/// sweep moves on.
std::vector<SweepRow> sweep(std::span<const GridPoint> grid, const SweepOptions& opts = {});

}  // namespace mgk::analytic
