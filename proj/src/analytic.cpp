#include "mgk/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mgk/error.hpp"
#include "mgk/parallel.hpp"

namespace mgk {

const QueueMetrics& OptimalServers::at(int k) const {
    for (const QueueMetrics& m : per_k) {
        if (m.k == k) return m;
    }
    throw std::out_of_range("no metrics for k = " + std::to_string(k));
}

OptimalServers select_optimal(std::vector<QueueMetrics> per_k) {
    if (per_k.empty()) throw ValidationError("k_range", "no server counts evaluated");
    constexpr double kRelTie = 1e-12;
    OptimalServers out;
    std::size_t best_mu = 0;
    std::size_t best_sigma = 0;
    for (std::size_t i = 1; i < per_k.size(); ++i) {
        const double mu = per_k[best_mu].mean_t;
        const double sigma = per_k[best_sigma].sd_t;
        if (per_k[i].mean_t < mu - kRelTie * std::abs(mu)) best_mu = i;
        if (per_k[i].sd_t < sigma - kRelTie * std::abs(sigma)) best_sigma = i;
    }
    out.k_mu = per_k[best_mu].k;
    out.k_sigma = per_k[best_sigma].k;
    out.mu_star = per_k[best_mu].mean_t;
    out.sigma_star = per_k[best_sigma].sd_t;
    out.per_k = std::move(per_k);
    return out;
}

}  // namespace mgk

namespace mgk::analytic {

namespace {

void require_unsaturated(double rho) {
    if (!(rho < 1.0)) throw SaturationError("utilization must be below 1");
}

double wait_scale(double rho, WaitTerm wait) {
    require_unsaturated(rho);
    return wait == WaitTerm::PkConsistent ? 1.0 / (1.0 - rho) : rho / (1.0 - rho);
}

void require_k(int k) {
    if (k < 1) throw ValidationError("k", "number of servers must be at least 1");
}

void require_probability(double pb) {
    if (!(pb >= 0.0 && pb <= 1.0)) throw ValidationError("pb", "must lie in [0, 1]");
}

}  // namespace

double erlang_c(int k, double rho) {
    require_k(k);
    if (!(rho > 0.0)) {
        if (rho == 0.0) return 0.0;
        throw ValidationError("rho", "utilization must be nonnegative");
    }
    require_unsaturated(rho);
    const double offered = static_cast<double>(k) * rho;
    double b = 1.0;
    for (int n = 1; n <= k; ++n) b = offered * b / (static_cast<double>(n) + offered * b);
    return b / (1.0 - rho * (1.0 - b));
}

double blocking_probability(const WorkloadSpec& spec, int k, const BlockingModel& model) {
    require_k(k);
    if (model.strategy == PbStrategy::ErlangC) return erlang_c(k, spec.rho());
    const auto jobs = sim::simulate(spec, k, model.sim_jobs, model.seed, model.warmup_fraction);
    std::size_t retained = 0;
    std::size_t waited = 0;
    for (const auto& j : jobs) {
        if (j.warmup) continue;
        ++retained;
        if (j.wait > 0.0) ++waited;
    }
    if (retained == 0) throw ValidationError("sim_jobs", "warm-up leaves no retained jobs");
    return static_cast<double>(waited) / static_cast<double>(retained);
}

double conditional_wait(const WorkloadSpec& spec, WaitTerm wait) {
    return wait_scale(spec.rho(), wait) * moments(spec).residual_mean;
}

double mean_response_time(const WorkloadSpec& spec, int k, double pb, WaitTerm wait) {
    require_k(k);
    require_probability(pb);
    return static_cast<double>(k) * spec.mean_service() + pb * conditional_wait(spec, wait);
}

double var_response_time(const WorkloadSpec& spec, int k, double pb, VarianceVariant variant,
                         WaitTerm wait) {
    require_k(k);
    require_probability(pb);
    const MomentSet m = moments(spec);
    const double kk = static_cast<double>(k) * static_cast<double>(k);
    const double service_part = variant == VarianceVariant::HeavyTail ? kk * m.m2 : kk * m.var;
    const double queue_part = wait_scale(spec.rho(), wait) * m.m3 / (3.0 * m.m1) * pb;
    return service_part + queue_part;
}

Mg1Metrics mg1_exact(const WorkloadSpec& spec) {
    require_unsaturated(spec.rho());
    const MomentSet m = moments(spec);
    const double lambda = spec.lambda_total();
    const double idle = 1.0 - spec.rho();
    Mg1Metrics r;
    r.mean_w = lambda * m.m2 / (2.0 * idle);
    r.var_w = lambda * m.m3 / (3.0 * idle) + r.mean_w * r.mean_w;
    r.mean_t = m.m1 + r.mean_w;
    r.var_t = r.var_w + m.var;
    r.sd_t = std::sqrt(r.var_t);
    return r;
}

QueueMetrics queue_metrics(const WorkloadSpec& spec, int k, const Options& opts) {
    const double pb = blocking_probability(spec, k, opts.pb);
    QueueMetrics q;
    q.k = k;
    q.p_block = pb;
    q.cond_wait = conditional_wait(spec, opts.wait);
    q.mean_t = mean_response_time(spec, k, pb, opts.wait);
    q.var_t = var_response_time(spec, k, pb, opts.variance, opts.wait);
    q.sd_t = std::sqrt(q.var_t);
    return q;
}

OptimalServers optimal_servers(const WorkloadSpec& spec, int k_max, const Options& opts) {
    if (k_max < 1) throw ValidationError("k_max", "must be at least 1");
    std::vector<QueueMetrics> per_k(static_cast<std::size_t>(k_max));
    const auto evaluate = [&](std::size_t i) {
        per_k[i] = queue_metrics(spec, static_cast<int>(i) + 1, opts);
    };
    if (opts.pb.strategy == PbStrategy::Simulated) {
        parallel_for(per_k.size(), evaluate);
    } else {
        for (std::size_t i = 0; i < per_k.size(); ++i) evaluate(i);
    }
    return select_optimal(std::move(per_k));
}

std::vector<GridPoint> reference_grid() {
    std::vector<GridPoint> grid;
    for (double ratio : {0.0005, 0.005, 0.05}) {
        for (double alpha : {0.99, 0.8, 0.6}) {
            for (double rho : {0.95, 0.8, 0.5}) grid.push_back({ratio, alpha, rho});
        }
    }
    return grid;
}

void sort_table_order(std::vector<GridPoint>& grid) {
    std::stable_sort(grid.begin(), grid.end(), [](const GridPoint& a, const GridPoint& b) {
        if (a.ratio != b.ratio) return a.ratio < b.ratio;
        if (a.alpha != b.alpha) return a.alpha > b.alpha;
        return a.rho > b.rho;
    });
}

std::vector<SweepRow> sweep(std::span<const GridPoint> grid, const SweepOptions& opts) {
    std::vector<SweepRow> rows(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        SweepRow& row = rows[i];
        row.point = grid[i];
        try {
            const WorkloadSpec spec =
                workload_from_ratio(grid[i].alpha, grid[i].ratio, grid[i].rho, opts.ex_short);
            row.mg1 = mg1_exact(spec);
            row.analytic = optimal_servers(spec, opts.k_max, opts.analytic);
            if (opts.simulate) {
                std::vector<int> ks(static_cast<std::size_t>(opts.sim_k_max));
                for (std::size_t j = 0; j < ks.size(); ++j) ks[j] = static_cast<int>(j) + 1;
                row.simulated_detail = sim::run_rounds_over(spec, ks, *opts.simulate);
                row.simulated = sim::select_simulated(ks, row.simulated_detail);
            }
        } catch (const Error& e) {
            row.error = e.what();
        }
    }
    return rows;
}

}  // namespace mgk::analytic
