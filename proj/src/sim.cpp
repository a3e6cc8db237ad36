#include "mgk/sim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "mgk/error.hpp"
#include "mgk/parallel.hpp"
#include "mgk/stats.hpp"

namespace mgk::sim {

const char* to_string(JobClass c) { return c == JobClass::Short ? "short" : "long"; }

WorkloadVector::WorkloadVector(int servers) {
    if (servers < 1) throw ValidationError("k", "number of servers must be at least 1");
    work_.assign(static_cast<std::size_t>(servers), 0.0);
}

WorkloadVector::WorkloadVector(std::vector<double> work) : work_(std::move(work)) {
    if (work_.empty()) throw ValidationError("state", "workload vector is empty");
    if (!std::is_sorted(work_.begin(), work_.end())) {
        throw ValidationError("state", "workload vector must be sorted ascending");
    }
    if (work_.front() < 0.0) throw ValidationError("state", "remaining work must be >= 0");
}

double WorkloadVector::admit(double service, double interarrival) {
    const double wait = work_[0];
    const double loaded = wait + service;
    // Only the front entry changes rank: slide it right to its sorted slot.
    std::size_t i = 1;
    const std::size_t k = work_.size();
    while (i < k && work_[i] < loaded) {
        work_[i - 1] = work_[i];
        ++i;
    }
    work_[i - 1] = loaded;
    for (double& w : work_) w = std::max(0.0, w - interarrival);
    assert(std::is_sorted(work_.begin(), work_.end()));
    return wait;
}

KwStep kw_step(const WorkloadVector& state, double service, double interarrival) {
    WorkloadVector next = state;
    const double wait = next.admit(service, interarrival);
    return {wait, std::move(next)};
}

std::size_t warmup_count(std::size_t n, double warmup_fraction) {
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
        throw ValidationError("warmup_fraction", "must lie in [0, 1)");
    }
    return static_cast<std::size_t>(std::ceil(warmup_fraction * static_cast<double>(n)));
}

namespace {

// Drives the recursion and hands each job to `sink(index, class, arrival,
// wait, service)`. Shared by the materializing and the streaming paths so
// both see the identical random sequence.
template <class Sink>
void run_queue(const WorkloadSpec& spec, int k, std::size_t n, std::uint64_t seed,
               std::uint64_t stream_id, Sink&& sink) {
    const ServerConfig cfg = server_config(spec, k);
    const double short_service = cfg.short_service(spec);
    const double long_service = cfg.long_service(spec);
    const double rate = spec.lambda_total();
    const double alpha = spec.alpha();

    stats::RngStream rng(seed, stream_id);
    WorkloadVector state(k);
    double arrival = stats::exp_variate(rng, rate);
    for (std::size_t i = 0; i < n; ++i) {
        const JobClass cls = rng.bernoulli(alpha) ? JobClass::Short : JobClass::Long;
        const double tau = stats::exp_variate(rng, rate);
        const double service = cls == JobClass::Short ? short_service : long_service;
        const double wait = state.admit(service, tau);
        sink(i, cls, arrival, wait, service);
        arrival += tau;
    }
}

void check_sim_args(const WorkloadSpec& spec, std::size_t n) {
    if (n < 1) throw ValidationError("n", "at least one job is required");
    if (spec.rho() >= 1.0) throw SaturationError("utilization >= 1 has no steady state");
}

}  // namespace

std::vector<JobRecord> simulate(const WorkloadSpec& spec, int k, std::size_t n,
                                std::uint64_t seed, double warmup_fraction,
                                std::uint64_t stream_id) {
    check_sim_args(spec, n);
    const std::size_t warm = warmup_count(n, warmup_fraction);
    std::vector<JobRecord> jobs;
    jobs.reserve(n);
    run_queue(spec, k, n, seed, stream_id,
              [&](std::size_t i, JobClass cls, double arrival, double wait, double service) {
                  JobRecord r;
                  r.index = i;
                  r.job_class = cls;
                  r.arrival = arrival;
                  r.wait = wait;
                  r.service = service;
                  r.departure = arrival + wait + service;
                  r.warmup = i < warm;
                  jobs.push_back(r);
              });
    return jobs;
}

void label_impaired(std::span<JobRecord> jobs) {
    for (std::size_t i = 1; i < jobs.size(); ++i) {
        if (!(jobs[i].arrival > jobs[i - 1].arrival)) {
            throw ValidationError("jobs", "records must be sorted by strictly increasing arrival");
        }
    }
    // Longs that arrived earlier overlap s iff their latest departure is past
    // s.arrival; a later Long overlaps iff it arrives before s.departure, and
    // only the first later Long needs checking.
    double latest_long_departure = -INFINITY;
    std::size_t next_long = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        JobRecord& job = jobs[i];
        if (job.job_class == JobClass::Long) {
            job.impaired = false;
            latest_long_departure = std::max(latest_long_departure, job.departure);
            continue;
        }
        if (next_long <= i) {
            next_long = i + 1;
            while (next_long < jobs.size() && jobs[next_long].job_class != JobClass::Long) {
                ++next_long;
            }
        }
        const bool earlier = latest_long_departure > job.arrival;
        const bool later = next_long < jobs.size() && jobs[next_long].arrival < job.departure;
        job.impaired = earlier || later;
    }
}

namespace {

struct RoundStats {
    stats::RunningMoments t;
    stats::RunningMoments w;
    std::size_t waited = 0;
    double waited_sum = 0.0;
    std::size_t shorts = 0;
    std::size_t impaired = 0;
};

RoundStats run_one_round(const WorkloadSpec& spec, int k, const RoundOptions& opts,
                         std::uint64_t round) {
    RoundStats rs;
    const std::size_t warm = warmup_count(opts.n_per_round, opts.warmup_fraction);
    auto account = [&](double wait, double service) {
        rs.t.push(wait + service);
        rs.w.push(wait);
        if (wait > 0.0) {
            ++rs.waited;
            rs.waited_sum += wait;
        }
    };
    if (opts.label) {
        std::vector<JobRecord> jobs =
            simulate(spec, k, opts.n_per_round, opts.seed, opts.warmup_fraction, round);
        label_impaired(jobs);
        for (const JobRecord& j : jobs) {
            if (j.warmup) continue;
            account(j.wait, j.service);
            if (j.job_class == JobClass::Short) {
                ++rs.shorts;
                if (j.impaired) ++rs.impaired;
            }
        }
    } else {
        run_queue(spec, k, opts.n_per_round, opts.seed, round,
                  [&](std::size_t i, JobClass, double, double wait, double service) {
                      if (i >= warm) account(wait, service);
                  });
    }
    return rs;
}

}  // namespace

SimSummary run_rounds(const WorkloadSpec& spec, int k, const RoundOptions& opts) {
    if (opts.rounds < 2) throw ValidationError("rounds", "at least 2 rounds are needed");
    check_sim_args(spec, opts.n_per_round);
    if (warmup_count(opts.n_per_round, opts.warmup_fraction) >= opts.n_per_round) {
        throw ValidationError("warmup_fraction", "warm-up leaves no retained jobs");
    }

    std::vector<RoundStats> per_round(opts.rounds);
    parallel_for(opts.rounds, [&](std::size_t r) {
        per_round[r] = run_one_round(spec, k, opts, static_cast<std::uint64_t>(r));
    });

    SimSummary s;
    s.rounds = opts.rounds;
    s.ci_level = opts.ci_level;
    s.warmup_fraction = opts.warmup_fraction;
    s.seed = opts.seed;
    stats::RunningMoments t;
    stats::RunningMoments w;
    std::size_t waited = 0;
    double waited_sum = 0.0;
    std::size_t shorts = 0;
    std::size_t impaired = 0;
    for (const RoundStats& rs : per_round) {
        t.merge(rs.t);
        w.merge(rs.w);
        waited += rs.waited;
        waited_sum += rs.waited_sum;
        shorts += rs.shorts;
        impaired += rs.impaired;
        s.round_mean_t.push_back(rs.t.mean());
        s.round_sd_t.push_back(rs.t.sd());
    }
    s.n = static_cast<std::size_t>(t.count());
    s.mean_t = t.mean();
    s.sd_t = t.sd();
    s.mean_w = w.mean();
    s.sd_w = w.sd();
    s.p_wait = static_cast<double>(waited) / static_cast<double>(s.n);
    s.cond_wait = waited > 0 ? waited_sum / static_cast<double>(waited) : 0.0;
    if (opts.label && shorts > 0) {
        s.impaired_fraction = static_cast<double>(impaired) / static_cast<double>(shorts);
    }
    s.ci_halfwidth = stats::ci_halfwidth(s.round_mean_t, opts.ci_level);
    s.sd_ci_halfwidth = stats::ci_halfwidth(s.round_sd_t, opts.ci_level);
    return s;
}

std::vector<SimSummary> run_rounds_over(const WorkloadSpec& spec, std::span<const int> k_range,
                                        const RoundOptions& opts) {
    std::vector<SimSummary> out;
    out.reserve(k_range.size());
    for (int k : k_range) out.push_back(run_rounds(spec, k, opts));
    return out;
}

OptimalServers select_simulated(std::span<const int> k_range,
                                std::span<const SimSummary> summaries) {
    if (k_range.empty()) throw ValidationError("k_range", "at least one server count is needed");
    std::vector<QueueMetrics> per_k(k_range.size());
    for (std::size_t i = 0; i < k_range.size(); ++i) {
        const SimSummary& s = summaries[i];
        QueueMetrics& m = per_k[i];
        m.k = k_range[i];
        m.mean_t = s.mean_t;
        m.sd_t = s.sd_t;
        m.var_t = s.sd_t * s.sd_t;
        m.cond_wait = s.cond_wait;
        m.p_block = s.p_wait;
    }
    std::stable_sort(per_k.begin(), per_k.end(),
                     [](const QueueMetrics& a, const QueueMetrics& b) { return a.k < b.k; });
    return select_optimal(std::move(per_k));
}

OptimalServers sim_optimal_servers(const WorkloadSpec& spec, std::span<const int> k_range,
                                   const RoundOptions& opts) {
    if (k_range.empty()) throw ValidationError("k_range", "at least one server count is needed");
    const auto summaries = run_rounds_over(spec, k_range, opts);
    return select_simulated(k_range, summaries);
}

void write_trace_csv(std::ostream& out, std::span<const JobRecord> jobs) {
    out << "index,class,arrival,wait,service,departure,impaired\n";
    char buf[256];
    for (const JobRecord& j : jobs) {
        std::snprintf(buf, sizeof buf, "%llu,%s,%.6f,%.6f,%.6f,%.6f,%d\n",
                      static_cast<unsigned long long>(j.index), to_string(j.job_class),
                      j.arrival, j.wait, j.service, j.departure, j.impaired ? 1 : 0);
        out << buf;
    }
}

}  // namespace mgk::sim
