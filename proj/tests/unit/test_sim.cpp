#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "mgk/analytic.hpp"
#include "mgk/error.hpp"
#include "mgk/sim.hpp"
#include "mgk/stats.hpp"

using namespace mgk;
using namespace mgk::sim;

namespace {

JobRecord job(JobClass c, double arrival, double departure) {
    JobRecord r;
    r.job_class = c;
    r.arrival = arrival;
    r.service = departure - arrival;
    r.departure = departure;
    return r;
}

// O(n^2) reference for the overlap rule.
std::vector<bool> brute_force_impaired(const std::vector<JobRecord>& jobs) {
    std::vector<bool> out(jobs.size(), false);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (jobs[i].job_class != JobClass::Short) continue;
        for (const auto& l : jobs) {
            if (l.job_class != JobClass::Long) continue;
            if (std::max(l.arrival, jobs[i].arrival) < std::min(l.departure, jobs[i].departure)) {
                out[i] = true;
                break;
            }
        }
    }
    return out;
}

}  // namespace

TEST_CASE("Kiefer-Wolfowitz hand trace") {
    WorkloadVector v(2);
    CHECK(v.admit(5, 1) == 0.0);
    CHECK(v.values()[0] == 0.0);
    CHECK(v.values()[1] == 4.0);
    CHECK(v.admit(5, 1) == 0.0);
    CHECK(v.values()[0] == 3.0);
    CHECK(v.values()[1] == 4.0);
    CHECK(v.admit(5, 1) == 3.0);

    auto step = kw_step(WorkloadVector(2), 5, 1);
    CHECK(step.wait == 0.0);
    CHECK(step.next.values()[1] == 4.0);
    auto step2 = kw_step(step.next, 5, 1);
    CHECK(step2.next.values()[0] == 3.0);
    CHECK(step2.next.values()[1] == 4.0);
    CHECK(kw_step(step2.next, 5, 1).wait == 3.0);
}

TEST_CASE("single server reduces to Lindley") {
    stats::RngStream s(8, 0);
    WorkloadVector v(1);
    double w = 0.0;
    for (int i = 0; i < 10000; ++i) {
        double service = 10 * s.uniform_open0(), tau = 9 * s.uniform_open0();
        double got = v.admit(service, tau);
        REQUIRE(got == doctest::Approx(w).epsilon(1e-12));
        w = std::max(0.0, w + service - tau);
    }
}

TEST_CASE("workload vector stays sorted and nonnegative") {
    stats::RngStream s(21, 0);
    WorkloadVector v(7);
    for (int i = 0; i < 20000; ++i) {
        double wait = v.admit(50 * s.uniform_open0(), 7 * s.uniform_open0());
        REQUIRE(wait >= 0.0);
        auto vals = v.values();
        REQUIRE(std::is_sorted(vals.begin(), vals.end()));
        REQUIRE(vals.front() >= 0.0);
    }
    CHECK_THROWS_AS(WorkloadVector(std::vector<double>{2.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(WorkloadVector(std::vector<double>{-1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(WorkloadVector(std::vector<double>{}), ValidationError);
    CHECK_THROWS_AS(WorkloadVector(0), ValidationError);
}

TEST_CASE("simulated records satisfy the record invariants") {
    auto w = workload_from_ratio(0.8, 0.05, 0.7);
    for (int k : {1, 3, 12}) {
        auto jobs = simulate(w, k, 20000, 4, 0.01);
        REQUIRE(jobs.size() == 20000);
        double prev_arrival = -1.0, prev_start = -1.0;
        std::size_t warm = 0;
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            const auto& j = jobs[i];
            REQUIRE(j.index == i);
            REQUIRE(j.wait >= 0.0);
            REQUIRE(j.arrival > prev_arrival);
            REQUIRE(j.departure == j.arrival + j.wait + j.service);
            double expect = k * (j.job_class == JobClass::Short ? w.ex_short() : w.ex_long());
            REQUIRE(j.service == doctest::Approx(expect).epsilon(1e-15));
            // FIFO: service starts in arrival order.
            REQUIRE(j.arrival + j.wait >= prev_start - 1e-9);
            prev_arrival = j.arrival;
            prev_start = j.arrival + j.wait;
            warm += j.warmup;
            REQUIRE_FALSE(j.impaired);
        }
        CHECK(warm == 200);
    }
}

TEST_CASE("simulate is deterministic in its arguments") {
    auto w = workload_from_ratio(0.9, 0.005, 0.6);
    auto a = simulate(w, 4, 5000, 17);
    auto b = simulate(w, 4, 5000, 17);
    auto c = simulate(w, 4, 5000, 18);
    auto d = simulate(w, 4, 5000, 17, 0.01, 1);
    bool same = true, diff_seed = false, diff_stream = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        same &= a[i].arrival == b[i].arrival && a[i].wait == b[i].wait && a[i].job_class == b[i].job_class;
        diff_seed |= a[i].arrival != c[i].arrival;
        diff_stream |= a[i].arrival != d[i].arrival;
    }
    CHECK(same);
    CHECK(diff_seed);
    CHECK(diff_stream);
    // Arrivals and classes do not depend on k (common random numbers).
    auto e = simulate(w, 9, 5000, 17);
    bool crn = true;
    for (std::size_t i = 0; i < a.size(); ++i) crn &= a[i].arrival == e[i].arrival && a[i].job_class == e[i].job_class;
    CHECK(crn);
}

TEST_CASE("warm-up count") {
    CHECK(warmup_count(1'000'000, 0.01) == 10'000);
    CHECK(warmup_count(101, 0.01) == 2);
    CHECK(warmup_count(50, 0.0) == 0);
}

TEST_CASE("empty-system limit") {
    auto w = make_workload(1.0, 54.13, 54.13, 1e-7);
    auto jobs = simulate(w, 1, 2000, 3);
    for (const auto& j : jobs) CHECK(j.wait == 0.0);
    auto s = run_rounds(w, 1, {5, 2000, 3, 0.01, 0.95, true});
    CHECK(s.mean_t == doctest::Approx(54.13));
    CHECK(s.ci_halfwidth == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("many servers decouple all jobs") {
    auto w = workload_from_ratio(0.9, 0.05, 0.5);
    auto jobs = simulate(w, 400, 20000, 2);
    for (const auto& j : jobs) {
        REQUIRE(j.wait == 0.0);
        double expect = 400 * (j.job_class == JobClass::Short ? w.ex_short() : w.ex_long());
        REQUIRE(j.departure - j.arrival == doctest::Approx(expect));
    }
}

TEST_CASE("label_impaired boundary cases") {
    std::vector<JobRecord> jobs{job(JobClass::Long, 0, 100), job(JobClass::Short, 50, 60),
                                job(JobClass::Short, 100, 110)};
    label_impaired(jobs);
    CHECK(jobs[1].impaired);
    CHECK_FALSE(jobs[2].impaired);
    CHECK_FALSE(jobs[0].impaired);

    // A later long arriving exactly at the short's departure does not impair it.
    std::vector<JobRecord> later{job(JobClass::Short, 0, 10), job(JobClass::Long, 10, 50),
                                 job(JobClass::Short, 11, 12), job(JobClass::Short, 60, 70),
                                 job(JobClass::Long, 69.5, 80)};
    label_impaired(later);
    CHECK_FALSE(later[0].impaired);
    CHECK(later[2].impaired);
    CHECK(later[3].impaired);

    std::vector<JobRecord> shorts{job(JobClass::Short, 0, 10), job(JobClass::Short, 1, 12)};
    label_impaired(shorts);
    CHECK_FALSE(shorts[0].impaired);
    CHECK_FALSE(shorts[1].impaired);

    std::vector<JobRecord> unsorted{job(JobClass::Short, 5, 10), job(JobClass::Short, 1, 12)};
    CHECK_THROWS_AS(label_impaired(unsorted), ValidationError);
}

TEST_CASE("label_impaired matches the brute-force overlap rule") {
    for (auto [alpha, ratio, k] : {std::tuple{0.9, 0.05, 1}, std::tuple{0.8, 0.005, 6}, std::tuple{0.99, 0.0005, 40}}) {
        auto jobs = simulate(workload_from_ratio(alpha, ratio, 0.6), k, 3000, 12);
        auto expect = brute_force_impaired(jobs);
        label_impaired(jobs);
        for (std::size_t i = 0; i < jobs.size(); ++i) REQUIRE(jobs[i].impaired == expect[i]);
    }
}

TEST_CASE("K=1 waits converge to Pollaczek-Khinchine") {
    for (auto [alpha, ratio, rho] : {std::tuple{0.6, 0.05, 0.5}, std::tuple{0.8, 0.05, 0.8}}) {
        auto w = workload_from_ratio(alpha, ratio, rho);
        auto s = run_rounds(w, 1, {5, 1'000'000, 1, 0.01, 0.95, false});
        auto pk = analytic::mg1_exact(w);
        CHECK(s.mean_w == doctest::Approx(pk.mean_w).epsilon(0.01));
        CHECK(s.p_wait == doctest::Approx(rho).epsilon(0.01));
        CHECK(s.n == 5 * 990'000);
    }
}

TEST_CASE("run_rounds summary") {
    auto w = workload_from_ratio(0.8, 0.05, 0.6);
    RoundOptions o{4, 20000, 5, 0.01, 0.95, true};
    auto s = run_rounds(w, 2, o);
    CHECK(s.rounds == 4);
    CHECK(s.round_mean_t.size() == 4);
    CHECK(s.sd_t >= 0.0);
    CHECK(s.p_wait >= 0.0);
    CHECK(s.p_wait <= 1.0);
    CHECK(s.ci_halfwidth >= 0.0);
    CHECK(s.impaired_fraction.has_value());
    CHECK(s.seed == 5);
    auto again = run_rounds(w, 2, o);
    CHECK(again.mean_t == s.mean_t);
    CHECK(again.sd_t == s.sd_t);
    CHECK(again.ci_halfwidth == s.ci_halfwidth);
    o.rounds = 1;
    CHECK_THROWS_AS(run_rounds(w, 2, o), ValidationError);

    o.rounds = 3;
    o.label = false;
    CHECK_FALSE(run_rounds(w, 2, o).impaired_fraction.has_value());
}

TEST_CASE("more samples per round shrink the confidence interval") {
    auto w = workload_from_ratio(0.8, 0.05, 0.5);
    double small = 0.0, large = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        small += run_rounds(w, 2, {5, 5000, seed, 0.01, 0.95, false}).ci_halfwidth;
        large += run_rounds(w, 2, {5, 10000, seed + 1000, 0.01, 0.95, false}).ci_halfwidth;
    }
    CHECK(large < small);
}

TEST_CASE("simulated argmins") {
    auto w = workload_from_ratio(0.6, 0.05, 0.5);
    std::vector<int> one{1};
    auto o = sim_optimal_servers(w, one, {2, 5000, 1, 0.01, 0.95, false});
    CHECK(o.k_mu == 1);
    CHECK(o.k_sigma == 1);
    std::vector<int> ks{1, 2, 3};
    auto summaries = run_rounds_over(w, ks, {2, 5000, 1, 0.01, 0.95, false});
    auto sel = select_simulated(ks, summaries);
    CHECK(sel.per_k.size() == 3);
    CHECK(sel.mu_star == std::min({summaries[0].mean_t, summaries[1].mean_t, summaries[2].mean_t}));
}

TEST_CASE("trace CSV") {
    std::vector<JobRecord> jobs{job(JobClass::Long, 0, 100), job(JobClass::Short, 50, 60)};
    jobs[1].index = 1;
    label_impaired(jobs);
    std::ostringstream out;
    write_trace_csv(out, jobs);
    CHECK(out.str() ==
          "index,class,arrival,wait,service,departure,impaired\n"
          "0,long,0.000000,0.000000,100.000000,100.000000,0\n"
          "1,short,50.000000,0.000000,10.000000,60.000000,1\n");
}
