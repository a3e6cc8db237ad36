#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace mgk::stats {

/// One step of the SplitMix64 sequence; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for stream `stream_id` of a base `seed`. Two SplitMix64 rounds over
/// the pair so that neighbouring seeds and neighbouring ids decorrelate.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id);

/// Seedable random stream backed by std::mt19937_64 (period 2^19937 - 1,
/// output sequence fixed by the C++ standard). All variates are derived from
/// raw 64-bit outputs here, never through <random> distributions, so the
/// sequences are identical across standard library implementations.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on (0, 1], 53-bit resolution.
    double uniform_open0();

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t bounded(std::uint64_t bound);

    bool bernoulli(double p) { return uniform_open0() <= p; }

    /// Independent child stream; deterministic in (seed, stream_id, child).
    RngStream split(std::uint64_t child) const;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

/// Inverse-CDF exponential: -ln(u)/rate. u = 1 gives exactly 0.
double exp_from_uniform(double u, double rate);

/// Exponential variate with the given rate (> 0).
double exp_variate(RngStream& stream, double rate);

/// Welford accumulator; mergeable for parallel reduction.
class RunningMoments {
public:
    void push(double x);
    void merge(const RunningMoments& other);

    std::uint64_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    /// Sum of squared deviations from the mean.
    double m2() const noexcept { return m2_; }
    /// Unbiased sample variance; 0 when count() < 2.
    double variance() const noexcept;
    double sd() const noexcept;

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Two-sided survival probability P(|T| > |t|) for Student's t with `dof`
/// degrees of freedom, via the regularized incomplete beta function.
double student_t_sf(double t, double dof);

/// Two-sided critical value: the t > 0 with student_t_sf(t, dof) = 1 - level.
/// Bisection on student_t_sf to 1e-10.
double student_t_critical(double level, double dof);

/// t_{(1+level)/2, r-1} * sd(round_means) / sqrt(r). Needs r >= 2.
double ci_halfwidth(std::span<const double> round_means, double level = 0.95);

}  // namespace mgk::stats
