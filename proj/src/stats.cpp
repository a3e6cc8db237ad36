#include "mgk/stats.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <limits>

#include "mgk/error.hpp"

namespace mgk::stats {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id) {
    std::uint64_t s = seed;
    std::uint64_t mixed = splitmix64(s);
    s = mixed ^ (stream_id * 0xD1B54A32D192ED03ULL);
    return splitmix64(s);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(derive_seed(seed, stream_id)) {}

double RngStream::uniform_open0() {
    // (k + 1) / 2^53 for k in [0, 2^53): never 0, reaches 1 exactly.
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t RngStream::bounded(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        std::uint64_t r = engine_();
        if (r >= threshold) return r % bound;
    }
}

RngStream RngStream::split(std::uint64_t child) const {
    std::uint64_t s = derive_seed(seed_, stream_id_);
    return RngStream(splitmix64(s), child);
}

double exp_from_uniform(double u, double rate) {
    return -std::log(u) / rate;
}

double exp_variate(RngStream& stream, double rate) {
    return exp_from_uniform(stream.uniform_open0(), rate);
}

void RunningMoments::push(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
}

void RunningMoments::merge(const RunningMoments& other) {
    if (other.n_ == 0) return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double n = na + nb;
    const double delta = other.mean_ - mean_;
    mean_ += delta * nb / n;
    m2_ += other.m2_ + delta * delta * na * nb / n;
    n_ += other.n_;
}

double RunningMoments::variance() const noexcept {
    if (n_ < 2) return 0.0;
    return std::max(0.0, m2_ / static_cast<double>(n_ - 1));
}

double RunningMoments::sd() const noexcept { return std::sqrt(variance()); }

double student_t_sf(double t, double dof) {
    if (!(dof > 0.0)) throw ValidationError("dof", "must be positive");
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return 0.0;
    if (t == 0.0) return 1.0;
    const double t2 = t * t;
    // P(|T| > t) = I_x(dof/2, 1/2) with x = dof / (dof + t^2). For large t
    // the complement form keeps precision when x is close to 0 or 1.
    if (t2 < dof) {
        const double y = t2 / (dof + t2);
        return boost::math::ibetac(0.5, dof / 2.0, y);
    }
    const double x = dof / (dof + t2);
    return boost::math::ibeta(dof / 2.0, 0.5, x);
}

double student_t_critical(double level, double dof) {
    if (!(level > 0.0 && level < 1.0)) throw ValidationError("level", "must lie in (0, 1)");
    const double target = 1.0 - level;
    double lo = 0.0;
    double hi = 1.0;
    while (student_t_sf(hi, dof) > target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) break;
    }
    while (hi - lo > 1e-10 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_sf(mid, dof) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double ci_halfwidth(std::span<const double> round_means, double level) {
    if (round_means.size() < 2) {
        throw ValidationError("rounds", "confidence interval needs at least 2 rounds");
    }
    RunningMoments m;
    for (double x : round_means) m.push(x);
    const double r = static_cast<double>(round_means.size());
    const double sd = m.sd();
    if (sd == 0.0) return 0.0;
    return student_t_critical(level, r - 1.0) * sd / std::sqrt(r);
}

}  // namespace mgk::stats
