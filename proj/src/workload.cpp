#include "mgk/workload.hpp"

#include <cmath>
#include <string>

#include "mgk/error.hpp"

namespace mgk {

namespace {

void check_classes(double alpha, double ex_short, double ex_long) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ValidationError("alpha", "must lie in [0, 1], got " + std::to_string(alpha));
    }
    if (!(ex_short > 0.0) || !std::isfinite(ex_short)) {
        throw ValidationError("ex_short", "must be a positive finite time");
    }
    if (!(ex_long >= ex_short) || !std::isfinite(ex_long)) {
        throw ValidationError("ex_long", "must be finite and at least ex_short");
    }
}

void check_rho(double rho, const char* field) {
    if (!(rho > 0.0 && rho < 1.0)) {
        throw ValidationError(field, "utilization must lie in (0, 1), got " + std::to_string(rho));
    }
}

double two_point_mean(double alpha, double a, double b) {
    return alpha * a + (1.0 - alpha) * b;
}

}  // namespace

void WorkloadSpec::derive() {
    mean_service_ = two_point_mean(alpha_, ex_short_, ex_long_);
    lambda_short_ = alpha_ * lambda_;
    lambda_long_ = lambda_ - lambda_short_;
    rho_short_ = lambda_short_ * ex_short_;
    rho_long_ = lambda_long_ * ex_long_;
}

WorkloadSpec make_workload(double alpha, double ex_short, double ex_long, double rho) {
    check_classes(alpha, ex_short, ex_long);
    check_rho(rho, "rho");
    WorkloadSpec w;
    w.alpha_ = alpha;
    w.ex_short_ = ex_short;
    w.ex_long_ = ex_long;
    w.rho_ = rho;
    w.lambda_ = rho / two_point_mean(alpha, ex_short, ex_long);
    w.derive();
    return w;
}

WorkloadSpec make_workload_from_rate(double alpha, double ex_short, double ex_long,
                                     double lambda) {
    check_classes(alpha, ex_short, ex_long);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw ValidationError("lambda", "arrival rate must be positive");
    }
    WorkloadSpec w;
    w.alpha_ = alpha;
    w.ex_short_ = ex_short;
    w.ex_long_ = ex_long;
    w.lambda_ = lambda;
    w.rho_ = lambda * two_point_mean(alpha, ex_short, ex_long);
    check_rho(w.rho_, "lambda");
    w.derive();
    return w;
}

WorkloadSpec make_workload(double alpha, double ex_short, double ex_long,
                           std::optional<double> rho, std::optional<double> lambda) {
    if (rho && lambda) {
        WorkloadSpec w = make_workload(alpha, ex_short, ex_long, *rho);
        if (std::abs(w.lambda_total() - *lambda) > 1e-9 * std::abs(w.lambda_total())) {
            throw ValidationError("lambda", "inconsistent with rho (rho / E(X) = " +
                                                std::to_string(w.lambda_total()) + ")");
        }
        return w;
    }
    if (rho) return make_workload(alpha, ex_short, ex_long, *rho);
    if (lambda) return make_workload_from_rate(alpha, ex_short, ex_long, *lambda);
    throw ValidationError("rho", "either rho or lambda is required");
}

WorkloadSpec workload_from_ratio(double alpha, double ratio, double rho, double ex_short) {
    if (!(ratio > 0.0 && ratio <= 1.0)) {
        throw ValidationError("ratio", "ex_short/ex_long must lie in (0, 1]");
    }
    return make_workload(alpha, ex_short, ex_short / ratio, rho);
}

MomentSet moments(const WorkloadSpec& spec) {
    const double a = spec.alpha();
    const double s = spec.ex_short();
    const double l = spec.ex_long();
    MomentSet m;
    m.m1 = two_point_mean(a, s, l);
    m.m2 = two_point_mean(a, s * s, l * l);
    m.m3 = two_point_mean(a, s * s * s, l * l * l);
    // alpha(1-alpha)(l-s)^2 equals m2 - m1^2 without the cancellation.
    m.var = a * (1.0 - a) * (l - s) * (l - s);
    m.residual_mean = m.m2 / (2.0 * m.m1);
    return m;
}

ServerConfig server_config(const WorkloadSpec& spec, int k) {
    if (k < 1) throw ValidationError("k", "number of servers must be at least 1");
    ServerConfig c;
    c.k = k;
    c.per_server_service_scale = static_cast<double>(k);
    c.mu_k = 1.0 / (static_cast<double>(k) * spec.mean_service());
    return c;
}

}  // namespace mgk
