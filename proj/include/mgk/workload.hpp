#pragma once

#include <optional>

namespace mgk {

/// Short-job service time measured in the reference lab setup (ms). Used when
/// a workload is given as a short/long ratio instead of absolute times.
inline constexpr double kReferenceShortServiceMs = 54.13;

/// Bimodal (regular/attack) workload offered to a central FIFO queue.
///
/// Service times are deterministic per class: a fraction `alpha` of arrivals
/// are short jobs needing `ex_short` ms on the single-server reference system,
/// the rest are long jobs needing `ex_long` ms. Arrivals are Poisson with rate
/// `lambda_total` (jobs/ms) and the single-server utilization is `rho`.
class WorkloadSpec {
public:
    double alpha() const noexcept { return alpha_; }
    double ex_short() const noexcept { return ex_short_; }
    double ex_long() const noexcept { return ex_long_; }
    double rho() const noexcept { return rho_; }
    double lambda_total() const noexcept { return lambda_; }
    double lambda_short() const noexcept { return lambda_short_; }
    double lambda_long() const noexcept { return lambda_long_; }
    double rho_short() const noexcept { return rho_short_; }
    double rho_long() const noexcept { return rho_long_; }
    /// E(X) on the single-server system.
    double mean_service() const noexcept { return mean_service_; }
    double ratio() const noexcept { return ex_short_ / ex_long_; }

    friend WorkloadSpec make_workload(double, double, double, double);
    friend WorkloadSpec make_workload_from_rate(double, double, double, double);

private:
    WorkloadSpec() = default;
    void derive();

    double alpha_ = 1.0;
    double ex_short_ = 1.0;
    double ex_long_ = 1.0;
    double rho_ = 0.0;
    double lambda_ = 0.0;
    double lambda_short_ = 0.0;
    double lambda_long_ = 0.0;
    double rho_short_ = 0.0;
    double rho_long_ = 0.0;
    double mean_service_ = 1.0;
};

/// Throws ValidationError naming the offending field when
/// alpha is outside [0,1], ex_short is not in (0, ex_long], or rho is not in (0,1).
WorkloadSpec make_workload(double alpha, double ex_short, double ex_long, double rho);

/// Same, parameterized by total arrival rate (jobs/ms); rho = lambda * E(X).
WorkloadSpec make_workload_from_rate(double alpha, double ex_short, double ex_long,
                                     double lambda);

/// Accepts rho, lambda or both. When both are given they must agree within
/// 1e-9 relative.
WorkloadSpec make_workload(double alpha, double ex_short, double ex_long,
                           std::optional<double> rho, std::optional<double> lambda);

/// ex_long = ex_short / ratio.
WorkloadSpec workload_from_ratio(double alpha, double ratio, double rho,
                                 double ex_short = kReferenceShortServiceMs);

/// Raw moments of the two-point service time on the single-server system.
struct MomentSet {
    double m1 = 0.0;  ///< E(X), ms
    double m2 = 0.0;  ///< E(X^2), ms^2
    double m3 = 0.0;  ///< E(X^3), ms^3
    double var = 0.0;  ///< V(X)
    double residual_mean = 0.0;  ///< E(X_r) = E(X^2) / (2 E(X))
};

MomentSet moments(const WorkloadSpec& spec);

/// Fixed total capacity split evenly over k servers: each server works at
/// mu/k, so a job of class c occupies a server for k * E(X_c).
struct ServerConfig {
    int k = 1;
    double per_server_service_scale = 1.0;
    double mu_k = 0.0;  ///< jobs/ms per server

    double short_service(const WorkloadSpec& spec) const {
        return per_server_service_scale * spec.ex_short();
    }
    double long_service(const WorkloadSpec& spec) const {
        return per_server_service_scale * spec.ex_long();
    }
};

ServerConfig server_config(const WorkloadSpec& spec, int k);

}  // namespace mgk
