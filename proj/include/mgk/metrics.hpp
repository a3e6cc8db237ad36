#pragma once

#include <vector>

namespace mgk {

/// Response-time metrics for one server count.
struct QueueMetrics {
    int k = 1;
    double mean_t = 0.0;     ///< E(T), ms
    double var_t = 0.0;      ///< V(T), ms^2
    double sd_t = 0.0;       ///< sigma(T), ms
    double cond_wait = 0.0;  ///< E(W | W > 0), ms
    double p_block = 0.0;    ///< P(W > 0)
};

/// Server counts minimizing mean and standard deviation of response time.
struct OptimalServers {
    int k_mu = 1;
    int k_sigma = 1;
    double mu_star = 0.0;
    double sigma_star = 0.0;
    std::vector<QueueMetrics> per_k;  ///< ascending k

    const QueueMetrics& at(int k) const;
};

/// Argmins over `per_k`; a later k replaces the incumbent only when it is
/// lower by more than 1e-12 relative, so ties resolve to the smaller k.
OptimalServers select_optimal(std::vector<QueueMetrics> per_k);

}  // namespace mgk
