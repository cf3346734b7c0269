#pragma once

#include "l0dag/model.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace l0dag {

enum class ModelKind { ar1, random_sparse, user };

struct SimConfig {
    int p = 0;
    int s0 = 0;
    double coef_lo = 0.5;
    double coef_hi = 1.0;
    std::optional<double> omega_fixed = 1.0;  // nullopt: draw from [omega_lo, omega_hi]
    double omega_lo = 0.5;
    double omega_hi = 1.5;
    int max_parents = -1;                     // -1: p - 1
    int n = 0;
    std::uint64_t seed = 0;
    ModelKind kind = ModelKind::random_sparse;
    double beta0 = 0.5;                       // ar1 only

    void validate() const;
};

/// Chain p -> p-1 -> ... -> 1 with weight beta0 and Omega = diag(1 - beta0^2, ..., 1 - beta0^2, 1),
/// so every variable has unit variance and Sigma_ij = beta0^|i-j|.
DagModel ar1_model(int p, double beta0);

/// Uniform random ordering, then s0 distinct edges drawn among the pairs it allows
/// (under the in-degree cap), weights uniform on +-[lo, hi].
DagModel random_sparse_dag(const SimConfig& config);

/// Rows are i.i.d. N(0, covariance_of(model)). Noise entry (i, j) is draw
/// i * p + j of the CounterRng stream (seed, 1).
Dataset sample_sem(const DagModel& model, int n, std::uint64_t seed);

/// Sigma_n = X^T X / n, or centered columns divided by n.
CovarianceMatrix sample_covariance(const Dataset& data, bool center = false);

}  // namespace l0dag
