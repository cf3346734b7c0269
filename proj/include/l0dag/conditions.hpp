#pragma once

// Checkers for the identifiability and sparsity assumptions behind the
// l0-penalized estimator, the closed-form constants of the finite-sample
// bounds, and the correlation-graph decomposition into connected components.
//
// Checks that quantify over all orderings enumerate p! permutations when
// p <= 8 and otherwise sample 20000 orderings with a fixed seed; a sampled
// pass only means that no counterexample was found. Empirical covariances give
// advisory reports, population covariances certifying ones.

#include "l0dag/model.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace l0dag {

inline constexpr int kMaxExhaustiveConditions = 8;
inline constexpr std::uint64_t kSampledOrderings = 20000;
inline constexpr std::uint64_t kSampledOrderingsSeed = 20130301;

struct ConditionResult {
    int id = 0;                    // 1..7
    std::string name;
    bool satisfied = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string enumeration;       // "n/a", "exhaustive", "sampled(k)"
    std::string detail;
    std::optional<Ordering> worst_ordering;
};

struct ConditionReport {
    std::vector<ConditionResult> results;
    std::map<std::string, double> constants;  // sigma0_sq, lambda_min_sq, alpha_tilde, eta0, ...
    bool advisory = false;                    // true for empirical inputs

    const ConditionResult* find(int id) const;
    void merge(const ConditionReport& other);
};

/// Conditions 1 and 2: max_j Sigma_jj <= sigma0_sq and Lambda_min^2 > 1e-12.
ConditionReport check_basic(const CovarianceMatrix& sigma, double sigma0_sq);

/// As above for covariance_of(model), plus the determinant identity
/// det Sigma = prod_j omega_j and the equivalence Lambda_min^2 > 0 iff min omega > 0.
ConditionReport check_basic(const DagModel& model, double sigma0_sq);

/// Condition 4: max over orderings of max_j s_j(pi) <= alpha_tilde n / log p.
ConditionReport check_degree(const CovarianceMatrix& sigma, int n, double alpha_tilde,
                             std::optional<double> zero_tol = std::nullopt);

/// Condition 5: for every ordering at least (1 - eta1) s(pi) coefficients exceed
/// sqrt(log p / n) (sqrt(p / s0) v 1) / eta0. Reports the minimum fraction.
ConditionReport check_beta_min(const CovarianceMatrix& sigma, int n, int s0, double eta0, double eta1,
                               std::optional<double> zero_tol = std::nullopt);

/// Conditions 6 and 7 under unit noise variances. Orderings with Omega(pi) = I
/// (entrywise within 1e-9) are excluded from Condition 6.
ConditionReport check_omega_min(const CovarianceMatrix& sigma, double eta_omega, int n, double alpha_star);

struct TheoremConstants {
    double sigma0 = 0, lambda_min = 0, t = 0;
    int p = 0, s0 = 0, n = 0;
    double c1 = 0, c2 = 0, c = 0, K0 = 0;
    double delta1 = 0, delta2 = 0, delta3 = 0, delta_B = 0, delta_W = 0, delta_s = 0, delta_eta = 0;
    double lambda_sq = 0, lambda0_sq = 0, lambda1_sq = 0, lambda2_sq = 0, lambda3_sq = 0, lambda_tilde_sq = 0;
    double eta0_sq = 0, eta1 = 0, eta2_sq = 0;
    double alpha = 0, alpha_tilde = 0, alpha0 = 0;

    /// Field name -> value, in a fixed order.
    std::vector<std::pair<std::string, double>> fields() const;
};

/// Closed-form constants of the explicit finite-sample theorem; t defaults to log p.
TheoremConstants theorem_constants(double sigma0, double lambda_min, int p, int s0, int n,
                                   std::optional<double> t = std::nullopt);

/// alpha_tilde = sigma0^2 eta0^2 / (Lambda_min^2 (1 - eta1)); eta0 is passed unsquared.
double cond_edges_alpha(double sigma0_sq, double lambda_min_sq, double eta0, double eta1);

/// sqrt(log p / n) / eta_c.
double default_component_threshold(int p, int n, double eta_c);

/// Components of {j ~ k : |corr(j, k)| > threshold}, each sorted, ordered by smallest member.
std::vector<std::vector<int>> connected_components(const CovarianceMatrix& sigma_hat, double threshold);

}  // namespace l0dag
