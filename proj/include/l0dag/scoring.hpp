#pragma once

// Decomposable penalized local scores.
//
// Profiling the noise variance out of l_n gives, per node, 1 + log RSS_n(j|S) + lambda2 |S|
// (profile mode). With all noise variances fixed at one the per-node term is
// RSS_n(j|S) + lambda2 |S| (equal-variance mode).

#include "l0dag/model.hpp"

#include <bit>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>

namespace l0dag {

enum class ScoreMode { profile, equal_variance };

std::string_view to_string(ScoreMode mode);
ScoreMode parse_score_mode(std::string_view text);

using NodeMask = std::uint64_t;

inline int mask_size(NodeMask m) { return std::popcount(m); }
NodeMask to_mask(std::span<const int> nodes);
std::vector<int> from_mask(NodeMask m);

/// RSS_n(j|S) = Sigma_jj - Sigma_jS Sigma_SS^{-1} Sigma_Sj, clipped at 0 from above -1e-10.
/// A ridge of 1e-10 * trace(Sigma_SS)/|S| is added only if the plain Cholesky fails.
double residual_variance(int j, std::span<const int> S, const CovarianceMatrix& sigma_hat);

/// Least-squares coefficients (Sigma_SS)^{-1} Sigma_Sj, same regularization as above.
Eigen::VectorXd regression_coefficients(int j, std::span<const int> S, const CovarianceMatrix& sigma_hat);

/// 1e-12 * max_j Sigma_jj.
double variance_floor(const CovarianceMatrix& sigma_hat);

/// 1 + log max(RSS, floor) + lambda2 |S|; warns when the floor is hit.
double local_score_profile(int j, std::span<const int> S, const CovarianceMatrix& sigma_hat, double lambda2);

/// RSS + lambda2 |S|.
double local_score_equal_variance(int j, std::span<const int> S, const CovarianceMatrix& sigma_hat, double lambda2);

double local_score(ScoreMode mode, int j, std::span<const int> S, const CovarianceMatrix& sigma_hat,
                   double lambda2);

/// min(floor(alpha n / log max(p, 2)), n - 2, p - 1), at least 0.
int default_max_parents(int n, int p, double alpha);

/// BIC-style penalty log n / n.
double bic_lambda2(int n);

inline constexpr int kMaxTableNodes = 25;

/// Best penalized local score over every parent set S within a candidate set C,
/// |S| <= max_parents, for every node j and every C subset of V \ {j}.
class LocalScoreTable {
public:
    /// Throws InvalidInput for p > 25 (use greedy search instead).
    static LocalScoreTable build(const CovarianceMatrix& sigma_hat, double lambda2, ScoreMode mode,
                                 int max_parents);

    int p() const { return sigma_.p(); }
    ScoreMode mode() const { return mode_; }
    double lambda2() const { return lambda2_; }
    int max_parents() const { return max_parents_; }
    std::optional<int> n() const { return sigma_.n(); }
    const CovarianceMatrix& covariance() const { return sigma_; }

    /// Candidate set given as a full p-bit mask; bit j must be clear.
    double best_score(int j, NodeMask candidates) const;
    NodeMask best_parents(int j, NodeMask candidates) const;

    /// Phase-1 local score of exactly S (recomputed on demand).
    double local(int j, NodeMask S) const;

    /// One JSON object per (j, C): {"j", "C", "score", "S"}; nodes 1-based, bit k-1 of C is node k.
    void write_jsonl(std::ostream& os) const;

private:
    LocalScoreTable(CovarianceMatrix sigma, double lambda2, ScoreMode mode, int max_parents);
    std::uint32_t compress(int j, NodeMask m) const;
    NodeMask expand(int j, std::uint32_t c) const;

    CovarianceMatrix sigma_;
    double lambda2_;
    ScoreMode mode_;
    int max_parents_;
    std::vector<std::vector<double>> best_;          // [j][compressed C]
    std::vector<std::vector<std::uint32_t>> arg_;    // [j][compressed C] -> compressed S
};

/// Orders (score, |S|, S) with ties broken toward smaller sets, then the set
/// containing the smallest differing node.
bool better_parent_set(double score_a, NodeMask a, double score_b, NodeMask b);

}  // namespace l0dag
