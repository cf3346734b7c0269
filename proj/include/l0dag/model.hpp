#pragma once

// Gaussian DAG / linear SEM data model and the Gaussian minus log-likelihood.
//
// Conventions shared by the whole library:
//  * Node indices are 0-based in C++ (the JSON/CSV interfaces are 1-based).
//  * B(k, j) != 0 encodes the directed edge k -> j; column j holds the regression
//    of X_j on its parents.
//  * An Ordering pi = (pi_1, ..., pi_p) lists nodes so that the parents of pi_k are
//    among pi_{k+1}, ..., pi_p. Gram-Schmidt starts with pi_p; pi_1 is a sink.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace l0dag {

using ParentSets = std::vector<std::vector<int>>;

/// A permutation of {0, ..., p-1}; see the ordering convention above.
class Ordering {
public:
    Ordering() = default;
    explicit Ordering(std::vector<int> order);

    static Ordering identity(int p);

    int size() const { return static_cast<int>(order_.size()); }
    int operator[](int k) const { return order_[static_cast<std::size_t>(k)]; }
    const std::vector<int>& values() const { return order_; }

    /// position()[node] = k such that (*this)[k] == node.
    std::vector<int> position() const;

    /// True when every parent of every node sits later in the ordering.
    bool is_compatible_with(const ParentSets& parents) const;

    friend bool operator==(const Ordering&, const Ordering&) = default;
    friend auto operator<=>(const Ordering&, const Ordering&) = default;

private:
    std::vector<int> order_;
};

struct DagModel {
    Eigen::MatrixXd B;      // p x p edge weights, zero diagonal, acyclic support
    Eigen::VectorXd omega;  // noise variances, strictly positive

    DagModel() = default;
    DagModel(Eigen::MatrixXd weights, Eigen::VectorXd noise_variances);

    static DagModel empty(const Eigen::VectorXd& noise_variances);

    int p() const { return static_cast<int>(omega.size()); }
    int edge_count() const;
    ParentSets parents() const;

    /// Throws InvalidInput on shape, diagonal, acyclicity or non-positive variance violations.
    void validate() const;
};

enum class CovarianceKind { population, empirical };

class CovarianceMatrix {
public:
    CovarianceMatrix() = default;

    /// Symmetrizes (A + A^T)/2; asymmetry above 1e-8 warns, above 1e-4 throws.
    static CovarianceMatrix population(const Eigen::MatrixXd& sigma);
    static CovarianceMatrix empirical(const Eigen::MatrixXd& sigma, int n);

    const Eigen::MatrixXd& matrix() const { return sigma_; }
    int p() const { return static_cast<int>(sigma_.rows()); }
    CovarianceKind kind() const { return kind_; }
    bool is_population() const { return kind_ == CovarianceKind::population; }
    std::optional<int> n() const { return n_; }

    double operator()(int i, int j) const { return sigma_(i, j); }

    /// Smallest eigenvalue (Lambda_min^2).
    double lambda_min_sq() const;
    /// Largest diagonal entry (sigma_0^2 when used as the Condition 1 constant).
    double max_variance() const;

    CovarianceMatrix permuted(std::span<const int> relabel) const;

private:
    CovarianceMatrix(Eigen::MatrixXd sigma, CovarianceKind kind, std::optional<int> n);

    Eigen::MatrixXd sigma_;
    CovarianceKind kind_ = CovarianceKind::population;
    std::optional<int> n_;
};

class PrecisionMatrix {
public:
    PrecisionMatrix() = default;
    explicit PrecisionMatrix(Eigen::MatrixXd theta);

    const Eigen::MatrixXd& matrix() const { return theta_; }
    int p() const { return static_cast<int>(theta_.rows()); }

private:
    Eigen::MatrixXd theta_;
};

struct Dataset {
    Eigen::MatrixXd X;  // n x p
    std::optional<std::uint64_t> seed;

    int n() const { return static_cast<int>(X.rows()); }
    int p() const { return static_cast<int>(X.cols()); }
    void validate() const;
};

/// Theta = (I - B) Omega^{-1} (I - B)^T.
PrecisionMatrix precision_of(const DagModel& model);

/// Sigma = [(I - B)^{-1}]^T Omega (I - B)^{-1}.
CovarianceMatrix covariance_of(const DagModel& model);

/// l_n(Theta) = trace(Theta Sigma_n) - log det Theta. Throws NumericalError if Theta is not PD.
double neg_log_likelihood(const PrecisionMatrix& theta, const CovarianceMatrix& sigma_hat);

/// l_n(precision_of(model)) + lambda2 * (number of edges).
double penalized_score(const DagModel& model, const CovarianceMatrix& sigma_hat, double lambda2);

/// Ordering under which B is lower triangular. Fills pi_1, pi_2, ... with the
/// smallest-index remaining sink, which gives the lexicographically smallest
/// compatible ordering. Throws InvalidInput naming a cycle.
Ordering topological_order(const Eigen::MatrixXd& B);
Ordering topological_order(const ParentSets& parents);

ParentSets support_of(const Eigen::MatrixXd& B);

}  // namespace l0dag
