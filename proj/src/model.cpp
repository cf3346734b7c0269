#include "l0dag/model.hpp"

#include "l0dag/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <sstream>

namespace l0dag {

namespace {

constexpr double kSymmetryWarn = 1e-8;
constexpr double kSymmetryError = 1e-4;

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a, const char* what) {
    if (a.rows() != a.cols()) throw InvalidInput(std::string(what) + " must be square");
    if (!a.allFinite()) throw InvalidInput(std::string(what) + " has non-finite entries");
    const double asym = a.size() == 0 ? 0.0 : (a - a.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryError) {
        std::ostringstream os;
        os << what << " is not symmetric (max |A - A^T| = " << asym << ")";
        throw InvalidInput(os.str());
    }
    if (asym > kSymmetryWarn) {
        std::ostringstream os;
        os << what << " symmetrized, max |A - A^T| = " << asym;
        warn(os.str());
    }
    return 0.5 * (a + a.transpose());
}

std::string describe_cycle(const ParentSets& parents, const std::vector<bool>& removed) {
    // Every remaining node has a remaining child; walk child links until a node repeats.
    const int p = static_cast<int>(parents.size());
    std::vector<int> child(static_cast<std::size_t>(p), -1);
    for (int j = 0; j < p; ++j) {
        if (removed[j]) continue;
        for (int k : parents[j])
            if (!removed[k]) child[k] = j;
    }
    int start = 0;
    while (removed[start]) ++start;
    std::vector<int> seen_at(static_cast<std::size_t>(p), -1);
    std::vector<int> walk;
    int v = start;
    while (seen_at[v] < 0) {
        seen_at[v] = static_cast<int>(walk.size());
        walk.push_back(v);
        v = child[v];
    }
    std::ostringstream os;
    os << "graph contains a cycle: ";
    for (std::size_t i = static_cast<std::size_t>(seen_at[v]); i < walk.size(); ++i) os << walk[i] + 1 << " -> ";
    os << v + 1;
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Ordering

Ordering::Ordering(std::vector<int> order) : order_(std::move(order)) {
    std::vector<bool> seen(order_.size(), false);
    for (int v : order_) {
        if (v < 0 || v >= size() || seen[v]) throw InvalidInput("ordering is not a permutation of the nodes");
        seen[v] = true;
    }
}

Ordering Ordering::identity(int p) {
    std::vector<int> v(static_cast<std::size_t>(p));
    std::iota(v.begin(), v.end(), 0);
    return Ordering(std::move(v));
}

std::vector<int> Ordering::position() const {
    std::vector<int> pos(order_.size());
    for (int k = 0; k < size(); ++k) pos[order_[k]] = k;
    return pos;
}

bool Ordering::is_compatible_with(const ParentSets& parents) const {
    if (static_cast<int>(parents.size()) != size()) return false;
    const auto pos = position();
    for (int j = 0; j < size(); ++j)
        for (int k : parents[j])
            if (pos[k] <= pos[j]) return false;
    return true;
}

// ---------------------------------------------------------------------------
// DagModel

DagModel::DagModel(Eigen::MatrixXd weights, Eigen::VectorXd noise_variances)
    : B(std::move(weights)), omega(std::move(noise_variances)) {}

DagModel DagModel::empty(const Eigen::VectorXd& noise_variances) {
    const auto p = noise_variances.size();
    return DagModel(Eigen::MatrixXd::Zero(p, p), noise_variances);
}

int DagModel::edge_count() const {
    return static_cast<int>((B.array() != 0.0).count());
}

ParentSets DagModel::parents() const { return support_of(B); }

void DagModel::validate() const {
    if (B.rows() != B.cols() || B.rows() != omega.size())
        throw InvalidInput("DagModel: B must be p x p and omega of length p");
    if (!B.allFinite() || !omega.allFinite()) throw InvalidInput("DagModel: non-finite entries");
    for (int j = 0; j < p(); ++j) {
        if (B(j, j) != 0.0) throw InvalidInput("DagModel: diagonal of B must be zero");
        if (!(omega(j) > 0.0)) throw InvalidInput("DagModel: noise variances must be strictly positive");
    }
    (void)topological_order(B);
}

ParentSets support_of(const Eigen::MatrixXd& B) {
    ParentSets parents(static_cast<std::size_t>(B.cols()));
    for (Eigen::Index j = 0; j < B.cols(); ++j)
        for (Eigen::Index k = 0; k < B.rows(); ++k)
            if (B(k, j) != 0.0) parents[j].push_back(static_cast<int>(k));
    return parents;
}

// ---------------------------------------------------------------------------
// CovarianceMatrix / PrecisionMatrix / Dataset

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd sigma, CovarianceKind kind, std::optional<int> n)
    : sigma_(std::move(sigma)), kind_(kind), n_(n) {}

CovarianceMatrix CovarianceMatrix::population(const Eigen::MatrixXd& sigma) {
    return CovarianceMatrix(symmetrized(sigma, "covariance"), CovarianceKind::population, std::nullopt);
}

CovarianceMatrix CovarianceMatrix::empirical(const Eigen::MatrixXd& sigma, int n) {
    if (n < 1) throw InvalidInput("empirical covariance needs a positive sample size");
    return CovarianceMatrix(symmetrized(sigma, "covariance"), CovarianceKind::empirical, n);
}

double CovarianceMatrix::lambda_min_sq() const {
    if (p() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma_, Eigen::EigenvaluesOnly);
    return eig.eigenvalues()(0);
}

double CovarianceMatrix::max_variance() const {
    return p() == 0 ? 0.0 : sigma_.diagonal().maxCoeff();
}

CovarianceMatrix CovarianceMatrix::permuted(std::span<const int> relabel) const {
    // new index i corresponds to old index relabel[i]
    Eigen::MatrixXd out(p(), p());
    for (int i = 0; i < p(); ++i)
        for (int j = 0; j < p(); ++j) out(i, j) = sigma_(relabel[i], relabel[j]);
    return CovarianceMatrix(std::move(out), kind_, n_);
}

PrecisionMatrix::PrecisionMatrix(Eigen::MatrixXd theta) : theta_(symmetrized(theta, "precision")) {}

void Dataset::validate() const {
    if (X.rows() < 2) throw InvalidInput("dataset needs at least two observations");
    if (!X.allFinite()) throw InvalidInput("dataset has non-finite entries");
}

// ---------------------------------------------------------------------------
// Likelihood

PrecisionMatrix precision_of(const DagModel& model) {
    model.validate();
    const auto p = model.p();
    const Eigen::MatrixXd IminusB = Eigen::MatrixXd::Identity(p, p) - model.B;
    const Eigen::MatrixXd theta = IminusB * model.omega.cwiseInverse().asDiagonal() * IminusB.transpose();
    return PrecisionMatrix(theta);
}

CovarianceMatrix covariance_of(const DagModel& model) {
    model.validate();
    const auto p = model.p();
    const Eigen::MatrixXd IminusB = Eigen::MatrixXd::Identity(p, p) - model.B;
    // det(I - B) = 1 for acyclic B, so the LU solve is well conditioned in the determinant sense.
    const Eigen::MatrixXd A = IminusB.partialPivLu().solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::MatrixXd sigma = A.transpose() * model.omega.asDiagonal() * A;
    return CovarianceMatrix::population(sigma);
}

double neg_log_likelihood(const PrecisionMatrix& theta, const CovarianceMatrix& sigma_hat) {
    if (theta.p() != sigma_hat.p()) throw InvalidInput("neg_log_likelihood: dimension mismatch");
    Eigen::LLT<Eigen::MatrixXd> llt(theta.matrix());
    if (llt.info() != Eigen::Success) throw NumericalError("precision matrix is not positive definite");
    const Eigen::MatrixXd& L = llt.matrixLLT();
    double log_det = 0.0;
    for (int i = 0; i < theta.p(); ++i) {
        if (!(L(i, i) > 0.0)) throw NumericalError("precision matrix is not positive definite");
        log_det += 2.0 * std::log(L(i, i));
    }
    const double trace = theta.matrix().cwiseProduct(sigma_hat.matrix()).sum();
    return trace - log_det;
}

double penalized_score(const DagModel& model, const CovarianceMatrix& sigma_hat, double lambda2) {
    if (lambda2 < 0.0) throw InvalidInput("lambda2 must be non-negative");
    return neg_log_likelihood(precision_of(model), sigma_hat) + lambda2 * model.edge_count();
}

// ---------------------------------------------------------------------------
// Topological ordering

Ordering topological_order(const ParentSets& parents) {
    const int p = static_cast<int>(parents.size());
    std::vector<int> child_count(static_cast<std::size_t>(p), 0);
    for (int j = 0; j < p; ++j)
        for (int k : parents[j]) {
            if (k < 0 || k >= p) throw InvalidInput("parent index out of range");
            if (k == j) throw InvalidInput("graph has a self loop at node " + std::to_string(j + 1));
            ++child_count[k];
        }

    std::priority_queue<int, std::vector<int>, std::greater<>> sinks;
    for (int v = 0; v < p; ++v)
        if (child_count[v] == 0) sinks.push(v);

    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(p));
    std::vector<bool> removed(static_cast<std::size_t>(p), false);
    while (!sinks.empty()) {
        const int v = sinks.top();
        sinks.pop();
        order.push_back(v);
        removed[v] = true;
        for (int k : parents[v])
            if (--child_count[k] == 0) sinks.push(k);
    }
    if (static_cast<int>(order.size()) != p) throw InvalidInput(describe_cycle(parents, removed));
    return Ordering(std::move(order));
}

Ordering topological_order(const Eigen::MatrixXd& B) {
    if (B.rows() != B.cols()) throw InvalidInput("edge-weight matrix must be square");
    return topological_order(support_of(B));
}

}  // namespace l0dag
