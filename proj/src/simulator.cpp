#include "l0dag/simulator.hpp"

#include "l0dag/errors.hpp"
#include "l0dag/rng.hpp"

#include <cmath>
#include <numeric>

namespace l0dag {

void SimConfig::validate() const {
    if (p < 1) throw InvalidInput("simulation needs p >= 1");
    if (kind == ModelKind::ar1) {
        if (!(std::abs(beta0) < 1.0)) throw InvalidInput("AR(1) model needs |beta0| < 1");
        return;
    }
    if (!(coef_lo > 0.0 && coef_lo <= coef_hi)) throw InvalidInput("coefficient range needs 0 < lo <= hi");
    if (s0 < 0 || static_cast<long long>(s0) > static_cast<long long>(p) * (p - 1) / 2)
        throw InvalidInput("s0 must lie in [0, p(p-1)/2]");
    if (omega_fixed && !(*omega_fixed > 0.0)) throw InvalidInput("noise variance must be positive");
    if (!omega_fixed && !(omega_lo > 0.0 && omega_lo <= omega_hi))
        throw InvalidInput("noise variance range needs 0 < lo <= hi");
}

DagModel ar1_model(int p, double beta0) {
    if (p < 2) throw InvalidInput("AR(1) model needs p >= 2");
    if (!(std::abs(beta0) < 1.0)) throw InvalidInput("AR(1) model needs |beta0| < 1");
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd omega = Eigen::VectorXd::Constant(p, 1.0 - beta0 * beta0);
    omega(p - 1) = 1.0;
    if (beta0 != 0.0)
        for (int j = 0; j + 1 < p; ++j) B(j + 1, j) = beta0;  // X_j = beta0 X_{j+1} + eps_j
    return DagModel(std::move(B), std::move(omega));
}

DagModel random_sparse_dag(const SimConfig& config) {
    config.validate();
    const int p = config.p;
    const int cap = config.max_parents < 0 ? p - 1 : config.max_parents;
    CounterRng rng(config.seed, 0);

    std::vector<int> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span<int>(order));

    // Parents of order[a] are drawn from order[b], b > a.
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b) pairs.emplace_back(order[b], order[a]);
    rng.shuffle(std::span<std::pair<int, int>>(pairs));

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(p, p);
    std::vector<int> in_degree(static_cast<std::size_t>(p), 0);
    int placed = 0;
    for (const auto& [k, j] : pairs) {
        if (placed == config.s0) break;
        if (in_degree[j] >= cap) continue;
        const double magnitude = rng.uniform(config.coef_lo, config.coef_hi);
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        B(k, j) = sign * magnitude;
        ++in_degree[j];
        ++placed;
    }
    if (placed < config.s0)
        throw InvalidInput("cannot place s0 edges under the in-degree cap");

    Eigen::VectorXd omega(p);
    for (int j = 0; j < p; ++j)
        omega(j) = config.omega_fixed ? *config.omega_fixed : rng.uniform(config.omega_lo, config.omega_hi);
    return DagModel(std::move(B), std::move(omega));
}

Dataset sample_sem(const DagModel& model, int n, std::uint64_t seed) {
    model.validate();
    if (n < 1) throw InvalidInput("sample size must be positive");
    const int p = model.p();
    CounterRng rng(seed, 1);
    Eigen::MatrixXd X(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) X(i, j) = std::sqrt(model.omega(j)) * rng.normal();

    // Sources are at the end of the ordering; fill from there toward the sinks.
    const auto pi = topological_order(model.B);
    const auto parents = model.parents();
    for (int pos = p - 1; pos >= 0; --pos) {
        const int j = pi[pos];
        for (int k : parents[j]) X.col(j) += model.B(k, j) * X.col(k);
    }
    return Dataset{std::move(X), seed};
}

CovarianceMatrix sample_covariance(const Dataset& data, bool center) {
    if (data.n() < 1) throw InvalidInput("dataset is empty");
    if (!data.X.allFinite()) throw InvalidInput("dataset has non-finite entries");
    const double n = data.n();
    if (center) {
        const Eigen::MatrixXd centered = data.X.rowwise() - data.X.colwise().mean();
        return CovarianceMatrix::empirical(centered.transpose() * centered / n, data.n());
    }
    return CovarianceMatrix::empirical(data.X.transpose() * data.X / n, data.n());
}

}  // namespace l0dag
