#include "l0dag/representation.hpp"

#include "l0dag/errors.hpp"
#include "l0dag/rng.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace l0dag {

double default_zero_tol(const CovarianceMatrix& sigma) {
    return sigma.is_population() ? 1e-9 : 0.0;
}

DagModel gram_schmidt_representation(const CovarianceMatrix& sigma, const Ordering& pi, double zero_tol) {
    const int p = sigma.p();
    if (pi.size() != p) throw InvalidInput("ordering length does not match the covariance dimension");
    if (zero_tol < 0.0) throw InvalidInput("zero_tol must be non-negative");

    // Elimination order q: q_0 = pi_p, ..., q_{p-1} = pi_1.
    std::vector<int> q(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) q[i] = pi[p - 1 - i];
    const Eigen::MatrixXd permuted = sigma.permuted(q).matrix();

    Eigen::LLT<Eigen::MatrixXd> llt(permuted);
    const Eigen::MatrixXd L = llt.matrixL();
    const double scale = std::max(1.0, sigma.max_variance());
    if (llt.info() != Eigen::Success || (p > 0 && L.diagonal().minCoeff() <= 0.0) ||
        (p > 0 && L.diagonal().array().square().minCoeff() <= 1e-14 * scale))
        throw NumericalError("covariance is singular: its smallest eigenvalue must be positive (Condition 2)");

    // Sigma_q = Lu D Lu^T with unit lower Lu; innovations e = Lu^{-1} x.
    const Eigen::VectorXd d = L.diagonal();
    const Eigen::MatrixXd Lu = L * d.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd M =
        Lu.triangularView<Eigen::UnitLower>().solve(Eigen::MatrixXd::Identity(p, p));

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd omega(p);
    for (int i = 0; i < p; ++i) {
        const int child = q[i];
        omega(child) = d(i) * d(i);
        for (int m = 0; m < i; ++m) {
            const double coef = -M(i, m);
            B(q[m], child) = std::abs(coef) <= zero_tol ? 0.0 : coef;
        }
    }
    return DagModel(std::move(B), std::move(omega));
}

EdgeProfile edge_profile(const DagModel& model) {
    EdgeProfile out;
    out.support = model.parents();
    out.in_degree.reserve(out.support.size());
    for (const auto& s : out.support) {
        out.in_degree.push_back(static_cast<int>(s.size()));
        out.total += static_cast<int>(s.size());
    }
    return out;
}

EdgeProfile edge_profile(const CovarianceMatrix& sigma, const Ordering& pi, double zero_tol) {
    return edge_profile(gram_schmidt_representation(sigma, pi, zero_tol));
}

std::uint64_t factorial_capped(int p, std::uint64_t cap) {
    std::uint64_t f = 1;
    for (int i = 2; i <= p; ++i) {
        if (f > cap / static_cast<std::uint64_t>(i)) return cap;
        f *= static_cast<std::uint64_t>(i);
    }
    return std::min(f, cap);
}

std::vector<Ordering> sample_orderings(int p, std::uint64_t k, std::uint64_t seed) {
    CounterRng rng(seed, 0x6f72646572ULL);
    std::vector<Ordering> out;
    out.reserve(k);
    std::vector<int> v(static_cast<std::size_t>(p));
    for (std::uint64_t r = 0; r < k; ++r) {
        std::iota(v.begin(), v.end(), 0);
        rng.shuffle(std::span<int>(v));
        out.emplace_back(v);
    }
    return out;
}

ImapResult minimal_edge_imap(const CovarianceMatrix& sigma, double zero_tol, const ImapMode& mode) {
    const int p = sigma.p();
    ImapResult best;
    int best_edges = std::numeric_limits<int>::max();

    auto consider = [&](const Ordering& pi) {
        auto rep = gram_schmidt_representation(sigma, pi, zero_tol);
        const int edges = rep.edge_count();
        ++best.orderings_evaluated;
        if (edges < best_edges || (edges == best_edges && pi < best.pi)) {
            best_edges = edges;
            best.model = std::move(rep);
            best.pi = pi;
        }
    };

    if (std::holds_alternative<Exhaustive>(mode)) {
        if (p > kMaxExhaustiveImap)
            throw InvalidInput("exhaustive minimal I-MAP search enumerates p! orderings and is limited to p <= " +
                               std::to_string(kMaxExhaustiveImap) + "; use sampled mode");
        best.exhaustive = true;
        for_each_ordering(p, consider);
    } else {
        const auto& s = std::get<Sampled>(mode);
        const std::uint64_t k = s.k == 0 ? std::min<std::uint64_t>(factorial_capped(p, 20000) * 10, 20000) : s.k;
        best.exhaustive = false;
        consider(Ordering::identity(p));
        for (const auto& pi : sample_orderings(p, k, s.seed)) consider(pi);
    }
    return best;
}

bool equivalent(const DagModel& m1, const DagModel& m2, double tol) {
    if (m1.p() != m2.p()) throw InvalidInput("equivalent: models have different node counts");
    if (m1.edge_count() != m2.edge_count()) return false;
    const auto diff = (precision_of(m1).matrix() - precision_of(m2).matrix()).cwiseAbs();
    return m1.p() == 0 || diff.maxCoeff() <= tol;
}

}  // namespace l0dag
