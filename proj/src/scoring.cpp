#include "l0dag/scoring.hpp"

#include "l0dag/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace l0dag {

namespace {

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& a, std::span<const int> rows, std::span<const int> cols) {
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = a(rows[r], cols[c]);
    return out;
}

void check_regression_args(int j, std::span<const int> S, const CovarianceMatrix& sigma) {
    if (j < 0 || j >= sigma.p()) throw InvalidInput("node index out of range");
    for (int k : S) {
        if (k < 0 || k >= sigma.p()) throw InvalidInput("parent index out of range");
        if (k == j) throw InvalidInput("a node cannot be its own parent");
    }
}

// Cholesky of Sigma_SS, ridged only when the plain factorization fails.
Eigen::LLT<Eigen::MatrixXd> factor_block(const Eigen::MatrixXd& block) {
    Eigen::LLT<Eigen::MatrixXd> llt(block);
    if (llt.info() == Eigen::Success && llt.matrixLLT().diagonal().minCoeff() > 0.0) return llt;
    const double ridge = 1e-10 * block.trace() / static_cast<double>(block.rows());
    Eigen::MatrixXd ridged = block;
    ridged.diagonal().array() += ridge;
    llt.compute(ridged);
    if (llt.info() != Eigen::Success || !(ridge > 0.0))
        throw NumericalError("parent covariance block is singular even after ridge regularization");
    return llt;
}

}  // namespace

std::string_view to_string(ScoreMode mode) {
    return mode == ScoreMode::profile ? "profile" : "equalvar";
}

ScoreMode parse_score_mode(std::string_view text) {
    if (text == "profile") return ScoreMode::profile;
    if (text == "equalvar" || text == "equal_variance") return ScoreMode::equal_variance;
    throw InvalidInput("unknown score mode '" + std::string(text) + "' (expected profile|equalvar)");
}

NodeMask to_mask(std::span<const int> nodes) {
    NodeMask m = 0;
    for (int v : nodes) {
        if (v < 0 || v >= 64) throw InvalidInput("node index does not fit a 64-bit mask");
        m |= NodeMask{1} << v;
    }
    return m;
}

std::vector<int> from_mask(NodeMask m) {
    std::vector<int> out;
    while (m) {
        out.push_back(std::countr_zero(m));
        m &= m - 1;
    }
    return out;
}

Eigen::VectorXd regression_coefficients(int j, std::span<const int> S, const CovarianceMatrix& sigma_hat) {
    check_regression_args(j, S, sigma_hat);
    if (S.empty()) return {};
    const int target[] = {j};
    const auto llt = factor_block(submatrix(sigma_hat.matrix(), S, S));
    return llt.solve(submatrix(sigma_hat.matrix(), S, target));
}

double residual_variance(int j, std::span<const int> S, const CovarianceMatrix& sigma_hat) {
    check_regression_args(j, S, sigma_hat);
    const double sjj = sigma_hat(j, j);
    if (S.empty()) return sjj;
    const int target[] = {j};
    const Eigen::VectorXd cross = submatrix(sigma_hat.matrix(), S, target);
    const auto llt = factor_block(submatrix(sigma_hat.matrix(), S, S));
    // Sigma_jS Sigma_SS^{-1} Sigma_Sj = |L^{-1} Sigma_Sj|^2
    const Eigen::VectorXd half = llt.matrixL().solve(cross);
    double rss = sjj - half.squaredNorm();
    if (rss < 0.0) {
        if (rss < -1e-10 * std::max(1.0, sjj))
            throw NumericalError("negative residual variance; covariance is not positive semi-definite");
        rss = 0.0;
    }
    return rss;
}

double variance_floor(const CovarianceMatrix& sigma_hat) {
    return 1e-12 * sigma_hat.max_variance();
}

double local_score_profile(int j, std::span<const int> S, const CovarianceMatrix& sigma_hat, double lambda2) {
    double rss = residual_variance(j, S, sigma_hat);
    const double floor = variance_floor(sigma_hat);
    if (rss < floor) {
        std::ostringstream os;
        os << "residual variance at node " << j + 1 << " below floor (" << rss
           << "); the parent set overfits this node";
        warn(os.str());
        rss = floor;
    }
    return 1.0 + std::log(rss) + lambda2 * static_cast<double>(S.size());
}

double local_score_equal_variance(int j, std::span<const int> S, const CovarianceMatrix& sigma_hat,
                                  double lambda2) {
    return residual_variance(j, S, sigma_hat) + lambda2 * static_cast<double>(S.size());
}

double local_score(ScoreMode mode, int j, std::span<const int> S, const CovarianceMatrix& sigma_hat,
                   double lambda2) {
    return mode == ScoreMode::profile ? local_score_profile(j, S, sigma_hat, lambda2)
                                      : local_score_equal_variance(j, S, sigma_hat, lambda2);
}

int default_max_parents(int n, int p, double alpha) {
    const double log_p = std::log(std::max(p, 2));
    const double cap = std::floor(alpha * n / log_p);
    long long m = cap > 1e9 ? 1000000000LL : static_cast<long long>(cap);
    m = std::min<long long>({m, n - 2LL, p - 1LL});
    return static_cast<int>(std::max<long long>(m, 0));
}

double bic_lambda2(int n) {
    if (n < 2) throw InvalidInput("bic_lambda2 needs n >= 2");
    return std::log(static_cast<double>(n)) / n;
}

bool better_parent_set(double score_a, NodeMask a, double score_b, NodeMask b) {
    if (score_a != score_b) return score_a < score_b;
    const int sa = mask_size(a), sb = mask_size(b);
    if (sa != sb) return sa < sb;
    if (a == b) return false;
    const NodeMask diff = a ^ b;
    return (a & (diff & (~diff + 1))) != 0;
}

// ---------------------------------------------------------------------------

LocalScoreTable::LocalScoreTable(CovarianceMatrix sigma, double lambda2, ScoreMode mode, int max_parents)
    : sigma_(std::move(sigma)), lambda2_(lambda2), mode_(mode), max_parents_(max_parents) {}

std::uint32_t LocalScoreTable::compress(int j, NodeMask m) const {
    const NodeMask low = (NodeMask{1} << j) - 1;
    return static_cast<std::uint32_t>((m & low) | ((m >> 1) & ~low));
}

NodeMask LocalScoreTable::expand(int j, std::uint32_t c) const {
    const NodeMask low = (NodeMask{1} << j) - 1;
    const NodeMask wide = c;
    return (wide & low) | ((wide & ~low) << 1);
}

LocalScoreTable LocalScoreTable::build(const CovarianceMatrix& sigma_hat, double lambda2, ScoreMode mode,
                                       int max_parents) {
    const int p = sigma_hat.p();
    if (p > kMaxTableNodes)
        throw InvalidInput("score table is limited to p <= " + std::to_string(kMaxTableNodes) +
                           " nodes; use greedy search for larger graphs");
    if (p < 1) throw InvalidInput("score table needs at least one node");
    if (lambda2 < 0.0) throw InvalidInput("lambda2 must be non-negative");
    if (max_parents < 0) throw InvalidInput("max_parents must be non-negative");

    LocalScoreTable table(sigma_hat, lambda2, mode, std::min(max_parents, p - 1));
    const std::size_t entries = std::size_t{1} << (p - 1);
    table.best_.assign(static_cast<std::size_t>(p), std::vector<double>(entries));
    table.arg_.assign(static_cast<std::size_t>(p), std::vector<std::uint32_t>(entries));

    for (int j = 0; j < p; ++j) {
        auto& best = table.best_[j];
        auto& arg = table.arg_[j];
        for (std::size_t c = 0; c < entries; ++c) {
            const auto cc = static_cast<std::uint32_t>(c);
            double best_score = std::numeric_limits<double>::infinity();
            NodeMask best_set = 0;
            bool have = false;
            if (std::popcount(cc) <= table.max_parents_) {
                const auto S = from_mask(table.expand(j, cc));
                best_score = local_score(mode, j, S, table.sigma_, lambda2);
                best_set = table.expand(j, cc);
                have = true;
            }
            for (std::uint32_t rest = cc; rest; rest &= rest - 1) {
                const std::uint32_t sub = cc & ~(rest & (~rest + 1));
                const NodeMask cand = table.expand(j, arg[sub]);
                if (!have || better_parent_set(best[sub], cand, best_score, best_set)) {
                    best_score = best[sub];
                    best_set = cand;
                    have = true;
                }
            }
            best[c] = best_score;
            arg[c] = table.compress(j, best_set);
        }
    }
    return table;
}

double LocalScoreTable::best_score(int j, NodeMask candidates) const {
    return best_[j][compress(j, candidates)];
}

NodeMask LocalScoreTable::best_parents(int j, NodeMask candidates) const {
    return expand(j, arg_[j][compress(j, candidates)]);
}

double LocalScoreTable::local(int j, NodeMask S) const {
    if (S & (NodeMask{1} << j)) throw InvalidInput("parent set contains the child");
    const auto nodes = from_mask(S);
    return local_score(mode_, j, nodes, sigma_, lambda2_);
}

void LocalScoreTable::write_jsonl(std::ostream& os) const {
    const std::size_t entries = std::size_t{1} << (p() - 1);
    for (int j = 0; j < p(); ++j) {
        for (std::size_t c = 0; c < entries; ++c) {
            std::vector<int> S;
            for (int v : from_mask(expand(j, arg_[j][c]))) S.push_back(v + 1);
            const NodeMask C = expand(j, static_cast<std::uint32_t>(c));
            nlohmann::json line = {{"j", j + 1}, {"C", C}, {"score", best_[j][c]}, {"S", S}};
            os << line.dump() << '\n';
        }
    }
}

}  // namespace l0dag
