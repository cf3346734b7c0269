#include "l0dag/search.hpp"

#include "l0dag/errors.hpp"
#include "l0dag/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace l0dag {

std::string_view to_string(SearchMethod method) {
    return method == SearchMethod::exact ? "exact" : "greedy";
}

SearchMethod parse_search_method(std::string_view text) {
    if (text == "exact") return SearchMethod::exact;
    if (text == "greedy") return SearchMethod::greedy;
    throw InvalidInput("unknown search method '" + std::string(text) + "' (expected exact|greedy)");
}

DagModel refit_parameters(const ParentSets& structure, const CovarianceMatrix& sigma_hat, ScoreMode mode) {
    const int p = sigma_hat.p();
    if (static_cast<int>(structure.size()) != p) throw InvalidInput("structure size does not match covariance");
    (void)topological_order(structure);

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd omega(p);
    for (int j = 0; j < p; ++j) {
        const auto& S = structure[j];
        if (!S.empty()) {
            const Eigen::VectorXd beta = regression_coefficients(j, S, sigma_hat);
            for (std::size_t i = 0; i < S.size(); ++i) B(S[i], j) = beta(static_cast<Eigen::Index>(i));
        }
        if (mode == ScoreMode::profile)
            omega(j) = std::max(residual_variance(j, S, sigma_hat), variance_floor(sigma_hat));
        else
            omega(j) = 1.0;
    }
    return DagModel(std::move(B), std::move(omega));
}

FitResult make_fit_result(const ParentSets& structure, const CovarianceMatrix& sigma_hat, double lambda2,
                          ScoreMode mode, SearchMethod method) {
    FitResult fit;
    fit.parents = structure;
    for (auto& s : fit.parents) std::sort(s.begin(), s.end());
    fit.model = refit_parameters(fit.parents, sigma_hat, mode);
    fit.pi_hat = topological_order(fit.parents);
    fit.method = method;
    fit.mode = mode;
    fit.lambda2 = lambda2;
    fit.node_scores.reserve(fit.parents.size());
    for (std::size_t j = 0; j < fit.parents.size(); ++j) {
        fit.node_scores.push_back(local_score(mode, static_cast<int>(j), fit.parents[j], sigma_hat, lambda2));
        fit.score += fit.node_scores.back();
        fit.s_hat += static_cast<int>(fit.parents[j].size());
    }
    return fit;
}

FitResult fit_exact(const LocalScoreTable& table) {
    const int p = table.p();
    const std::size_t subsets = std::size_t{1} << p;
    std::vector<double> value(subsets, 0.0);
    std::vector<std::uint8_t> sink(subsets, 0);

    for (std::size_t w = 1; w < subsets; ++w) {
        const NodeMask W = w;
        double best = std::numeric_limits<double>::infinity();
        for (NodeMask rest = W; rest; rest &= rest - 1) {
            const int s = std::countr_zero(rest);
            const NodeMask others = W & ~(NodeMask{1} << s);
            const double cand = table.best_score(s, others) + value[others];
            if (cand < best) {
                best = cand;
                sink[w] = static_cast<std::uint8_t>(s);
            }
        }
        value[w] = best;
    }

    ParentSets parents(static_cast<std::size_t>(p));
    for (NodeMask W = subsets - 1; W; ) {
        const int s = sink[W];
        const NodeMask others = W & ~(NodeMask{1} << s);
        parents[s] = from_mask(table.best_parents(s, others));
        W = others;
    }
    return make_fit_result(parents, table.covariance(), table.lambda2(), table.mode(), SearchMethod::exact);
}

// ---------------------------------------------------------------------------
// Greedy hill climbing

namespace {

class GreedyState {
public:
    GreedyState(const CovarianceMatrix& sigma, double lambda2, ScoreMode mode, int max_parents)
        : sigma_(sigma), lambda2_(lambda2), mode_(mode), max_parents_(max_parents), p_(sigma.p()),
          parents_(static_cast<std::size_t>(p_)), adj_(static_cast<std::size_t>(p_) * p_, 0),
          cache_(static_cast<std::size_t>(p_)), current_(static_cast<std::size_t>(p_)) {
        for (int j = 0; j < p_; ++j) current_[j] = score(j, parents_[j]);
    }

    double score(int j, const std::vector<int>& S) {
        auto& c = cache_[j];
        if (auto it = c.find(S); it != c.end()) return it->second;
        const double v = local_score(mode_, j, S, sigma_, lambda2_);
        c.emplace(S, v);
        return v;
    }

    bool has_edge(int k, int j) const { return adj_[static_cast<std::size_t>(k) * p_ + j] != 0; }

    void add_edge(int k, int j) {
        auto& S = parents_[j];
        S.insert(std::lower_bound(S.begin(), S.end(), k), k);
        adj_[static_cast<std::size_t>(k) * p_ + j] = 1;
        current_[j] = score(j, S);
    }

    void remove_edge(int k, int j) {
        auto& S = parents_[j];
        S.erase(std::lower_bound(S.begin(), S.end(), k));
        adj_[static_cast<std::size_t>(k) * p_ + j] = 0;
        current_[j] = score(j, S);
    }

    static std::vector<int> with(const std::vector<int>& S, int k) {
        std::vector<int> out = S;
        out.insert(std::lower_bound(out.begin(), out.end(), k), k);
        return out;
    }

    static std::vector<int> without(const std::vector<int>& S, int k) {
        std::vector<int> out = S;
        out.erase(std::lower_bound(out.begin(), out.end(), k));
        return out;
    }

    // reach[u * p + v] = 1 iff a directed path of length >= 1 leads from u to v.
    std::vector<char> reachability() const {
        std::vector<std::vector<int>> children(static_cast<std::size_t>(p_));
        for (int j = 0; j < p_; ++j)
            for (int k : parents_[j]) children[k].push_back(j);
        std::vector<char> reach(static_cast<std::size_t>(p_) * p_, 0);
        std::vector<int> stack;
        for (int u = 0; u < p_; ++u) {
            char* row = &reach[static_cast<std::size_t>(u) * p_];
            stack.assign(children[u].begin(), children[u].end());
            while (!stack.empty()) {
                const int v = stack.back();
                stack.pop_back();
                if (row[v]) continue;
                row[v] = 1;
                for (int c : children[v])
                    if (!row[c]) stack.push_back(c);
            }
        }
        return reach;
    }

    // Hill climb to a local minimum.
    void climb() {
        enum class Move { none, add, remove, reverse };
        for (;;) {
            const auto reach = reachability();
            auto reaches = [&](int u, int v) { return reach[static_cast<std::size_t>(u) * p_ + v] != 0; };
            Move best_move = Move::none;
            int best_k = -1, best_j = -1;
            double best_delta = -1e-12 * std::max(1.0, std::abs(total()));

            for (int j = 0; j < p_; ++j) {
                for (int k = 0; k < p_; ++k) {
                    if (k == j) continue;
                    if (has_edge(k, j)) {
                        const double drop = score(j, without(parents_[j], k)) - current_[j];
                        if (drop < best_delta) {
                            best_delta = drop;
                            best_move = Move::remove;
                            best_k = k;
                            best_j = j;
                        }
                        if (static_cast<int>(parents_[k].size()) < max_parents_) {
                            bool other_path = false;
                            for (int c = 0; c < p_ && !other_path; ++c)
                                if (c != j && has_edge(k, c) && reaches(c, j)) other_path = true;
                            if (!other_path) {
                                const double delta = drop + score(k, with(parents_[k], j)) - current_[k];
                                if (delta < best_delta) {
                                    best_delta = delta;
                                    best_move = Move::reverse;
                                    best_k = k;
                                    best_j = j;
                                }
                            }
                        }
                    } else if (!has_edge(j, k) && static_cast<int>(parents_[j].size()) < max_parents_ &&
                               !reaches(j, k)) {
                        const double delta = score(j, with(parents_[j], k)) - current_[j];
                        if (delta < best_delta) {
                            best_delta = delta;
                            best_move = Move::add;
                            best_k = k;
                            best_j = j;
                        }
                    }
                }
            }

            switch (best_move) {
                case Move::none: return;
                case Move::add: add_edge(best_k, best_j); break;
                case Move::remove: remove_edge(best_k, best_j); break;
                case Move::reverse:
                    remove_edge(best_k, best_j);
                    add_edge(best_j, best_k);
                    break;
            }
        }
    }

    // Forward selection of parents for each node among the nodes after it in pi.
    void seed_along(const Ordering& pi) {
        for (int pos = 0; pos < p_; ++pos) {
            const int j = pi[pos];
            for (;;) {
                if (static_cast<int>(parents_[j].size()) >= max_parents_) break;
                int best_k = -1;
                double best_delta = -1e-12 * std::max(1.0, std::abs(current_[j]));
                for (int later = pos + 1; later < p_; ++later) {
                    const int k = pi[later];
                    if (has_edge(k, j)) continue;
                    const double delta = score(j, with(parents_[j], k)) - current_[j];
                    if (delta < best_delta) {
                        best_delta = delta;
                        best_k = k;
                    }
                }
                if (best_k < 0) break;
                add_edge(best_k, j);
            }
        }
    }

    double total() const { return std::accumulate(current_.begin(), current_.end(), 0.0); }
    const ParentSets& parents() const { return parents_; }

private:
    const CovarianceMatrix& sigma_;
    double lambda2_;
    ScoreMode mode_;
    int max_parents_;
    int p_;
    ParentSets parents_;
    std::vector<char> adj_;
    std::vector<std::map<std::vector<int>, double>> cache_;
    std::vector<double> current_;
};

}  // namespace

FitResult fit_greedy(const CovarianceMatrix& sigma_hat, double lambda2, ScoreMode mode,
                     const GreedyOptions& options) {
    const int p = sigma_hat.p();
    if (p < 2) throw InvalidInput("greedy search needs at least two nodes");
    if (lambda2 < 0.0) throw InvalidInput("lambda2 must be non-negative");
    if (options.max_parents < 0) throw InvalidInput("max_parents must be non-negative");
    const int restarts = std::max(1, options.restarts);
    const int cap = std::min(options.max_parents, p - 1);

    ParentSets best_parents;
    double best_total = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        GreedyState state(sigma_hat, lambda2, mode, cap);
        if (r > 0) {
            CounterRng rng(options.seed, static_cast<std::uint64_t>(r));
            std::vector<int> order(static_cast<std::size_t>(p));
            std::iota(order.begin(), order.end(), 0);
            rng.shuffle(std::span<int>(order));
            state.seed_along(Ordering(std::move(order)));
        }
        state.climb();
        if (state.total() < best_total) {
            best_total = state.total();
            best_parents = state.parents();
        }
    }
    return make_fit_result(best_parents, sigma_hat, lambda2, mode, SearchMethod::greedy);
}

}  // namespace l0dag
