#pragma once

#include "l0dag/model.hpp"
#include "l0dag/scoring.hpp"

#include <cstdint>
#include <string_view>

namespace l0dag {

enum class SearchMethod { exact, greedy };

std::string_view to_string(SearchMethod method);
SearchMethod parse_search_method(std::string_view text);

struct FitResult {
    DagModel model;                  // refit B-hat, Omega-hat (Omega-hat = 1 in equal-variance mode)
    ParentSets parents;              // chosen parent sets, ascending
    double score = 0.0;              // sum of node_scores
    int s_hat = 0;                   // total number of chosen parents
    Ordering pi_hat;                 // smallest-lexicographic ordering compatible with `parents`
    SearchMethod method = SearchMethod::exact;
    ScoreMode mode = ScoreMode::profile;
    double lambda2 = 0.0;
    std::vector<double> node_scores;
};

/// Least-squares refit on a fixed structure. Throws InvalidInput if the structure is cyclic.
DagModel refit_parameters(const ParentSets& structure, const CovarianceMatrix& sigma_hat, ScoreMode mode);

/// Sink dynamic programming over node subsets: value(W) = min over sinks s in W of
/// best(s, W \ {s}) + value(W \ {s}), smallest-index sink on ties. Globally optimal
/// over DAGs whose in-degrees respect the table's cap.
FitResult fit_exact(const LocalScoreTable& table);

struct GreedyOptions {
    int max_parents = 0;
    int restarts = 1;
    std::uint64_t seed = 0;
};

/// Steepest-descent hill climbing over single-edge additions, deletions and
/// reversals. Restart 0 starts from the empty graph; restart r > 0 starts from a
/// forward-selection DAG along a random ordering drawn from (seed, r). Returns the
/// best local minimum found (earliest restart on ties).
FitResult fit_greedy(const CovarianceMatrix& sigma_hat, double lambda2, ScoreMode mode,
                     const GreedyOptions& options);

/// Assembles a FitResult for a given structure: refit, per-node scores, pi-hat.
FitResult make_fit_result(const ParentSets& structure, const CovarianceMatrix& sigma_hat, double lambda2,
                          ScoreMode mode, SearchMethod method);

}  // namespace l0dag
