#pragma once

#include "l0dag/model.hpp"

#include <algorithm>
#include <cstdint>
#include <variant>

namespace l0dag {

/// Incoming-edge counts of a Gram-Schmidt representation.
struct EdgeProfile {
    std::vector<int> in_degree;  // s_j(pi)
    int total = 0;               // s(pi)
    ParentSets support;          // S_j(pi), ascending node indices
};

/// Thresholds below which Gram-Schmidt coefficients are treated as exact zeros:
/// 1e-9 for population matrices, 0 (disabled) for empirical ones.
double default_zero_tol(const CovarianceMatrix& sigma);

/// Regresses X_{pi_k} on X_{pi_{k+1}}, ..., X_{pi_p} for every k, under the inner
/// product given by sigma. Computed from an unpivoted Cholesky factor of sigma
/// permuted into elimination order (pi_p first). Throws NumericalError when sigma
/// is singular.
DagModel gram_schmidt_representation(const CovarianceMatrix& sigma, const Ordering& pi, double zero_tol);

EdgeProfile edge_profile(const CovarianceMatrix& sigma, const Ordering& pi, double zero_tol);
EdgeProfile edge_profile(const DagModel& model);

struct Exhaustive {};
struct Sampled {
    std::uint64_t k = 0;  // 0: min(10 * p!, 20000)
    std::uint64_t seed = 0;
};
using ImapMode = std::variant<Exhaustive, Sampled>;

struct ImapResult {
    DagModel model;
    Ordering pi;
    bool exhaustive = true;  // false: edge count is an upper bound
    std::uint64_t orderings_evaluated = 0;
};

inline constexpr int kMaxExhaustiveImap = 9;

/// Gram-Schmidt representation with the fewest edges over all (exhaustive, p <= 9)
/// or sampled orderings. Ties go to the lexicographically smallest ordering.
ImapResult minimal_edge_imap(const CovarianceMatrix& sigma, double zero_tol, const ImapMode& mode);

/// Same precision matrix (max-norm tolerance) and same number of edges.
bool equivalent(const DagModel& m1, const DagModel& m2, double tol);

/// Calls fn(pi) for every permutation of p nodes in lexicographic order.
template <typename Fn>
void for_each_ordering(int p, Fn&& fn) {
    std::vector<int> v(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) v[i] = i;
    do {
        fn(Ordering(v));
    } while (std::next_permutation(v.begin(), v.end()));
}

/// k uniformly random orderings from a CounterRng stream.
std::vector<Ordering> sample_orderings(int p, std::uint64_t k, std::uint64_t seed);

std::uint64_t factorial_capped(int p, std::uint64_t cap);

}  // namespace l0dag
