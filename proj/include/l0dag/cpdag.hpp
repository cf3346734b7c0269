#pragma once

#include "l0dag/model.hpp"

#include <cstdint>

namespace l0dag {

/// Completed partially directed graph of a DAG's Markov equivalence class.
class Cpdag {
public:
    enum class Edge : std::uint8_t { none, forward, backward, undirected };  // forward: i -> j for i < j

    /// Skeleton, v-structures oriented, then closed under Meek's rules R1-R3.
    static Cpdag of(const ParentSets& parents);
    static Cpdag of(const DagModel& model) { return of(model.parents()); }

    int p() const { return p_; }
    Edge edge(int i, int j) const;  // state of the pair {i, j} seen from i

    bool directed(int a, int b) const { return mark(a, b) && !mark(b, a); }
    bool undirected(int a, int b) const { return mark(a, b) && mark(b, a); }
    bool adjacent(int a, int b) const { return mark(a, b) || mark(b, a); }

private:
    explicit Cpdag(int p) : p_(p), marks_(static_cast<std::size_t>(p) * p, 0) {}
    bool mark(int a, int b) const { return marks_[static_cast<std::size_t>(a) * p_ + b] != 0; }
    void set(int a, int b, bool v) { marks_[static_cast<std::size_t>(a) * p_ + b] = v ? 1 : 0; }
    void orient(int a, int b) { set(a, b, true); set(b, a, false); }
    bool apply_meek_rules();

    int p_;
    std::vector<std::uint8_t> marks_;  // a -> b present iff marks(a, b); both set: undirected
};

/// Structural Hamming distance between CPDAGs: each unordered pair whose state
/// (absent, a -> b, b -> a, undirected) differs costs 1.
int cpdag_shd(const Cpdag& a, const Cpdag& b);
int cpdag_shd(const DagModel& m1, const DagModel& m2);

}  // namespace l0dag
