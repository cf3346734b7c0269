#include "l0dag/cpdag.hpp"

#include "l0dag/errors.hpp"

namespace l0dag {

Cpdag Cpdag::of(const ParentSets& parents) {
    (void)topological_order(parents);
    const int p = static_cast<int>(parents.size());
    Cpdag g(p);
    for (int j = 0; j < p; ++j)
        for (int k : parents[j]) {
            g.set(k, j, true);
            g.set(j, k, true);
        }
    // v-structures a -> j <- b with a, b non-adjacent
    for (int j = 0; j < p; ++j) {
        const auto& pa = parents[j];
        for (std::size_t x = 0; x < pa.size(); ++x)
            for (std::size_t y = x + 1; y < pa.size(); ++y)
                if (!g.adjacent(pa[x], pa[y])) {
                    g.orient(pa[x], j);
                    g.orient(pa[y], j);
                }
    }
    while (g.apply_meek_rules()) {
    }
    return g;
}

bool Cpdag::apply_meek_rules() {
    bool changed = false;
    for (int a = 0; a < p_; ++a)
        for (int b = 0; b < p_; ++b) {
            if (a == b || !undirected(a, b)) continue;
            bool orient_ab = false;
            for (int c = 0; c < p_ && !orient_ab; ++c) {
                if (c == a || c == b) continue;
                // R1: c -> a - b, c and b non-adjacent
                if (directed(c, a) && !adjacent(c, b)) orient_ab = true;
                // R2: a -> c -> b with a - b
                if (directed(a, c) && directed(c, b)) orient_ab = true;
            }
            // R3: a - c -> b, a - d -> b, c and d non-adjacent
            for (int c = 0; c < p_ && !orient_ab; ++c) {
                if (c == a || c == b || !undirected(a, c) || !directed(c, b)) continue;
                for (int d = c + 1; d < p_; ++d) {
                    if (d == a || d == b || !undirected(a, d) || !directed(d, b)) continue;
                    if (!adjacent(c, d)) {
                        orient_ab = true;
                        break;
                    }
                }
            }
            if (orient_ab) {
                orient(a, b);
                changed = true;
            }
        }
    return changed;
}

Cpdag::Edge Cpdag::edge(int i, int j) const {
    const bool ij = mark(i, j), ji = mark(j, i);
    if (ij && ji) return Edge::undirected;
    if (ij) return Edge::forward;
    if (ji) return Edge::backward;
    return Edge::none;
}

int cpdag_shd(const Cpdag& a, const Cpdag& b) {
    if (a.p() != b.p()) throw InvalidInput("cpdag_shd: graphs have different node counts");
    int d = 0;
    for (int i = 0; i < a.p(); ++i)
        for (int j = i + 1; j < a.p(); ++j)
            if (a.edge(i, j) != b.edge(i, j)) ++d;
    return d;
}

int cpdag_shd(const DagModel& m1, const DagModel& m2) {
    return cpdag_shd(Cpdag::of(m1), Cpdag::of(m2));
}

}  // namespace l0dag
