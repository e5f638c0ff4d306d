#pragma once

// Test-only oracles, kept independent of the library's own algorithms.

#include <map>
#include <set>
#include <vector>

#include "polyforest/graph.hpp"

namespace polyforest::testutil {

// Brute-force CPDAG: enumerate every DAG over d nodes (3 marks per pair),
// keep those with the same skeleton and the same v-structure set as g
// (the classical characterization of Markov equivalence), and direct an
// edge in the output only where all equivalent DAGs agree. Exponential in
// C(d,2); fine for d <= 5.
inline Cpdag cpdag_by_enumeration(const Dag& g) {
    const int d = g.node_count();
    std::vector<Pair> pairs;
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b) pairs.emplace_back(a, b);
    const size_t np = pairs.size();

    auto vstructs_of = [](const Dag& dag) {
        std::set<std::tuple<int, int, int>> out;
        for (const auto& t : v_structures(dag)) out.insert(t);
        return out;
    };
    const Skeleton target_skel = skeleton_of(g);
    const auto target_vs = vstructs_of(g);

    std::map<Edge, int> dir_count;  // how many equivalent DAGs use this direction
    int n_equivalent = 0;
    std::vector<int> marks(np, 0);  // 0 none, 1 low->high, 2 high->low
    for (;;) {
        // build candidate edge list
        std::vector<Edge> edges;
        for (size_t i = 0; i < np; ++i) {
            if (marks[i] == 1) edges.emplace_back(pairs[i].first, pairs[i].second);
            if (marks[i] == 2) edges.emplace_back(pairs[i].second, pairs[i].first);
        }
        bool acyclic = true;
        try {
            Dag candidate(d, edges);
            if (skeleton_of(candidate) == target_skel && vstructs_of(candidate) == target_vs) {
                ++n_equivalent;
                for (const auto& e : candidate.edges()) ++dir_count[e];
            }
        } catch (const std::exception&) {
            acyclic = false;  // cyclic candidates are simply skipped
        }
        (void)acyclic;
        // odometer over marks
        size_t pos = 0;
        while (pos < np && marks[pos] == 2) marks[pos++] = 0;
        if (pos == np) break;
        ++marks[pos];
    }

    std::vector<Edge> directed;
    std::vector<Pair> undirected;
    for (const auto& [a, b] : target_skel.edges()) {
        const int fwd = dir_count.count({a, b}) ? dir_count[{a, b}] : 0;
        const int bwd = dir_count.count({b, a}) ? dir_count[{b, a}] : 0;
        if (fwd == n_equivalent)
            directed.emplace_back(a, b);
        else if (bwd == n_equivalent)
            directed.emplace_back(b, a);
        else
            undirected.emplace_back(a, b);
    }
    return Cpdag(d, directed, undirected);
}

// Re-orient one tree component of a collider-free forest away from a new
// root; the result is Markov equivalent to the input.
inline Dag reroot_component(const Dag& g, int new_root) {
    const int d = g.node_count();
    std::vector<std::vector<int>> adj(d);
    for (const auto& [p, c] : g.edges()) {
        adj[p].push_back(c);
        adj[c].push_back(p);
    }
    std::set<Edge> edges(g.edges().begin(), g.edges().end());
    std::vector<int> order{new_root};
    std::vector<bool> seen(d, false);
    seen[new_root] = true;
    for (size_t i = 0; i < order.size(); ++i)
        for (int w : adj[order[i]])
            if (!seen[w]) {
                seen[w] = true;
                order.push_back(w);
                edges.erase({w, order[i]});
                edges.insert({order[i], w});
            }
    return Dag(d, {edges.begin(), edges.end()});
}

}  // namespace polyforest::testutil
