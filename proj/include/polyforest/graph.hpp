#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "polyforest/rng.hpp"

namespace polyforest {

using Edge = std::pair<int, int>;  // ordered (parent, child)
using Pair = std::pair<int, int>;  // unordered, stored with first < second

inline Pair make_pair_sorted(int a, int b) {
    return a < b ? Pair{a, b} : Pair{b, a};
}

// Directed acyclic graph over nodes 0..d-1. Immutable after construction;
// the constructor rejects out-of-range indices, self-loops, duplicates and
// directed cycles.
class Dag {
public:
    explicit Dag(int d) : d_(d) { check_d(); }
    Dag(int d, std::vector<Edge> edges);

    int node_count() const { return d_; }
    const std::set<Edge>& edges() const { return edges_; }
    bool has_edge(int parent, int child) const {
        return edges_.count({parent, child}) > 0;
    }
    std::vector<int> parents(int node) const;
    std::vector<int> children(int node) const;
    // Nodes ordered so that every parent precedes its children.
    std::vector<int> topological_order() const;

    bool operator==(const Dag& o) const { return d_ == o.d_ && edges_ == o.edges_; }

private:
    void check_d() const;
    int d_;
    std::set<Edge> edges_;
};

// Undirected edge set over nodes 0..d-1.
class Skeleton {
public:
    explicit Skeleton(int d) : d_(d) {}
    Skeleton(int d, std::vector<Pair> edges);

    int node_count() const { return d_; }
    const std::set<Pair>& edges() const { return edges_; }
    bool has_edge(int a, int b) const { return edges_.count(make_pair_sorted(a, b)) > 0; }
    void add_edge(int a, int b);
    std::vector<int> neighbors(int node) const;

    bool operator==(const Skeleton& o) const { return d_ == o.d_ && edges_ == o.edges_; }

private:
    int d_;
    std::set<Pair> edges_;
};

// Partially directed graph: directed edges where every member of the Markov
// equivalence class agrees, undirected edges elsewhere. The two sets are
// disjoint as unordered pairs.
class Cpdag {
public:
    explicit Cpdag(int d) : d_(d) {}
    Cpdag(int d, std::vector<Edge> directed, std::vector<Pair> undirected);

    int node_count() const { return d_; }
    const std::set<Edge>& directed() const { return directed_; }
    const std::set<Pair>& undirected() const { return undirected_; }
    bool has_directed(int a, int b) const { return directed_.count({a, b}) > 0; }
    bool has_undirected(int a, int b) const {
        return undirected_.count(make_pair_sorted(a, b)) > 0;
    }
    bool adjacent(int a, int b) const {
        return has_undirected(a, b) || has_directed(a, b) || has_directed(b, a);
    }
    Skeleton skeleton() const;

    bool operator==(const Cpdag& o) const {
        return d_ == o.d_ && directed_ == o.directed_ && undirected_ == o.undirected_;
    }
    bool operator!=(const Cpdag& o) const { return !(*this == o); }

private:
    int d_;
    std::set<Edge> directed_;
    std::set<Pair> undirected_;
};

// Conditioning sets that rendered a non-adjacent pair independent.
// The empty conditioning set is the distinguished token `kEmptySet`.
constexpr int kEmptySet = -1;

class SeparationSets {
public:
    void add(int j, int k, int conditioner);
    bool contains(int j, int k, int conditioner) const;
    bool has_pair(int j, int k) const { return sets_.count(make_pair_sorted(j, k)) > 0; }
    const std::set<int>* find(int j, int k) const;
    const std::map<Pair, std::set<int>>& all() const { return sets_; }

private:
    std::map<Pair, std::set<int>> sets_;
};

// One edge that received contradictory orientation demands; both rule
// provenances are kept so callers can report the inconsistency.
struct OrientationConflict {
    int a = 0, b = 0;                 // edge endpoints, a < b
    std::string forward_rule;         // demanded a -> b
    std::string backward_rule;        // demanded b -> a
    std::string to_string() const;
};

// --- structural operations ---

Skeleton skeleton_of(const Dag& g);

// True iff the skeleton of g is a forest (no undirected cycle).
bool is_polyforest(const Dag& g);

// Unshielded colliders (j, l, k) with j -> l <- k, j < k, j and k non-adjacent.
std::vector<std::tuple<int, int, int>> v_structures(const Dag& g);

// Draw a random node ordering, then attach each non-first node to one
// uniformly chosen predecessor with probability attach_prob.
Dag random_polyforest(int d, double attach_prob, Rng& rng);
Dag random_polyforest(int d, double attach_prob, std::uint64_t seed);

// CPDAG of g's Markov equivalence class. Only valid for poly-forests;
// other inputs are rejected.
Cpdag true_cpdag(const Dag& g);

enum class ConflictPolicy {
    kStrict,   // throw OrientationConflictError
    kLenient,  // leave the edge undirected, record the conflict
};

struct OrientResult {
    Cpdag cpdag;
    std::vector<OrientationConflict> conflicts;
};

// Orient a learned skeleton: collider orientation from separation-set
// membership, then Meek rules R1-R4 to a fixed point. Conflicting demands
// are either fatal or cancelled according to policy; the directed part of
// the output never contains a cycle.
OrientResult orient_with_policy(const Skeleton& skel, const SeparationSets& seps,
                                ConflictPolicy policy);

// Strict-policy convenience wrapper.
Cpdag orient(const Skeleton& skel, const SeparationSets& seps);

// Close an arbitrary partially directed graph under Meek rules R1-R4
// (strict policy: conflicting demands or directed cycles throw).
Cpdag meek_closure(const Cpdag& pdag);

}  // namespace polyforest
