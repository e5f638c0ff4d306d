#include "polyforest/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "polyforest/errors.hpp"

namespace polyforest {

void Dag::check_d() const {
    if (d_ < 1) throw std::invalid_argument("Dag: node count must be >= 1");
}

Dag::Dag(int d, std::vector<Edge> edges) : d_(d) {
    check_d();
    for (const auto& [p, c] : edges) {
        if (p < 0 || p >= d_ || c < 0 || c >= d_)
            throw std::invalid_argument("Dag: node index out of range");
        if (p == c) throw std::invalid_argument("Dag: self-loop");
        if (!edges_.insert({p, c}).second)
            throw std::invalid_argument("Dag: duplicate edge");
    }
    topological_order();  // throws on cycles
}

std::vector<int> Dag::parents(int node) const {
    std::vector<int> out;
    for (const auto& [p, c] : edges_)
        if (c == node) out.push_back(p);
    return out;
}

std::vector<int> Dag::children(int node) const {
    std::vector<int> out;
    for (const auto& [p, c] : edges_)
        if (p == node) out.push_back(c);
    return out;
}

std::vector<int> Dag::topological_order() const {
    std::vector<int> indeg(d_, 0);
    std::vector<std::vector<int>> ch(d_);
    for (const auto& [p, c] : edges_) {
        ++indeg[c];
        ch[p].push_back(c);
    }
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int v = 0; v < d_; ++v)
        if (indeg[v] == 0) ready.push(v);
    std::vector<int> order;
    order.reserve(d_);
    while (!ready.empty()) {
        int v = ready.top();
        ready.pop();
        order.push_back(v);
        for (int c : ch[v])
            if (--indeg[c] == 0) ready.push(c);
    }
    if (static_cast<int>(order.size()) != d_)
        throw std::invalid_argument("Dag: directed cycle");
    return order;
}

Skeleton::Skeleton(int d, std::vector<Pair> edges) : d_(d) {
    for (const auto& [a, b] : edges) add_edge(a, b);
}

void Skeleton::add_edge(int a, int b) {
    if (a < 0 || a >= d_ || b < 0 || b >= d_)
        throw std::invalid_argument("Skeleton: node index out of range");
    if (a == b) throw std::invalid_argument("Skeleton: self-loop");
    edges_.insert(make_pair_sorted(a, b));
}

std::vector<int> Skeleton::neighbors(int node) const {
    std::vector<int> out;
    for (const auto& [a, b] : edges_) {
        if (a == node) out.push_back(b);
        if (b == node) out.push_back(a);
    }
    return out;
}

Cpdag::Cpdag(int d, std::vector<Edge> directed, std::vector<Pair> undirected) : d_(d) {
    for (const auto& [a, b] : directed) {
        if (a < 0 || a >= d_ || b < 0 || b >= d_)
            throw std::invalid_argument("Cpdag: node index out of range");
        if (a == b) throw std::invalid_argument("Cpdag: self-loop");
        if (directed_.count({b, a}))
            throw std::invalid_argument("Cpdag: edge directed both ways");
        directed_.insert({a, b});
    }
    for (const auto& [a, b] : undirected) {
        if (a < 0 || a >= d_ || b < 0 || b >= d_)
            throw std::invalid_argument("Cpdag: node index out of range");
        if (a == b) throw std::invalid_argument("Cpdag: self-loop");
        if (directed_.count({a, b}) || directed_.count({b, a}))
            throw std::invalid_argument("Cpdag: edge both directed and undirected");
        undirected_.insert(make_pair_sorted(a, b));
    }
}

Skeleton Cpdag::skeleton() const {
    Skeleton s(d_);
    for (const auto& [a, b] : directed_) s.add_edge(a, b);
    for (const auto& [a, b] : undirected_) s.add_edge(a, b);
    return s;
}

void SeparationSets::add(int j, int k, int conditioner) {
    sets_[make_pair_sorted(j, k)].insert(conditioner);
}

bool SeparationSets::contains(int j, int k, int conditioner) const {
    auto it = sets_.find(make_pair_sorted(j, k));
    return it != sets_.end() && it->second.count(conditioner) > 0;
}

const std::set<int>* SeparationSets::find(int j, int k) const {
    auto it = sets_.find(make_pair_sorted(j, k));
    return it == sets_.end() ? nullptr : &it->second;
}

std::string OrientationConflict::to_string() const {
    return "edge " + std::to_string(a) + "-" + std::to_string(b) + ": [" +
           forward_rule + "] vs [" + backward_rule + "]";
}

Skeleton skeleton_of(const Dag& g) {
    Skeleton s(g.node_count());
    for (const auto& [p, c] : g.edges()) s.add_edge(p, c);
    return s;
}

namespace {

// Union-find over skeleton edges; a repeated root means an undirected cycle.
class DisjointSet {
public:
    explicit DisjointSet(int n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    int find(int x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[a] = b;
        return true;
    }

private:
    std::vector<int> parent_;
};

}  // namespace

bool is_polyforest(const Dag& g) {
    DisjointSet ds(g.node_count());
    for (const auto& [p, c] : g.edges())
        if (!ds.unite(p, c)) return false;
    return true;
}

std::vector<std::tuple<int, int, int>> v_structures(const Dag& g) {
    const Skeleton sk = skeleton_of(g);
    std::vector<std::tuple<int, int, int>> out;
    for (int l = 0; l < g.node_count(); ++l) {
        std::vector<int> pa = g.parents(l);
        std::sort(pa.begin(), pa.end());
        for (size_t i = 0; i < pa.size(); ++i)
            for (size_t j = i + 1; j < pa.size(); ++j)
                if (!sk.has_edge(pa[i], pa[j])) out.emplace_back(pa[i], l, pa[j]);
    }
    return out;
}

Dag random_polyforest(int d, double attach_prob, Rng& rng) {
    if (d < 1) throw std::invalid_argument("random_polyforest: d must be >= 1");
    if (attach_prob < 0.0 || attach_prob > 1.0)
        throw std::invalid_argument("random_polyforest: attach_prob outside [0,1]");
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    for (int i = d - 1; i > 0; --i)
        std::swap(order[i], order[rng.uniform_int(static_cast<std::uint64_t>(i) + 1)]);
    std::vector<Edge> edges;
    for (int i = 1; i < d; ++i) {
        if (rng.bernoulli(attach_prob)) {
            int parent = order[rng.uniform_int(static_cast<std::uint64_t>(i))];
            edges.emplace_back(parent, order[i]);
        }
    }
    return Dag(d, std::move(edges));
}

Dag random_polyforest(int d, double attach_prob, std::uint64_t seed) {
    Rng rng(seed);
    return random_polyforest(d, attach_prob, rng);
}

namespace {

// Working partially-directed graph for the orientation closure. Marks:
// 0 none, 1 a->b, 2 undirected.
class Pdag {
public:
    explicit Pdag(const Skeleton& skel)
        : d_(skel.node_count()), mark_(static_cast<size_t>(d_) * d_, 0) {
        for (const auto& [a, b] : skel.edges()) {
            at(a, b) = 2;
            at(b, a) = 2;
        }
    }

    int d() const { return d_; }
    bool undirected(int a, int b) const { return at(a, b) == 2; }
    bool directed(int a, int b) const { return at(a, b) == 1; }
    bool adjacent(int a, int b) const { return at(a, b) != 0 || at(b, a) != 0; }

    void set_directed(int a, int b) {
        at(a, b) = 1;
        at(b, a) = 0;
    }
    void set_undirected(int a, int b) {
        at(a, b) = 2;
        at(b, a) = 2;
    }
    bool contested(int a, int b) const {
        return contested_.count(make_pair_sorted(a, b)) > 0;
    }
    void mark_contested(int a, int b) { contested_.insert(make_pair_sorted(a, b)); }

    Cpdag to_cpdag() const {
        std::vector<Edge> dir;
        std::vector<Pair> und;
        for (int a = 0; a < d_; ++a)
            for (int b = 0; b < d_; ++b) {
                if (directed(a, b)) dir.emplace_back(a, b);
                if (a < b && undirected(a, b)) und.emplace_back(a, b);
            }
        return Cpdag(d_, std::move(dir), std::move(und));
    }

private:
    std::int8_t& at(int a, int b) { return mark_[static_cast<size_t>(a) * d_ + b]; }
    std::int8_t at(int a, int b) const { return mark_[static_cast<size_t>(a) * d_ + b]; }
    int d_;
    std::vector<std::int8_t> mark_;
    std::set<Pair> contested_;
};

// One batch of orientation demands. Demands are collected against a frozen
// graph state and applied together, so the outcome does not depend on the
// order rules were scanned in; an edge demanded in both directions is a
// conflict.
class DemandSet {
public:
    void demand(int from, int to, const std::string& rule) {
        auto key = make_pair_sorted(from, to);
        auto& entry = demands_[key];
        if (from < to)
            entry.first = entry.first.empty() ? rule : entry.first;
        else
            entry.second = entry.second.empty() ? rule : entry.second;
    }

    // Applies demands; returns true if anything was oriented.
    bool apply(Pdag& g, ConflictPolicy policy, std::vector<OrientationConflict>& conflicts) {
        bool changed = false;
        for (const auto& [key, rules] : demands_) {
            const auto& [a, b] = key;
            if (!rules.first.empty() && !rules.second.empty()) {
                OrientationConflict c{a, b, rules.first, rules.second};
                if (policy == ConflictPolicy::kStrict)
                    throw OrientationConflictError("conflicting orientations: " + c.to_string());
                conflicts.push_back(c);
                g.mark_contested(a, b);  // stays undirected
            } else if (!rules.first.empty()) {
                g.set_directed(a, b);
                changed = true;
            } else {
                g.set_directed(b, a);
                changed = true;
            }
        }
        return changed;
    }

    bool empty() const { return demands_.empty(); }

private:
    std::map<Pair, std::pair<std::string, std::string>> demands_;
};

std::string edge_str(int a, int b) {
    return std::to_string(a) + "->" + std::to_string(b);
}

// Meek rules R1-R4 evaluated against the frozen state of g.
void collect_meek_demands(const Pdag& g, DemandSet& demands) {
    const int d = g.d();
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            if (a == b || !g.undirected(a, b) || g.contested(a, b)) continue;
            // R1: j -> a, a - b, j and b non-adjacent  =>  a -> b
            for (int j = 0; j < d; ++j) {
                if (j == a || j == b) continue;
                if (g.directed(j, a) && !g.adjacent(j, b))
                    demands.demand(a, b, "R1 from " + edge_str(j, a));
            }
            // R2: a -> l -> b with a - b  =>  a -> b
            for (int l = 0; l < d; ++l) {
                if (l == a || l == b) continue;
                if (g.directed(a, l) && g.directed(l, b))
                    demands.demand(a, b, "R2 via " + std::to_string(l));
            }
            // R3: a - l -> b, a - i -> b, l and i non-adjacent  =>  a -> b
            for (int l = 0; l < d; ++l) {
                if (l == a || l == b || !g.undirected(a, l) || !g.directed(l, b)) continue;
                for (int i = l + 1; i < d; ++i) {
                    if (i == a || i == b || !g.undirected(a, i) || !g.directed(i, b)) continue;
                    if (!g.adjacent(l, i))
                        demands.demand(a, b, "R3 via " + std::to_string(l) + "," +
                                                 std::to_string(i));
                }
            }
            // R4: a - l, l -> i, i -> b, a and i adjacent, l and b non-adjacent
            //      =>  a -> b
            for (int l = 0; l < d; ++l) {
                if (l == a || l == b || !g.undirected(a, l)) continue;
                if (g.adjacent(l, b)) continue;
                for (int i = 0; i < d; ++i) {
                    if (i == a || i == b || i == l) continue;
                    if (g.directed(l, i) && g.directed(i, b) && g.adjacent(a, i))
                        demands.demand(a, b, "R4 via " + std::to_string(l) + "," +
                                                 std::to_string(i));
                }
            }
        }
    }
}

// Tarjan SCC over the directed part; any component of size >= 2 is a cycle.
// Possible only under inconsistent separation sets; the member edges are
// reverted to undirected so the output stays acyclic.
void break_directed_cycles(Pdag& g, ConflictPolicy policy,
                           std::vector<OrientationConflict>& conflicts) {
    const int d = g.d();
    std::vector<int> comp(d, -1), low(d), num(d, -1), stack;
    std::vector<bool> on_stack(d, false);
    int counter = 0, ncomp = 0;
    // Iterative Tarjan.
    for (int root = 0; root < d; ++root) {
        if (num[root] != -1) continue;
        std::vector<std::pair<int, int>> work{{root, 0}};
        while (!work.empty()) {
            auto& [v, state] = work.back();
            if (state == 0) {
                num[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            bool descended = false;
            for (int w = state; w < d; ++w) {
                if (!g.directed(v, w)) continue;
                if (num[w] == -1) {
                    work.back().second = w + 1;
                    work.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], num[w]);
            }
            if (descended) continue;
            if (low[v] == num[v]) {
                for (;;) {
                    int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = ncomp;
                    if (w == v) break;
                }
                ++ncomp;
            }
            work.pop_back();
            if (!work.empty()) {
                int parent = work.back().first;
                low[parent] = std::min(low[parent], low[v]);
            }
        }
    }
    std::vector<int> comp_size(ncomp, 0);
    for (int v = 0; v < d; ++v) ++comp_size[comp[v]];
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            if (g.directed(a, b) && comp[a] == comp[b] && comp_size[comp[a]] >= 2) {
                OrientationConflict c{std::min(a, b), std::max(a, b),
                                      "cycle member " + edge_str(a, b),
                                      "acyclicity of the directed part"};
                if (policy == ConflictPolicy::kStrict)
                    throw OrientationConflictError("directed cycle: " + c.to_string());
                conflicts.push_back(c);
                g.set_undirected(a, b);
                g.mark_contested(a, b);
            }
}

}  // namespace

OrientResult orient_with_policy(const Skeleton& skel, const SeparationSets& seps,
                                ConflictPolicy policy) {
    Pdag g(skel);
    std::vector<OrientationConflict> conflicts;
    const int d = skel.node_count();

    // Collider phase: for non-adjacent (j, k) with common neighbour l,
    // orient j -> l <- k when l is not in S(j, k).
    DemandSet vdemands;
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            if (skel.has_edge(j, k)) continue;
            for (int l = 0; l < d; ++l) {
                if (l == j || l == k) continue;
                if (!skel.has_edge(j, l) || !skel.has_edge(l, k)) continue;
                if (!seps.contains(j, k, l)) {
                    const std::string rule = "v-structure (" + std::to_string(j) + "," +
                                             std::to_string(l) + "," + std::to_string(k) + ")";
                    vdemands.demand(j, l, rule);
                    vdemands.demand(k, l, rule);
                }
            }
        }
    }
    vdemands.apply(g, policy, conflicts);

    // Meek closure, batch per pass.
    for (;;) {
        DemandSet demands;
        collect_meek_demands(g, demands);
        if (demands.empty()) break;
        if (!demands.apply(g, policy, conflicts)) break;
    }

    break_directed_cycles(g, policy, conflicts);
    return OrientResult{g.to_cpdag(), std::move(conflicts)};
}

Cpdag orient(const Skeleton& skel, const SeparationSets& seps) {
    return orient_with_policy(skel, seps, ConflictPolicy::kStrict).cpdag;
}

Cpdag meek_closure(const Cpdag& pdag) {
    Pdag g(pdag.skeleton());
    for (const auto& [a, b] : pdag.directed()) g.set_directed(a, b);
    std::vector<OrientationConflict> conflicts;
    for (;;) {
        DemandSet demands;
        collect_meek_demands(g, demands);
        if (demands.empty()) break;
        if (!demands.apply(g, ConflictPolicy::kStrict, conflicts)) break;
    }
    break_directed_cycles(g, ConflictPolicy::kStrict, conflicts);
    return g.to_cpdag();
}

Cpdag true_cpdag(const Dag& g) {
    if (!is_polyforest(g))
        throw std::invalid_argument("true_cpdag: input is not a poly-forest");
    // Build separation sets sufficient for the collider phase: for each
    // non-adjacent pair with a common neighbour l, l separates them exactly
    // when the triple is not a collider in g.
    const Skeleton skel = skeleton_of(g);
    SeparationSets seps;
    const int d = g.node_count();
    for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k) {
            if (skel.has_edge(j, k)) continue;
            for (int l = 0; l < d; ++l) {
                if (l == j || l == k) continue;
                if (!skel.has_edge(j, l) || !skel.has_edge(l, k)) continue;
                const bool collider = g.has_edge(j, l) && g.has_edge(k, l);
                if (!collider) seps.add(j, k, l);
            }
        }
    return orient(skel, seps);
}

}  // namespace polyforest
