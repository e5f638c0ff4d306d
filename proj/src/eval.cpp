#include "polyforest/eval.hpp"

#include "polyforest/errors.hpp"

namespace polyforest {

int shd_skeleton(const Skeleton& a, const Skeleton& b) {
    if (a.node_count() != b.node_count())
        throw Error("shd_skeleton: node counts differ");
    int shd = 0;
    for (const auto& e : a.edges())
        if (!b.edges().count(e)) ++shd;
    for (const auto& e : b.edges())
        if (!a.edges().count(e)) ++shd;
    return shd;
}

namespace {
// 0 absent, 1 undirected, 2 directed low->high, 3 directed high->low
int pair_mark(const Cpdag& g, int lo, int hi) {
    if (g.has_undirected(lo, hi)) return 1;
    if (g.has_directed(lo, hi)) return 2;
    if (g.has_directed(hi, lo)) return 3;
    return 0;
}
}  // namespace

int shd_cpdag(const Cpdag& a, const Cpdag& b) {
    if (a.node_count() != b.node_count()) throw Error("shd_cpdag: node counts differ");
    const int d = a.node_count();
    int shd = 0;
    for (int lo = 0; lo < d; ++lo)
        for (int hi = lo + 1; hi < d; ++hi)
            if (pair_mark(a, lo, hi) != pair_mark(b, lo, hi)) ++shd;
    return shd;
}

EvalReport evaluate(const Cpdag& truth, const Cpdag& estimate) {
    EvalReport report;
    report.shd_skeleton = shd_skeleton(truth.skeleton(), estimate.skeleton());
    report.shd_cpdag = shd_cpdag(truth, estimate);
    report.exact_skeleton = report.shd_skeleton == 0;
    report.exact_cpdag = report.shd_cpdag == 0;
    return report;
}

double prr(const std::vector<bool>& exact_flags) {
    if (exact_flags.empty()) throw Error("prr: empty record list");
    double hits = 0.0;
    for (bool f : exact_flags) hits += f ? 1.0 : 0.0;
    return hits / static_cast<double>(exact_flags.size());
}

}  // namespace polyforest
