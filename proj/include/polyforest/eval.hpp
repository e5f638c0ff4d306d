#pragma once

#include <vector>

#include "polyforest/graph.hpp"

namespace polyforest {

struct EvalReport {
    int shd_skeleton = 0;
    int shd_cpdag = 0;
    bool exact_skeleton = false;
    bool exact_cpdag = false;
};

// Size of the symmetric difference of the unordered edge sets.
int shd_skeleton(const Skeleton& a, const Skeleton& b);

// Per unordered pair: cost 1 when the pair is present in exactly one graph
// or present in both with a different mark (undirected vs directed, or the
// two directions). Mark mismatches cost 1, not 2.
int shd_cpdag(const Cpdag& a, const Cpdag& b);

EvalReport evaluate(const Cpdag& truth, const Cpdag& estimate);

// Fraction of true flags (precise recovery rate); the list must be non-empty.
double prr(const std::vector<bool>& exact_flags);

}  // namespace polyforest
