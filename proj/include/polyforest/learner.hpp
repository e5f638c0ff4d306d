#pragma once

#include <map>
#include <optional>
#include <vector>

#include "polyforest/citest.hpp"
#include "polyforest/dataset.hpp"
#include "polyforest/graph.hpp"

namespace polyforest {

struct TraceEntry {
    int conditioner = kEmptySet;  // kEmptySet encodes the empty set
    CiDecision decision;
};

struct LearnOptions {
    bool trace = false;
    // Stop a pair's scan at its first accepting conditioner. Edge decisions
    // are unaffected, but separation sets then hold a single witness, which
    // is not enough for reliable collider detection; reserved for
    // skeleton-only workloads. The default scans every conditioner, as the
    // skeleton algorithm stores all results.
    bool early_exit = false;
    int workers = 1;  // pair-level parallelism
};

struct SkeletonScan {
    Skeleton skeleton{1};
    SeparationSets separation_sets;
    long long ci_calls = 0;
    std::map<Pair, std::vector<TraceEntry>> trace;  // filled when tracing
};

struct LearnResult {
    Cpdag cpdag{1};
    Skeleton skeleton{1};
    SeparationSets separation_sets;
    long long ci_calls = 0;
    std::optional<std::map<Pair, std::vector<TraceEntry>>> per_pair_trace;
    // Conflicting orientation demands encountered on noisy input; the edges
    // involved were left undirected. Empty under consistent tests.
    std::vector<OrientationConflict> orientation_conflicts;
};

// For each unordered pair, test independence given every single conditioner
// and the empty set; keep the edge iff every test says dependent, otherwise
// record the accepting conditioners as the pair's separation set.
SkeletonScan pc_tree_skeleton(const Dataset& data, CiTester& tester,
                              const LearnOptions& options = {});

// Skeleton scan followed by collider orientation and Meek closure.
// Never throws on statistically inconsistent answers: orientation conflicts
// are cancelled and reported in the result instead.
LearnResult learn(const Dataset& data, CiTester& tester, const LearnOptions& options = {});

}  // namespace polyforest
