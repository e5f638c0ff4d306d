#include "polyforest/learner.hpp"

#include <atomic>
#include <mutex>
#include <thread>

#include "polyforest/errors.hpp"

namespace polyforest {

namespace {

struct PairOutcome {
    bool edge = false;
    std::vector<int> acceptors;
    std::vector<TraceEntry> trace;
    int ci_calls = 0;
};

PairOutcome scan_pair(const Dataset& data, const CiTester& tester, int j, int k,
                      const LearnOptions& options) {
    PairOutcome out;
    const int d = data.cols();
    std::vector<int> conditioners{kEmptySet};
    for (int l = 0; l < d; ++l)
        if (l != j && l != k) conditioners.push_back(l);
    for (int cond : conditioners) {
        const std::optional<int> l =
            cond == kEmptySet ? std::nullopt : std::optional<int>(cond);
        const CiDecision decision = tester.test(data, j, k, l);
        ++out.ci_calls;
        if (options.trace) out.trace.push_back({cond, decision});
        if (!decision.dependent) {
            out.acceptors.push_back(cond);
            if (options.early_exit) break;
        }
    }
    out.edge = out.acceptors.empty();
    return out;
}

}  // namespace

SkeletonScan pc_tree_skeleton(const Dataset& data, CiTester& tester,
                              const LearnOptions& options) {
    const int d = data.cols();
    if (d < 2) throw Error("pc_tree_skeleton: need at least 2 columns");
    tester.prepare(data);

    std::vector<Pair> pairs;
    for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k) pairs.emplace_back(j, k);
    std::vector<PairOutcome> outcomes(pairs.size());

    const int workers = std::max(1, options.workers);
    if (workers == 1) {
        for (size_t i = 0; i < pairs.size(); ++i)
            outcomes[i] = scan_pair(data, tester, pairs[i].first, pairs[i].second, options);
    } else {
        std::atomic<size_t> next{0};
        std::atomic<bool> failed{false};
        std::string error_message;
        std::mutex error_mutex;
        auto work = [&] {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= pairs.size() || failed.load()) return;
                try {
                    outcomes[i] =
                        scan_pair(data, tester, pairs[i].first, pairs[i].second, options);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    failed.store(true);
                    if (error_message.empty()) error_message = e.what();
                }
            }
        };
        std::vector<std::thread> threads;
        for (int w = 0; w < workers; ++w) threads.emplace_back(work);
        for (auto& t : threads) t.join();
        if (failed.load()) throw Error(error_message);
    }

    // Deterministic merge in pair order.
    SkeletonScan scan;
    scan.skeleton = Skeleton(d);
    for (size_t i = 0; i < pairs.size(); ++i) {
        const auto& [j, k] = pairs[i];
        const auto& out = outcomes[i];
        scan.ci_calls += out.ci_calls;
        if (out.edge) {
            scan.skeleton.add_edge(j, k);
        } else {
            for (int cond : out.acceptors) scan.separation_sets.add(j, k, cond);
        }
        if (options.trace) scan.trace[{j, k}] = out.trace;
    }
    return scan;
}

LearnResult learn(const Dataset& data, CiTester& tester, const LearnOptions& options) {
    SkeletonScan scan = pc_tree_skeleton(data, tester, options);
    OrientResult oriented = orient_with_policy(scan.skeleton, scan.separation_sets,
                                               ConflictPolicy::kLenient);
    LearnResult result;
    result.cpdag = std::move(oriented.cpdag);
    result.skeleton = std::move(scan.skeleton);
    result.separation_sets = std::move(scan.separation_sets);
    result.ci_calls = scan.ci_calls;
    if (options.trace) result.per_pair_trace = std::move(scan.trace);
    result.orientation_conflicts = std::move(oriented.conflicts);
    return result;
}

}  // namespace polyforest
