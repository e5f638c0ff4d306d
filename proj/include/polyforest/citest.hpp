#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "polyforest/dataset.hpp"
#include "polyforest/models.hpp"
#include "polyforest/triplet.hpp"

namespace polyforest {

using Column = std::span<const double>;
using OptColumn = std::optional<Column>;

struct CiDecision {
    bool dependent = false;
    double statistic = 0.0;
    // c/2 for threshold tests, the permutation p-value for the
    // nonparametric test, K/2 for a median vote.
    double threshold_or_pvalue = 0.0;
};

enum class TesterFamily {
    kBernoulli,
    kGaussian,
    kNonparam,
    kOracleBernoulli,
    kOracleGaussian,
};

struct CiTesterSpec {
    TesterFamily family = TesterFamily::kGaussian;
    double c = 0.1;            // signal parameter of the threshold tests
    double cutoff = 0.05;      // significance level of the permutation test
    double s = 1.0;            // smoothness parameter (nonparametric)
    int permutations = 199;
    int median_folds = 1;      // odd; 1 disables the median trick
    std::uint64_t seed = 0;    // permutation reproducibility
};

// --- statistics ---

// Plug-in conditional total-variation statistic for binary columns:
// sum_z phat(z) sum_xy |phat(x,y|z) - phat(x|z) phat(y|z)|; empty strata
// contribute nothing. Unconditional version when z is absent.
double mhat_bernoulli(Column x, Column y, OptColumn z = std::nullopt);

// Sample partial correlation (plain correlation when z is absent), from
// centered sample covariances. Throws DegenerateColumnError if a column
// (or its residual after conditioning) has no variance.
double partial_correlation(Column x, Column y, OptColumn z = std::nullopt);

// Threshold tests: dependent iff statistic >= c/2 (absolute value for the
// Gaussian statistic).
CiDecision test_bernoulli(Column x, Column y, OptColumn z, double c);
CiDecision test_gaussian(Column x, Column y, OptColumn z, double c);

// Equal-width binning of [0,1]; value 1.0 belongs to the last bin.
std::vector<int> discretize(Column col, int bins);

// Bin counts from the sample size and smoothness: n^{2/(5s+2)} bins for the
// tested pair, n^{2s/(5s+2)} for the conditioning variable, rounded half-up
// with floors of 2 and 1.
std::pair<int, int> np_bin_counts(int n, double s);

struct NonparamTestConfig {
    double s = 1.0;
    int permutations = 199;
    double cutoff = 0.05;
    std::uint64_t seed = 0;
};

// Discretize-then-permute conditional independence test. The statistic is
// the stratum-weighted L2 distance between the joint and product-of-margins
// bin frequencies; calibration shuffles the y labels within every
// z-stratum (globally when z is absent). Strata with fewer than 2 rows are
// skipped.
CiDecision test_nonparam(Column x, Column y, OptColumn z, const NonparamTestConfig& cfg);

using BaseTest = std::function<CiDecision(Column, Column, OptColumn)>;

// Split the rows into K contiguous folds (remainder dropped), apply the
// base test per fold, return the majority decision.
CiDecision median_trick(const BaseTest& base, int K, Column x, Column y,
                        OptColumn z = std::nullopt);

// --- testers ---

// Closed decision procedure over dataset columns. prepare() is invoked once
// per dataset before testing and may build caches; test() is const and safe
// to call concurrently afterwards.
class CiTester {
public:
    virtual ~CiTester() = default;
    virtual void prepare(const Dataset&) {}
    virtual CiDecision test(const Dataset& data, int j, int k,
                            std::optional<int> l) const = 0;
};

// Data-driven testers (Bernoulli / Gaussian / Nonparam families). Oracle
// kinds are constructed from an exact model via make_oracle_tester.
std::unique_ptr<CiTester> make_tester(const CiTesterSpec& spec);

// Ground-truth testers backed by exact models; dependent iff the exact
// dependence measure exceeds 1e-12. They ignore the dataset values.
std::unique_ptr<CiTester> make_oracle_tester(const BernoulliForestModel& model);
std::unique_ptr<CiTester> make_oracle_tester(const GaussianForestModel& model);
std::unique_ptr<CiTester> make_oracle_tester(const TripletModel& model);

}  // namespace polyforest
