#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polyforest/models.hpp"

namespace polyforest {

// Sweep description. Every cell (d, n, rep) derives its own RNG stream from
// base_seed, so any cell is reproducible in isolation and results do not
// depend on the worker count.
struct ExperimentConfig {
    Family family = Family::kGaussian;
    std::vector<int> d_list{20};
    std::vector<int> n_list{1000};
    int replications = 20;
    double attach_prob = 0.8;

    double c = 0.1;            // tester signal (threshold families)
    double s = 1.0;            // smoothness (nonparam)
    int permutations = 199;
    double cutoff = 0.05;
    int folds = 1;

    std::uint64_t base_seed = 1;
    int workers = 0;           // 0: POLYFOREST_WORKERS env var, else hardware
    std::string out_dir = ".";

    // Model-generation ranges; defaults follow the experimental protocol.
    double coef_abs_min = 0.1;
    double coef_abs_max = 0.5;
    double flip_min = 0.3;
    double flip_max = 0.48;
    double mix_weight = 0.3;

    // The nonparametric family runs ~200 permutations for each of the
    // ~d^3/2 tests; cap d unless explicitly overridden.
    int max_nonparam_d = 40;
    bool allow_large_nonparam = false;

    // When false the runtime_ms CSV column is written as 0 so that repeated
    // runs are byte-identical; measured times stay available in memory.
    bool timing = false;

    void validate() const;
};

struct RunRecord {
    Family family = Family::kGaussian;
    int d = 0;
    int n = 0;
    double c = 0.0;
    double s = 0.0;
    int rep = 0;
    std::uint64_t seed = 0;
    int shd_skeleton = 0;
    int shd_cpdag = 0;
    bool exact_cpdag = false;
    long long ci_calls = 0;
    long long runtime_ms = 0;
    bool failed = false;  // encoded as shd columns -1 in the CSV
};

std::vector<RunRecord> run_experiment(const ExperimentConfig& config);

// Header: family,d,n,c,s,rep,seed,shd_skeleton,shd_cpdag,exact_cpdag,ci_calls,runtime_ms
std::string records_to_csv(const std::vector<RunRecord>& records, bool timing);
std::vector<RunRecord> records_from_csv(const std::string& text);

struct SummaryRow {
    Family family = Family::kGaussian;
    int d = 0;
    int n = 0;
    double c = 0.0;
    double s = 0.0;
    int count = 0;  // non-failed replications
    double mean_shd_skeleton = 0.0;
    double std_shd_skeleton = 0.0;
    double mean_shd_cpdag = 0.0;
    double std_shd_cpdag = 0.0;
    double prr_cpdag = 0.0;
    double prr_skeleton = 0.0;
};

// Per (family, d, n): means, sample standard deviations and recovery rates.
// Failed cells are excluded.
std::vector<SummaryRow> aggregate(const std::vector<RunRecord>& records);
std::string summary_to_csv(const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> summary_from_csv(const std::string& text);

struct ScalingEntry {
    int d = 0;
    std::optional<int> n_star;  // empty: PRR target not reached on the grid
};

// Smallest n on the grid whose exact-CPDAG recovery rate reaches tau.
std::vector<ScalingEntry> scaling_probe(const std::vector<SummaryRow>& summary,
                                        double tau);

// Flat key=value config file; '#' starts a comment. Lists are
// comma-separated. Unknown keys are an error.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_string(const std::string& text);
void apply_config_override(ExperimentConfig& config, const std::string& key,
                           const std::string& value);

int resolve_workers(const ExperimentConfig& config);

}  // namespace polyforest
