// Command-line front end: simulate / learn / test-ci / eval / experiment / plots.
#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "polyforest/citest.hpp"
#include "polyforest/errors.hpp"
#include "polyforest/eval.hpp"
#include "polyforest/graph_io.hpp"
#include "polyforest/harness.hpp"
#include "polyforest/learner.hpp"
#include "polyforest/plot.hpp"

namespace pf = polyforest;

namespace {

struct SimulateArgs {
    std::string family = "gaussian";
    int d = 20;
    int n = 1000;
    double attach_prob = 0.8;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    double coef_abs_min = 0.1, coef_abs_max = 0.5;
    double flip_min = 0.3, flip_max = 0.48;
    double mix_weight = 0.3;
};

int cmd_simulate(const SimulateArgs& a) {
    std::filesystem::create_directories(a.out_dir);
    pf::Rng rng(a.seed);
    pf::Rng graph_rng = rng.split(1);
    pf::Rng model_rng = rng.split(2);
    pf::Rng data_rng = rng.split(3);
    const pf::Dag dag = pf::random_polyforest(a.d, a.attach_prob, graph_rng);
    const pf::Family fam = pf::family_from_name(a.family);
    pf::ForestModel model = [&]() -> pf::ForestModel {
        switch (fam) {
            case pf::Family::kBernoulli:
                return pf::random_bernoulli_model(dag, model_rng, a.flip_min, a.flip_max);
            case pf::Family::kGaussian:
                return pf::random_gaussian_model(dag, model_rng, a.coef_abs_min,
                                                 a.coef_abs_max);
            default:
                return pf::random_nonparam_model(dag, model_rng, a.mix_weight);
        }
    }();
    const pf::Dataset data =
        std::visit([&](const auto& m) { return pf::sample_forest(m, a.n, data_rng); }, model);

    const std::string graph_path = a.out_dir + "/forest.graph";
    pf::save_graph(dag, graph_path);
    pf::save_graph(pf::true_cpdag(dag), a.out_dir + "/truth_cpdag.graph");
    pf::save_model(model, a.out_dir + "/model.txt", "forest.graph");
    pf::write_csv(data, a.out_dir + "/data.csv");
    std::cout << "wrote " << graph_path << ", truth_cpdag.graph, model.txt, data.csv in "
              << a.out_dir << "\n";
    return 0;
}

pf::CiTesterSpec make_spec(const std::string& family, double c, double s, int permutations,
                           double cutoff, int folds, std::uint64_t seed) {
    pf::CiTesterSpec spec;
    const pf::Family fam = pf::family_from_name(family);
    spec.family = fam == pf::Family::kBernoulli  ? pf::TesterFamily::kBernoulli
                  : fam == pf::Family::kGaussian ? pf::TesterFamily::kGaussian
                                                 : pf::TesterFamily::kNonparam;
    spec.c = c;
    spec.s = s;
    spec.permutations = permutations;
    spec.cutoff = cutoff;
    spec.median_folds = folds;
    spec.seed = seed;
    return spec;
}

int cmd_learn(const std::string& data_path, const std::string& family, double c, double s,
              int folds, std::uint64_t seed, int permutations, double cutoff, bool trace,
              const std::string& out, const std::string& trace_out) {
    const pf::Dataset data = pf::read_csv(data_path);
    auto tester = pf::make_tester(make_spec(family, c, s, permutations, cutoff, folds, seed));
    pf::LearnOptions options;
    options.trace = trace;
    const pf::LearnResult result = pf::learn(data, *tester, options);
    const std::string text = pf::write_graph(result.cpdag);
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out);
        if (!f) throw pf::Error("cannot write " + out);
        f << text;
    }
    if (!result.orientation_conflicts.empty()) {
        std::cerr << "# " << result.orientation_conflicts.size()
                  << " orientation conflicts cancelled:\n";
        for (const auto& conflict : result.orientation_conflicts)
            std::cerr << "#   " << conflict.to_string() << "\n";
    }
    if (trace && !trace_out.empty()) {
        std::ofstream f(trace_out);
        if (!f) throw pf::Error("cannot write " + trace_out);
        f << "j,k,conditioner,statistic,decision\n";
        for (const auto& [pair, entries] : *result.per_pair_trace)
            for (const auto& e : entries) {
                f << pair.first << ',' << pair.second << ',';
                if (e.conditioner == pf::kEmptySet)
                    f << "empty";
                else
                    f << e.conditioner;
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%.17g", e.decision.statistic);
                f << ',' << buf << ','
                  << (e.decision.dependent ? "dependent" : "independent") << '\n';
            }
    }
    std::cerr << "# ci_calls=" << result.ci_calls << "\n";
    return 0;
}

int cmd_test_ci(const std::string& data_path, const std::string& family, double c, double s,
                int permutations, double cutoff, int folds, std::uint64_t seed) {
    const pf::Dataset data = pf::read_csv(data_path);
    if (data.cols() < 2 || data.cols() > 3)
        throw pf::Error("test-ci expects a CSV with 2 or 3 columns");
    auto tester = pf::make_tester(make_spec(family, c, s, permutations, cutoff, folds, seed));
    tester->prepare(data);
    const std::optional<int> z = data.cols() == 3 ? std::optional<int>(2) : std::nullopt;
    const pf::CiDecision decision = tester->test(data, 0, 1, z);
    const pf::Family fam = pf::family_from_name(family);
    const char* kind = folds > 1 ? "votes_threshold"
                       : fam == pf::Family::kNonparam ? "pvalue"
                                                      : "threshold";
    std::printf("%s statistic=%.10g %s=%.10g\n",
                decision.dependent ? "dependent" : "independent", decision.statistic, kind,
                decision.threshold_or_pvalue);
    return 0;
}

pf::Cpdag load_as_cpdag(const std::string& path, bool force_cpdag) {
    const pf::ParsedGraph parsed = pf::load_graph(path);
    if (!force_cpdag && parsed.is_pure_dag()) {
        const pf::Dag dag = parsed.to_dag();
        if (pf::is_polyforest(dag)) return pf::true_cpdag(dag);
    }
    return parsed.to_cpdag();
}

int cmd_eval(const std::string& true_path, const std::string& est_path, bool true_is_cpdag) {
    const pf::Cpdag truth = load_as_cpdag(true_path, true_is_cpdag);
    const pf::Cpdag est = load_as_cpdag(est_path, true);
    const pf::EvalReport report = pf::evaluate(truth, est);
    std::printf("shd_skel=%d shd_cpdag=%d exact_skel=%d exact_cpdag=%d\n",
                report.shd_skeleton, report.shd_cpdag, report.exact_skeleton ? 1 : 0,
                report.exact_cpdag ? 1 : 0);
    return 0;
}

int cmd_experiment(const std::string& config_path,
                   const std::vector<std::string>& overrides, int workers,
                   const std::string& out_dir, bool timing) {
    pf::ExperimentConfig config =
        config_path.empty() ? pf::ExperimentConfig{} : pf::parse_config_file(config_path);
    for (const auto& kv : overrides) {
        const size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw pf::Error("--set expects key=value, got '" + kv + "'");
        pf::apply_config_override(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (workers > 0) config.workers = workers;  // CLI wins over file and env
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (timing) config.timing = true;
    config.validate();
    std::filesystem::create_directories(config.out_dir);
    const std::vector<pf::RunRecord> records = pf::run_experiment(config);
    const std::string records_path = config.out_dir + "/records.csv";
    {
        std::ofstream f(records_path);
        if (!f) throw pf::Error("cannot write " + records_path);
        f << pf::records_to_csv(records, config.timing);
    }
    const auto summary = pf::aggregate(records);
    const std::string summary_path = config.out_dir + "/summary.csv";
    {
        std::ofstream f(summary_path);
        if (!f) throw pf::Error("cannot write " + summary_path);
        f << pf::summary_to_csv(summary);
    }
    std::cout << "wrote " << records_path << " and " << summary_path << "\n";
    return 0;
}

int cmd_plots(const std::string& summary_path, const std::string& out_dir) {
    std::ifstream in(summary_path);
    if (!in) throw pf::Error("cannot open " + summary_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::filesystem::create_directories(out_dir);
    const auto paths = pf::emit_plots(pf::summary_from_csv(buf.str()), out_dir);
    for (const auto& p : paths) std::cout << "wrote " << p << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"poly-forest structure learning toolkit"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "generate a forest, a model and data");
    simulate->add_option("--family", sim.family)->check(CLI::IsMember({"bernoulli", "gaussian", "nonparam"}));
    simulate->add_option("--d", sim.d);
    simulate->add_option("--n", sim.n);
    simulate->add_option("--attach-prob", sim.attach_prob);
    simulate->add_option("--seed", sim.seed);
    simulate->add_option("--out-dir", sim.out_dir);
    simulate->add_option("--coef-abs-min", sim.coef_abs_min);
    simulate->add_option("--coef-abs-max", sim.coef_abs_max);
    simulate->add_option("--flip-min", sim.flip_min);
    simulate->add_option("--flip-max", sim.flip_max);
    simulate->add_option("--mix-weight", sim.mix_weight);

    std::string data_path, family = "gaussian", out, trace_out;
    double c = 0.1, s = 1.0, cutoff = 0.05;
    int folds = 1, permutations = 199;
    std::uint64_t seed = 1;
    bool trace = false;
    auto* learn_cmd = app.add_subcommand("learn", "estimate a CPDAG from data");
    learn_cmd->add_option("--data", data_path)->required();
    learn_cmd->add_option("--family", family)->check(CLI::IsMember({"bernoulli", "gaussian", "nonparam"}));
    learn_cmd->add_option("--c", c);
    learn_cmd->add_option("--s", s);
    learn_cmd->add_option("--folds", folds);
    learn_cmd->add_option("--seed", seed);
    learn_cmd->add_option("--permutations", permutations);
    learn_cmd->add_option("--cutoff", cutoff);
    learn_cmd->add_flag("--trace", trace);
    learn_cmd->add_option("--out", out);
    learn_cmd->add_option("--trace-out", trace_out);

    std::string ci_data, ci_family = "gaussian";
    double ci_c = 0.1, ci_s = 1.0, ci_cutoff = 0.05;
    int ci_perm = 199, ci_folds = 1;
    std::uint64_t ci_seed = 1;
    auto* test_ci = app.add_subcommand("test-ci", "run one CI test on a 2-3 column CSV");
    test_ci->add_option("--data", ci_data)->required();
    test_ci->add_option("--family", ci_family)->check(CLI::IsMember({"bernoulli", "gaussian", "nonparam"}));
    test_ci->add_option("--c", ci_c);
    test_ci->add_option("--s", ci_s);
    test_ci->add_option("--permutations", ci_perm);
    test_ci->add_option("--cutoff", ci_cutoff);
    test_ci->add_option("--folds", ci_folds);
    test_ci->add_option("--seed", ci_seed);

    std::string true_path, est_path;
    bool true_is_cpdag = false;
    auto* eval_cmd = app.add_subcommand("eval", "compare estimated and true structures");
    eval_cmd->add_option("--true", true_path)->required();
    eval_cmd->add_option("--est", est_path)->required();
    eval_cmd->add_flag("--true-is-cpdag", true_is_cpdag,
                       "treat a fully directed truth file as a CPDAG instead of a DAG");

    std::string config_path, exp_out_dir;
    std::vector<std::string> overrides;
    int workers = 0;
    bool timing = false;
    auto* experiment = app.add_subcommand("experiment", "run a config-driven sweep");
    experiment->add_option("--config", config_path);
    experiment->add_option("--set", overrides, "override a config key, e.g. --set n_list=300,1000");
    experiment->add_option("--workers", workers);
    experiment->add_option("--out-dir", exp_out_dir);
    experiment->add_flag("--timing", timing, "record measured per-cell wall time in records.csv");

    std::string summary_path, plots_out = ".";
    auto* plots = app.add_subcommand("plots", "render SHD/PRR plots from a summary CSV");
    plots->add_option("--summary", summary_path)->required();
    plots->add_option("--out-dir", plots_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(sim);
        if (learn_cmd->parsed())
            return cmd_learn(data_path, family, c, s, folds, seed, permutations, cutoff,
                             trace, out, trace_out);
        if (test_ci->parsed())
            return cmd_test_ci(ci_data, ci_family, ci_c, ci_s, ci_perm, ci_cutoff, ci_folds,
                               ci_seed);
        if (eval_cmd->parsed()) return cmd_eval(true_path, est_path, true_is_cpdag);
        if (experiment->parsed())
            return cmd_experiment(config_path, overrides, workers, exp_out_dir, timing);
        if (plots->parsed()) return cmd_plots(summary_path, plots_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
