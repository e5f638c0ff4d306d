#include "polyforest/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "polyforest/citest.hpp"
#include "polyforest/errors.hpp"
#include "polyforest/eval.hpp"
#include "polyforest/learner.hpp"

namespace polyforest {

void ExperimentConfig::validate() const {
    if (d_list.empty() || n_list.empty()) throw Error("config: d_list and n_list must be non-empty");
    if (replications < 1) throw Error("config: replications must be >= 1");
    for (int d : d_list)
        if (d < 2) throw Error("config: every d must be >= 2");
    for (int n : n_list)
        if (n < 1) throw Error("config: every n must be >= 1");
    if (attach_prob < 0.0 || attach_prob > 1.0) throw Error("config: attach_prob outside [0,1]");
    if (folds < 1 || folds % 2 == 0) throw Error("config: folds must be odd");
    if (family == Family::kNonparam && !allow_large_nonparam)
        for (int d : d_list)
            if (d > max_nonparam_d)
                throw Error("config: nonparam d=" + std::to_string(d) + " exceeds the cap of " +
                            std::to_string(max_nonparam_d) +
                            "; set allow_large_nonparam=1 to override");
}

namespace {

TesterFamily tester_family(Family f) {
    switch (f) {
        case Family::kBernoulli: return TesterFamily::kBernoulli;
        case Family::kGaussian: return TesterFamily::kGaussian;
        case Family::kNonparam: return TesterFamily::kNonparam;
    }
    return TesterFamily::kGaussian;
}

RunRecord run_cell(const ExperimentConfig& config, int d, int n, int rep) {
    RunRecord record;
    record.family = config.family;
    record.d = d;
    record.n = n;
    record.c = config.c;
    record.s = config.s;
    record.rep = rep;
    record.seed = mix_seed({config.base_seed, static_cast<std::uint64_t>(d),
                            static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep)});
    const auto start = std::chrono::steady_clock::now();
    try {
        Rng cell_rng(record.seed);
        Rng graph_rng = cell_rng.split(1);
        Rng model_rng = cell_rng.split(2);
        Rng data_rng = cell_rng.split(3);
        const Dag dag = random_polyforest(d, config.attach_prob, graph_rng);
        const Cpdag truth = true_cpdag(dag);

        CiTesterSpec spec;
        spec.family = tester_family(config.family);
        spec.c = config.c;
        spec.cutoff = config.cutoff;
        spec.s = config.s;
        spec.permutations = config.permutations;
        spec.median_folds = config.folds;
        spec.seed = cell_rng.split(4).next_u64();

        Dataset data(0, d);
        switch (config.family) {
            case Family::kBernoulli: {
                auto model = random_bernoulli_model(dag, model_rng, config.flip_min,
                                                    config.flip_max);
                data = sample_forest(model, n, data_rng);
                break;
            }
            case Family::kGaussian: {
                auto model = random_gaussian_model(dag, model_rng, config.coef_abs_min,
                                                   config.coef_abs_max);
                data = sample_forest(model, n, data_rng);
                break;
            }
            case Family::kNonparam: {
                auto model = random_nonparam_model(dag, model_rng, config.mix_weight);
                data = sample_forest(model, n, data_rng);
                break;
            }
        }
        auto tester = make_tester(spec);
        const LearnResult learned = learn(data, *tester);
        const EvalReport report = evaluate(truth, learned.cpdag);
        record.shd_skeleton = report.shd_skeleton;
        record.shd_cpdag = report.shd_cpdag;
        record.exact_cpdag = report.exact_cpdag;
        record.ci_calls = learned.ci_calls;
    } catch (const std::exception&) {
        record.failed = true;
        record.shd_skeleton = -1;
        record.shd_cpdag = -1;
    }
    record.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    return record;
}

}  // namespace

int resolve_workers(const ExperimentConfig& config) {
    if (config.workers > 0) return config.workers;
    if (const char* env = std::getenv("POLYFOREST_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& config) {
    config.validate();
    struct Cell {
        int d, n, rep;
    };
    std::vector<Cell> cells;
    for (int d : config.d_list)
        for (int n : config.n_list)
            for (int rep = 0; rep < config.replications; ++rep) cells.push_back({d, n, rep});
    std::vector<RunRecord> records(cells.size());
    const int workers = std::min<int>(resolve_workers(config), static_cast<int>(cells.size()));
    if (workers <= 1) {
        for (size_t i = 0; i < cells.size(); ++i)
            records[i] = run_cell(config, cells[i].d, cells[i].n, cells[i].rep);
    } else {
        std::atomic<size_t> next{0};
        auto work = [&] {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= cells.size()) return;
                records[i] = run_cell(config, cells[i].d, cells[i].n, cells[i].rep);
            }
        };
        std::vector<std::thread> threads;
        for (int w = 0; w < workers; ++w) threads.emplace_back(work);
        for (auto& t : threads) t.join();
    }
    return records;  // already in (d, n, rep) order
}

namespace {
std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}
}  // namespace

std::string records_to_csv(const std::vector<RunRecord>& records, bool timing) {
    std::ostringstream out;
    out << "family,d,n,c,s,rep,seed,shd_skeleton,shd_cpdag,exact_cpdag,ci_calls,runtime_ms\n";
    for (const auto& r : records) {
        out << family_name(r.family) << ',' << r.d << ',' << r.n << ',' << fmt_double(r.c)
            << ',' << fmt_double(r.s) << ',' << r.rep << ',' << r.seed << ','
            << r.shd_skeleton << ',' << r.shd_cpdag << ',' << (r.exact_cpdag ? 1 : 0) << ','
            << r.ci_calls << ',' << (timing ? r.runtime_ms : 0) << '\n';
    }
    return out.str();
}

std::vector<RunRecord> records_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error("records CSV: empty");
    std::vector<RunRecord> records;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        std::vector<std::string> f;
        while (std::getline(ls, tok, ',')) f.push_back(tok);
        if (f.size() != 12) throw ParseError("records CSV: expected 12 fields", line_no);
        RunRecord r;
        r.family = family_from_name(f[0]);
        r.d = std::stoi(f[1]);
        r.n = std::stoi(f[2]);
        r.c = std::stod(f[3]);
        r.s = std::stod(f[4]);
        r.rep = std::stoi(f[5]);
        r.seed = std::stoull(f[6]);
        r.shd_skeleton = std::stoi(f[7]);
        r.shd_cpdag = std::stoi(f[8]);
        r.exact_cpdag = f[9] == "1";
        r.ci_calls = std::stoll(f[10]);
        r.runtime_ms = std::stoll(f[11]);
        r.failed = r.shd_skeleton < 0;
        records.push_back(r);
    }
    return records;
}

std::vector<SummaryRow> aggregate(const std::vector<RunRecord>& records) {
    if (records.empty()) throw Error("aggregate: no records");
    std::map<std::tuple<std::string, int, int>, std::vector<const RunRecord*>> groups;
    for (const auto& r : records)
        groups[{family_name(r.family), r.d, r.n}].push_back(&r);
    std::vector<SummaryRow> rows;
    for (const auto& [key, recs] : groups) {
        SummaryRow row;
        row.family = family_from_name(std::get<0>(key));
        row.d = std::get<1>(key);
        row.n = std::get<2>(key);
        row.c = recs.front()->c;
        row.s = recs.front()->s;
        double sum_sk = 0, sum_cp = 0, hits_cp = 0, hits_sk = 0;
        std::vector<const RunRecord*> ok;
        for (const auto* r : recs)
            if (!r->failed) ok.push_back(r);
        row.count = static_cast<int>(ok.size());
        if (row.count == 0) {
            rows.push_back(row);
            continue;
        }
        for (const auto* r : ok) {
            sum_sk += r->shd_skeleton;
            sum_cp += r->shd_cpdag;
            hits_cp += r->exact_cpdag ? 1 : 0;
            hits_sk += r->shd_skeleton == 0 ? 1 : 0;
        }
        row.mean_shd_skeleton = sum_sk / row.count;
        row.mean_shd_cpdag = sum_cp / row.count;
        row.prr_cpdag = hits_cp / row.count;
        row.prr_skeleton = hits_sk / row.count;
        if (row.count > 1) {
            double ss_sk = 0, ss_cp = 0;
            for (const auto* r : ok) {
                ss_sk += (r->shd_skeleton - row.mean_shd_skeleton) *
                         (r->shd_skeleton - row.mean_shd_skeleton);
                ss_cp += (r->shd_cpdag - row.mean_shd_cpdag) *
                         (r->shd_cpdag - row.mean_shd_cpdag);
            }
            row.std_shd_skeleton = std::sqrt(ss_sk / (row.count - 1));
            row.std_shd_cpdag = std::sqrt(ss_cp / (row.count - 1));
        }
        rows.push_back(row);
    }
    return rows;
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << "family,d,n,c,s,count,mean_shd_skeleton,std_shd_skeleton,mean_shd_cpdag,"
           "std_shd_cpdag,prr_cpdag,prr_skeleton\n";
    for (const auto& r : rows) {
        out << family_name(r.family) << ',' << r.d << ',' << r.n << ',' << fmt_double(r.c)
            << ',' << fmt_double(r.s) << ',' << r.count << ','
            << fmt_double(r.mean_shd_skeleton) << ',' << fmt_double(r.std_shd_skeleton)
            << ',' << fmt_double(r.mean_shd_cpdag) << ',' << fmt_double(r.std_shd_cpdag)
            << ',' << fmt_double(r.prr_cpdag) << ',' << fmt_double(r.prr_skeleton) << '\n';
    }
    return out.str();
}

std::vector<SummaryRow> summary_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error("summary CSV: empty");
    std::vector<SummaryRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        std::vector<std::string> f;
        while (std::getline(ls, tok, ',')) f.push_back(tok);
        if (f.size() != 12) throw ParseError("summary CSV: expected 12 fields", line_no);
        SummaryRow r;
        r.family = family_from_name(f[0]);
        r.d = std::stoi(f[1]);
        r.n = std::stoi(f[2]);
        r.c = std::stod(f[3]);
        r.s = std::stod(f[4]);
        r.count = std::stoi(f[5]);
        r.mean_shd_skeleton = std::stod(f[6]);
        r.std_shd_skeleton = std::stod(f[7]);
        r.mean_shd_cpdag = std::stod(f[8]);
        r.std_shd_cpdag = std::stod(f[9]);
        r.prr_cpdag = std::stod(f[10]);
        r.prr_skeleton = std::stod(f[11]);
        rows.push_back(r);
    }
    return rows;
}

std::vector<ScalingEntry> scaling_probe(const std::vector<SummaryRow>& summary, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw Error("scaling_probe: tau outside [0,1]");
    std::map<int, std::map<int, double>> by_d;  // d -> n -> prr
    for (const auto& row : summary) by_d[row.d][row.n] = row.prr_cpdag;
    std::vector<ScalingEntry> out;
    for (const auto& [d, grid] : by_d) {
        ScalingEntry e;
        e.d = d;
        for (const auto& [n, prr_val] : grid)
            if (prr_val >= tau) {
                e.n_star = n;
                break;
            }
        out.push_back(e);
    }
    return out;
}

namespace {

std::vector<int> parse_int_list(const std::string& value) {
    std::vector<int> out;
    std::istringstream in(value);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

bool parse_bool(const std::string& v) { return v == "1" || v == "true" || v == "yes"; }

}  // namespace

void apply_config_override(ExperimentConfig& config, const std::string& key,
                           const std::string& value) {
    if (key == "family")
        config.family = family_from_name(value);
    else if (key == "d_list")
        config.d_list = parse_int_list(value);
    else if (key == "n_list")
        config.n_list = parse_int_list(value);
    else if (key == "replications")
        config.replications = std::stoi(value);
    else if (key == "attach_prob")
        config.attach_prob = std::stod(value);
    else if (key == "c")
        config.c = std::stod(value);
    else if (key == "s")
        config.s = std::stod(value);
    else if (key == "permutations")
        config.permutations = std::stoi(value);
    else if (key == "cutoff")
        config.cutoff = std::stod(value);
    else if (key == "folds")
        config.folds = std::stoi(value);
    else if (key == "base_seed")
        config.base_seed = std::stoull(value);
    else if (key == "workers")
        config.workers = std::stoi(value);
    else if (key == "out_dir")
        config.out_dir = value;
    else if (key == "coef_abs_min")
        config.coef_abs_min = std::stod(value);
    else if (key == "coef_abs_max")
        config.coef_abs_max = std::stod(value);
    else if (key == "flip_min")
        config.flip_min = std::stod(value);
    else if (key == "flip_max")
        config.flip_max = std::stod(value);
    else if (key == "mix_weight")
        config.mix_weight = std::stod(value);
    else if (key == "max_nonparam_d")
        config.max_nonparam_d = std::stoi(value);
    else if (key == "allow_large_nonparam")
        config.allow_large_nonparam = parse_bool(value);
    else if (key == "timing")
        config.timing = parse_bool(value);
    else
        throw Error("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config_string(const std::string& text) {
    ExperimentConfig config;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (size_t h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
        // trim
        size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        size_t e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config: expected key=value, got '" + line + "'", line_no);
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        size_t vb = value.find_first_not_of(" \t");
        value = vb == std::string::npos ? "" : value.substr(vb);
        try {
            apply_config_override(config, key, value);
        } catch (const Error&) {
            throw;
        } catch (const std::exception& ex) {
            throw ParseError("config: bad value for '" + key + "': " + ex.what(), line_no);
        }
    }
    return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_string(buf.str());
}

}  // namespace polyforest
