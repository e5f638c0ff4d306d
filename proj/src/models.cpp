#include "polyforest/models.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "polyforest/errors.hpp"
#include "polyforest/graph_io.hpp"

namespace polyforest {

std::string family_name(Family f) {
    switch (f) {
        case Family::kBernoulli: return "bernoulli";
        case Family::kGaussian: return "gaussian";
        case Family::kNonparam: return "nonparam";
    }
    return "?";
}

Family family_from_name(const std::string& name) {
    if (name == "bernoulli") return Family::kBernoulli;
    if (name == "gaussian") return Family::kGaussian;
    if (name == "nonparam") return Family::kNonparam;
    throw Error("unknown family: " + name);
}

ForestModelBase::ForestModelBase(Dag graph) : graph_(std::move(graph)) {
    const int d = graph_.node_count();
    parent_.assign(d, -1);
    for (const auto& [p, c] : graph_.edges()) {
        if (parent_[c] != -1)
            throw Error("forest model: node " + std::to_string(c) +
                        " has more than one parent");
        parent_[c] = p;
    }
    if (!is_polyforest(graph_)) throw Error("forest model: graph is not a poly-forest");
    topo_ = graph_.topological_order();
}

BernoulliForestModel::BernoulliForestModel(Dag graph, std::vector<double> flip_magnitudes,
                                           std::vector<int> signs)
    : ForestModelBase(std::move(graph)),
      flip_(std::move(flip_magnitudes)),
      sign_(std::move(signs)) {
    const int d = node_count();
    if (static_cast<int>(flip_.size()) != d || static_cast<int>(sign_.size()) != d)
        throw Error("BernoulliForestModel: parameter vectors must have one entry per node");
    for (int k = 0; k < d; ++k) {
        if (parent_[k] < 0) continue;
        if (!(flip_[k] > 0.0 && flip_[k] < 0.5))
            throw Error("BernoulliForestModel: flip magnitude outside (0, 1/2)");
        if (sign_[k] != 1 && sign_[k] != -1)
            throw Error("BernoulliForestModel: sign must be +1 or -1");
    }
}

GaussianForestModel::GaussianForestModel(Dag graph, std::vector<double> coefficients,
                                         std::vector<double> noise_variances)
    : ForestModelBase(std::move(graph)),
      coef_(std::move(coefficients)),
      var_(std::move(noise_variances)) {
    const int d = node_count();
    if (static_cast<int>(coef_.size()) != d || static_cast<int>(var_.size()) != d)
        throw Error("GaussianForestModel: parameter vectors must have one entry per node");
    for (int k = 0; k < d; ++k)
        if (!(var_[k] > 0.0)) throw Error("GaussianForestModel: noise variance must be > 0");
}

double apply_link(LinkFn f, double z) {
    switch (f) {
        case LinkFn::kSin: return 0.5 * (std::sin(2.0 * M_PI * z) + 1.0);
        case LinkFn::kSquare: return z * z;
        case LinkFn::kLog: return std::log1p(z) / std::log(2.0);
        case LinkFn::kCos: return 0.5 * (std::cos(2.0 * M_PI * z) + 1.0);
    }
    return 0.0;
}

std::string link_name(LinkFn f) {
    switch (f) {
        case LinkFn::kSin: return "sin";
        case LinkFn::kSquare: return "square";
        case LinkFn::kLog: return "log";
        case LinkFn::kCos: return "cos";
    }
    return "?";
}

LinkFn link_from_name(const std::string& name) {
    if (name == "sin") return LinkFn::kSin;
    if (name == "square") return LinkFn::kSquare;
    if (name == "log") return LinkFn::kLog;
    if (name == "cos") return LinkFn::kCos;
    throw Error("unknown link function: " + name);
}

NonparamForestModel::NonparamForestModel(Dag graph, std::vector<LinkFn> links,
                                         double mix_weight)
    : ForestModelBase(std::move(graph)), links_(std::move(links)), mix_(mix_weight) {
    if (static_cast<int>(links_.size()) != node_count())
        throw Error("NonparamForestModel: need one link per node");
    if (!(mix_ > 0.0 && mix_ < 1.0))
        throw Error("NonparamForestModel: mix_weight outside (0, 1)");
}

namespace {
std::vector<int> parent_array(const Dag& graph) {
    std::vector<int> parent(graph.node_count(), -1);
    for (const auto& [p, c] : graph.edges()) parent[c] = p;
    return parent;
}
}  // namespace

BernoulliForestModel random_bernoulli_model(const Dag& graph, Rng& rng, double flip_lo,
                                            double flip_hi) {
    const int d = graph.node_count();
    const std::vector<int> parent = parent_array(graph);
    std::vector<double> flip(d, 0.25);  // root entries are unused
    std::vector<int> sign(d, 1);
    for (int k = 0; k < d; ++k) {
        if (parent[k] < 0) continue;
        flip[k] = rng.uniform(flip_lo, flip_hi);
        sign[k] = rng.rademacher();
    }
    return BernoulliForestModel(graph, std::move(flip), std::move(sign));
}

GaussianForestModel random_gaussian_model(const Dag& graph, Rng& rng, double coef_abs_lo,
                                          double coef_abs_hi) {
    const int d = graph.node_count();
    const std::vector<int> parent = parent_array(graph);
    std::vector<double> coef(d, 0.0);
    for (int k = 0; k < d; ++k)
        if (parent[k] >= 0)
            coef[k] = rng.rademacher() * rng.uniform(coef_abs_lo, coef_abs_hi);
    return GaussianForestModel(graph, std::move(coef), std::vector<double>(d, 1.0));
}

NonparamForestModel random_nonparam_model(const Dag& graph, Rng& rng, double mix_weight) {
    const int d = graph.node_count();
    std::vector<LinkFn> links(d, LinkFn::kSin);
    for (int k = 0; k < d; ++k)
        links[k] = static_cast<LinkFn>(rng.uniform_int(4));
    return NonparamForestModel(graph, std::move(links), mix_weight);
}

Dataset sample_forest(const BernoulliForestModel& m, int n, Rng& rng) {
    if (n < 1) throw Error("sample_forest: n must be >= 1");
    Dataset data(n, m.node_count());
    for (int k : m.topological_order()) {
        auto& col = data.mutable_column(k);
        const int p = m.parent(k);
        if (p < 0) {
            for (int i = 0; i < n; ++i) col[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
        } else {
            const auto& pc = data.column(p);
            const double shift = m.sign(k) * m.flip(k);
            for (int i = 0; i < n; ++i) {
                const double p1 = pc[i] == 1.0 ? 0.5 + shift : 0.5 - shift;
                col[i] = rng.bernoulli(p1) ? 1.0 : 0.0;
            }
        }
    }
    return data;
}

Dataset sample_forest(const GaussianForestModel& m, int n, Rng& rng) {
    if (n < 1) throw Error("sample_forest: n must be >= 1");
    Dataset data(n, m.node_count());
    for (int k : m.topological_order()) {
        auto& col = data.mutable_column(k);
        const double sd = std::sqrt(m.noise_variance(k));
        const int p = m.parent(k);
        if (p < 0) {
            for (int i = 0; i < n; ++i) col[i] = rng.normal(0.0, sd);
        } else {
            const auto& pc = data.column(p);
            const double beta = m.coefficient(k);
            for (int i = 0; i < n; ++i) col[i] = beta * pc[i] + rng.normal(0.0, sd);
        }
    }
    return data;
}

Dataset sample_forest(const NonparamForestModel& m, int n, Rng& rng) {
    if (n < 1) throw Error("sample_forest: n must be >= 1");
    Dataset data(n, m.node_count());
    const double mix = m.mix_weight();
    for (int k : m.topological_order()) {
        auto& col = data.mutable_column(k);
        const int p = m.parent(k);
        if (p < 0) {
            for (int i = 0; i < n; ++i) col[i] = rng.uniform();
        } else {
            const auto& pc = data.column(p);
            const LinkFn f = m.link(k);
            for (int i = 0; i < n; ++i)
                col[i] = mix * apply_link(f, pc[i]) + (1.0 - mix) * rng.uniform();
        }
    }
    return data;
}

Dataset sample_forest(const ForestModel& m, int n, std::uint64_t seed) {
    Rng rng(seed);
    return std::visit([&](const auto& model) { return sample_forest(model, n, rng); }, m);
}

std::vector<double> exact_joint_pmf(const BernoulliForestModel& m) {
    const int d = m.node_count();
    if (d > 22) throw Error("exact_joint_pmf: d > 22 is too large to enumerate");
    const std::size_t cells = std::size_t{1} << d;
    std::vector<double> pmf(cells, 0.0);
    for (std::size_t cell = 0; cell < cells; ++cell) {
        double p = 1.0;
        for (int k = 0; k < d; ++k) {
            const int xk = (cell >> k) & 1;
            const int pa = m.parent(k);
            if (pa < 0) {
                p *= 0.5;
            } else {
                const int xp = (cell >> pa) & 1;
                const double shift = m.sign(k) * m.flip(k);
                const double p1 = xp == 1 ? 0.5 + shift : 0.5 - shift;
                p *= xk == 1 ? p1 : 1.0 - p1;
            }
        }
        pmf[cell] = p;
    }
    return pmf;
}

std::vector<std::vector<double>> exact_covariance(const GaussianForestModel& m) {
    const int d = m.node_count();
    std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
    for (int k : m.topological_order()) {
        const int p = m.parent(k);
        if (p < 0) {
            cov[k][k] = m.noise_variance(k);
        } else {
            const double b = m.coefficient(k);
            for (int j = 0; j < d; ++j) {
                if (j == k) continue;
                cov[k][j] = cov[j][k] = b * cov[p][j];
            }
            cov[k][k] = b * b * cov[p][p] + m.noise_variance(k);
        }
    }
    return cov;
}

std::vector<std::vector<double>> exact_covariance_matrix_identity(
    const GaussianForestModel& m) {
    const int d = m.node_count();
    Eigen::MatrixXd IminusB = Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        omega(k, k) = m.noise_variance(k);
        if (m.parent(k) >= 0) IminusB(m.parent(k), k) = -m.coefficient(k);
    }
    const Eigen::MatrixXd inv = IminusB.lu().solve(Eigen::MatrixXd::Identity(d, d));
    const Eigen::MatrixXd sigma = inv.transpose() * omega * inv;
    std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) cov[a][b] = sigma(a, b);
    return cov;
}

namespace {

// Skeleton path between two nodes of a forest via BFS; empty when the
// nodes are in different components.
std::vector<int> skeleton_path(const ForestModelBase& m, int from, int to) {
    const int d = m.node_count();
    std::vector<std::vector<int>> adj(d);
    for (const auto& [p, c] : m.graph().edges()) {
        adj[p].push_back(c);
        adj[c].push_back(p);
    }
    std::vector<int> prev(d, -2);
    std::deque<int> queue{from};
    prev[from] = -1;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        if (v == to) break;
        for (int w : adj[v])
            if (prev[w] == -2) {
                prev[w] = v;
                queue.push_back(w);
            }
    }
    if (prev[to] == -2) return {};
    std::vector<int> path{to};
    while (path.back() != from) path.push_back(prev[path.back()]);
    return path;  // to ... from
}

}  // namespace

double pair_correlation(const BernoulliForestModel& m, int j, int k) {
    if (j == k) return 1.0;
    const std::vector<int> path = skeleton_path(m, j, k);
    if (path.empty()) return 0.0;
    double r = 1.0;
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        const int a = path[i], b = path[i + 1];
        // Exactly one of a, b is the child on this edge.
        r *= m.parent(a) == b ? m.edge_weight(a) : m.edge_weight(b);
    }
    return r;
}

std::array<double, 8> triple_pmf(const BernoulliForestModel& m, int j, int k, int l) {
    const double rjk = pair_correlation(m, j, k);
    const double rjl = pair_correlation(m, j, l);
    const double rkl = pair_correlation(m, k, l);
    std::array<double, 8> pmf{};
    for (int cell = 0; cell < 8; ++cell) {
        const int sj = (cell & 4) ? 1 : -1;
        const int sk = (cell & 2) ? 1 : -1;
        const int sl = (cell & 1) ? 1 : -1;
        pmf[cell] = (1.0 + rjk * sj * sk + rjl * sj * sl + rkl * sk * sl) / 8.0;
    }
    // Table layout is x*4 + y*2 + z with x = bit value of node j etc.; the
    // sign bookkeeping above already matches (bit set <=> value 1 <=> spin +1).
    return pmf;
}

std::array<double, 4> pairwise_pmf(const BernoulliForestModel& m, int j, int k) {
    const double r = pair_correlation(m, j, k);
    std::array<double, 4> pmf{};
    for (int cell = 0; cell < 4; ++cell) {
        const int sj = (cell & 2) ? 1 : -1;
        const int sk = (cell & 1) ? 1 : -1;
        pmf[cell] = (1.0 + r * sj * sk) / 4.0;
    }
    return pmf;
}

double tv_dependence_conditional(const std::array<double, 8>& pmf) {
    double total = 0.0;
    for (int z = 0; z < 2; ++z) {
        double pz = 0.0;
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) pz += pmf[x * 4 + y * 2 + z];
        if (pz <= 0.0) continue;
        double px[2] = {0, 0}, py[2] = {0, 0};
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) {
                px[x] += pmf[x * 4 + y * 2 + z] / pz;
                py[y] += pmf[x * 4 + y * 2 + z] / pz;
            }
        double sum = 0.0;
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                sum += std::abs(pmf[x * 4 + y * 2 + z] / pz - px[x] * py[y]);
        total += pz * sum;
    }
    return total;
}

double tv_dependence_marginal(const std::array<double, 4>& pmf) {
    double px[2] = {pmf[0] + pmf[1], pmf[2] + pmf[3]};
    double py[2] = {pmf[0] + pmf[2], pmf[1] + pmf[3]};
    double sum = 0.0;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) sum += std::abs(pmf[x * 2 + y] - px[x] * py[y]);
    return sum;
}

double exact_dependence(const BernoulliForestModel& m, int j, int k,
                        std::optional<int> l) {
    if (l.has_value()) return tv_dependence_conditional(triple_pmf(m, j, k, *l));
    return tv_dependence_marginal(pairwise_pmf(m, j, k));
}

double partial_correlation_from_covariance(const std::vector<std::vector<double>>& cov,
                                           int j, int k, std::optional<int> l) {
    if (!l.has_value()) return cov[j][k] / std::sqrt(cov[j][j] * cov[k][k]);
    const int z = *l;
    const double cjk = cov[j][k] - cov[j][z] * cov[k][z] / cov[z][z];
    const double vj = cov[j][j] - cov[j][z] * cov[j][z] / cov[z][z];
    const double vk = cov[k][k] - cov[k][z] * cov[k][z] / cov[z][z];
    return cjk / std::sqrt(vj * vk);
}

double exact_dependence(const GaussianForestModel& m, int j, int k, std::optional<int> l) {
    return std::abs(partial_correlation_from_covariance(exact_covariance(m), j, k, l));
}

Family model_family(const ForestModel& m) {
    if (std::holds_alternative<BernoulliForestModel>(m)) return Family::kBernoulli;
    if (std::holds_alternative<GaussianForestModel>(m)) return Family::kGaussian;
    return Family::kNonparam;
}

const Dag& model_graph(const ForestModel& m) {
    return std::visit([](const auto& model) -> const Dag& { return model.graph(); }, m);
}

namespace {
std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace

std::string write_model(const ForestModel& m, const std::string& graph_path) {
    std::ostringstream out;
    out << "family=" << family_name(model_family(m)) << "\n";
    out << "graph=" << graph_path << "\n";
    if (const auto* b = std::get_if<BernoulliForestModel>(&m)) {
        for (const auto& [p, c] : b->graph().edges())
            out << "edge " << p << " " << c << " b=" << fmt(b->flip(c))
                << " sign=" << b->sign(c) << "\n";
    } else if (const auto* g = std::get_if<GaussianForestModel>(&m)) {
        for (int k = 0; k < g->node_count(); ++k)
            out << "node " << k << " sigma2=" << fmt(g->noise_variance(k)) << "\n";
        for (const auto& [p, c] : g->graph().edges())
            out << "edge " << p << " " << c << " beta=" << fmt(g->coefficient(c)) << "\n";
    } else {
        const auto& np = std::get<NonparamForestModel>(m);
        out << "mix_weight=" << fmt(np.mix_weight()) << "\n";
        for (const auto& [p, c] : np.graph().edges())
            out << "edge " << p << " " << c << " link=" << link_name(np.link(c)) << "\n";
    }
    return out.str();
}

void save_model(const ForestModel& m, const std::string& model_path,
                const std::string& graph_path) {
    std::ofstream out(model_path);
    if (!out) throw Error("cannot write model file: " + model_path);
    out << write_model(m, graph_path);
}

namespace {

std::map<std::string, std::string> parse_kv_tokens(const std::vector<std::string>& toks,
                                                   int line) {
    std::map<std::string, std::string> kv;
    for (const auto& t : toks) {
        size_t eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value, got '" + t + "'", line);
        kv[t.substr(0, eq)] = t.substr(eq + 1);
    }
    return kv;
}

}  // namespace

ForestModel load_model(const std::string& model_path) {
    std::ifstream in(model_path);
    if (!in) throw Error("cannot open model file: " + model_path);
    std::string family_str, graph_rel, line;
    double mix_weight = 0.3;
    struct EdgeParams {
        int p, c;
        std::map<std::string, std::string> kv;
    };
    std::vector<EdgeParams> edge_params;
    std::map<int, double> sigma2;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (size_t h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
        std::istringstream ls(line);
        std::vector<std::string> toks;
        std::string t;
        while (ls >> t) toks.push_back(t);
        if (toks.empty()) continue;
        if (toks[0] == "edge") {
            if (toks.size() < 3) throw ParseError("edge line needs parent and child", line_no);
            EdgeParams e;
            e.p = std::stoi(toks[1]);
            e.c = std::stoi(toks[2]);
            e.kv = parse_kv_tokens({toks.begin() + 3, toks.end()}, line_no);
            edge_params.push_back(std::move(e));
        } else if (toks[0] == "node") {
            if (toks.size() < 2) throw ParseError("node line needs an index", line_no);
            auto kv = parse_kv_tokens({toks.begin() + 2, toks.end()}, line_no);
            if (kv.count("sigma2")) sigma2[std::stoi(toks[1])] = std::stod(kv["sigma2"]);
        } else {
            auto kv = parse_kv_tokens(toks, line_no);
            if (kv.count("family")) family_str = kv["family"];
            if (kv.count("graph")) graph_rel = kv["graph"];
            if (kv.count("mix_weight")) mix_weight = std::stod(kv["mix_weight"]);
        }
    }
    if (family_str.empty()) throw Error("model file missing 'family='");
    if (graph_rel.empty()) throw Error("model file missing 'graph='");
    const auto base = std::filesystem::path(model_path).parent_path();
    const Dag graph = load_graph((base / graph_rel).string()).to_dag();
    const int d = graph.node_count();
    const Family fam = family_from_name(family_str);

    if (fam == Family::kBernoulli) {
        std::vector<double> flip(d, 0.25);
        std::vector<int> sign(d, 1);
        for (const auto& e : edge_params) {
            flip[e.c] = std::stod(e.kv.at("b"));
            sign[e.c] = std::stoi(e.kv.at("sign"));
        }
        return BernoulliForestModel(graph, std::move(flip), std::move(sign));
    }
    if (fam == Family::kGaussian) {
        std::vector<double> coef(d, 0.0);
        std::vector<double> var(d, 1.0);
        for (const auto& [k, v] : sigma2) var.at(k) = v;
        for (const auto& e : edge_params) coef[e.c] = std::stod(e.kv.at("beta"));
        return GaussianForestModel(graph, std::move(coef), std::move(var));
    }
    std::vector<LinkFn> links(d, LinkFn::kSin);
    for (const auto& e : edge_params) links[e.c] = link_from_name(e.kv.at("link"));
    return NonparamForestModel(graph, std::move(links), mix_weight);
}

}  // namespace polyforest
