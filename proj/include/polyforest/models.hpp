#pragma once

#include <array>
#include <optional>
#include <variant>
#include <vector>

#include "polyforest/dataset.hpp"
#include "polyforest/graph.hpp"
#include "polyforest/rng.hpp"

namespace polyforest {

enum class Family { kBernoulli, kGaussian, kNonparam };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// Shared base: a directed forest (poly-forest in which every node has at
// most one parent, as produced by random_polyforest) plus per-node
// parameters for the structural equations.
class ForestModelBase {
public:
    const Dag& graph() const { return graph_; }
    int node_count() const { return graph_.node_count(); }
    int parent(int node) const { return parent_[node]; }  // -1 for roots
    const std::vector<int>& topological_order() const { return topo_; }

protected:
    explicit ForestModelBase(Dag graph);
    Dag graph_;
    std::vector<int> parent_;
    std::vector<int> topo_;
};

// Root ~ Bern(1/2); child given parent=1 is Bern(1/2 + R b), given parent=0
// is Bern(1/2 - R b), with b in (0, 1/2).
class BernoulliForestModel : public ForestModelBase {
public:
    BernoulliForestModel(Dag graph, std::vector<double> flip_magnitudes,
                         std::vector<int> signs);
    double flip(int node) const { return flip_[node]; }
    int sign(int node) const { return sign_[node]; }
    // Correlation of the +/-1 spins of one edge: 2 * R_child * b_child.
    double edge_weight(int child) const { return 2.0 * sign_[child] * flip_[child]; }

private:
    std::vector<double> flip_;
    std::vector<int> sign_;
};

// X_k = beta_k X_pa(k) + N(0, sigma_k^2); roots are N(0, sigma_k^2).
class GaussianForestModel : public ForestModelBase {
public:
    GaussianForestModel(Dag graph, std::vector<double> coefficients,
                        std::vector<double> noise_variances);
    double coefficient(int node) const { return coef_[node]; }
    double noise_variance(int node) const { return var_[node]; }

private:
    std::vector<double> coef_;
    std::vector<double> var_;
};

// Parent-to-child links for the continuous simulator; all map [0,1] to [0,1].
enum class LinkFn { kSin, kSquare, kLog, kCos };
double apply_link(LinkFn f, double z);
std::string link_name(LinkFn f);
LinkFn link_from_name(const std::string& name);

// X_k = mix * f_k(X_pa(k)) + (1 - mix) * Unif(0,1); roots are Unif(0,1).
class NonparamForestModel : public ForestModelBase {
public:
    NonparamForestModel(Dag graph, std::vector<LinkFn> links, double mix_weight);
    LinkFn link(int node) const { return links_[node]; }
    double mix_weight() const { return mix_; }

private:
    std::vector<LinkFn> links_;
    double mix_;
};

using ForestModel =
    std::variant<BernoulliForestModel, GaussianForestModel, NonparamForestModel>;

// Parameter draws of the experimental protocol. The bounds are exposed so
// sweeps can tie the signal floor to the tester's c.
BernoulliForestModel random_bernoulli_model(const Dag& graph, Rng& rng,
                                            double flip_lo = 0.3, double flip_hi = 0.48);
GaussianForestModel random_gaussian_model(const Dag& graph, Rng& rng,
                                          double coef_abs_lo = 0.1,
                                          double coef_abs_hi = 0.5);
NonparamForestModel random_nonparam_model(const Dag& graph, Rng& rng,
                                          double mix_weight = 0.3);

// n i.i.d. rows generated in topological order.
Dataset sample_forest(const BernoulliForestModel& m, int n, Rng& rng);
Dataset sample_forest(const GaussianForestModel& m, int n, Rng& rng);
Dataset sample_forest(const NonparamForestModel& m, int n, Rng& rng);
Dataset sample_forest(const ForestModel& m, int n, std::uint64_t seed);

// --- exact oracles ---

// Full joint table over {0,1}^d; cell index has bit k = value of node k.
// Enumeration is capped at d <= 22.
std::vector<double> exact_joint_pmf(const BernoulliForestModel& m);

// Exact covariance by the linear-SEM recursion (telescoped path products).
std::vector<std::vector<double>> exact_covariance(const GaussianForestModel& m);
// Independent route: Sigma = (I - B)^{-T} Omega (I - B)^{-1}.
std::vector<std::vector<double>> exact_covariance_matrix_identity(
    const GaussianForestModel& m);

// Spin correlation E[s_j s_k] with s = 2x - 1: the product of edge weights
// along the unique skeleton path, 0 across components.
double pair_correlation(const BernoulliForestModel& m, int j, int k);

// Exact marginal over three nodes; index = x_j * 4 + x_k * 2 + x_l.
// Valid because the model is symmetric under a global bit flip, so all odd
// spin moments vanish.
std::array<double, 8> triple_pmf(const BernoulliForestModel& m, int j, int k, int l);
std::array<double, 4> pairwise_pmf(const BernoulliForestModel& m, int j, int k);

// Conditional total-variation dependence from an exact table.
// Triple layout x*4+y*2+z; measures m(X, Y | Z) resp. m(X, Y).
double tv_dependence_conditional(const std::array<double, 8>& pmf);
double tv_dependence_marginal(const std::array<double, 4>& pmf);

// Exact dependence measure between nodes j and k given l (or nothing):
// conditional TV for Bernoulli, absolute partial correlation for Gaussian.
double exact_dependence(const BernoulliForestModel& m, int j, int k,
                        std::optional<int> l);
double exact_dependence(const GaussianForestModel& m, int j, int k,
                        std::optional<int> l);

// Partial correlation from an exact covariance matrix (signed).
double partial_correlation_from_covariance(const std::vector<std::vector<double>>& cov,
                                           int j, int k, std::optional<int> l);

// --- model files ---

// Plain-text key-value serialization; `graph` stores a path interpreted
// relative to the model file's directory.
std::string write_model(const ForestModel& m, const std::string& graph_path);
void save_model(const ForestModel& m, const std::string& model_path,
                const std::string& graph_path);
ForestModel load_model(const std::string& model_path);
Family model_family(const ForestModel& m);
const Dag& model_graph(const ForestModel& m);

}  // namespace polyforest
