#pragma once

#include <array>
#include <optional>
#include <vector>

#include "polyforest/dataset.hpp"
#include "polyforest/models.hpp"
#include "polyforest/rng.hpp"

namespace polyforest {

enum class TripletRole { kNull, kAlt };

// Extra knobs for the nonparametric perturbation instance. The kernel is
// h(u) = sqrt(2) cos(2 pi u) with the two-argument extension
// htilde(u, v) = sqrt(m') (h(u) + h(v)) + h(u) h(v), which integrates along
// either axis to sqrt(m') times the one-dimensional kernel.
struct NonparamInstanceParams {
    double s = 1.0;               // smoothness exponent
    double rho_prefactor = 0.1;   // rho^3 = prefactor * m^{-(3/2 + 1/s)}
};

// Exact three-variable distribution used as simulation fixture and oracle.
// Columns are ordered (X, Y, Z): index 0 = X, 1 = Y, 2 = Z.
//
// Null instances are the flat products Bern(1/2)^3, N(0, I3), Unif[0,1]^3.
// The alternatives are a chain Z -> X -> Y with flip/regression signal c
// (Bernoulli, Gaussian) and the collider X -> Z <- Y whose conditional
// density is 1 + gamma(X, Y) eta(Z) (nonparametric).
class TripletModel {
public:
    static TripletModel bernoulli(TripletRole role, double c);
    static TripletModel gaussian(TripletRole role, double c);
    static TripletModel nonparam(TripletRole role, double c,
                                 const NonparamInstanceParams& params,
                                 std::uint64_t rademacher_seed);

    Family family() const { return family_; }
    TripletRole role() const { return role_; }
    double signal() const { return c_; }

    // Exact pmf over {0,1}^3, cell index x*4 + y*2 + z. Bernoulli only.
    const std::array<double, 8>& pmf() const;
    // Exact covariance of (X, Y, Z). Gaussian only.
    const std::array<std::array<double, 3>, 3>& covariance() const;
    // Joint density at (x, y, z) in [0,1]^3. Nonparametric only.
    double density(double x, double y, double z) const;

    // Perturbation components of the nonparametric alternative.
    double np_gamma(double x, double y) const;  // gamma_Delta(x, y)
    double np_eta(double z) const;              // eta_nu(z)
    // Coefficient of eta(z) in p(x, z) - 1, i.e. rho^2 sum_i (sum_j
    // Delta_ij) h_{i,m'}(x); analogous in y for the other margin.
    double np_x_margin_factor(double x) const;
    double np_y_margin_factor(double y) const;
    int np_m() const { return m_; }
    int np_mprime() const { return mprime_; }
    double np_rho() const { return rho_; }
    double np_s() const { return s_; }

private:
    TripletModel() = default;
    void build_bernoulli_pmf();
    double np_cdf_z(double z, double gamma_xy) const;
    double np_invert_cdf(double target, double gamma_xy) const;

    Family family_ = Family::kBernoulli;
    TripletRole role_ = TripletRole::kNull;
    double c_ = 0.0;

    std::array<double, 8> pmf_{};
    std::array<std::array<double, 3>, 3> cov_{};

    double s_ = 1.0;
    int m_ = 0;
    int mprime_ = 0;
    double rho_ = 0.0;
    std::vector<int> nu_;      // size m
    std::vector<int> delta_;   // m' x m', row-major

    friend Dataset sample_triplet(const TripletModel& model, int n, Rng& rng);
};

// n i.i.d. samples as a 3-column dataset (X, Y, Z). The nonparametric
// alternative draws Z by inverting the conditional cdf numerically.
Dataset sample_triplet(const TripletModel& model, int n, Rng& rng);
Dataset sample_triplet(const TripletModel& model, int n, std::uint64_t seed);

// Exact dependence m(col_j, col_k | col_l): conditional TV distance for
// Bernoulli, |partial correlation| for Gaussian. The nonparametric measure
// is an infimum over all conditionally independent densities and is not
// computed; requesting it is an error.
double exact_dependence(const TripletModel& model, int j, int k, std::optional<int> l);

// KL(p1 || p0) between the alternative and null instance at signal c.
double kl_between_instances(Family family, double c);
// Same divergence by direct summation (Bernoulli, 8 cells) or tensor
// Gauss-Hermite quadrature (Gaussian); used to cross-check the closed form.
double kl_between_instances_numeric(Family family, double c);

}  // namespace polyforest
