#include "polyforest/triplet.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "polyforest/errors.hpp"
#include "polyforest/quadrature.hpp"

namespace polyforest {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Base kernel: integrates to 0, squares to 1, smooth and bounded.
double kernel_h(double u) { return std::sqrt(2.0) * std::cos(kTwoPi * u); }

// Antiderivative of kernel_h from 0, vanishing at both endpoints of [0,1].
double kernel_h_int(double u) { return std::sqrt(2.0) * std::sin(kTwoPi * u) / kTwoPi; }

double kernel_htilde(double u, double v, int mprime) {
    return std::sqrt(static_cast<double>(mprime)) * (kernel_h(u) + kernel_h(v)) +
           kernel_h(u) * kernel_h(v);
}

// Cell of [0,1] split into `cells` equal parts; 1.0 belongs to the last.
int cell_index(double x, int cells) {
    int i = static_cast<int>(std::floor(x * cells));
    if (i >= cells) i = cells - 1;
    if (i < 0) i = 0;
    return i;
}

void check_parametric_signal(double c) {
    if (!(c > 0.0 && c <= 0.25))
        throw Error("triplet signal c must lie in (0, 1/4]");
}

}  // namespace

TripletModel TripletModel::bernoulli(TripletRole role, double c) {
    check_parametric_signal(c);
    TripletModel m;
    m.family_ = Family::kBernoulli;
    m.role_ = role;
    m.c_ = c;
    m.build_bernoulli_pmf();
    return m;
}

void TripletModel::build_bernoulli_pmf() {
    if (role_ == TripletRole::kNull) {
        pmf_.fill(0.125);
        return;
    }
    // Chain Z -> X -> Y: p(x,y,z) = p(z) p(x|z) p(y|x) with matching values
    // getting probability 1/2 + c.
    const double q_match = 0.5 + c_;
    const double q_miss = 0.5 - c_;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z)
                pmf_[x * 4 + y * 2 + z] =
                    0.5 * (x == z ? q_match : q_miss) * (y == x ? q_match : q_miss);
}

TripletModel TripletModel::gaussian(TripletRole role, double c) {
    check_parametric_signal(c);
    TripletModel m;
    m.family_ = Family::kGaussian;
    m.role_ = role;
    m.c_ = c;
    const double beta = role == TripletRole::kNull ? 0.0 : 2.0 * c;
    // (X, Y, Z) ordering; unit variances by construction.
    m.cov_ = {{{1.0, beta, beta}, {beta, 1.0, beta * beta}, {beta, beta * beta, 1.0}}};
    return m;
}

TripletModel TripletModel::nonparam(TripletRole role, double c,
                                    const NonparamInstanceParams& params,
                                    std::uint64_t rademacher_seed) {
    if (!(c > 0.0 && c < 1.0)) throw Error("nonparam triplet signal c must lie in (0, 1)");
    if (!(params.s > 0.0)) throw Error("nonparam smoothness s must be > 0");
    TripletModel m;
    m.family_ = Family::kNonparam;
    m.role_ = role;
    m.c_ = c;
    m.s_ = params.s;
    m.m_ = static_cast<int>(std::ceil(1.0 / c));
    m.mprime_ = static_cast<int>(std::ceil(std::pow(m.m_, 1.0 / params.s)));
    m.rho_ = std::cbrt(params.rho_prefactor *
                       std::pow(m.m_, -(1.5 + 1.0 / params.s)));
    if (role == TripletRole::kNull) return m;

    Rng rng(rademacher_seed);
    m.nu_.resize(m.m_);
    for (int j = 0; j < m.m_; ++j) m.nu_[j] = rng.rademacher();
    m.delta_.resize(static_cast<size_t>(m.mprime_) * m.mprime_);
    for (auto& v : m.delta_) v = rng.rademacher();

    // Strict positivity: |gamma|_inf |eta|_inf < 1, with the suprema attained
    // at the kernel extremes.
    const double h_max = std::sqrt(2.0);
    const double htilde_max = 2.0 * h_max * std::sqrt(static_cast<double>(m.mprime_)) + 2.0;
    const double gamma_max = m.rho_ * m.rho_ * m.mprime_ * htilde_max;
    const double eta_max = m.rho_ * std::sqrt(static_cast<double>(m.m_)) * h_max;
    if (gamma_max * eta_max >= 1.0)
        throw Error("nonparam instance violates density positivity; decrease the rho prefactor");
    return m;
}

const std::array<double, 8>& TripletModel::pmf() const {
    if (family_ != Family::kBernoulli)
        throw UnsupportedOperationError("pmf() requires the Bernoulli family");
    return pmf_;
}

const std::array<std::array<double, 3>, 3>& TripletModel::covariance() const {
    if (family_ != Family::kGaussian)
        throw UnsupportedOperationError("covariance() requires the Gaussian family");
    return cov_;
}

double TripletModel::np_gamma(double x, double y) const {
    if (family_ != Family::kNonparam || role_ == TripletRole::kNull) return 0.0;
    const int i = cell_index(x, mprime_);
    const int j = cell_index(y, mprime_);
    const double u = x * mprime_ - i;
    const double v = y * mprime_ - j;
    return rho_ * rho_ * mprime_ * delta_[static_cast<size_t>(i) * mprime_ + j] *
           kernel_htilde(u, v, mprime_);
}

double TripletModel::np_eta(double z) const {
    if (family_ != Family::kNonparam || role_ == TripletRole::kNull) return 0.0;
    const int j = cell_index(z, m_);
    const double u = z * m_ - j;
    return rho_ * std::sqrt(static_cast<double>(m_)) * nu_[j] * kernel_h(u);
}

double TripletModel::np_x_margin_factor(double x) const {
    if (family_ != Family::kNonparam || role_ == TripletRole::kNull) return 0.0;
    const int i = cell_index(x, mprime_);
    int row_sum = 0;
    for (int j = 0; j < mprime_; ++j) row_sum += delta_[static_cast<size_t>(i) * mprime_ + j];
    const double u = x * mprime_ - i;
    return rho_ * rho_ * row_sum * std::sqrt(static_cast<double>(mprime_)) * kernel_h(u);
}

double TripletModel::np_y_margin_factor(double y) const {
    if (family_ != Family::kNonparam || role_ == TripletRole::kNull) return 0.0;
    const int j = cell_index(y, mprime_);
    int col_sum = 0;
    for (int i = 0; i < mprime_; ++i) col_sum += delta_[static_cast<size_t>(i) * mprime_ + j];
    const double v = y * mprime_ - j;
    return rho_ * rho_ * col_sum * std::sqrt(static_cast<double>(mprime_)) * kernel_h(v);
}

double TripletModel::density(double x, double y, double z) const {
    if (family_ != Family::kNonparam)
        throw UnsupportedOperationError("density() requires the nonparametric family");
    if (x < 0 || x > 1 || y < 0 || y > 1 || z < 0 || z > 1) return 0.0;
    if (role_ == TripletRole::kNull) return 1.0;
    return 1.0 + np_gamma(x, y) * np_eta(z);
}

// Conditional cdf of Z given (x, y): z + gamma(x,y) * int_0^z eta. Full
// kernel cells integrate to zero, so only the active cell contributes.
double TripletModel::np_cdf_z(double z, double gamma_xy) const {
    const int j = cell_index(z, m_);
    const double u = z * m_ - j;
    const double eta_int =
        rho_ * std::sqrt(static_cast<double>(m_)) * nu_[j] * kernel_h_int(u) / m_;
    return z + gamma_xy * eta_int;
}

double TripletModel::np_invert_cdf(double target, double gamma_xy) const {
    double lo = 0.0, hi = 1.0, v = target;
    for (int iter = 0; iter < 200; ++iter) {
        const double f = np_cdf_z(v, gamma_xy) - target;
        if (std::abs(f) < 1e-12) break;
        if (f > 0)
            hi = v;
        else
            lo = v;
        const double deriv = 1.0 + gamma_xy * np_eta(v);
        double next = v - f / deriv;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        v = next;
    }
    return v;
}

Dataset sample_triplet(const TripletModel& model, int n, Rng& rng) {
    if (n < 1) throw Error("sample_triplet: n must be >= 1");
    Dataset data(n, 3);
    auto& xc = data.mutable_column(0);
    auto& yc = data.mutable_column(1);
    auto& zc = data.mutable_column(2);
    const bool alt = model.role() == TripletRole::kAlt;
    switch (model.family()) {
        case Family::kBernoulli: {
            const double c = model.signal();
            for (int i = 0; i < n; ++i) {
                const double z = rng.bernoulli(0.5) ? 1.0 : 0.0;
                double x, y;
                if (alt) {
                    x = rng.bernoulli(z == 1.0 ? 0.5 + c : 0.5 - c) ? 1.0 : 0.0;
                    y = rng.bernoulli(x == 1.0 ? 0.5 + c : 0.5 - c) ? 1.0 : 0.0;
                } else {
                    x = rng.bernoulli(0.5) ? 1.0 : 0.0;
                    y = rng.bernoulli(0.5) ? 1.0 : 0.0;
                }
                xc[i] = x;
                yc[i] = y;
                zc[i] = z;
            }
            break;
        }
        case Family::kGaussian: {
            const double beta = alt ? 2.0 * model.signal() : 0.0;
            const double sd = std::sqrt(1.0 - beta * beta);
            for (int i = 0; i < n; ++i) {
                const double z = rng.normal();
                const double x = beta * z + sd * rng.normal();
                const double y = beta * x + sd * rng.normal();
                xc[i] = x;
                yc[i] = y;
                zc[i] = z;
            }
            break;
        }
        case Family::kNonparam: {
            for (int i = 0; i < n; ++i) {
                const double x = rng.uniform();
                const double y = rng.uniform();
                double z;
                if (alt) {
                    const double g = model.np_gamma(x, y);
                    z = model.np_invert_cdf(rng.uniform(), g);
                } else {
                    z = rng.uniform();
                }
                xc[i] = x;
                yc[i] = y;
                zc[i] = z;
            }
            break;
        }
    }
    return data;
}

Dataset sample_triplet(const TripletModel& model, int n, std::uint64_t seed) {
    Rng rng(seed);
    return sample_triplet(model, n, rng);
}

namespace {

std::array<double, 4> marginal_pair(const std::array<double, 8>& pmf, int j, int k) {
    // index of variable v in cell: X bit 4, Y bit 2, Z bit 1
    const int shift[3] = {2, 1, 0};
    std::array<double, 4> out{};
    for (int cell = 0; cell < 8; ++cell) {
        const int vj = (cell >> shift[j]) & 1;
        const int vk = (cell >> shift[k]) & 1;
        out[vj * 2 + vk] += pmf[cell];
    }
    return out;
}

std::array<double, 8> marginal_triple(const std::array<double, 8>& pmf, int j, int k,
                                      int l) {
    const int shift[3] = {2, 1, 0};
    std::array<double, 8> out{};
    for (int cell = 0; cell < 8; ++cell) {
        const int vj = (cell >> shift[j]) & 1;
        const int vk = (cell >> shift[k]) & 1;
        const int vl = (cell >> shift[l]) & 1;
        out[vj * 4 + vk * 2 + vl] += pmf[cell];
    }
    return out;
}

}  // namespace

double exact_dependence(const TripletModel& model, int j, int k, std::optional<int> l) {
    if (j < 0 || j > 2 || k < 0 || k > 2 || j == k)
        throw Error("exact_dependence: column indices must be distinct members of {0,1,2}");
    if (l.has_value() && (*l < 0 || *l > 2 || *l == j || *l == k))
        throw Error("exact_dependence: conditioning column must be the remaining one");
    switch (model.family()) {
        case Family::kBernoulli: {
            if (l.has_value())
                return tv_dependence_conditional(marginal_triple(model.pmf(), j, k, *l));
            return tv_dependence_marginal(marginal_pair(model.pmf(), j, k));
        }
        case Family::kGaussian: {
            const auto& c = model.covariance();
            std::vector<std::vector<double>> cov(3, std::vector<double>(3));
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) cov[a][b] = c[a][b];
            return std::abs(partial_correlation_from_covariance(cov, j, k, l));
        }
        case Family::kNonparam:
            throw UnsupportedOperationError(
                "the nonparametric dependence measure is an infimum over all "
                "conditionally independent densities and is not computable");
    }
    return 0.0;
}

double kl_between_instances(Family family, double c) {
    switch (family) {
        case Family::kBernoulli:
            check_parametric_signal(c);
            return std::log(1.0 - 4.0 * c * c) +
                   2.0 * c * std::log(1.0 + 4.0 * c / (1.0 - 2.0 * c));
        case Family::kGaussian:
            check_parametric_signal(c);
            return -std::log(1.0 - 4.0 * c * c);
        case Family::kNonparam:
            throw UnsupportedOperationError(
                "no closed-form KL divergence for the nonparametric family");
    }
    return 0.0;
}

double kl_between_instances_numeric(Family family, double c) {
    if (family == Family::kBernoulli) {
        const TripletModel p1 = TripletModel::bernoulli(TripletRole::kAlt, c);
        const TripletModel p0 = TripletModel::bernoulli(TripletRole::kNull, c);
        double kl = 0.0;
        for (int cell = 0; cell < 8; ++cell)
            kl += p1.pmf()[cell] * std::log(p1.pmf()[cell] / p0.pmf()[cell]);
        return kl;
    }
    if (family == Family::kGaussian) {
        const TripletModel p1 = TripletModel::gaussian(TripletRole::kAlt, c);
        Eigen::Matrix3d sigma;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) sigma(a, b) = p1.covariance()[a][b];
        const Eigen::Matrix3d prec = sigma.inverse();
        const double logdet = std::log(sigma.determinant());
        const Eigen::Matrix3d chol = Eigen::LLT<Eigen::Matrix3d>(sigma).matrixL();
        // KL = E_{p1}[log p1 - log p0]; tensor Gauss-Hermite over the
        // standardized alternative, x = sqrt(2) L t.
        const QuadratureRule gh = gauss_hermite(24);
        const double norm = std::pow(M_PI, -1.5);
        double kl = 0.0;
        for (size_t a = 0; a < gh.nodes.size(); ++a)
            for (size_t b = 0; b < gh.nodes.size(); ++b)
                for (size_t g = 0; g < gh.nodes.size(); ++g) {
                    Eigen::Vector3d t(gh.nodes[a], gh.nodes[b], gh.nodes[g]);
                    Eigen::Vector3d x = std::sqrt(2.0) * (chol * t);
                    const double log_p1 = -0.5 * logdet - 0.5 * x.dot(prec * x);
                    const double log_p0 = -0.5 * x.dot(x);
                    kl += gh.weights[a] * gh.weights[b] * gh.weights[g] *
                          (log_p1 - log_p0);
                }
        return kl * norm;
    }
    throw UnsupportedOperationError("no numeric KL route for the nonparametric family");
}

}  // namespace polyforest
