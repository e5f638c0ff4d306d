#include "polyforest/citest.hpp"

#include <algorithm>
#include <cmath>

#include "polyforest/errors.hpp"
#include "polyforest/rng.hpp"

namespace polyforest {

namespace {

constexpr double kOracleEps = 1e-12;

int binary_value(double v, const char* which) {
    if (v == 0.0) return 0;
    if (v == 1.0) return 1;
    throw Error(std::string("non-binary value in ") + which + " column");
}

}  // namespace

double mhat_bernoulli(Column x, Column y, OptColumn z) {
    const size_t n = x.size();
    if (n == 0 || y.size() != n || (z && z->size() != n))
        throw Error("mhat_bernoulli: needs equal-length non-empty columns");
    double counts[2][2][2] = {};
    for (size_t i = 0; i < n; ++i) {
        const int xi = binary_value(x[i], "x");
        const int yi = binary_value(y[i], "y");
        const int zi = z ? binary_value((*z)[i], "z") : 0;
        counts[xi][yi][zi] += 1.0;
    }
    const int zmax = z ? 2 : 1;
    double total = 0.0;
    for (int zi = 0; zi < zmax; ++zi) {
        double nz = 0.0, rx[2] = {0, 0}, ry[2] = {0, 0};
        for (int xi = 0; xi < 2; ++xi)
            for (int yi = 0; yi < 2; ++yi) {
                nz += counts[xi][yi][zi];
                rx[xi] += counts[xi][yi][zi];
                ry[yi] += counts[xi][yi][zi];
            }
        if (nz == 0.0) continue;
        double sum = 0.0;
        for (int xi = 0; xi < 2; ++xi)
            for (int yi = 0; yi < 2; ++yi)
                sum += std::abs(counts[xi][yi][zi] / nz - (rx[xi] / nz) * (ry[yi] / nz));
        total += (nz / static_cast<double>(n)) * sum;
    }
    return total;
}

namespace {

struct Moments {
    double var_x, var_y, cov_xy;
    double cov_xz, cov_yz, var_z;
};

Moments centered_moments(Column x, Column y, OptColumn z) {
    const size_t n = x.size();
    double mx = 0, my = 0, mz = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
        if (z) mz += (*z)[i];
    }
    mx /= n;
    my /= n;
    mz /= n;
    Moments m{};
    for (size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        m.var_x += dx * dx;
        m.var_y += dy * dy;
        m.cov_xy += dx * dy;
        if (z) {
            const double dz = (*z)[i] - mz;
            m.cov_xz += dx * dz;
            m.cov_yz += dy * dz;
            m.var_z += dz * dz;
        }
    }
    const double inv = 1.0 / n;
    m.var_x *= inv;
    m.var_y *= inv;
    m.cov_xy *= inv;
    m.cov_xz *= inv;
    m.cov_yz *= inv;
    m.var_z *= inv;
    return m;
}

double partial_correlation_from_moments(const Moments& m, bool conditioned) {
    if (m.var_x <= 0.0) throw DegenerateColumnError("column x has zero variance", 0);
    if (m.var_y <= 0.0) throw DegenerateColumnError("column y has zero variance", 1);
    if (!conditioned) return m.cov_xy / std::sqrt(m.var_x * m.var_y);
    if (m.var_z <= 0.0) throw DegenerateColumnError("column z has zero variance", 2);
    const double rx = m.var_x - m.cov_xz * m.cov_xz / m.var_z;
    const double ry = m.var_y - m.cov_yz * m.cov_yz / m.var_z;
    if (rx <= 1e-12 * m.var_x)
        throw DegenerateColumnError("column x has zero residual variance given z", 0);
    if (ry <= 1e-12 * m.var_y)
        throw DegenerateColumnError("column y has zero residual variance given z", 1);
    const double cxy = m.cov_xy - m.cov_xz * m.cov_yz / m.var_z;
    return cxy / std::sqrt(rx * ry);
}

}  // namespace

double partial_correlation(Column x, Column y, OptColumn z) {
    const size_t n = x.size();
    if (n < 3 || y.size() != n || (z && z->size() != n))
        throw Error("partial_correlation: needs equal-length columns with n >= 3");
    return partial_correlation_from_moments(centered_moments(x, y, z), z.has_value());
}

CiDecision test_bernoulli(Column x, Column y, OptColumn z, double c) {
    if (!(c > 0.0)) throw Error("test_bernoulli: c must be > 0");
    const double stat = mhat_bernoulli(x, y, z);
    return CiDecision{stat >= c / 2.0, stat, c / 2.0};
}

CiDecision test_gaussian(Column x, Column y, OptColumn z, double c) {
    if (!(c > 0.0)) throw Error("test_gaussian: c must be > 0");
    const double stat = partial_correlation(x, y, z);
    return CiDecision{std::abs(stat) >= c / 2.0, stat, c / 2.0};
}

std::vector<int> discretize(Column col, int bins) {
    if (bins < 1) throw Error("discretize: bins must be >= 1");
    std::vector<int> labels(col.size());
    for (size_t i = 0; i < col.size(); ++i) {
        const double v = col[i];
        if (v < 0.0 || v > 1.0) throw Error("discretize: value outside [0,1]");
        int b = static_cast<int>(std::floor(v * bins));
        if (b >= bins) b = bins - 1;  // closes the last bin at 1.0
        labels[i] = b;
    }
    return labels;
}

std::pair<int, int> np_bin_counts(int n, double s) {
    if (n < 1 || !(s > 0.0)) throw Error("np_bin_counts: need n >= 1 and s > 0");
    const double e_xy = 2.0 / (5.0 * s + 2.0);
    const double e_z = 2.0 * s / (5.0 * s + 2.0);
    const int bins_xy = std::max(2, static_cast<int>(std::floor(std::pow(n, e_xy) + 0.5)));
    const int bins_z = std::max(1, static_cast<int>(std::floor(std::pow(n, e_z) + 0.5)));
    return {bins_xy, bins_z};
}

namespace {

// Stratum-weighted L2 statistic over binned labels.
// counts/rowsum/colsum are scratch buffers of size bins*bins / bins.
double np_statistic(const std::vector<std::vector<int>>& strata_x,
                    const std::vector<std::vector<int>>& strata_y, int bins,
                    size_t n_total, std::vector<double>& counts) {
    double total = 0.0;
    std::vector<double> rowsum(bins), colsum(bins);
    for (size_t st = 0; st < strata_x.size(); ++st) {
        const auto& xs = strata_x[st];
        const auto& ys = strata_y[st];
        const size_t nz = xs.size();
        if (nz < 2) continue;
        std::fill(counts.begin(), counts.end(), 0.0);
        std::fill(rowsum.begin(), rowsum.end(), 0.0);
        std::fill(colsum.begin(), colsum.end(), 0.0);
        for (size_t i = 0; i < nz; ++i) {
            counts[static_cast<size_t>(xs[i]) * bins + ys[i]] += 1.0;
            rowsum[xs[i]] += 1.0;
            colsum[ys[i]] += 1.0;
        }
        const double inv = 1.0 / static_cast<double>(nz);
        double sum = 0.0;
        for (int a = 0; a < bins; ++a) {
            if (rowsum[a] == 0.0) {
                continue;  // entire row of deviations is zero
            }
            for (int b = 0; b < bins; ++b) {
                const double dev = counts[static_cast<size_t>(a) * bins + b] * inv -
                                   rowsum[a] * inv * colsum[b] * inv;
                sum += dev * dev;
            }
        }
        // Columns with rowsum zero still contribute (0 - 0)^2 = 0 terms.
        total += (static_cast<double>(nz) / static_cast<double>(n_total)) * sum;
    }
    return total;
}

}  // namespace

CiDecision test_nonparam(Column x, Column y, OptColumn z, const NonparamTestConfig& cfg) {
    const size_t n = x.size();
    if (n < 20 || y.size() != n || (z && z->size() != n))
        throw Error("test_nonparam: needs equal-length columns with n >= 20");
    if (cfg.permutations < 1) throw Error("test_nonparam: permutations must be >= 1");
    const auto [bins_xy, bins_z] = np_bin_counts(static_cast<int>(n), cfg.s);
    const std::vector<int> lx = discretize(x, bins_xy);
    const std::vector<int> ly = discretize(y, bins_xy);
    std::vector<int> lz;
    int n_strata = 1;
    if (z) {
        lz = discretize(*z, bins_z);
        n_strata = bins_z;
    }
    std::vector<std::vector<int>> strata_x(n_strata), strata_y(n_strata);
    for (size_t i = 0; i < n; ++i) {
        const int st = z ? lz[i] : 0;
        strata_x[st].push_back(lx[i]);
        strata_y[st].push_back(ly[i]);
    }
    std::vector<double> counts(static_cast<size_t>(bins_xy) * bins_xy);
    const double observed = np_statistic(strata_x, strata_y, bins_xy, n, counts);

    Rng rng(cfg.seed);
    int at_least = 0;
    std::vector<std::vector<int>> perm_y = strata_y;
    for (int b = 0; b < cfg.permutations; ++b) {
        for (auto& ys : perm_y)
            for (size_t i = ys.size(); i > 1; --i)
                std::swap(ys[i - 1], ys[rng.uniform_int(i)]);
        if (np_statistic(strata_x, perm_y, bins_xy, n, counts) >= observed) ++at_least;
    }
    const double pvalue = (1.0 + at_least) / (cfg.permutations + 1.0);
    return CiDecision{pvalue <= cfg.cutoff, observed, pvalue};
}

CiDecision median_trick(const BaseTest& base, int K, Column x, Column y, OptColumn z) {
    const size_t n = x.size();
    if (K < 1 || K % 2 == 0) throw Error("median_trick: K must be odd");
    if (static_cast<size_t>(K) > n) throw Error("median_trick: K exceeds the sample size");
    const size_t fold = n / static_cast<size_t>(K);
    int votes = 0;
    for (int k = 0; k < K; ++k) {
        const size_t lo = k * fold;
        Column xf = x.subspan(lo, fold);
        Column yf = y.subspan(lo, fold);
        OptColumn zf = z ? OptColumn(z->subspan(lo, fold)) : std::nullopt;
        if (base(xf, yf, zf).dependent) ++votes;
    }
    return CiDecision{votes * 2 > K, static_cast<double>(votes), K / 2.0};
}

namespace {

void check_columns(const Dataset& data, int j, int k, std::optional<int> l) {
    const int d = data.cols();
    auto ok = [d](int v) { return v >= 0 && v < d; };
    if (!ok(j) || !ok(k) || j == k || (l && (!ok(*l) || *l == j || *l == k)))
        throw Error("tester: invalid column indices");
}

// Attach (pair, conditioner) context to tester failures so the learner can
// surface where a test broke.
template <typename Fn>
CiDecision with_context(int j, int k, std::optional<int> l, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        const std::string cond = l ? std::to_string(*l) : "empty";
        throw Error("test(" + std::to_string(j) + "," + std::to_string(k) + "|" + cond +
                    "): " + e.what());
    }
}

class BernoulliCiTester final : public CiTester {
public:
    explicit BernoulliCiTester(const CiTesterSpec& spec) : spec_(spec) {}
    CiDecision test(const Dataset& data, int j, int k, std::optional<int> l) const override {
        check_columns(data, j, k, l);
        return with_context(j, k, l, [&] {
            Column x = data.column(j), y = data.column(k);
            OptColumn z = l ? OptColumn(data.column(*l)) : std::nullopt;
            auto base = [this](Column bx, Column by, OptColumn bz) {
                return test_bernoulli(bx, by, bz, spec_.c);
            };
            if (spec_.median_folds > 1)
                return median_trick(base, spec_.median_folds, x, y, z);
            return base(x, y, z);
        });
    }

private:
    CiTesterSpec spec_;
};

class GaussianCiTester final : public CiTester {
public:
    explicit GaussianCiTester(const CiTesterSpec& spec) : spec_(spec) {}

    void prepare(const Dataset& data) override {
        if (spec_.median_folds > 1) return;  // folds recompute per sub-sample
        const int d = data.cols();
        const int n = data.rows();
        if (n < 3) return;
        mean_.assign(d, 0.0);
        cov_.assign(d, std::vector<double>(d, 0.0));
        for (int j = 0; j < d; ++j) {
            const auto col = data.column(j);
            double m = 0.0;
            for (double v : col) m += v;
            mean_[j] = m / n;
        }
        for (int a = 0; a < d; ++a) {
            const auto ca = data.column(a);
            for (int b = a; b < d; ++b) {
                const auto cb = data.column(b);
                double s = 0.0;
                for (int i = 0; i < n; ++i) s += (ca[i] - mean_[a]) * (cb[i] - mean_[b]);
                cov_[a][b] = cov_[b][a] = s / n;
            }
        }
        cached_ = true;
    }

    CiDecision test(const Dataset& data, int j, int k, std::optional<int> l) const override {
        check_columns(data, j, k, l);
        return with_context(j, k, l, [&]() -> CiDecision {
            if (spec_.median_folds > 1) {
                auto base = [this](Column bx, Column by, OptColumn bz) {
                    return test_gaussian(bx, by, bz, spec_.c);
                };
                OptColumn z = l ? OptColumn(data.column(*l)) : std::nullopt;
                return median_trick(base, spec_.median_folds, data.column(j),
                                    data.column(k), z);
            }
            if (cached_) {
                const double stat = cached_partial(j, k, l);
                return CiDecision{std::abs(stat) >= spec_.c / 2.0, stat, spec_.c / 2.0};
            }
            OptColumn z = l ? OptColumn(data.column(*l)) : std::nullopt;
            return test_gaussian(data.column(j), data.column(k), z, spec_.c);
        });
    }

private:
    double cached_partial(int j, int k, std::optional<int> l) const {
        Moments m{};
        m.var_x = cov_[j][j];
        m.var_y = cov_[k][k];
        m.cov_xy = cov_[j][k];
        if (l) {
            m.cov_xz = cov_[j][*l];
            m.cov_yz = cov_[k][*l];
            m.var_z = cov_[*l][*l];
        }
        return partial_correlation_from_moments(m, l.has_value());
    }

    CiTesterSpec spec_;
    bool cached_ = false;
    std::vector<double> mean_;
    std::vector<std::vector<double>> cov_;
};

class NonparamCiTester final : public CiTester {
public:
    explicit NonparamCiTester(const CiTesterSpec& spec) : spec_(spec) {}
    CiDecision test(const Dataset& data, int j, int k, std::optional<int> l) const override {
        check_columns(data, j, k, l);
        return with_context(j, k, l, [&] {
            NonparamTestConfig cfg;
            cfg.s = spec_.s;
            cfg.permutations = spec_.permutations;
            cfg.cutoff = spec_.cutoff;
            cfg.seed = mix_seed({spec_.seed, static_cast<std::uint64_t>(j) + 1,
                                 static_cast<std::uint64_t>(k) + 1,
                                 l ? static_cast<std::uint64_t>(*l) + 2 : 1});
            Column x = data.column(j), y = data.column(k);
            OptColumn z = l ? OptColumn(data.column(*l)) : std::nullopt;
            auto base = [&cfg](Column bx, Column by, OptColumn bz) {
                return test_nonparam(bx, by, bz, cfg);
            };
            if (spec_.median_folds > 1)
                return median_trick(base, spec_.median_folds, x, y, z);
            return base(x, y, z);
        });
    }

private:
    CiTesterSpec spec_;
};

// Forest oracles precompute the pairwise structure once; each query is then
// a constant amount of table algebra.
class OracleBernoulliForestTester final : public CiTester {
public:
    explicit OracleBernoulliForestTester(const BernoulliForestModel& model)
        : model_(model) {
        const int d = model_.node_count();
        corr_.assign(d, std::vector<double>(d, 0.0));
        for (int j = 0; j < d; ++j) {
            corr_[j][j] = 1.0;
            for (int k = j + 1; k < d; ++k)
                corr_[j][k] = corr_[k][j] = pair_correlation(model_, j, k);
        }
    }

    CiDecision test(const Dataset&, int j, int k, std::optional<int> l) const override {
        double m;
        if (l.has_value()) {
            std::array<double, 8> pmf{};
            const double rjk = corr_[j][k], rjl = corr_[j][*l], rkl = corr_[k][*l];
            for (int cell = 0; cell < 8; ++cell) {
                const int sj = (cell & 4) ? 1 : -1;
                const int sk = (cell & 2) ? 1 : -1;
                const int sl = (cell & 1) ? 1 : -1;
                pmf[cell] = (1.0 + rjk * sj * sk + rjl * sj * sl + rkl * sk * sl) / 8.0;
            }
            m = tv_dependence_conditional(pmf);
        } else {
            m = std::abs(corr_[j][k]);
        }
        return CiDecision{m > kOracleEps, m, kOracleEps};
    }

private:
    BernoulliForestModel model_;
    std::vector<std::vector<double>> corr_;
};

class OracleGaussianForestTester final : public CiTester {
public:
    explicit OracleGaussianForestTester(const GaussianForestModel& model)
        : cov_(exact_covariance(model)) {}

    CiDecision test(const Dataset&, int j, int k, std::optional<int> l) const override {
        const double m = std::abs(partial_correlation_from_covariance(cov_, j, k, l));
        return CiDecision{m > kOracleEps, m, kOracleEps};
    }

private:
    std::vector<std::vector<double>> cov_;
};

class OracleTripletTester final : public CiTester {
public:
    explicit OracleTripletTester(const TripletModel& model) : model_(model) {}
    CiDecision test(const Dataset&, int j, int k, std::optional<int> l) const override {
        const double m = exact_dependence(model_, j, k, l);
        return CiDecision{m > kOracleEps, m, kOracleEps};
    }

private:
    TripletModel model_;
};

}  // namespace

std::unique_ptr<CiTester> make_tester(const CiTesterSpec& spec) {
    if (spec.median_folds < 1 || spec.median_folds % 2 == 0)
        throw Error("make_tester: median_folds must be odd");
    switch (spec.family) {
        case TesterFamily::kBernoulli: return std::make_unique<BernoulliCiTester>(spec);
        case TesterFamily::kGaussian: return std::make_unique<GaussianCiTester>(spec);
        case TesterFamily::kNonparam: return std::make_unique<NonparamCiTester>(spec);
        case TesterFamily::kOracleBernoulli:
        case TesterFamily::kOracleGaussian:
            throw Error("oracle testers are built from a model via make_oracle_tester");
    }
    throw Error("make_tester: unknown family");
}

std::unique_ptr<CiTester> make_oracle_tester(const BernoulliForestModel& model) {
    return std::make_unique<OracleBernoulliForestTester>(model);
}

std::unique_ptr<CiTester> make_oracle_tester(const GaussianForestModel& model) {
    return std::make_unique<OracleGaussianForestTester>(model);
}

std::unique_ptr<CiTester> make_oracle_tester(const TripletModel& model) {
    return std::make_unique<OracleTripletTester>(model);
}

}  // namespace polyforest
