#include "polyforest/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace polyforest {

QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

QuadratureRule gauss_legendre_01(int points_per_cell, int cells) {
    const QuadratureRule base = gauss_legendre(points_per_cell);
    QuadratureRule rule;
    const double width = 1.0 / cells;
    for (int c = 0; c < cells; ++c) {
        const double lo = c * width;
        for (int i = 0; i < points_per_cell; ++i) {
            rule.nodes.push_back(lo + 0.5 * width * (base.nodes[i] + 1.0));
            rule.weights.push_back(0.5 * width * base.weights[i]);
        }
    }
    return rule;
}

QuadratureRule gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double pim4 = 0.7511255444649425;  // pi^{-1/4}
    double x = 0.0;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        if (i == 0)
            x = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1)
            x -= 1.14 * std::pow(n, 0.426) / x;
        else if (i == 2)
            x = 1.86 * x - 0.86 * rule.nodes[0];
        else if (i == 3)
            x = 1.91 * x - 0.91 * rule.nodes[1];
        else
            x = 2.0 * x - rule.nodes[i - 2];
        double dp = 0.0;
        for (int iter = 0; iter < 200; ++iter) {
            double p0 = pim4, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = x * std::sqrt(2.0 / (k + 1.0)) * p1 -
                     std::sqrt(static_cast<double>(k) / (k + 1.0)) * p2;
            }
            dp = std::sqrt(2.0 * n) * p1;
            const double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = x;
        rule.nodes[n - 1 - i] = -x;
        rule.weights[i] = 2.0 / (dp * dp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

}  // namespace polyforest
