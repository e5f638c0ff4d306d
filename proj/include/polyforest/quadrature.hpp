#pragma once

#include <vector>

namespace polyforest {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1], nodes by Newton iteration on P_n.
QuadratureRule gauss_legendre(int n);

// Composite Gauss-Legendre on [0, 1]: `cells` equal subintervals with
// `points_per_cell` nodes each. Exact for functions that are smooth within
// each subinterval, which is how the perturbation densities are built.
QuadratureRule gauss_legendre_01(int points_per_cell, int cells);

// Gauss-Hermite rule for integrals against exp(-t^2) on the real line.
QuadratureRule gauss_hermite(int n);

}  // namespace polyforest
