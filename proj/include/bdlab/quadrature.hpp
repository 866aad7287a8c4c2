#pragma once

#include <vector>

namespace bdlab {

/// Nodes and weights for integral of e^{-x^2} f(x) over the real line.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Golub-Welsch: eigen-decomposition of the Hermite Jacobi matrix. Exact for
/// polynomials of degree <= 2 * order - 1.
GaussRule gauss_hermite(int order);

/// Nodes and weights for integral of e^{-x} f(x) over [0, inf).
GaussRule gauss_laguerre(int order);

}  // namespace bdlab
