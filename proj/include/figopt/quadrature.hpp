#pragma once

#include <vector>

namespace figopt {

// One-dimensional Gaussian rule: nodes and raw (unnormalised) weights.
struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1]; weights sum to 2.
Rule1D gauss_legendre(int order);

// Gauss-Hermite rule for the weight exp(-x^2) on the real line; weights
// sum to sqrt(pi).
Rule1D gauss_hermite(int order);

}  // namespace figopt
