#include "figopt/quadrature.hpp"

#include "figopt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace figopt {

namespace {

constexpr int kNewtonIterations = 100;
constexpr double kNewtonTol = 1e-15;

// (P_n(x), P_n'(x)) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int j = 2; j <= n; ++j) {
    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  if (n == 1) p0 = 1.0;
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

// Orthonormal Hermite function value h_n(x) and derivative, scaled so that
// the Gauss weight is 2 / h_n'(x)^2.
std::pair<double, double> hermite(int n, double x) {
  double p1 = std::pow(std::numbers::pi, -0.25);
  double p2 = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double p3 = p2;
    p2 = p1;
    p1 = x * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
  }
  return {p1, std::sqrt(2.0 * n) * p2};
}

template <class Eval>
double newton(Eval eval, double x) {
  for (int it = 0; it < kNewtonIterations; ++it) {
    const auto [p, dp] = eval(x);
    const double dx = p / dp;
    x -= dx;
    if (std::abs(dx) <= kNewtonTol * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

}  // namespace

Rule1D gauss_legendre(int order) {
  if (order < 1) throw InputError("quadrature order must be >= 1");
  const int n = order;
  Rule1D rule{std::vector<double>(n), std::vector<double>(n)};
  auto eval = [n](double x) { return legendre(n, x); };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = 0.0;
    if (2 * i + 1 != n) x = newton(eval, std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5)));
    const double dp = eval(x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

// Initial guesses: asymptotic approximations for the largest roots, then
// extrapolation from the roots already found.
Rule1D gauss_hermite(int order) {
  if (order < 1) throw InputError("quadrature order must be >= 1");
  const int n = order;
  Rule1D rule{std::vector<double>(n), std::vector<double>(n)};
  auto eval = [n](double x) { return hermite(n, x); };
  std::vector<double> roots;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = 0.0;
    if (2 * i + 1 != n) {
      if (i == 0) {
        z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
      } else if (i == 1) {
        z = roots[0] - 1.14 * std::pow(static_cast<double>(n), 0.426) / roots[0];
      } else if (i == 2) {
        z = 1.86 * roots[1] - 0.86 * roots[0];
      } else if (i == 3) {
        z = 1.91 * roots[2] - 0.91 * roots[1];
      } else {
        z = 2.0 * roots[i - 1] - roots[i - 2];
      }
      z = newton(eval, z);
    }
    roots.push_back(z);
    const double dp = eval(z).second;
    const double w = 2.0 / (dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace figopt
