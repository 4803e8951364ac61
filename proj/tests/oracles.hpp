#pragma once

// Reference computations written directly from the model definitions, kept
// apart from the library so the two can be checked against each other.

#include "figopt/model.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using figopt::ControlPoint;
using figopt::Family;
using figopt::Matrix;
using figopt::Vector;

inline std::vector<double> monomials(const Eigen::MatrixXi& u, const ControlPoint& d) {
  std::vector<double> f(static_cast<std::size_t>(u.cols()), 1.0);
  for (int j = 0; j < u.cols(); ++j) {
    for (int r = 0; r < u.rows(); ++r) f[j] *= std::pow(d(r), u(r, j));
  }
  return f;
}

// Mean response for each family; `u` is ignored by the compartmental model.
inline double mean(Family family, const Eigen::MatrixXi& u, const Vector& theta, const ControlPoint& d) {
  if (family == Family::CompartmentalNormal) {
    return theta(2) * (std::exp(-theta(0) * d(0)) - std::exp(-theta(1) * d(0)));
  }
  const auto f = monomials(u, d);
  double eta = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) eta += f[j] * theta(static_cast<int>(j));
  switch (family) {
    case Family::PoissonGLM: return std::exp(eta);
    case Family::LogisticGLM: return 1.0 / (1.0 + std::exp(-eta));
    default: return eta;
  }
}

inline double variance(Family family, double mu, double gamma) {
  switch (family) {
    case Family::PoissonGLM: return mu;
    case Family::LogisticGLM: return mu * (1.0 - mu);
    default: return gamma;
  }
}

// Richardson-extrapolated central differences of the mean in theta.
inline Vector fd_gradient(Family family, const Eigen::MatrixXi& u, const Vector& theta,
                          const ControlPoint& d) {
  Vector g(theta.size());
  for (int j = 0; j < theta.size(); ++j) {
    const double h = 1e-3 * std::max(1.0, std::abs(theta(j)));
    auto diff = [&](double step) {
      Vector tp = theta, tm = theta;
      tp(j) += step;
      tm(j) -= step;
      return (mean(family, u, tp, d) - mean(family, u, tm, d)) / (2.0 * step);
    };
    g(j) = (4.0 * diff(h / 2.0) - diff(h)) / 3.0;
  }
  return g;
}

// tr I(theta) for a design, built from finite-difference gradients.
inline double trace_information(Family family, const Eigen::MatrixXi& u, const Vector& theta,
                                const std::vector<ControlPoint>& design, double gamma = 1.0) {
  double tr = 0.0;
  for (const auto& d : design) {
    const Vector g = fd_gradient(family, u, theta, d);
    tr += g.squaredNorm() / variance(family, mean(family, u, theta, d), gamma);
  }
  return tr;
}

struct MeanSe {
  double mean;
  double se;
};

template <class Draw>
MeanSe monte_carlo(int count, Draw&& draw) {
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < count; ++i) {
    const double x = draw();
    sum += x;
    sum2 += x * x;
  }
  const double m = sum / count;
  const double var = std::max(0.0, sum2 / count - m * m) * count / (count - 1.0);
  return {m, std::sqrt(var / count)};
}

}  // namespace oracle
