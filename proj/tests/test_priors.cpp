#include "doctest.h"
#include "oracles.hpp"

#include "figopt/errors.hpp"
#include "figopt/priors.hpp"
#include "figopt/quadrature.hpp"

#include <cmath>
#include <numeric>
#include <random>

using namespace figopt;

namespace {

double rule_moment(const Rule1D& rule, int degree) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], degree);
  return s;
}

// Integral of x^m over [-1, 1].
double legendre_moment(int m) { return m % 2 ? 0.0 : 2.0 / (m + 1); }

// Integral of x^m exp(-x^2) over the real line.
double hermite_moment(int m) {
  if (m % 2) return 0.0;
  return std::tgamma((m + 1) / 2.0);
}

}  // namespace

TEST_CASE("Gauss-Legendre integrates polynomials up to degree 2C-1") {
  for (int order = 1; order <= 20; ++order) {
    const Rule1D rule = gauss_legendre(order);
    REQUIRE(static_cast<int>(rule.nodes.size()) == order);
    for (int m = 0; m <= 2 * order - 1; ++m) {
      const double exact = legendre_moment(m);
      const double got = rule_moment(rule, m);
      if (exact == 0.0) {
        CHECK(std::abs(got) <= 1e-13);
      } else {
        CHECK(std::abs(got - exact) <= 1e-11 * exact);
      }
    }
  }
}

TEST_CASE("Gauss-Hermite integrates polynomials up to degree 2C-1") {
  for (int order = 1; order <= 20; ++order) {
    const Rule1D rule = gauss_hermite(order);
    REQUIRE(static_cast<int>(rule.nodes.size()) == order);
    for (int m = 0; m <= 2 * order - 1; ++m) {
      const double exact = hermite_moment(m);
      const double got = rule_moment(rule, m);
      if (exact == 0.0) {
        CHECK(std::abs(got) <= 1e-11 * std::max(1.0, hermite_moment(m + 1)));
      } else {
        CHECK(std::abs(got - exact) <= 1e-11 * exact);
      }
    }
  }
}

TEST_CASE("two-point Legendre rule") {
  const Rule1D rule = gauss_legendre(2);
  CHECK(rule.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(rule.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(rule.weights[0] == doctest::Approx(1.0));
  CHECK(rule.weights[1] == doctest::Approx(1.0));
}

TEST_CASE("tensor rule over a prior") {
  const PriorSpec prior({UniformPrior{0.0, 2.0}, NormalPrior{1.0, 4.0}, PointMassPrior{21.8}});
  const QuadratureRule rule = quadrature_rule(prior, 5);
  CHECK(rule.size() == 25);
  CHECK(rule.p() == 3);
  CHECK(rule.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((rule.weights.array() > 0.0).all());
  CHECK((rule.nodes.col(2).array() == 21.8).all());
  CHECK((rule.nodes.col(0).array() > 0.0).all());
  CHECK((rule.nodes.col(0).array() < 2.0).all());

  // E[t1^2] = 4/3, E[t2^2] = 1 + 4, E[t1 t2] = 1.
  CHECK(expect(rule, [](const Vector& t) { return t(0) * t(0); }) == doctest::Approx(4.0 / 3.0).epsilon(1e-13));
  CHECK(expect(rule, [](const Vector& t) { return t(1) * t(1); }) == doctest::Approx(5.0).epsilon(1e-13));
  CHECK(expect(rule, [](const Vector& t) { return t(0) * t(1); }) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("quadrature agrees with Monte Carlo on a non-polynomial integrand") {
  const PriorSpec prior({NormalPrior{0.2, 0.5}, UniformPrior{-1.0, 3.0}});
  auto g = [](const Vector& t) { return 1.0 / (1.0 + std::exp(-(t(0) + 0.5 * t(1)))); };
  const double quad = expect(quadrature_rule(prior, 12), g);

  std::mt19937_64 rng(99);
  std::normal_distribution<double> n0(0.2, std::sqrt(0.5));
  std::uniform_real_distribution<double> u1(-1.0, 3.0);
  const auto mc = oracle::monte_carlo(200000, [&] {
    Vector t(2);
    t << n0(rng), u1(rng);
    return g(t);
  });
  CHECK(std::abs(quad - mc.mean) <= 4.0 * mc.se);
}

TEST_CASE("prior sampling is deterministic and has the right moments") {
  const PriorSpec prior({NormalPrior{1.5, 0.25}, UniformPrior{2.0, 4.0}, PointMassPrior{-3.0}});
  const auto a = sample_prior(prior, 20000, 5);
  const auto b = sample_prior(prior, 20000, 5);
  REQUIRE(a.size() == 20000);
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);
    m0 += a[i](0);
    m1 += a[i](1);
    CHECK(a[i](2) == -3.0);
  }
  m0 /= 20000;
  m1 /= 20000;
  CHECK(std::abs(m0 - 1.5) <= 4.0 * std::sqrt(0.25 / 20000));
  CHECK(std::abs(m1 - 3.0) <= 4.0 * std::sqrt(4.0 / 12.0 / 20000));
  CHECK(sample_prior(prior, 3, 6)[0] != a[0]);
}

TEST_CASE("prior validation and node cap") {
  CHECK_THROWS_AS(PriorSpec({NormalPrior{0.0, 0.0}}), InputError);
  CHECK_THROWS_AS(PriorSpec({UniformPrior{1.0, 1.0}}), InputError);
  const PriorSpec prior(std::vector<PriorComponent>(8, NormalPrior{0.0, 1.0}));
  CHECK_THROWS_AS(quadrature_rule(prior, 10), CapacityError);
  CHECK_NOTHROW(quadrature_rule(prior, 2));
}

TEST_CASE("rule csv layout") {
  const PriorSpec prior({PointMassPrior{2.0}, UniformPrior{-1.0, 1.0}});
  const std::string csv = rule_to_csv(quadrature_rule(prior, 2));
  CHECK(csv.rfind("t1,t2,weight\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find('\r') == std::string::npos);
}
