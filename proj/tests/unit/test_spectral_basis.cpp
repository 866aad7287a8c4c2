#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "bdlab/errors.hpp"
#include "bdlab/spectral_basis.hpp"

using namespace bdlab;

namespace {

const double kPi = std::numbers::pi;

ModeBasis circle(std::size_t n, double tau1 = 1.0, double sigma = 1.0) {
  return build_basis({1, 2 * kPi}, {tau1, sigma}, n, WeightRule::massive(1.0));
}

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

// Trapezoid (= rectangle, periodic) integral of a product of two modes over T^d.
double grid_overlap(const ModeBasis& b, std::size_t i, std::size_t j, int G, bool sobolev_weighted) {
  const int d = b.geometry().dim;
  const double L = b.geometry().circumference;
  const double h = L / G;
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(G);
  double sum = 0.0;
  std::vector<double> p(static_cast<std::size_t>(d));
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t r = flat;
    for (int a = 0; a < d; ++a) {
      p[static_cast<std::size_t>(a)] = h * static_cast<double>(r % static_cast<std::size_t>(G));
      r /= static_cast<std::size_t>(G);
    }
    sum += sobolev_weighted ? b.eval(i, p) * b.eval(j, p) : b.eval_l2(i, p) * b.eval_l2(j, p);
  }
  return sum * std::pow(h, d);
}

}  // namespace

TEST_CASE("constant mode on the circle") {
  const auto b = circle(1);
  REQUIRE(b.size() == 1);
  CHECK(b.mode(0).parity == Parity::constant);
  CHECK(b.mode(0).lambda == 0.0);
  CHECK(b.mode(0).supnorm == doctest::Approx(1.0 / std::sqrt(2 * kPi)).epsilon(1e-15));
  const double pt[] = {1.234};
  CHECK(eval_mode(b, 0, pt) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
}

TEST_CASE("first cosine mode carries the Sobolev factor one half") {
  const auto b = circle(3);
  const Mode& m = b.mode(1);
  CHECK(m.parity == Parity::cos);
  CHECK(m.k == std::vector<int>{1});
  CHECK(m.lambda == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.supnorm == doctest::Approx(0.5 / std::sqrt(kPi)).epsilon(1e-15));
  CHECK(b.mode(2).parity == Parity::sin);
  const double half_pi[] = {kPi / 2};
  CHECK(std::abs(eval_mode(b, 1, half_pi)) < 1e-16);
}

TEST_CASE("vanishing tau1 leaves the L2 sup norm") {
  const auto b = circle(5, 1e-30);
  for (const auto& m : b.modes()) CHECK(m.supnorm == m.l2_supnorm);
}

TEST_CASE("modes are periodic and wrap coordinates") {
  const auto b = build_basis({2, 3.0}, {0.5, 1.5}, 12, WeightRule::massive(0.3));
  const double p[] = {0.4, 2.1};
  const double q[] = {0.4 + 3.0, 2.1 - 6.0};
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(b.eval(i, p) == doctest::Approx(b.eval(i, q)).epsilon(1e-12));
  CHECK_THROWS_AS(eval_mode(b, 12, p), IndexError);
  const double bad[] = {0.1};
  CHECK_THROWS_AS(eval_mode(b, 0, bad), DomainError);
}

TEST_CASE("canonical order and invariants") {
  const auto b = build_basis({3, 2 * kPi}, {1.0, 1.0}, 60, WeightRule::massive(2.0));
  const auto again = build_basis({3, 2 * kPi}, {1.0, 1.0}, 60, WeightRule::massive(2.0));
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Mode& m = b.mode(i);
    CHECK(m.index == i);
    CHECK(m.k == again.mode(i).k);
    CHECK(m.parity == again.mode(i).parity);
    int k2 = 0;
    for (int c : m.k) k2 += c * c;
    CHECK(m.lambda == doctest::Approx(static_cast<double>(k2)).epsilon(1e-14));
    CHECK(m.s == doctest::Approx(std::sqrt(k2 + 4.0)).epsilon(1e-14));
    if (i > 0) CHECK(b.mode(i - 1).lambda <= m.lambda);
  }
  // Shell |k|^2 = 1 in d = 3: three half-lattice vectors, cos and sin each.
  int shell1 = 0;
  for (const auto& m : b.modes()) shell1 += m.lambda == 1.0;
  CHECK(shell1 == 6);
}

TEST_CASE("underlying modes are L2 orthonormal and xi are Sobolev orthonormal") {
  const auto b = build_basis({2, 2 * kPi}, {0.7, 1.2}, 21, WeightRule::massive(1.0));
  const int G = 4 * b.max_harmonic() + 4;
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = i; j < b.size(); ++j) {
      const double expect = i == j ? 1.0 : 0.0;
      CHECK(std::abs(grid_overlap(b, i, j, G, false) - expect) < 1e-10);
      // Sobolev product of xi_i, xi_j: the L2 product of xi weighted by (1 + tau1 lambda^sigma)^2.
      const double w = (1 + 0.7 * std::pow(b.mode(i).lambda, 1.2)) * (1 + 0.7 * std::pow(b.mode(j).lambda, 1.2));
      CHECK(std::abs(w * grid_overlap(b, i, j, G, true) - expect) < 1e-10);
    }
  }
}

TEST_CASE("stored sup norms match a dense grid maximum") {
  const auto b = build_basis({2, 2 * kPi}, {1.0, 1.0}, 25, WeightRule::massive(1.0));
  // Spacing L/48 hits every extremum of harmonics up to 3 in each axis.
  const int G = 48;
  REQUIRE(b.max_harmonic() <= 3);
  for (std::size_t i = 0; i < b.size(); ++i) {
    double mx = 0.0;
    for (int a = 0; a < G; ++a) {
      for (int c = 0; c < G; ++c) {
        const double p[] = {2 * kPi * a / G, 2 * kPi * c / G};
        mx = std::max(mx, std::abs(b.eval(i, p)));
      }
    }
    CHECK(std::abs(mx - b.mode(i).supnorm) <= 1e-12);
  }
}

TEST_CASE("Sobolev inner product") {
  const auto b = circle(2);
  CHECK(sobolev_inner(b, {{1, 0}}, {{1, 0}}) == 1.0);
  CHECK(sobolev_inner(b, {{1, 0}}, {{0, 1}}) == 0.0);
  CHECK(sobolev_inner(b, {{1, 2}}, {{3, 4}}) == 11.0);
  CHECK_THROWS_AS(sobolev_inner(b, {{1}}, {{3, 4}}), DomainError);

  // Independent route: sample f = xi_0 + 2 xi_1 and g = 3 xi_0 + 4 xi_1 on a grid and
  // evaluate sum_j (1 + tau1 lambda_j^sigma)^2 <f, e_j> <g, e_j> over a larger basis.
  const auto big = circle(9);
  const int G = 64;
  double total = 0.0;
  for (std::size_t j = 0; j < big.size(); ++j) {
    double fj = 0.0, gj = 0.0;
    for (int a = 0; a < G; ++a) {
      const double p[] = {2 * kPi * a / G};
      const double f = big.eval(0, p) + 2 * big.eval(1, p);
      const double g = 3 * big.eval(0, p) + 4 * big.eval(1, p);
      fj += f * big.eval_l2(j, p);
      gj += g * big.eval_l2(j, p);
    }
    const double w = 1 + big.mode(j).lambda;
    total += w * w * fj * gj * std::pow(2 * kPi / G, 2);
  }
  CHECK(std::abs(total - 11.0) < 1e-10);
}

TEST_CASE("weight rules and errors") {
  CHECK_THROWS_AS(build_basis({1, 2 * kPi}, {1, 1}, 3, WeightRule::photon()), DomainError);
  const auto floored = build_basis({1, 2 * kPi}, {1, 1}, 3, WeightRule::photon(0.25));
  CHECK(floored.mode(0).s == 0.25);
  CHECK(floored.mode(1).s == doctest::Approx(1.0));
  const auto nozero = build_basis({1, 4.0}, {1, 1}, 2, WeightRule::photon(), {false});
  CHECK(nozero.mode(0).s == doctest::Approx(2 * kPi / 4.0).epsilon(1e-15));
  CHECK_THROWS_AS(build_basis({1, 2 * kPi}, {1, 1}, kMaxBasisModes + 1, WeightRule::massive(1)), CapacityError);
  CHECK_THROWS_AS(build_basis({1, 2 * kPi}, {1, 1}, 0, WeightRule::massive(1)), DomainError);
  CHECK_THROWS_AS(build_basis({4, 2 * kPi}, {1, 1}, 1, WeightRule::massive(1)), DomainError);
  CHECK_THROWS_AS(build_basis({1, 2 * kPi}, {-1, 1}, 1, WeightRule::massive(1)), DomainError);
  CHECK_THROWS_AS(build_basis({1, 2 * kPi}, {1, 1}, 3, WeightRule::custom_list({1, 2})), DomainError);
  const auto custom = build_basis({1, 2 * kPi}, {1, 1}, 2, WeightRule::custom_list({3, 5}));
  CHECK(custom.mode(1).s == 5.0);
}

TEST_CASE("convergence report on the circle: increments decay like k^-5") {
  const auto b = circle(10000);
  const auto rep = convergence_report(b);
  CHECK(rep.condition_sinv_converges);
  CHECK(rep.condition_sup_converges);
  CHECK(rep.weight_exponent == 1.0);
  CHECK(rep.decay_exponent == 4.0);
  std::vector<double> ks, inc;
  for (std::size_t i = 5000; i < b.size(); i += 2) {
    ks.push_back(static_cast<double>(b.mode(i).k[0]));
    inc.push_back(rep.increments_sinv[i]);
  }
  CHECK(loglog_slope(ks, inc) == doctest::Approx(-5.0).epsilon(0.01));
  // Partial sums increase and the tail estimate is tiny compared with the sum.
  CHECK(rep.sum_sinv_xi2 > rep.increments_sinv[0]);
  CHECK(rep.tail_sinv_xi2 > 0.0);
  CHECK(rep.tail_sinv_xi2 < 1e-12 * rep.sum_sinv_xi2);
}

TEST_CASE("single-mode convergence report") {
  const auto b = circle(1);
  const auto rep = convergence_report(b);
  const double x2 = b.mode(0).supnorm * b.mode(0).supnorm;
  CHECK(rep.sum_sinv_xi2 == doctest::Approx(x2 / b.mode(0).s));
  CHECK(rep.sum_xi2 == doctest::Approx(x2));
}

TEST_CASE("three-torus shell sums: sigma 1 converges, sigma 1/2 diverges") {
  auto shell_slope = [](const ModeBasis& b, const ConvergenceReport& rep) {
    // Sum increments per integer shell |k| in [K, K+1), fit over complete shells.
    std::vector<double> shell(64, 0.0);
    int kmax = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const int K = static_cast<int>(std::floor(b.mode(i).momentum + 1e-12));
      shell[static_cast<std::size_t>(K)] += rep.increments_sinv[i];
      kmax = std::max(kmax, K);
    }
    std::vector<double> x, y;
    for (int K = 4; K < kmax; ++K) {
      x.push_back(K + 0.5);
      y.push_back(shell[static_cast<std::size_t>(K)]);
    }
    return loglog_slope(x, y);
  };
  const auto good = build_basis({3, 2 * kPi}, {1.0, 1.0}, 20000, WeightRule::massive(1.0));
  const auto rep_good = convergence_report(good);
  CHECK(rep_good.condition_sinv_converges);
  CHECK(shell_slope(good, rep_good) < -2.5);

  const auto bad = build_basis({3, 2 * kPi}, {1.0, 0.5}, 20000, WeightRule::massive(1.0));
  const auto rep_bad = convergence_report(bad);
  CHECK_FALSE(rep_bad.condition_sinv_converges);
  CHECK_FALSE(rep_bad.condition_sup_converges);
  CHECK(std::isinf(rep_bad.tail_sinv_xi2));
  CHECK(shell_slope(bad, rep_bad) > -1.2);
}

TEST_CASE("basis CSV has a header and 17 significant digits") {
  std::ostringstream os;
  write_basis_csv(os, circle(2));
  const std::string s = os.str();
  CHECK(s.rfind("index,k,parity,lambda,s,supnorm\n", 0) == 0);
  CHECK(s.find("0,0,const,0,1,0.3989422804014327") != std::string::npos);
  CHECK(s.find('\r') == std::string::npos);
}
