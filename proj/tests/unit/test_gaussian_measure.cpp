#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bdlab/errors.hpp"
#include "bdlab/gaussian_measure.hpp"
#include "bdlab/quadrature.hpp"

using namespace bdlab;

namespace {

const double kPi = std::numbers::pi;

ModeBasis circle(std::size_t n, double sigma = 1.0) {
  return build_basis({1, 2 * kPi}, {1.0, sigma}, n, WeightRule::massive(1.0));
}

FockSpec fock_for(const ModeBasis& b, double tau2 = 1.0) {
  return {static_cast<int>(b.size()), 2, tau2, b.weights()};
}

double second_moment(const ModeBasis& b, const FockSpec& f, std::span<const double> p) {
  double v = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) v += std::pow(b.eval(i, p), 2) * f.tau2 / (2 * f.s[i]);
  return v;
}

}  // namespace

TEST_CASE("Gauss-Hermite rule integrates even monomials exactly") {
  for (int order : {2, 5, 12, 40}) {
    const auto r = gauss_hermite(order);
    for (int k = 0; 2 * k <= std::min(2 * order - 1, 20); ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < r.nodes.size(); ++j) s += r.weights[j] * std::pow(r.nodes[j], 2 * k);
      const double exact = std::tgamma(k + 0.5);
      CHECK(std::abs(s - exact) <= 1e-12 * exact);
    }
  }
  CHECK_THROWS_AS(gauss_hermite(0), DomainError);
}

TEST_CASE("test-function derivatives match central differences") {
  const std::vector<TestFunction> fam{TestFunction::polynomial({0.5, -1, 2, 0.3, -0.1}), TestFunction::exp_i(1.3),
                                      TestFunction::sine(0.7), TestFunction::cosine(2.0), TestFunction::bump(0.8)};
  for (const auto& f : fam) {
    for (double r : {-1.1, 0.0, 0.4, 2.3}) {
      for (int k = 1; k <= 3; ++k) {
        const double h = 1e-4;
        const auto fd = (f.derivative(k - 1, r + h) - f.derivative(k - 1, r - h)) / (2 * h);
        CHECK(std::abs(fd - f.derivative(k, r)) < 1e-6 * (1 + std::abs(f.derivative(k, r))));
      }
    }
  }
}

TEST_CASE("declared sup bounds") {
  const auto b = TestFunction::bump(0.5);
  // Dense scan oracle.
  double mx[4] = {0, 0, 0, 0};
  for (int j = -200000; j <= 200000; ++j) {
    const double r = j * 5e-5;
    for (int k = 0; k < 4; ++k) mx[k] = std::max(mx[k], std::abs(b.derivative(k, r)));
  }
  CHECK(b.sup(0) == 1.0);
  CHECK(b.sup(1) == doctest::Approx(3 * std::sqrt(3.0) / 8 / 0.5).epsilon(1e-14));
  CHECK(b.sup(2) == doctest::Approx(2 / 0.25).epsilon(1e-14));
  // Frozen from a symbolic critical-point solve: 4.66855928415521 / w^3.
  CHECK(b.sup(3) == doctest::Approx(4.66855928415521 / 0.125).epsilon(1e-13));
  for (int k = 0; k < 4; ++k) {
    CHECK(mx[k] <= b.sup(k) * (1 + 1e-12));
    CHECK(mx[k] >= b.sup(k) * (1 - 1e-6));
  }
  CHECK(std::isinf(TestFunction::polynomial({0, 0, 1}).sup(0)));
  CHECK(TestFunction::polynomial({0, 0, 1}).sup(2) == 2.0);
  CHECK(TestFunction::polynomial({0, 0, 1}).sup(3) == 0.0);
  CHECK(TestFunction::sine(-3).sup(3) == 27.0);
  CHECK_THROWS_AS(TestFunction::polynomial({1, 1, 1, 1, 1, 1}), DomainError);
  CHECK_THROWS_AS(TestFunction::bump(0), DomainError);
  CHECK(TestFunction::parse("bump:0.5").describe() == "bump:0.5");
  CHECK(TestFunction::parse("poly:1,0,2").degree() == 2);
  CHECK_THROWS_AS(TestFunction::parse("sinh:1"), DomainError);
  CHECK_THROWS_AS(TestFunction::parse("sin:x"), DomainError);
}

TEST_CASE("ground-state expectations against closed forms") {
  const auto b = circle(7);
  const auto f = fock_for(b, 1.4);
  const double p[] = {0.9};
  const auto gh = QuadratureSpec::gh(20);
  CHECK(expectation_ground(b, f, TestFunction::polynomial({1}), p, gh).value == cplx(1.0));
  const double m2 = second_moment(b, f, p);
  CHECK(std::abs(expectation_ground(b, f, TestFunction::polynomial({0, 0, 1}), p, gh).value - m2) <= 1e-14);
  // Fourth moment of a centered Gaussian: 3 v^2.
  CHECK(std::abs(expectation_ground(b, f, TestFunction::polynomial({0, 0, 0, 0, 1}), p, gh).value - 3 * m2 * m2) <= 1e-14);
  for (double t : {0.3, 1.0, 2.5}) {
    double prod = 1.0;
    for (std::size_t i = 0; i < b.size(); ++i) prod *= std::exp(-t * t * std::pow(b.eval(i, p), 2) * f.tau2 / (4 * f.s[i]));
    CHECK(std::abs(expectation_ground(b, f, TestFunction::exp_i(t), p, gh).value - prod) <= 1e-10);
    CHECK(std::abs(expectation_ground(b, f, TestFunction::cosine(t), p, gh).value - prod) <= 1e-10);
    CHECK(expectation_ground(b, f, TestFunction::sine(t), p, gh).value == cplx(0.0));
  }
  CHECK_THROWS_AS(expectation_ground(b, f, TestFunction::polynomial({0, 0, 0, 0, 1}), p, QuadratureSpec::gh(2)),
                  DomainError);
  CHECK_THROWS_AS(QuadratureSpec::mc(100, std::nullopt), DomainError);
}

TEST_CASE("boundedness and quadrature versus Monte Carlo") {
  for (std::size_t n : {1u, 3u, 6u}) {
    const auto b = circle(n);
    const auto f = fock_for(b, 2.0);
    const double p[] = {0.3};
    const std::vector<TestFunction> fam{TestFunction::exp_i(1.7), TestFunction::sine(2.0), TestFunction::cosine(0.4),
                                        TestFunction::bump(0.3), TestFunction::polynomial({0.2, 1, -0.5, 0.1})};
    for (const auto& tf : fam) {
      const auto q = expectation_ground(b, f, tf, p, QuadratureSpec::gh(n == 6 ? 12 : 30));
      const auto mc = expectation_ground(b, f, tf, p, QuadratureSpec::mc(40000, 11));
      CHECK(std::abs(q.value) <= tf.sup(0) + 1e-14);
      CHECK(std::abs(q.value - mc.value) <= 4 * mc.std_error + 1e-15);
    }
  }
}

TEST_CASE("relabeling identical modes leaves the value bit-identical") {
  const std::vector<double> a{0.3, -0.2, 0.3, 0.5};
  const std::vector<double> s{1.0, 2.0, 1.0, 3.0};
  const std::vector<double> a2{0.5, 0.3, -0.2, 0.3};
  const std::vector<double> s2{3.0, 1.0, 2.0, 1.0};
  for (const auto& tf : {TestFunction::exp_i(1.2), TestFunction::bump(0.4), TestFunction::polynomial({0, 1, 1})}) {
    for (const auto& q : {QuadratureSpec::gh(10), QuadratureSpec::mc(1000, 5)}) {
      CHECK(gaussian_expectation(a, s, 1.0, tf, q).value == gaussian_expectation(a2, s2, 1.0, tf, q).value);
    }
  }
}

TEST_CASE("condition veto in three dimensions") {
  const auto b = build_basis({3, 2 * kPi}, {1.0, 0.5}, 10, WeightRule::massive(1.0));
  const double p[] = {0, 0, 0};
  CHECK_THROWS_AS(expectation_ground(b, fock_for(b), TestFunction::exp_i(1), p, QuadratureSpec::gh(10)), ConditionVeto);
}

TEST_CASE("tail bound increments") {
  const auto b = circle(10);
  const auto f = fock_for(b);
  const double p[] = {0.7};
  const auto gh = QuadratureSpec::gh(40);
  const auto sin_rep = tail_bound_check(b, f, TestFunction::sine(1.0), p, 1, 10, gh);
  CHECK(sin_rep.all_within);
  for (const auto& r : sin_rep.rows) CHECK(r.increment == 0.0);
  const auto cos_rep = tail_bound_check(b, f, TestFunction::cosine(1.0), p, 1, 10, gh);
  CHECK(cos_rep.all_within);
  const auto lin = tail_bound_check(b, f, TestFunction::polynomial({0, 3}), p, 1, 10, gh);
  for (const auto& r : lin.rows) CHECK(r.increment == 0.0);
  const auto sq = tail_bound_check(b, f, TestFunction::polynomial({0, 0, 1}), p, 1, 10, gh);
  CHECK(sq.C == 0.5);
  for (const auto& r : sq.rows) {
    const auto& m = b.mode(r.n - 1);
    const double a = b.eval(r.n - 1, p);
    CHECK(r.increment == doctest::Approx(a * a / (2 * m.s)).epsilon(1e-12));
    CHECK(r.increment <= r.bound * (1 + 1e-12));
  }
  CHECK_THROWS_AS(tail_bound_check(b, f, TestFunction::sine(1.0), p, 0, 3, gh), DomainError);
}

TEST_CASE("translation overlaps") {
  const FockSpec one{1, 2, 1.0, {1.0}};
  const double w1[] = {1.0};
  CHECK(translate_overlap(one, w1, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(translate_overlap(one, w1, 2.0) - std::exp(-1.0)) <= 1e-12);
  const FockSpec two{2, 2, 1.0, {1.0, 4.0}};
  const double w2[] = {1.0, 1.0};
  CHECK(std::abs(translate_overlap(two, w2, 1.0) - std::exp(-1.25)) <= 1e-12);
  double prev = 1.0;
  for (double t = 0.1; t < 3.0; t += 0.1) {
    const double v = translate_overlap(two, w2, t);
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS_AS(translate_overlap(two, w1, 1.0), DomainError);
}

TEST_CASE("strong continuity probe") {
  const auto b = circle(5);
  const auto f = fock_for(b, 1.3);
  const double p[] = {0.2};
  const std::vector<double> ts{0.4, 0.2, 0.1, 0.05};
  const auto rep = strong_continuity_probe(b, f, ProbeFamily::characteristic, p, ts, QuadratureSpec::gh(30));
  for (const auto& r : rep.rows) CHECK(r.deviation <= r.bound);
  CHECK(rep.fitted_order + rep.order_error >= 2.0);
  CHECK(std::abs(rep.fitted_order - 2.0) < 1e-3);
  CHECK(std::abs(rep.first_derivative) < 1e-12);
  CHECK(std::abs(rep.second_derivative - rep.expected_second) < 1e-7);
  CHECK(rep.expected_second == doctest::Approx(-second_moment(b, f, p)));
  const auto flat = strong_continuity_probe(b, f, ProbeFamily::constant, p, ts, QuadratureSpec::gh(30));
  for (const auto& r : flat.rows) CHECK(r.value == cplx(1.0));
}

TEST_CASE("embedding field configurations") {
  const auto b = circle(7);
  auto xi3 = [&](std::span<const double> p) { return b.eval(3, p); };
  const auto e3 = embed(b, xi3, 64);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(std::abs(e3.coeffs[i] - (i == 3 ? 1.0 : 0.0)) < 1e-12);
  const auto c = embed(b, [](std::span<const double> p) { return std::cos(p[0]); }, 64);
  CHECK(c.coeffs[1] == doctest::Approx(2 * std::sqrt(kPi)).epsilon(1e-13));
  CHECK(std::abs(c.coeffs[2]) < 1e-13);
  const auto z = embed(b, [](std::span<const double>) { return 0.0; }, 64);
  for (double v : z.coeffs) CHECK(v == 0.0);
  CHECK_THROWS_AS(embed(b, xi3, 11), DomainError);
}

TEST_CASE("bump expectation against its closed form on both quadrature routes") {
  // E 1/(1 + (v Z / w)^2) = sqrt(pi/2) (w/v) e^{w^2/(2v^2)} erfc(w / (sqrt2 v)).
  auto oracle = [](std::span<const double> b, double w) {
    double var = 0.0;
    for (double x : b) var += x * x;
    const double u = w / std::sqrt(var);
    return std::sqrt(kPi / 2) * u * std::exp(u * u / 2) * std::erfc(u / std::sqrt(2.0));
  };
  const auto f = TestFunction::bump(1.0);
  const std::vector<double> a4{0.3, -0.2, 0.25, 0.1};
  const std::vector<double> s4{1.0, 1.5, 2.0, 3.0};
  const auto tensor = gaussian_expectation(a4, s4, 1.0, f, QuadratureSpec::gh(30));
  CHECK(tensor.method == "tensor");
  std::vector<double> b4;
  for (std::size_t i = 0; i < a4.size(); ++i) b4.push_back(a4[i] * std::sqrt(1.0 / (2 * s4[i])));
  CHECK(std::abs(tensor.value - oracle(b4, 1.0)) < 1e-10);

  std::vector<double> a12, s12, b12;
  for (int i = 0; i < 12; ++i) {
    a12.push_back(0.35 * std::cos(0.7 * i));
    s12.push_back(1.0 + 0.5 * i);
    b12.push_back(a12.back() * std::sqrt(1.0 / (2 * s12.back())));
  }
  const auto big = gaussian_expectation(a12, s12, 1.0, f, QuadratureSpec::gh(60));
  CHECK(big.method == "collapsed");
  CHECK(big.std_error == 0.0);
  CHECK(std::abs(big.value - oracle(b12, 1.0)) < 1e-10);
}
