#include "bdlab/gaussian_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>

#include "bdlab/errors.hpp"
#include "bdlab/quadrature.hpp"
#include "bdlab/rng.hpp"

namespace bdlab {

namespace {

using cplx = std::complex<double>;

const double kInvSqrtPi = 1.0 / std::sqrt(std::numbers::pi);

double binomial(int n, int k) {
  double out = 1.0;
  for (int j = 1; j <= k; ++j) out = out * (n - k + j) / j;
  return out;
}

Expectation monte_carlo(std::span<const double> b, const TestFunction& f, std::size_t samples,
                        std::uint64_t seed) {
  cplx sum = 0.0;
  double sq = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    double r = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) r += b[i] * counter_normal(seed, i, k);
    const cplx v = f(r);
    sum += v;
    sq += std::norm(v);
  }
  const double N = static_cast<double>(samples);
  const cplx mean = sum / N;
  const double var = std::max(0.0, sq / N - std::norm(mean));
  return {mean, std::sqrt(var / N), "monte_carlo"};
}

Expectation moments_route(std::span<const double> b, const TestFunction& f, const GaussRule& rule) {
  const int deg = f.degree();
  std::vector<double> M(static_cast<std::size_t>(deg) + 1, 0.0);
  M[0] = 1.0;
  for (double bi : b) {
    // Mirrored nodes are summed as pairs so odd moments vanish exactly.
    std::vector<double> m(M.size(), 0.0);
    const std::size_t q = rule.nodes.size();
    for (std::size_t k = 0; k < (q + 1) / 2; ++k) {
      const bool middle = 2 * k + 1 == q;
      const double z = std::sqrt(2.0) * rule.nodes[q - 1 - k] * bi;
      double p = 1.0;
      for (std::size_t j = 0; j < m.size(); ++j) {
        const double pair = middle ? p : (j % 2 ? 0.0 : 2.0 * p);
        m[j] += rule.weights[k] * kInvSqrtPi * pair;
        p *= z;
      }
    }
    m[0] = 1.0;
    std::vector<double> next(M.size(), 0.0);
    for (int j = 0; j <= deg; ++j) {
      for (int k = 0; k <= j; ++k) {
        next[static_cast<std::size_t>(j)] +=
            binomial(j, k) * M[static_cast<std::size_t>(k)] * m[static_cast<std::size_t>(j - k)];
      }
    }
    M = std::move(next);
  }
  double v = 0.0;
  for (int j = 0; j <= deg; ++j) v += f.coeffs()[static_cast<std::size_t>(j)] * M[static_cast<std::size_t>(j)];
  return {v, 0.0, "moments"};
}

Expectation product_route(std::span<const double> b, const TestFunction& f, const GaussRule& rule) {
  // Each factor E cos(t b z) is real: the imaginary parts cancel between mirrored nodes.
  const double t = f.parameter();
  double prod = 1.0;
  for (double bi : b) {
    double phi = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      phi += rule.weights[k] * std::cos(t * bi * std::sqrt(2.0) * rule.nodes[k]);
    }
    prod *= phi * kInvSqrtPi;
  }
  cplx v;
  switch (f.kind()) {
    case TestFunction::Kind::exp_i: v = prod; break;
    case TestFunction::Kind::cosine: v = prod; break;
    default: v = 0.0; break;  // sine: odd function of a symmetric variable
  }
  return {v, 0.0, "product"};
}

Expectation tensor_route(std::span<const double> b, const TestFunction& f, const GaussRule& rule) {
  const std::size_t n = b.size();
  const std::size_t q = rule.nodes.size();
  std::vector<std::size_t> idx(n, 0);
  cplx sum = 0.0;
  while (true) {
    double r = 0.0;
    double w = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      r += b[i] * std::sqrt(2.0) * rule.nodes[idx[i]];
      w *= rule.weights[idx[i]] * kInvSqrtPi;
    }
    sum += w * f(r);
    std::size_t pos = 0;
    while (pos < n && ++idx[pos] == q) idx[pos++] = 0;
    if (pos == n) break;
  }
  return {sum, 0.0, "tensor"};
}

// sum_i b_i z_i is itself N(0, sum b_i^2): one 1-D rule covers any f of the sum.
Expectation collapsed_route(std::span<const double> b, const TestFunction& f, const GaussRule& rule) {
  double var = 0.0;
  for (double bi : b) var += bi * bi;
  const double scale = std::sqrt(2.0 * var);
  cplx sum = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) sum += rule.weights[k] * kInvSqrtPi * f(scale * rule.nodes[k]);
  return {sum, 0.0, "collapsed"};
}

void check_shared(const ModeBasis& basis, const FockSpec& fock) {
  fock.validate();
  if (static_cast<std::size_t>(fock.n) != basis.size()) {
    throw DomainError("basis mode count does not match the Fock spec");
  }
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (std::abs(basis.mode(i).s - fock.s[i]) > 1e-12 * basis.mode(i).s) {
      throw DomainError("basis weights do not match the Fock spec weights");
    }
  }
}

std::vector<double> point_values(const ModeBasis& basis, std::span<const double> point) {
  std::vector<double> a;
  for (std::size_t i = 0; i < basis.size(); ++i) a.push_back(basis.eval(i, point));
  return a;
}

}  // namespace

OrderFit convergence_order(std::span<const double> log_t, std::span<const double> log_dev) {
  const std::size_t m = log_t.size();
  if (m < 2 || log_dev.size() != m) throw DomainError("convergence_order: need two or more matched points");
  bool halving = m >= 3;
  for (std::size_t k = 1; k < m && halving; ++k) {
    halving = std::abs(log_t[k - 1] - log_t[k] - std::log(2.0)) < 1e-12;
  }
  if (!halving) {
    const double mx = std::accumulate(log_t.begin(), log_t.end(), 0.0) / static_cast<double>(m);
    const double my = std::accumulate(log_dev.begin(), log_dev.end(), 0.0) / static_cast<double>(m);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      sxy += (log_t[k] - mx) * (log_dev[k] - my);
      sxx += (log_t[k] - mx) * (log_t[k] - mx);
    }
    return {sxx > 0.0 ? sxy / sxx : 0.0, std::numeric_limits<double>::infinity()};
  }
  // Local slopes drift like t^2; eliminate that drift level by level.
  std::vector<double> p;
  for (std::size_t k = 1; k < m; ++k) p.push_back((log_dev[k - 1] - log_dev[k]) / (log_t[k - 1] - log_t[k]));
  double factor = 4.0;
  double last_change = std::abs(p.back() - p[p.size() - 2]);
  while (p.size() > 1) {
    std::vector<double> next;
    for (std::size_t k = 1; k < p.size(); ++k) next.push_back((factor * p[k] - p[k - 1]) / (factor - 1.0));
    last_change = std::abs(next.back() - p.back());
    p = std::move(next);
    factor *= 4.0;
  }
  return {p.front(), last_change};
}

QuadratureSpec QuadratureSpec::gh(int order, std::optional<std::uint64_t> seed) {
  QuadratureSpec q;
  q.kind = Kind::gauss_hermite;
  q.order = order;
  q.seed = seed;
  q.validate();
  return q;
}

QuadratureSpec QuadratureSpec::mc(std::size_t samples, std::optional<std::uint64_t> seed) {
  QuadratureSpec q;
  q.kind = Kind::monte_carlo;
  q.samples = samples;
  q.seed = seed;
  q.validate();
  return q;
}

QuadratureSpec QuadratureSpec::parse(const std::string& text, std::optional<std::uint64_t> seed) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw DomainError("quadrature: expected gh:<order> or mc:<samples>");
  const std::string kind = text.substr(0, colon);
  const std::string num = text.substr(colon + 1);
  long long v = 0;
  std::size_t used = 0;
  try {
    v = std::stoll(num, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != num.size()) throw DomainError("quadrature: bad count '" + num + "'");
  if (kind == "gh") {
    if (v < 2 || v > 400) throw DomainError("quadrature: Gauss-Hermite order must be 2..400");
    return gh(static_cast<int>(v), seed);
  }
  if (kind == "mc") {
    if (v < 1) throw DomainError("quadrature: Monte Carlo needs at least one sample");
    return mc(static_cast<std::size_t>(v), seed);
  }
  throw DomainError("quadrature: unknown kind '" + kind + "'");
}

void QuadratureSpec::validate() const {
  if (kind == Kind::gauss_hermite && (order < 2 || order > 400)) {
    throw DomainError("quadrature: Gauss-Hermite order must be 2..400");
  }
  if (kind == Kind::monte_carlo) {
    if (samples < 1) throw DomainError("quadrature: Monte Carlo needs at least one sample");
    if (!seed) throw DomainError("quadrature: Monte Carlo requires an explicit seed");
  }
}

Expectation gaussian_expectation(std::span<const double> a, std::span<const double> s, double tau2,
                                 const TestFunction& f, const QuadratureSpec& quad) {
  quad.validate();
  if (a.size() != s.size()) throw DomainError("gaussian_expectation: length mismatch");
  if (!(tau2 > 0.0)) throw DomainError("gaussian_expectation: tau2 must be positive");
  std::vector<std::size_t> order(a.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return s[x] != s[y] ? s[x] < s[y] : a[x] < a[y];
  });
  std::vector<double> b;
  for (std::size_t i : order) {
    if (!(s[i] > 0.0)) throw DomainError("gaussian_expectation: weights must be positive");
    b.push_back(a[i] * std::sqrt(tau2 / (2.0 * s[i])));
  }
  if (b.empty()) return {f(0.0), 0.0, "exact"};

  if (quad.kind == QuadratureSpec::Kind::monte_carlo) return monte_carlo(b, f, quad.samples, *quad.seed);

  if (f.kind() == TestFunction::Kind::polynomial) {
    if (f.degree() > 2 * quad.order - 1) {
      throw DomainError("gaussian_expectation: quadrature order too low for the polynomial degree");
    }
    return moments_route(b, f, gauss_hermite(quad.order));
  }
  const GaussRule rule = gauss_hermite(quad.order);
  if (f.separable()) return product_route(b, f, rule);
  const double points = std::pow(static_cast<double>(quad.order), static_cast<double>(b.size()));
  if (b.size() <= static_cast<std::size_t>(kTensorMaxModes) && points <= static_cast<double>(kTensorMaxPoints)) {
    return tensor_route(b, f, rule);
  }
  return collapsed_route(b, f, rule);
}

Expectation expectation_ground(const ModeBasis& basis, const FockSpec& fock, const TestFunction& f,
                               std::span<const double> point, const QuadratureSpec& quad) {
  check_shared(basis, fock);
  if (!convergence_report(basis).condition_sinv_converges) {
    throw ConditionVeto("expectation_ground: sum s^-1 |xi|^2 diverges for this (d, sigma, weight rule)");
  }
  const auto a = point_values(basis, point);
  return gaussian_expectation(a, fock.s, fock.tau2, f, quad);
}

FieldConfig embed(const ModeBasis& basis, const std::function<double(std::span<const double>)>& g, int grid) {
  const int d = basis.geometry().dim;
  if (grid < 1 || grid < 4 * basis.max_harmonic()) {
    throw DomainError("embed: grid must have at least 4 * max|k| points per axis");
  }
  const double L = basis.geometry().circumference;
  const double h = L / grid;
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(grid);
  FieldConfig out;
  out.coeffs.assign(basis.size(), 0.0);
  std::vector<double> p(static_cast<std::size_t>(d));
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t r = flat;
    for (int a = 0; a < d; ++a) {
      p[static_cast<std::size_t>(a)] = h * static_cast<double>(r % static_cast<std::size_t>(grid));
      r /= static_cast<std::size_t>(grid);
    }
    const double gv = g(p);
    for (std::size_t i = 0; i < basis.size(); ++i) out.coeffs[i] += gv * basis.eval_l2(i, p);
  }
  const double cell = std::pow(h, d);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    out.coeffs[i] *= cell / basis.params().factor(basis.mode(i).lambda);
  }
  return out;
}

TailReport tail_bound_check(const ModeBasis& basis, const FockSpec& fock, const TestFunction& f,
                            std::span<const double> point, std::size_t n_from, std::size_t n_to,
                            const QuadratureSpec& quad) {
  check_shared(basis, fock);
  if (n_from < 1 || n_from > n_to || n_to > basis.size()) {
    throw DomainError("tail_bound_check: need 1 <= n_from <= n_to <= mode count");
  }
  const auto a = point_values(basis, point);
  TailReport rep;
  rep.C = fock.tau2 * f.sup(2) / 4.0;
  rep.B = fock.tau2 * fock.tau2 * f.sup(3);
  auto value_at = [&](std::size_t n) {
    return gaussian_expectation(std::span(a).first(n), std::span(fock.s).first(n), fock.tau2, f, quad).value;
  };
  cplx prev = value_at(n_from - 1);
  for (std::size_t n = n_from; n <= n_to; ++n) {
    const cplx cur = value_at(n);
    const Mode& m = basis.mode(n - 1);
    TailRow row;
    row.n = n;
    row.value = cur;
    row.increment = std::abs(cur - prev);
    const double x = m.supnorm;
    const double t2 = rep.C == 0.0 ? 0.0 : rep.C * x * x / m.s;
    const double t3 = rep.B == 0.0 ? 0.0 : rep.B * x * x * x / (m.s * m.s);
    row.bound = t2 + t3;
    rep.all_within = rep.all_within && row.increment <= row.bound * (1.0 + 1e-12);
    rep.rows.push_back(row);
    prev = cur;
  }
  return rep;
}

double translate_overlap(const FockSpec& fock, std::span<const double> omega, double t, int order) {
  fock.validate();
  if (omega.size() != static_cast<std::size_t>(fock.n)) {
    throw DomainError("translate_overlap: omega length must equal n");
  }
  const GaussRule rule = gauss_hermite(order);
  double out = 1.0;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const double beta = t * omega[i] * std::sqrt(fock.s[i] / fock.tau2);
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      acc += rule.weights[k] * std::exp(beta * rule.nodes[k] - 0.5 * beta * beta);
    }
    out *= acc * kInvSqrtPi;
  }
  return out;
}

ContinuityReport strong_continuity_probe(const ModeBasis& basis, const FockSpec& fock, ProbeFamily family,
                                         std::span<const double> point, std::span<const double> t_sequence,
                                         const QuadratureSpec& quad) {
  if (t_sequence.empty()) throw DomainError("strong_continuity_probe: empty t sequence");
  auto value = [&](double t) {
    const TestFunction f =
        family == ProbeFamily::characteristic ? TestFunction::exp_i(t) : TestFunction::polynomial({1.0});
    return expectation_ground(basis, fock, f, point, quad).value;
  };
  ContinuityReport rep;
  double var_sum = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double a = basis.eval(i, point);
    var_sum += a * a * fock.tau2 / fock.s[i];
  }
  const cplx v0 = value(0.0);
  std::vector<double> lx, ly;
  for (double t : t_sequence) {
    ContinuityRow row;
    row.t = t;
    row.value = value(t);
    row.deviation = std::abs(row.value - v0);
    row.bound = family == ProbeFamily::characteristic ? t * t * var_sum / 4.0 : 0.0;
    if (row.deviation > 0.0 && t != 0.0) {
      lx.push_back(std::log(std::abs(t)));
      ly.push_back(std::log(row.deviation));
    }
    rep.rows.push_back(row);
  }
  if (lx.size() >= 2) {
    const auto fit = convergence_order(std::span(lx).subspan(0), std::span(ly).subspan(0));
    rep.fitted_order = fit.order;
    // Rounding in |value - v0| is ~4 eps |v0| / deviation in the log; slopes divide by the log-step,
    // and the Richardson levels amplify by at most prod (4^j + 1) / (4^j - 1) < 2.
    double rounding = 0.0;
    for (std::size_t k = 1; k < lx.size(); ++k) {
      const double dk = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(v0));
      const double e = dk / std::exp(ly[k]) + dk / std::exp(ly[k - 1]);
      rounding = std::max(rounding, 2.0 * e / std::abs(lx[k] - lx[k - 1]));
    }
    rep.order_error = std::max(fit.error, rounding);
  }
  const double h = std::abs(t_sequence.front());
  if (h > 0.0) {
    cplx d1[3], d2[3];
    for (int j = 0; j < 3; ++j) {
      const double hj = h / std::pow(2.0, j);
      const cplx vp = value(hj);
      const cplx vm = value(-hj);
      d1[j] = (vp - vm) / (2.0 * hj);
      d2[j] = (vp - 2.0 * v0 + vm) / (hj * hj);
    }
    auto richardson = [](const cplx (&d)[3]) {
      const cplx r1a = (4.0 * d[1] - d[0]) / 3.0;
      const cplx r1b = (4.0 * d[2] - d[1]) / 3.0;
      return (16.0 * r1b - r1a) / 15.0;
    };
    rep.first_derivative = richardson(d1);
    rep.second_derivative = richardson(d2);
  }
  rep.expected_second = family == ProbeFamily::characteristic ? -var_sum / 2.0 : 0.0;
  return rep;
}

}  // namespace bdlab
