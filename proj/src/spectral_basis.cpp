#include "bdlab/spectral_basis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "bdlab/errors.hpp"

namespace bdlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int norm2(const std::vector<int>& k) {
  int out = 0;
  for (int c : k) out += c * c;
  return out;
}

bool in_half_lattice(const std::vector<int>& k) {
  for (int c : k) {
    if (c != 0) return c > 0;
  }
  return false;
}

// All half-lattice wavevectors with |k|^2 <= r2, plus k = 0.
std::vector<std::vector<int>> enumerate_wavevectors(int dim, int radius) {
  std::vector<std::vector<int>> out;
  const int r2 = radius * radius;
  std::vector<int> k(static_cast<std::size_t>(dim), -radius);
  while (true) {
    const int n2 = norm2(k);
    if (n2 <= r2 && (n2 == 0 || in_half_lattice(k))) out.push_back(k);
    int axis = dim - 1;
    while (axis >= 0 && k[static_cast<std::size_t>(axis)] == radius) {
      k[static_cast<std::size_t>(axis)] = -radius;
      --axis;
    }
    if (axis < 0) break;
    ++k[static_cast<std::size_t>(axis)];
  }
  return out;
}

double surface_factor(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return kTwoPi;
    default: return 2.0 * kTwoPi;
  }
}

}  // namespace

void TorusGeometry::validate() const {
  if (dim < 1 || dim > 3) throw DomainError("TorusGeometry: dimension must be 1, 2 or 3");
  if (!(circumference > 0.0) || !std::isfinite(circumference)) {
    throw DomainError("TorusGeometry: circumference must be positive");
  }
}

double TorusGeometry::volume() const { return std::pow(circumference, dim); }

void SobolevParams::validate() const {
  if (!(tau1 > 0.0) || !std::isfinite(tau1)) throw DomainError("SobolevParams: tau1 must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("SobolevParams: sigma must be positive");
}

double SobolevParams::factor(double lambda) const {
  return 1.0 / (1.0 + tau1 * std::pow(lambda, sigma));
}

const char* parity_name(Parity p) {
  switch (p) {
    case Parity::constant: return "const";
    case Parity::cos: return "cos";
    case Parity::sin: return "sin";
  }
  return "?";
}

WeightRule WeightRule::massive(double m) {
  if (!(m >= 0.0) || !std::isfinite(m)) throw DomainError("WeightRule: mass must be non-negative");
  WeightRule r;
  r.kind = Kind::massive;
  r.mass = m;
  return r;
}

WeightRule WeightRule::photon(std::optional<double> floor) {
  if (floor && !(*floor > 0.0)) throw DomainError("WeightRule: photon floor must be positive");
  WeightRule r;
  r.kind = Kind::photon;
  r.floor = floor;
  return r;
}

WeightRule WeightRule::custom_list(std::vector<double> s) {
  for (double v : s) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("WeightRule: custom weights must be positive");
  }
  WeightRule r;
  r.kind = Kind::custom;
  r.custom = std::move(s);
  return r;
}

std::string WeightRule::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::massive: os << "massive:" << mass; break;
    case Kind::photon:
      os << "photon";
      if (floor) os << ":" << *floor;
      break;
    case Kind::custom:
      os << "custom:";
      for (std::size_t i = 0; i < custom.size(); ++i) os << (i ? "," : "") << custom[i];
      break;
  }
  return os.str();
}

ModeBasis::ModeBasis(TorusGeometry geometry, SobolevParams params, WeightRule rule,
                     BasisOptions options, std::vector<Mode> modes)
    : geometry_(geometry), params_(params), rule_(std::move(rule)), options_(options),
      modes_(std::move(modes)) {}

const Mode& ModeBasis::mode(std::size_t i) const {
  if (i >= modes_.size()) throw IndexError("ModeBasis: mode index out of range");
  return modes_[i];
}

std::vector<double> ModeBasis::weights() const {
  std::vector<double> s;
  s.reserve(modes_.size());
  for (const auto& m : modes_) s.push_back(m.s);
  return s;
}

int ModeBasis::max_harmonic() const {
  int out = 0;
  for (const auto& m : modes_) {
    for (int c : m.k) out = std::max(out, std::abs(c));
  }
  return out;
}

double ModeBasis::eval_l2(std::size_t i, std::span<const double> point) const {
  const Mode& m = mode(i);
  if (point.size() != static_cast<std::size_t>(geometry_.dim)) {
    throw DomainError("eval_mode: point dimension mismatch");
  }
  if (m.parity == Parity::constant) return m.l2_supnorm;
  const double L = geometry_.circumference;
  double phase = 0.0;
  for (std::size_t a = 0; a < point.size(); ++a) {
    phase += static_cast<double>(m.k[a]) * wrap_coordinate(point[a], L);
  }
  // Reduce the integer-weighted phase before scaling so the result is periodic to rounding.
  phase = kTwoPi * std::fmod(phase / L, 1.0);
  return m.l2_supnorm * (m.parity == Parity::cos ? std::cos(phase) : std::sin(phase));
}

double ModeBasis::eval(std::size_t i, std::span<const double> point) const {
  const Mode& m = mode(i);
  return eval_l2(i, point) * params_.factor(m.lambda);
}

ModeBasis ModeBasis::prefix(std::size_t n) const {
  if (n > modes_.size()) throw IndexError("ModeBasis::prefix: n exceeds basis size");
  return ModeBasis(geometry_, params_, rule_, options_,
                   std::vector<Mode>(modes_.begin(), modes_.begin() + static_cast<std::ptrdiff_t>(n)));
}

ModeBasis build_basis(const TorusGeometry& geometry, const SobolevParams& params, std::size_t n,
                      const WeightRule& rule, const BasisOptions& options) {
  geometry.validate();
  params.validate();
  if (n < 1) throw DomainError("build_basis: need at least one mode");
  if (n > kMaxBasisModes) throw CapacityError("build_basis: mode count exceeds capacity cap");
  if (rule.kind == WeightRule::Kind::photon && options.include_zero_mode && !rule.floor) {
    throw DomainError(
        "build_basis: photon weights are singular on the constant mode; set a floor or exclude it");
  }
  if (rule.kind == WeightRule::Kind::custom && rule.custom.size() < n) {
    throw DomainError("build_basis: custom weight list shorter than mode count");
  }

  const int d = geometry.dim;
  const double L = geometry.circumference;
  const double unit = kTwoPi / L;

  // Grow the enumeration radius until the ball holds at least n modes.
  int radius = std::max(1, static_cast<int>(std::ceil(std::pow(static_cast<double>(n), 1.0 / d))));
  std::vector<std::vector<int>> ks;
  while (true) {
    ks = enumerate_wavevectors(d, radius);
    std::size_t count = 0;
    for (const auto& k : ks) count += norm2(k) == 0 ? (options.include_zero_mode ? 1 : 0) : 2;
    if (count >= n) break;
    radius *= 2;
  }

  struct Key {
    int n2;
    std::vector<int> k;
    Parity parity;
  };
  std::vector<Key> keys;
  keys.reserve(2 * ks.size());
  for (auto& k : ks) {
    const int n2 = norm2(k);
    if (n2 == 0) {
      if (options.include_zero_mode) keys.push_back({0, k, Parity::constant});
    } else {
      keys.push_back({n2, k, Parity::cos});
      keys.push_back({n2, k, Parity::sin});
    }
  }
  std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    if (a.n2 != b.n2) return a.n2 < b.n2;
    if (a.k != b.k) return a.k < b.k;
    return static_cast<int>(a.parity) < static_cast<int>(b.parity);
  });
  keys.resize(n);

  const double vol = geometry.volume();
  std::vector<Mode> modes;
  modes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Mode m;
    m.index = i;
    m.k = keys[i].k;
    m.parity = keys[i].parity;
    m.lambda = unit * unit * keys[i].n2;
    m.momentum = unit * std::sqrt(static_cast<double>(keys[i].n2));
    m.l2_supnorm = m.parity == Parity::constant ? 1.0 / std::sqrt(vol) : std::sqrt(2.0 / vol);
    m.supnorm = m.l2_supnorm * params.factor(m.lambda);
    switch (rule.kind) {
      case WeightRule::Kind::massive: m.s = std::hypot(m.momentum, rule.mass); break;
      case WeightRule::Kind::photon: m.s = std::max(m.momentum, rule.floor.value_or(0.0)); break;
      case WeightRule::Kind::custom: m.s = rule.custom[i]; break;
    }
    if (!(m.s > 0.0)) {
      throw DomainError("build_basis: weight rule produced a non-positive weight (massless constant mode?)");
    }
    modes.push_back(std::move(m));
  }
  return ModeBasis(geometry, params, rule, options, std::move(modes));
}

double eval_mode(const ModeBasis& basis, std::size_t i, std::span<const double> point) {
  return basis.eval(i, point);
}

double sobolev_inner(const ModeBasis& basis, const FieldConfig& a, const FieldConfig& b) {
  if (a.coeffs.size() != basis.size() || b.coeffs.size() != basis.size()) {
    throw DomainError("sobolev_inner: coefficient length does not match the basis");
  }
  double out = 0.0;
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) out += a.coeffs[i] * b.coeffs[i];
  return out;
}

ConvergenceReport convergence_report(const ModeBasis& basis) {
  ConvergenceReport rep;
  const auto& modes = basis.modes();
  for (const auto& m : modes) {
    const double x2 = m.supnorm * m.supnorm;
    rep.increments_sinv.push_back(x2 / m.s);
    rep.increments_sup.push_back(x2);
    rep.sum_sinv_xi2 += x2 / m.s;
    rep.sum_xi2 += x2;
  }

  const int d = basis.geometry().dim;
  const double L = basis.geometry().circumference;
  const double unit = kTwoPi / L;
  const auto& rule = basis.weight_rule();
  const auto& params = basis.params();

  // s ~ |k|^alpha at large |k|.
  double alpha = 1.0;
  double s_ref = 1.0;
  double k_ref = 1.0;
  if (rule.kind == WeightRule::Kind::custom) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = modes.size() / 2; i < modes.size(); ++i) {
      if (modes[i].momentum > 0.0) pts.emplace_back(std::log(modes[i].momentum), std::log(modes[i].s));
    }
    alpha = 0.0;
    if (pts.size() >= 2 && pts.front().first != pts.back().first) {
      double mx = 0, my = 0;
      for (auto& [x, y] : pts) { mx += x; my += y; }
      mx /= static_cast<double>(pts.size());
      my /= static_cast<double>(pts.size());
      double sxy = 0, sxx = 0;
      for (auto& [x, y] : pts) { sxy += (x - mx) * (y - my); sxx += (x - mx) * (x - mx); }
      alpha = sxx > 0 ? sxy / sxx : 0.0;
    }
    s_ref = modes.back().s;
    k_ref = std::max(1.0, modes.back().momentum / unit);
  }
  rep.weight_exponent = alpha;
  rep.decay_exponent = 4.0 * params.sigma;

  const double gamma16 = alpha + rep.decay_exponent;
  const double gamma27 = rep.decay_exponent;
  rep.condition_sinv_converges = gamma16 > d;
  rep.condition_sup_converges = gamma27 > d;

  // Tail: shell-count density S_d K^(d-1) times the modelled per-mode term,
  // summed over integer shells beyond the truncation, then a power-law remainder.
  const double vol = basis.geometry().volume();
  auto weight_at = [&](double K) {
    const double p = unit * K;
    switch (rule.kind) {
      case WeightRule::Kind::massive: return std::hypot(p, rule.mass);
      case WeightRule::Kind::photon: return std::max(p, rule.floor.value_or(0.0));
      case WeightRule::Kind::custom: return s_ref * std::pow(K / k_ref, alpha);
    }
    return 1.0;
  };
  auto sup2_at = [&](double K) {
    const double f = params.factor(unit * unit * K * K);
    return (2.0 / vol) * f * f;
  };
  const double k_last = modes.back().momentum / unit;
  const double S = surface_factor(d);
  constexpr int kShells = 4096;
  auto tail = [&](bool with_weight, double gamma) {
    if (!(gamma > d)) return std::numeric_limits<double>::infinity();
    double sum = 0.0;
    double K = std::floor(k_last) + 1.0;
    double term = 0.0;
    for (int j = 0; j < kShells; ++j, K += 1.0) {
      term = S * std::pow(K, d - 1) * sup2_at(K) / (with_weight ? weight_at(K) : 1.0);
      sum += term;
    }
    // Remainder beyond the last shell: integral of term * (K'/K)^(d-1-gamma).
    sum += term * K / (gamma - d);
    return sum;
  };
  rep.tail_sinv_xi2 = tail(true, gamma16);
  rep.tail_xi2 = tail(false, gamma27);
  return rep;
}

void write_basis_csv(std::ostream& os, const ModeBasis& basis) {
  os << "index,k,parity,lambda,s,supnorm\n";
  char buf[256];
  for (const auto& m : basis.modes()) {
    std::string k;
    for (std::size_t a = 0; a < m.k.size(); ++a) k += (a ? ":" : "") + std::to_string(m.k[a]);
    std::snprintf(buf, sizeof buf, "%zu,%s,%s,%.17g,%.17g,%.17g\n", m.index, k.c_str(),
                  parity_name(m.parity), m.lambda, m.s, m.supnorm);
    os << buf;
  }
}

double wrap_coordinate(double x, double L) {
  double r = std::fmod(x, L);
  if (r < 0) r += L;
  if (r >= L) r = 0.0;
  return r;
}

}  // namespace bdlab
