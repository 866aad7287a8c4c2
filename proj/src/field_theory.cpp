#include "bdlab/field_theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bdlab/clifford_fock.hpp"
#include "bdlab/eigensolver.hpp"
#include "bdlab/errors.hpp"
#include "bdlab/quadrature.hpp"

namespace bdlab {

namespace {

const cplx kI(0.0, 1.0);

void check_shared(const ModeBasis& basis, const FockSpec& fock) {
  fock.check_capacity();
  if (static_cast<std::size_t>(fock.n) != basis.size()) throw DomainError("field operator: basis and Fock space differ in n");
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double s = basis.mode(i).s;
    if (std::abs(fock.s[i] - s) > 1e-12 * std::max(1.0, s)) throw DomainError("field operator: basis and Fock space differ in s");
  }
}

std::vector<double> mode_values(const ModeBasis& basis, std::span<const double> point) {
  if (point.size() != static_cast<std::size_t>(basis.geometry().dim)) throw DomainError("field operator: point dimension mismatch");
  std::vector<double> out(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) out[i] = basis.eval(i, point);
  return out;
}

struct Ladder {
  SparseMat x;
  SparseMat d;
};

std::vector<Ladder> ladders(const FockSpec& fock) {
  std::vector<Ladder> out;
  for (int i = 0; i < fock.n; ++i) {
    auto l = mode_ladders(fock, i);
    out.push_back({l.x.matrix(), l.d.matrix()});
  }
  return out;
}

SparseMat phi_combination(const std::vector<Ladder>& lad, std::span<const double> c, std::size_t dim) {
  SparseMat out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] != 0.0) out += cplx(std::sqrt(2.0) * c[j]) * lad[j].x;
  }
  return out;
}

SparseMat pi_combination(const std::vector<Ladder>& lad, std::span<const double> c, double tau2, std::size_t dim) {
  SparseMat out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] != 0.0) out += (-kI * std::sqrt(2.0) * tau2 * c[j]) * lad[j].d;
  }
  return out;
}

/// Single-mode Nb x Nb matrices in the oscillator basis of weight s.
SparseMat single_x(int Nb, double tau2, double s) {
  SparseMat m(Nb, Nb);
  for (int k = 1; k < Nb; ++k) {
    const double v = std::sqrt(tau2 * k / (2 * s));
    m.insert(k - 1, k) = v;
    m.insert(k, k - 1) = v;
  }
  return m;
}

SparseMat single_d(int Nb, double tau2, double s) {
  SparseMat m(Nb, Nb);
  for (int k = 1; k < Nb; ++k) {
    const double v = std::sqrt(s * k / (2 * tau2));
    m.insert(k - 1, k) = v;
    m.insert(k, k - 1) = -v;
  }
  return m;
}

SparseMat boson_embed(const FockSpec& fock, int i, const SparseMat& single) {
  std::size_t lo = 1, hi = 1;
  for (int j = 0; j < i; ++j) lo *= static_cast<std::size_t>(fock.Nb);
  for (int j = i + 1; j < fock.n; ++j) hi *= static_cast<std::size_t>(fock.Nb);
  return kron(kron(identity(hi), single), identity(lo));
}

/// Generalized Laguerre polynomial L_n^(a)(x).
double laguerre(int n, int a, double x) {
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + a - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1 + a - x) * cur - (k + a) * prev) / (k + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Compression of exp(i beta x) to levels 0..Nb-1, x = c (a + a^dagger): the
/// displacement operator with alpha = i beta c.
DenseMat displacement(int Nb, double beta, double c) {
  const cplx alpha = kI * beta * c;
  const double r2 = std::norm(alpha);
  const double g = std::exp(-r2 / 2);
  DenseMat out(Nb, Nb);
  for (int m = 0; m < Nb; ++m) {
    for (int n = 0; n < Nb; ++n) {
      const int lo = std::min(m, n);
      const int gap = std::abs(m - n);
      const double ratio = std::exp(0.5 * (std::lgamma(lo + 1.0) - std::lgamma(lo + gap + 1.0)));
      const cplx base = m >= n ? alpha : -std::conj(alpha);
      out(m, n) = ratio * std::pow(base, gap) * g * laguerre(lo, gap, r2);
    }
  }
  return out;
}

DenseMat kron_dense(const DenseMat& a, const DenseMat& b) {
  DenseMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

/// Compressed exp(i t sum_i a_i x_i); mode 0 is the least significant factor.
DenseMat plane_wave(const FockSpec& fock, std::span<const double> a, double t) {
  DenseMat out = DenseMat::Ones(1, 1);
  for (int i = 0; i < fock.n; ++i) {
    const double c = std::sqrt(fock.tau2 / (2 * fock.s[static_cast<std::size_t>(i)]));
    out = kron_dense(displacement(fock.Nb, t * a[static_cast<std::size_t>(i)], c), out);
  }
  return out;
}

/// Compressions of powers x^p, p = 0..max_p, computed in an enlarged cutoff where they are exact.
std::vector<DenseMat> compressed_powers(int Nb, int max_p, double tau2, double s) {
  const DenseMat big = DenseMat(single_x(Nb + max_p, tau2, s));
  std::vector<DenseMat> out;
  DenseMat pow = DenseMat::Identity(big.rows(), big.cols());
  for (int p = 0; p <= max_p; ++p) {
    out.push_back(pow.topLeftCorner(Nb, Nb));
    pow = pow * big;
  }
  return out;
}

DenseMat polynomial_operator(const FockSpec& fock, std::span<const double> a, const std::vector<double>& coeffs) {
  const int deg = static_cast<int>(coeffs.size()) - 1;
  // acc[k] = compressed (sum_{j<i} a_j x_j)^k on the first i modes.
  std::vector<DenseMat> acc(static_cast<std::size_t>(deg) + 1, DenseMat::Zero(1, 1));
  acc[0](0, 0) = 1.0;
  for (int i = 0; i < fock.n; ++i) {
    const auto xp = compressed_powers(fock.Nb, deg, fock.tau2, fock.s[static_cast<std::size_t>(i)]);
    std::vector<DenseMat> next;
    for (int k = 0; k <= deg; ++k) {
      DenseMat sum = DenseMat::Zero(acc[0].rows() * fock.Nb, acc[0].cols() * fock.Nb);
      double binom = 1.0;
      for (int p = 0; p <= k; ++p) {
        sum += binom * std::pow(a[static_cast<std::size_t>(i)], p) *
               kron_dense(xp[static_cast<std::size_t>(p)], acc[static_cast<std::size_t>(k - p)]);
        binom = binom * (k - p) / (p + 1);
      }
      next.push_back(std::move(sum));
    }
    acc = std::move(next);
  }
  DenseMat out = DenseMat::Zero(acc[0].rows(), acc[0].cols());
  for (int k = 0; k <= deg; ++k) out += coeffs[static_cast<std::size_t>(k)] * acc[static_cast<std::size_t>(k)];
  return out;
}

std::vector<std::size_t> boson_interior(const FockSpec& fock) {
  std::vector<std::size_t> out;
  for (std::size_t idx = 0; idx < fock.boson_dim(); ++idx) {
    std::size_t rest = idx;
    bool ok = true;
    for (int i = 0; i < fock.n; ++i) {
      if (static_cast<int>(rest % static_cast<std::size_t>(fock.Nb)) > fock.Nb - 2) ok = false;
      rest /= static_cast<std::size_t>(fock.Nb);
    }
    if (ok) out.push_back(idx);
  }
  return out;
}

DenseMat select(const DenseMat& m, const std::vector<std::size_t>& keep) {
  DenseMat out(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t r = 0; r < keep.size(); ++r) {
    for (std::size_t c = 0; c < keep.size(); ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          m(static_cast<Eigen::Index>(keep[r]), static_cast<Eigen::Index>(keep[c]));
    }
  }
  return out;
}

}  // namespace

std::string FieldOperator::name() const {
  switch (label) {
    case FieldLabel::phi: return "phi";
    case FieldLabel::pi: return "pi";
    case FieldLabel::A_component: return "A[" + std::to_string(generator) + "," + std::to_string(axis) + "]";
    case FieldLabel::E_component: return "E[" + std::to_string(generator) + "," + std::to_string(axis) + "]";
    case FieldLabel::psi_tilde: return "psi_tilde";
  }
  return "?";
}

ScalarFields scalar_field(const ModeBasis& basis, const FockSpec& fock, std::span<const double> point) {
  check_shared(basis, fock);
  const auto c = mode_values(basis, point);
  const auto lad = ladders(fock);
  const std::vector<double> p(point.begin(), point.end());
  ScalarFields out;
  out.phi = {FieldLabel::phi, -1, -1, p, OperatorMatrix(phi_combination(lad, c, fock.dim()), Symmetry::hermitian), c};
  out.pi = {FieldLabel::pi, -1, -1, p, OperatorMatrix(pi_combination(lad, c, fock.tau2, fock.dim()), Symmetry::hermitian), c};
  return out;
}

double kernel_mode_sum(const ModeBasis& basis, double tau2, std::span<const double> m, std::span<const double> mprime) {
  const auto a = mode_values(basis, m);
  const auto b = mode_values(basis, mprime);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return -2.0 * tau2 * sum;
}

KernelValue commutator_kernel(const ModeBasis& basis, const FockSpec& fock, std::span<const double> m,
                              std::span<const double> mprime) {
  const auto at_m = scalar_field(basis, fock, m);
  const auto at_mp = scalar_field(basis, fock, mprime);
  const SparseMat comm = commutator(at_m.phi.matrix.matrix(), at_mp.pi.matrix.matrix());
  const Vec gs = ground_state(fock);
  KernelValue out;
  out.matrix = kI * gs.dot(comm * gs);
  out.mode_sum = kernel_mode_sum(basis, fock.tau2, m, mprime);
  return out;
}

std::vector<double> GaugeLayout::weights(const ModeBasis& basis) const {
  std::vector<double> out;
  out.reserve(slots.size());
  for (const auto& sl : slots) out.push_back(basis.mode(sl.mode).s);
  return out;
}

GaugeLayout gauge_layout(const ModeBasis& basis, const LieStructure& lie, bool transversal_only) {
  const int d = basis.geometry().dim;
  if (transversal_only && d < 2) throw DomainError("gauge_layout: transversal polarizations need d >= 2");
  GaugeLayout out;
  out.dim = d;
  out.generators = lie.count();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& k = basis.mode(i).k;
    std::vector<std::vector<double>> frame;
    if (!transversal_only) {
      for (int a = 0; a < d; ++a) {
        std::vector<double> e(static_cast<std::size_t>(d), 0.0);
        e[static_cast<std::size_t>(a)] = 1.0;
        frame.push_back(std::move(e));
      }
    } else if (std::any_of(k.begin(), k.end(), [](int c) { return c != 0; })) {
      int lead = 0;
      for (int a = 1; a < d; ++a) {
        if (std::abs(k[static_cast<std::size_t>(a)]) > std::abs(k[static_cast<std::size_t>(lead)])) lead = a;
      }
      std::vector<std::vector<double>> done;
      double kk = 0.0;
      for (int c : k) kk += static_cast<double>(c) * c;
      std::vector<double> khat(k.begin(), k.end());
      for (auto& v : khat) v /= std::sqrt(kk);
      done.push_back(khat);
      for (int off = 1; off < d; ++off) {
        const int axis = (lead + off) % d;
        std::vector<double> e(static_cast<std::size_t>(d), 0.0);
        e[static_cast<std::size_t>(axis)] = 1.0;
        for (const auto& u : done) {
          double dot = 0.0;
          for (int a = 0; a < d; ++a) dot += e[static_cast<std::size_t>(a)] * u[static_cast<std::size_t>(a)];
          for (int a = 0; a < d; ++a) e[static_cast<std::size_t>(a)] -= dot * u[static_cast<std::size_t>(a)];
        }
        double norm = 0.0;
        for (double v : e) norm += v * v;
        for (auto& v : e) v /= std::sqrt(norm);
        done.push_back(e);
        frame.push_back(e);
      }
    }
    for (int r = 0; r < static_cast<int>(frame.size()); ++r) {
      for (int a = 0; a < lie.count(); ++a) out.slots.push_back({i, r, a});
    }
    out.polarizations.push_back(std::move(frame));
  }
  return out;
}

GaugeFields gauge_field(const ModeBasis& basis, const FockSpec& fock, const LieStructure& lie,
                        std::span<const double> point, bool transversal_only) {
  const auto layout = gauge_layout(basis, lie, transversal_only);
  fock.check_capacity();
  if (static_cast<std::size_t>(fock.n) != layout.slots.size()) {
    throw DomainError("gauge_field: Fock space needs one mode per slot (" + std::to_string(layout.slots.size()) + ")");
  }
  const auto w = layout.weights(basis);
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (std::abs(fock.s[j] - w[j]) > 1e-12 * std::max(1.0, w[j])) throw DomainError("gauge_field: slot weights differ from the basis");
  }
  const auto xi = mode_values(basis, point);
  const auto lad = ladders(fock);
  const std::vector<double> p(point.begin(), point.end());
  GaugeFields out;
  const int d = layout.dim;
  for (int a = 0; a < lie.count(); ++a) {
    for (int mu = 0; mu < d; ++mu) {
      std::vector<double> c(layout.slots.size(), 0.0);
      for (std::size_t j = 0; j < layout.slots.size(); ++j) {
        const auto& sl = layout.slots[j];
        if (sl.generator != a) continue;
        c[j] = layout.polarizations[sl.mode][static_cast<std::size_t>(sl.polarization)][static_cast<std::size_t>(mu)] * xi[sl.mode];
      }
      out.A.push_back({FieldLabel::A_component, a, mu, p,
                       OperatorMatrix(phi_combination(lad, c, fock.dim()), Symmetry::hermitian), c});
      out.E.push_back({FieldLabel::E_component, a, mu, p,
                       OperatorMatrix(pi_combination(lad, c, fock.tau2, fock.dim()), Symmetry::hermitian), c});
    }
  }
  return out;
}

OperatorMatrix free_hamiltonian(const ModeBasis& basis, const FockSpec& fock, FieldSector sector) {
  const auto& rule = basis.weight_rule();
  if (sector.kind == FieldSector::Kind::scalar_massive) {
    if (rule.kind != WeightRule::Kind::massive || std::abs(rule.mass - sector.mass) > 1e-12 * std::max(1.0, sector.mass)) {
      throw DomainError("free_hamiltonian: scalar sector needs the massive weight rule with the same mass");
    }
  } else if (rule.kind != WeightRule::Kind::photon) {
    throw DomainError("free_hamiltonian: gauge sector needs the photon weight rule");
  }
  check_shared(basis, fock);
  return split_bosonic_fermionic(fock).bosonic;
}

FieldOperator fermion_field(const FockSpec& fock, const FieldOperator& source) {
  if (source.label != FieldLabel::phi && source.label != FieldLabel::A_component) {
    throw DomainError("fermion_field: source must be phi or an A component, got " + source.name());
  }
  if (source.matrix.dim() != fock.dim()) throw DomainError("fermion_field: source lives on a different space");
  FieldOperator out = source;
  out.label = FieldLabel::psi_tilde;
  out.matrix = OperatorMatrix(commutator(assemble_B(fock).matrix(), source.matrix.matrix()));
  return out;
}

OperatorMatrix fermion_field_closed_form(const FockSpec& fock, std::span<const double> coeffs) {
  fock.check_capacity();
  if (coeffs.size() != static_cast<std::size_t>(fock.n)) throw DomainError("fermion_field_closed_form: one coefficient per mode");
  const auto dim = static_cast<Eigen::Index>(fock.dim());
  SparseMat out(dim, dim);
  for (int j = 0; j < fock.n; ++j) {
    const double c = coeffs[static_cast<std::size_t>(j)];
    if (c == 0.0) continue;
    const auto f = fermion_ops(fock, j);
    out += cplx(std::sqrt(2.0) * fock.tau2 * c) * (f.adag.matrix() - f.a.matrix());
  }
  return OperatorMatrix(out, Symmetry::anti_hermitian);
}

OperatorMatrix fermionic_hamiltonian(const FockSpec& fock) {
  fock.validate();
  if (fock.n > kMaxFermionModes) throw CapacityError("fermionic_hamiltonian: too many modes");
  std::vector<double> w(fock.s.begin(), fock.s.end());
  for (auto& v : w) v *= fock.tau2;
  return number_operator(FermionSpace(fock.n), w);
}

Eigen::Matrix2d j_matrix(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("j_matrix: s must be positive");
  Eigen::Matrix2d j;
  j << 1.0, 1.0 / s, s, -1.0;
  return j / std::sqrt(2.0);
}

double yang_mills_energy(const Connection& conn, int grid) {
  const int d = conn.dim();
  const int K = conn.max_harmonic();
  if (grid < 2 || grid <= 4 * K) {
    throw DomainError("yang_mills_energy: grid of " + std::to_string(grid) + " points is too coarse for harmonic " +
                      std::to_string(K) + " (need more than " + std::to_string(4 * K) + ")");
  }
  if (d == 1) return 0.0;
  const double L = conn.circumference();
  const double h = L / grid;
  // Spectral derivative matrix on the periodic grid.
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(grid, grid);
  for (int j = 0; j < grid; ++j) {
    for (int l = 0; l < grid; ++l) {
      if (j == l) continue;
      const double arg = (j - l) * std::numbers::pi / grid;
      const double sign = ((j - l) % 2 == 0) ? 1.0 : -1.0;
      const double v = grid % 2 == 0 ? 1.0 / std::tan(arg) : 1.0 / std::sin(arg);
      D(j, l) = (2 * std::numbers::pi / L) * 0.5 * sign * v;
    }
  }
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(grid);
  std::vector<std::vector<DenseMat>> A(total);
  std::vector<double> p(static_cast<std::size_t>(d));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (int a = 0; a < d; ++a) {
      p[static_cast<std::size_t>(a)] = static_cast<double>(rest % static_cast<std::size_t>(grid)) * h;
      rest /= static_cast<std::size_t>(grid);
    }
    A[idx] = conn.eval(p);
  }
  std::vector<std::size_t> stride(static_cast<std::size_t>(d), 1);
  for (int a = 1; a < d; ++a) stride[static_cast<std::size_t>(a)] = stride[static_cast<std::size_t>(a) - 1] * static_cast<std::size_t>(grid);
  auto deriv = [&](std::size_t idx, int nu, int mu) {
    const std::size_t st = stride[static_cast<std::size_t>(nu)];
    const auto j = static_cast<int>((idx / st) % static_cast<std::size_t>(grid));
    const std::size_t base = idx - static_cast<std::size_t>(j) * st;
    DenseMat out = DenseMat::Zero(A[0][0].rows(), A[0][0].cols());
    for (int l = 0; l < grid; ++l) {
      if (D(j, l) != 0.0) out += D(j, l) * A[base + static_cast<std::size_t>(l) * st][static_cast<std::size_t>(mu)];
    }
    return out;
  };
  const auto& lie = conn.lie();
  double energy = 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto& a = A[idx];
    for (int mu = 0; mu < d; ++mu) {
      for (int nu = mu + 1; nu < d; ++nu) {
        const auto m = static_cast<std::size_t>(mu);
        const auto n = static_cast<std::size_t>(nu);
        const DenseMat F = deriv(idx, mu, nu) - deriv(idx, nu, mu) - (a[m] * a[n] - a[n] * a[m]);
        for (int g = 0; g < lie.count(); ++g) {
          const double c = lie.component(g, F);
          energy += c * c;
        }
      }
    }
  }
  return 0.5 * std::pow(h, d) * energy;
}

DenseMat multiplication_operator(const ModeBasis& basis, const FockSpec& fock, const TestFunction& f,
                                 std::span<const double> point, int laguerre_order) {
  check_shared(basis, fock);
  const auto a = mode_values(basis, point);
  using K = TestFunction::Kind;
  switch (f.kind()) {
    case K::exp_i: return plane_wave(fock, a, f.parameter());
    case K::cosine: {
      const DenseMat e = plane_wave(fock, a, f.parameter());
      return 0.5 * (e + e.adjoint());
    }
    case K::sine: {
      const DenseMat e = plane_wave(fock, a, f.parameter());
      return (e - e.adjoint()) / (2.0 * kI);
    }
    case K::bump: {
      // 1/(1 + (r/w)^2) = int_0^inf e^{-u} cos(u r / w) du.
      const auto rule = gauss_laguerre(laguerre_order);
      const double w = f.parameter();
      DenseMat out = DenseMat::Zero(static_cast<Eigen::Index>(fock.boson_dim()), static_cast<Eigen::Index>(fock.boson_dim()));
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const DenseMat e = plane_wave(fock, a, rule.nodes[q] / w);
        out += rule.weights[q] * 0.5 * (e + e.adjoint());
      }
      return out;
    }
    case K::polynomial: return polynomial_operator(fock, a, f.coeffs());
  }
  throw DomainError("multiplication_operator: unsupported test function");
}

CommutatorProbe commutator_probe(const ModeBasis& basis, const FockSpec& fock, const TestFunction& f,
                                 std::span<const double> point) {
  if (fock.Nb < 2) throw DomainError("commutator_probe: needs Nb >= 2 for a nonempty interior");
  const DenseMat M = multiplication_operator(basis, fock, f, point);
  const auto keep = boson_interior(fock);
  const FermionSpace space(fock.n);
  const auto r = static_cast<Eigen::Index>(keep.size() * fock.fermion_dim());
  SparseMat K(r, r);
  for (int i = 0; i < fock.n; ++i) {
    const double s = fock.s[static_cast<std::size_t>(i)];
    const SparseMat d = boson_embed(fock, i, single_d(fock.Nb, fock.tau2, s));
    const SparseMat x = boson_embed(fock, i, single_x(fock.Nb, fock.tau2, s));
    const DenseMat cd = select(DenseMat(d * M - M * d), keep);
    const DenseMat cx = select(DenseMat(x * M - M * x), keep);
    const auto cl = clifford(space, i);
    K += kron(SparseMat((fock.tau2 * cd).sparseView()), cl.cbar.matrix());
    K += kron(SparseMat((s * cx).sparseView()), cl.c.matrix());
  }
  // [B, M_f] is anti-hermitian, so its norm is the largest |eigenvalue| of the hermitian iK.
  const SparseMat H = cplx(0.0, 1.0) * K;
  const SparseMat Hh = 0.5 * (H + SparseMat(H.adjoint()));
  EigenOptions opt;
  if (Hh.rows() > 256) opt.method = EigenOptions::Method::lanczos;
  const double low = spectrum(OperatorMatrix(Hh, Symmetry::hermitian), 1, opt).eigenvalues[0];
  const double high = -spectrum(OperatorMatrix(SparseMat(-Hh), Symmetry::hermitian), 1, opt).eigenvalues[0];
  CommutatorProbe out;
  out.norm = std::max(std::abs(low), std::abs(high));
  double at = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) at += std::pow(basis.eval(i, point), 2);
  double sup = 0.0;
  for (const auto& m : basis.modes()) sup += m.supnorm * m.supnorm;
  out.pointwise_bound = fock.tau2 * f.sup(1) * std::sqrt(at);
  out.bound = fock.tau2 * f.sup(1) * std::sqrt(sup);
  return out;
}

}  // namespace bdlab
