#include "bdlab/bott_dirac.hpp"

#include <algorithm>
#include <cmath>

#include "bdlab/clifford_fock.hpp"
#include "bdlab/errors.hpp"

namespace bdlab {

namespace {

using Trip = Eigen::Triplet<cplx>;

SparseMat from_triplets(std::size_t dim, const std::vector<Trip>& trips) {
  SparseMat m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

// Nb x Nb lowering operator with <k-1|op|k> = amp(k); raising part <k|op|k-1> = up(k).
template <class Down, class Up>
SparseMat single_mode(int Nb, Down down, Up up) {
  std::vector<Trip> trips;
  for (int k = 1; k < Nb; ++k) {
    const double dv = down(k);
    const double uv = up(k);
    if (dv != 0.0) trips.emplace_back(k - 1, k, dv);
    if (uv != 0.0) trips.emplace_back(k, k - 1, uv);
  }
  return from_triplets(static_cast<std::size_t>(Nb), trips);
}

std::size_t ipow(std::size_t base, int e) {
  std::size_t out = 1;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

void check_mode(const FockSpec& spec, int i) {
  if (i < 0 || i >= spec.n) throw IndexError("mode index out of range");
}

}  // namespace

void FockSpec::validate() const {
  if (n < 0) throw DomainError("FockSpec: negative mode count");
  if (Nb < 2) throw DomainError("FockSpec: bosonic cutoff Nb must be at least 2");
  if (!(tau2 > 0.0) || !std::isfinite(tau2)) throw DomainError("FockSpec: tau2 must be positive");
  if (s.size() != static_cast<std::size_t>(n)) throw DomainError("FockSpec: weight list length must equal n");
  for (double v : s) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("FockSpec: weights must be positive");
  }
}

void FockSpec::check_capacity() const {
  validate();
  if (n > kMaxFermionModes) throw CapacityError("FockSpec: too many modes");
  double total = std::pow(static_cast<double>(Nb), n) * std::ldexp(1.0, n);
  if (total > static_cast<double>(kMaxFockDim)) {
    throw CapacityError("FockSpec: total dimension Nb^n * 2^n exceeds the capacity cap");
  }
}

std::size_t FockSpec::boson_dim() const { return ipow(static_cast<std::size_t>(Nb), n); }

std::size_t encode_state(const FockSpec& spec, const StateIndex& state) {
  if (state.levels.size() != static_cast<std::size_t>(spec.n)) {
    throw DomainError("encode_state: level count does not match n");
  }
  if (state.fermions >= spec.fermion_dim()) throw IndexError("encode_state: fermion bits out of range");
  std::size_t bos = 0;
  std::size_t stride = 1;
  for (int lv : state.levels) {
    if (lv < 0 || lv >= spec.Nb) throw IndexError("encode_state: bosonic level out of range");
    bos += static_cast<std::size_t>(lv) * stride;
    stride *= static_cast<std::size_t>(spec.Nb);
  }
  return bos * spec.fermion_dim() + state.fermions;
}

StateIndex decode_state(const FockSpec& spec, std::size_t flat) {
  if (flat >= spec.dim()) throw IndexError("decode_state: flat index out of range");
  StateIndex out;
  out.fermions = flat % spec.fermion_dim();
  std::size_t bos = flat / spec.fermion_dim();
  for (int i = 0; i < spec.n; ++i) {
    out.levels.push_back(static_cast<int>(bos % static_cast<std::size_t>(spec.Nb)));
    bos /= static_cast<std::size_t>(spec.Nb);
  }
  return out;
}

std::vector<std::size_t> interior_states(const FockSpec& spec, int margin) {
  spec.check_capacity();
  const int top = spec.Nb - 1 - margin;
  std::vector<std::size_t> out;
  if (top < 0) return out;
  const std::size_t fdim = spec.fermion_dim();
  for (std::size_t bos = 0; bos < spec.boson_dim(); ++bos) {
    std::size_t rest = bos;
    bool keep = true;
    for (int i = 0; i < spec.n && keep; ++i) {
      keep = static_cast<int>(rest % static_cast<std::size_t>(spec.Nb)) <= top;
      rest /= static_cast<std::size_t>(spec.Nb);
    }
    if (!keep) continue;
    for (std::size_t f = 0; f < fdim; ++f) out.push_back(bos * fdim + f);
  }
  return out;
}

Vec ground_state(const FockSpec& spec) {
  spec.check_capacity();
  Vec v = Vec::Zero(static_cast<Eigen::Index>(spec.dim()));
  v[0] = 1.0;
  return v;
}

SparseMat embed_boson(const FockSpec& spec, int i, const SparseMat& single) {
  check_mode(spec, i);
  const auto Nb = static_cast<std::size_t>(spec.Nb);
  SparseMat left = identity(ipow(Nb, spec.n - 1 - i));
  SparseMat right = identity(ipow(Nb, i));
  SparseMat bos = kron(kron(left, single), right);
  return kron(bos, identity(spec.fermion_dim()));
}

SparseMat embed_fermion(const FockSpec& spec, const SparseMat& op) {
  return kron(identity(spec.boson_dim()), op);
}

ModeLadders mode_ladders(const FockSpec& spec, int i) {
  spec.check_capacity();
  check_mode(spec, i);
  const double t2 = spec.tau2;
  const double s = spec.s[static_cast<std::size_t>(i)];
  auto zero = [](int) { return 0.0; };
  SparseMat q = single_mode(spec.Nb, [&](int k) { return std::sqrt(2.0 * t2 * k); }, zero);
  SparseMat qdag = q.adjoint();
  auto xs = [&](int k) { return std::sqrt(t2 * k / (2.0 * s)); };
  SparseMat x = single_mode(spec.Nb, xs, xs);
  auto ds = [&](int k) { return std::sqrt(s * k / (2.0 * t2)); };
  SparseMat d = single_mode(spec.Nb, ds, [&](int k) { return -ds(k); });
  return {OperatorMatrix(embed_boson(spec, i, q)), OperatorMatrix(embed_boson(spec, i, qdag)),
          OperatorMatrix(embed_boson(spec, i, x), Symmetry::hermitian),
          OperatorMatrix(embed_boson(spec, i, d), Symmetry::anti_hermitian)};
}

FermionOps fermion_ops(const FockSpec& spec, int i) {
  spec.check_capacity();
  check_mode(spec, i);
  FermionSpace space(spec.n);
  auto ops = ext_int(space, i);
  return {OperatorMatrix(embed_fermion(spec, ops.in.matrix())),
          OperatorMatrix(embed_fermion(spec, ops.ext.matrix()))};
}

OperatorMatrix assemble_B(const FockSpec& spec) {
  spec.check_capacity();
  FermionSpace space(spec.n);
  SparseMat B(static_cast<Eigen::Index>(spec.dim()), static_cast<Eigen::Index>(spec.dim()));
  for (int i = 0; i < spec.n; ++i) {
    auto lad = mode_ladders(spec, i);
    auto cl = clifford(space, i);
    SparseMat c = embed_fermion(spec, cl.c.matrix());
    SparseMat cbar = embed_fermion(spec, cl.cbar.matrix());
    SparseMat deriv = cbar * lad.d.matrix();
    SparseMat pos = c * lad.x.matrix();
    B += spec.tau2 * deriv + spec.s[static_cast<std::size_t>(i)] * pos;
  }
  B.prune(cplx(0.0, 0.0));
  return OperatorMatrix(std::move(B), Symmetry::hermitian);
}

OperatorMatrix assemble_B_ladder(const FockSpec& spec) {
  spec.check_capacity();
  SparseMat B(static_cast<Eigen::Index>(spec.dim()), static_cast<Eigen::Index>(spec.dim()));
  for (int i = 0; i < spec.n; ++i) {
    auto lad = mode_ladders(spec, i);
    auto f = fermion_ops(spec, i);
    SparseMat t1 = lad.qdag.matrix() * f.a.matrix();
    SparseMat t2 = lad.q.matrix() * f.adag.matrix();
    B += std::sqrt(spec.s[static_cast<std::size_t>(i)]) * (t1 + t2);
  }
  B.prune(cplx(0.0, 0.0));
  return OperatorMatrix(std::move(B), Symmetry::hermitian);
}

OperatorMatrix square_B(const FockSpec& spec, SquareRoute route) {
  spec.check_capacity();
  if (route == SquareRoute::matrix_square) {
    const OperatorMatrix B = assemble_B(spec);
    SparseMat sq = B.matrix() * B.matrix();
    sq.prune(cplx(0.0, 0.0));
    return OperatorMatrix(std::move(sq), Symmetry::hermitian);
  }
  if (route != SquareRoute::analytic) throw DomainError("square_B: unknown route");
  auto split = split_bosonic_fermionic(spec);
  SparseMat sq = split.bosonic.matrix() + spec.tau2 * split.fermionic.matrix();
  return OperatorMatrix(std::move(sq), Symmetry::hermitian);
}

OperatorMatrix interior_square(const FockSpec& spec) {
  const auto keep = interior_states(spec);
  return OperatorMatrix(compress(square_B(spec, SquareRoute::matrix_square).matrix(), keep),
                        Symmetry::hermitian);
}

OperatorMatrix square_B_position_form(const FockSpec& spec, int tau2_power) {
  spec.check_capacity();
  const double t2 = spec.tau2;
  SparseMat out(static_cast<Eigen::Index>(spec.dim()), static_cast<Eigen::Index>(spec.dim()));
  const SparseMat id = identity(spec.dim());
  for (int i = 0; i < spec.n; ++i) {
    const double s = spec.s[static_cast<std::size_t>(i)];
    auto lad = mode_ladders(spec, i);
    auto f = fermion_ops(spec, i);
    SparseMat d2 = lad.d.matrix() * lad.d.matrix();
    SparseMat x2 = lad.x.matrix() * lad.x.matrix();
    SparseMat num = f.adag.matrix() * f.a.matrix();
    out += -std::pow(t2, tau2_power) * d2 + s * s * x2 + 2.0 * t2 * s * num - t2 * s * id;
  }
  out.prune(cplx(0.0, 0.0));
  return OperatorMatrix(std::move(out), Symmetry::hermitian);
}

double intertwiner_violation(const FockSpec& spec, std::span<const double> s_rhs) {
  spec.check_capacity();
  if (s_rhs.size() != static_cast<std::size_t>(spec.n)) {
    throw DomainError("intertwiner_violation: weight list length must equal n");
  }
  const SparseMat B = assemble_B(spec).matrix();
  const auto cols = interior_states(spec);
  double worst = 0.0;
  for (int i = 0; i < spec.n; ++i) {
    const double rs = std::sqrt(s_rhs[static_cast<std::size_t>(i)]);
    auto lad = mode_ladders(spec, i);
    auto f = fermion_ops(spec, i);
    SparseMat r1 = rs * lad.q.matrix();
    SparseMat r2 = rs * lad.qdag.matrix();
    SparseMat r3 = -2.0 * spec.tau2 * rs * f.a.matrix();
    SparseMat r4 = 2.0 * spec.tau2 * rs * f.adag.matrix();
    worst = std::max({worst, column_difference(anticommutator(B, f.a.matrix()), r1, cols),
                      column_difference(anticommutator(B, f.adag.matrix()), r2, cols),
                      column_difference(commutator(B, lad.q.matrix()), r3, cols),
                      column_difference(commutator(B, lad.qdag.matrix()), r4, cols)});
  }
  return worst;
}

double intertwiners_check(const FockSpec& spec) { return intertwiner_violation(spec, spec.s); }

BosonFermionSplit split_bosonic_fermionic(const FockSpec& spec) {
  spec.check_capacity();
  SparseMat bos(static_cast<Eigen::Index>(spec.dim()), static_cast<Eigen::Index>(spec.dim()));
  for (int i = 0; i < spec.n; ++i) {
    auto lad = mode_ladders(spec, i);
    SparseMat qq = lad.qdag.matrix() * lad.q.matrix();
    bos += spec.s[static_cast<std::size_t>(i)] * qq;
  }
  bos.prune(cplx(0.0, 0.0));
  FermionSpace space(spec.n);
  std::vector<double> w(spec.s.begin(), spec.s.end());
  for (double& v : w) v *= 2.0;
  SparseMat ferm = embed_fermion(spec, number_operator(space, w).matrix());
  return {OperatorMatrix(std::move(bos), Symmetry::hermitian),
          OperatorMatrix(std::move(ferm), Symmetry::hermitian)};
}

OperatorMatrix grading(const FockSpec& spec) {
  spec.check_capacity();
  FermionSpace space(spec.n);
  return OperatorMatrix(embed_fermion(spec, fermion_parity(space).matrix()), Symmetry::hermitian);
}

OperatorMatrix dirac_total(const OperatorMatrix& B, const OperatorMatrix& gamma,
                           std::span<const int> spatial_modes) {
  if (B.dim() != gamma.dim()) throw DomainError("dirac_total: grading dimension mismatch");
  if (spatial_modes.empty()) throw DomainError("dirac_total: need at least one spatial mode");
  const double anti = max_abs(anticommutator(B.matrix(), gamma.matrix()));
  if (anti > 1e-13 * std::max(1.0, max_abs(B.matrix()))) {
    throw ConvergenceError("dirac_total: grading does not anticommute with B");
  }
  std::vector<Trip> trips;
  for (std::size_t j = 0; j < spatial_modes.size(); ++j) {
    if (spatial_modes[j] != 0) {
      trips.emplace_back(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j),
                         static_cast<double>(spatial_modes[j]));
    }
  }
  SparseMat D = from_triplets(spatial_modes.size(), trips);
  SparseMat out = kron(B.matrix(), identity(spatial_modes.size())) + kron(gamma.matrix(), D);
  return OperatorMatrix(std::move(out), Symmetry::hermitian);
}

OperatorMatrix dirac_total(const FockSpec& spec, std::span<const int> spatial_modes) {
  return dirac_total(assemble_B(spec), grading(spec), spatial_modes);
}

}  // namespace bdlab
