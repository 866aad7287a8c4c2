#include "bdlab/fluctuations.hpp"

#include <cmath>

#include "bdlab/eigensolver.hpp"
#include "bdlab/errors.hpp"

namespace bdlab {

namespace {

void check_dims(const FluctuationSpec& spec, const OperatorMatrix& D) {
  spec.validate();
  if (spec.theta.dim() != D.dim()) throw DomainError("fluctuation: theta and the Dirac operator act on different spaces");
}

SparseMat raw_one_form(const FluctuationSpec& spec, const OperatorMatrix& D) {
  const SparseMat& t = spec.theta.matrix();
  SparseMat a = cplx(spec.coupling) * SparseMat(t * commutator(D.matrix(), t));
  if (spec.symmetrize) a = 0.5 * (a + SparseMat(a.adjoint()));
  a.prune(cplx(0.0));
  return a;
}

}  // namespace

void FluctuationSpec::validate() const {
  if (!std::isfinite(coupling)) throw DomainError("fluctuation: coupling must be finite");
  if (theta.hermiticity_defect() > 1e-12 * std::max(1.0, max_abs(theta.matrix()))) {
    throw DomainError("fluctuation: theta must be hermitian");
  }
}

OperatorMatrix theta_position(const FockSpec& fock, int i) { return mode_ladders(fock, i).x; }

OperatorMatrix theta_function(const FockSpec& fock, int i, const TestFunction& f) {
  fock.check_capacity();
  if (i < 0 || i >= fock.n) throw IndexError("theta_function: mode out of range");
  const double s = fock.s[static_cast<std::size_t>(i)];
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(fock.Nb, fock.Nb);
  for (int k = 1; k < fock.Nb; ++k) x(k - 1, k) = x(k, k - 1) = std::sqrt(fock.tau2 * k / (2 * s));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
  Eigen::VectorXd fv(fock.Nb);
  for (int k = 0; k < fock.Nb; ++k) fv[k] = f(es.eigenvalues()[k]).real();
  const Eigen::MatrixXd single = es.eigenvectors() * fv.asDiagonal() * es.eigenvectors().transpose();
  const Eigen::MatrixXd sym = 0.5 * (single + single.transpose());
  const SparseMat sp = DenseMat(sym.cast<cplx>()).sparseView();
  return OperatorMatrix(embed_boson(fock, i, sp), Symmetry::hermitian);
}

OperatorMatrix theta_dilation(const FockSpec& fock, int i) {
  const auto l = mode_ladders(fock, i);
  const SparseMat xd = l.x.matrix() * l.d.matrix();
  const SparseMat dx = l.d.matrix() * l.x.matrix();
  SparseMat t = cplx(0.0, -0.5) * SparseMat(xd + dx);
  t = 0.5 * (t + SparseMat(t.adjoint()));
  return OperatorMatrix(t, Symmetry::hermitian);
}

OperatorMatrix theta_field(const ModeBasis& basis, const FockSpec& fock, std::span<const double> point) {
  return scalar_field(basis, fock, point).phi.matrix;
}

OperatorMatrix lift_theta(const OperatorMatrix& theta, std::size_t extra_dim) {
  return OperatorMatrix(kron(theta.matrix(), identity(extra_dim)), theta.symmetry());
}

OperatorMatrix one_form(const FluctuationSpec& spec, const OperatorMatrix& D) {
  check_dims(spec, D);
  return OperatorMatrix(raw_one_form(spec, D), spec.symmetrize ? Symmetry::hermitian : Symmetry::none);
}

OperatorMatrix one_form(const FluctuationSpec& spec, const FockSpec& fock) { return one_form(spec, assemble_B(fock)); }

OperatorMatrix fluctuated_B(const FluctuationSpec& spec, const OperatorMatrix& D) {
  check_dims(spec, D);
  const bool herm = spec.symmetrize && D.symmetry() == Symmetry::hermitian;
  return OperatorMatrix(D.matrix() + raw_one_form(spec, D), herm ? Symmetry::hermitian : Symmetry::none);
}

OperatorMatrix fluctuated_B(const FluctuationSpec& spec, const FockSpec& fock) {
  return fluctuated_B(spec, assemble_B(fock));
}

OperatorMatrix interaction_hamiltonian(const FluctuationSpec& spec, const OperatorMatrix& D) {
  check_dims(spec, D);
  const SparseMat a = raw_one_form(spec, D);
  const SparseMat h = SparseMat(a * a) + anticommutator(D.matrix(), a);
  const bool herm = spec.symmetrize && D.symmetry() == Symmetry::hermitian;
  return OperatorMatrix(h, herm ? Symmetry::hermitian : Symmetry::none);
}

OperatorMatrix interaction_hamiltonian(const FluctuationSpec& spec, const FockSpec& fock) {
  return interaction_hamiltonian(spec, assemble_B(fock));
}

FluctSpectrum fluct_spectrum(const FluctuationSpec& spec, const FockSpec& fock, std::size_t count, int margin) {
  if (!spec.symmetrize) throw DomainError("fluct_spectrum: spectral statements need the symmetrized one-form");
  const OperatorMatrix Bt = fluctuated_B(spec, fock);
  if (margin < 1 || margin >= fock.Nb) throw DomainError("fluct_spectrum: margin must be in 1..Nb-1");
  const auto keep = interior_states(fock, margin);
  if (keep.size() < count) throw DomainError("fluct_spectrum: fewer interior states than requested eigenvalues");
  // Columns restricted to interior states, all rows kept.
  const auto dim = static_cast<Eigen::Index>(fock.dim());
  SparseMat P(dim, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) P.insert(static_cast<Eigen::Index>(keep[j]), static_cast<Eigen::Index>(j)) = 1.0;
  const SparseMat BP = Bt.matrix() * P;
  SparseMat G = SparseMat(BP.adjoint()) * BP;
  G = 0.5 * (G + SparseMat(G.adjoint()));
  const auto sp = spectrum(OperatorMatrix(G, Symmetry::hermitian), count);
  FluctSpectrum out;
  out.coupling = spec.coupling;
  out.eigenvalues = sp.eigenvalues;
  out.ground = sp.eigenvalues.front();
  out.hermiticity_defect = Bt.hermiticity_defect();
  const double tol = 1e-9 * std::max(1.0, std::abs(sp.eigenvalues.back()));
  for (double v : sp.eigenvalues) {
    if (v > out.ground + tol) {
      out.gap = v - out.ground;
      break;
    }
  }
  return out;
}

}  // namespace bdlab
