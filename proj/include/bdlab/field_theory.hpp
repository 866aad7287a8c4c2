#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bdlab/bott_dirac.hpp"
#include "bdlab/connection.hpp"
#include "bdlab/spectral_basis.hpp"
#include "bdlab/test_functions.hpp"

namespace bdlab {

enum class FieldLabel { phi, pi, A_component, E_component, psi_tilde };

/// Composite field operator at a torus point. `mode_coeffs[j]` is the weight
/// of mode j: phi = sum_j c_j sqrt(2) x_j and pi = -i sqrt(2) tau2 sum_j c_j d_j.
struct FieldOperator {
  FieldLabel label = FieldLabel::phi;
  int generator = -1;
  int axis = -1;
  std::vector<double> point;
  OperatorMatrix matrix;
  std::vector<double> mode_coeffs;

  std::string name() const;
};

struct ScalarFields {
  FieldOperator phi;
  FieldOperator pi;  ///< hermitian; the canonical momentum is i * pi
};

/// phi'(m) = sum_i (2 s_i)^-1/2 (q_i + q_i^dagger) xi_i(m) and its conjugate momentum.
ScalarFields scalar_field(const ModeBasis& basis, const FockSpec& fock, std::span<const double> point);

struct KernelValue {
  std::complex<double> matrix;  ///< <gs| [phi'(m), i pi(m')] |gs> on the truncated space
  double mode_sum = 0.0;        ///< -2 tau2 sum_i xi_i(m) xi_i(m')
};

KernelValue commutator_kernel(const ModeBasis& basis, const FockSpec& fock, std::span<const double> m,
                              std::span<const double> mprime);
double kernel_mode_sum(const ModeBasis& basis, double tau2, std::span<const double> m, std::span<const double> mprime);

/// Gauge-field mode slot: basis mode, polarization vector index, Lie generator.
struct GaugeSlot {
  std::size_t mode = 0;
  int polarization = 0;
  int generator = 0;
};

struct GaugeLayout {
  int dim = 1;
  int generators = 1;
  std::vector<GaugeSlot> slots;
  std::vector<std::vector<std::vector<double>>> polarizations;  ///< per mode, per polarization

  /// Weight s of every slot, in slot order.
  std::vector<double> weights(const ModeBasis& basis) const;
};

/// With transversal_only, each nonzero wavevector gets d - 1 polarizations orthogonal
/// to k (Gram-Schmidt of the axes in cyclic order after the dominant component of k)
/// and the zero mode is dropped; otherwise the d coordinate axes.
GaugeLayout gauge_layout(const ModeBasis& basis, const LieStructure& lie, bool transversal_only);

struct GaugeFields {
  std::vector<FieldOperator> A;  ///< index a * d + mu
  std::vector<FieldOperator> E;
};

/// A^a_mu(m) = sum over slots of generator a of eps_mu sqrt(2) xi_i(m) x_slot; E likewise with -i sqrt(2) tau2 d_slot.
GaugeFields gauge_field(const ModeBasis& basis, const FockSpec& fock, const LieStructure& lie,
                        std::span<const double> point, bool transversal_only);

struct FieldSector {
  enum class Kind { scalar_massive, gauge_photon };
  Kind kind = Kind::scalar_massive;
  double mass = 1.0;

  static FieldSector scalar_massive(double m) { return {Kind::scalar_massive, m}; }
  static FieldSector gauge_photon() { return {Kind::gauge_photon, 0.0}; }
};

/// sum_i s_i q_i^dagger q_i, spectrum {2 tau2 sum_i s_i n_i}.
OperatorMatrix free_hamiltonian(const ModeBasis& basis, const FockSpec& fock, FieldSector sector);

/// psi~ = [B, source] for a phi or A_component source.
FieldOperator fermion_field(const FockSpec& fock, const FieldOperator& source);

/// Closed form of [B, sum_j c_j sqrt(2) x_j] = sqrt(2) tau2 sum_j c_j (a_j^dagger - a_j).
OperatorMatrix fermion_field_closed_form(const FockSpec& fock, std::span<const double> coeffs);

/// B^2 restricted to the fermions, halved: tau2 sum_i s_i a_i^dagger a_i on the 2^n fermion space.
OperatorMatrix fermionic_hamiltonian(const FockSpec& fock);

/// (1/sqrt 2) [[1, 1/s], [s, -1]]; squares to the identity.
Eigen::Matrix2d j_matrix(double s);

/// Classical magnetic energy 1/2 int sum_mu,a (B^a_mu)^2 on a uniform grid with
/// `grid` points per axis; derivatives by the spectral (DFT) derivative matrix.
/// F_{mu nu} = d_mu A_nu - d_nu A_mu - [A_mu, A_nu]; d=2: B = F_01; d=3: B_mu = 1/2 eps F.
double yang_mills_energy(const Connection& conn, int grid);

/// Compression of the multiplication operator f(sum_i xi_i(m) x_i) onto the
/// bosonic levels, Nb^n x Nb^n. Separable families use exact displacement matrix
/// elements, the bump its Laplace representation, polynomials an enlarged cutoff.
DenseMat multiplication_operator(const ModeBasis& basis, const FockSpec& fock, const TestFunction& f,
                                 std::span<const double> point, int laguerre_order = 120);

struct CommutatorProbe {
  double norm = 0.0;            ///< ||[B, M_f]|| on interior states
  double pointwise_bound = 0.0;  ///< tau2 ||f'||_inf |xi(m)|
  double bound = 0.0;           ///< tau2 ||f'||_inf (sum_i ||xi_i||_inf^2)^1/2
};

/// Norm of [B, M_f] compressed to interior states (every bosonic level <= Nb - 2),
/// where the truncated commutator agrees with the untruncated one.
CommutatorProbe commutator_probe(const ModeBasis& basis, const FockSpec& fock, const TestFunction& f,
                                 std::span<const double> point);

}  // namespace bdlab
