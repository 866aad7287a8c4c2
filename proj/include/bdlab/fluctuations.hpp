#pragma once

#include <span>
#include <vector>

#include "bdlab/bott_dirac.hpp"
#include "bdlab/field_theory.hpp"
#include "bdlab/test_functions.hpp"

namespace bdlab {

/// Theta acts on the same space as the operator it fluctuates.
struct FluctuationSpec {
  OperatorMatrix theta;  ///< hermitian
  bool symmetrize = true;
  double coupling = 1.0;

  void validate() const;
};

/// Position operator x_i on the full Fock space.
OperatorMatrix theta_position(const FockSpec& fock, int i);
/// f(x_i) by functional calculus on the Nb x Nb truncated x_i (bounded, real part of f).
OperatorMatrix theta_function(const FockSpec& fock, int i, const TestFunction& f);
/// Dilation generator -i (x_i d_i + d_i x_i) / 2. Unlike functions of x, it does not
/// commute with [B, Theta], so its one-form has a nonzero hermitian part.
OperatorMatrix theta_dilation(const FockSpec& fock, int i);
/// The scalar field phi'(m).
OperatorMatrix theta_field(const ModeBasis& basis, const FockSpec& fock, std::span<const double> point);
/// theta (x) 1_extra, for fluctuating an operator on an enlarged space such as D_tot.
OperatorMatrix lift_theta(const OperatorMatrix& theta, std::size_t extra_dim);

/// lambda Theta [D, Theta]; with symmetrize, its hermitian part.
OperatorMatrix one_form(const FluctuationSpec& spec, const OperatorMatrix& D);
OperatorMatrix one_form(const FluctuationSpec& spec, const FockSpec& fock);

/// D + one_form.
OperatorMatrix fluctuated_B(const FluctuationSpec& spec, const OperatorMatrix& D);
OperatorMatrix fluctuated_B(const FluctuationSpec& spec, const FockSpec& fock);

/// A^2 + {D, A} with A = one_form, so that (D + A)^2 = D^2 + H_fluc.
OperatorMatrix interaction_hamiltonian(const FluctuationSpec& spec, const OperatorMatrix& D);
OperatorMatrix interaction_hamiltonian(const FluctuationSpec& spec, const FockSpec& fock);

struct FluctSpectrum {
  double coupling = 0.0;
  std::vector<double> eigenvalues;
  double ground = 0.0;
  double gap = 0.0;  ///< lowest eigenvalue above ground + 1e-9 * scale; 0 when none
  double hermiticity_defect = 0.0;
};

/// Lowest eigenvalues of (B~ P)^dagger (B~ P), P the projection onto states with
/// every bosonic level <= Nb - 1 - margin; at zero coupling this is the untruncated
/// B^2 on those states. Margin 2 keeps B~ P exact for Theta linear in x.
FluctSpectrum fluct_spectrum(const FluctuationSpec& spec, const FockSpec& fock, std::size_t count, int margin = 2);

}  // namespace bdlab
