#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bdlab/operator_matrix.hpp"

namespace bdlab {

/// Truncation descriptor: n modes, bosonic levels 0..Nb-1 per mode, tensored
/// with the 2^n-dimensional fermion space.
struct FockSpec {
  int n = 1;
  int Nb = 2;
  double tau2 = 1.0;
  std::vector<double> s{1.0};

  void validate() const;
  /// validate() plus the cap on Nb^n * 2^n; needed before building any operator.
  void check_capacity() const;
  std::size_t boson_dim() const;
  std::size_t fermion_dim() const { return std::size_t{1} << n; }
  std::size_t dim() const { return boson_dim() * fermion_dim(); }
};

/// Largest total dimension accepted by operator assembly.
inline constexpr std::size_t kMaxFockDim = std::size_t{1} << 22;

/// Composite occupation state: bosonic levels per mode and fermion bit-set.
struct StateIndex {
  std::vector<int> levels;
  std::size_t fermions = 0;
};

/// flat = (sum_i levels_i Nb^i) * 2^n + fermion bits.
std::size_t encode_state(const FockSpec& spec, const StateIndex& state);
StateIndex decode_state(const FockSpec& spec, std::size_t flat);

/// Flat indices whose bosonic levels are all <= Nb - 1 - margin.
std::vector<std::size_t> interior_states(const FockSpec& spec, int margin = 1);

/// Single basis vector: every mode on level 0, fermion vacuum.
Vec ground_state(const FockSpec& spec);

/// Per-mode bosonic operators on the full space, in the s_i-adapted oscillator basis.
struct ModeLadders {
  OperatorMatrix q;     ///< <k-1|q|k> = sqrt(2 tau2 k)
  OperatorMatrix qdag;
  OperatorMatrix x;     ///< <k-1|x|k> = sqrt(tau2 k / (2 s))
  OperatorMatrix d;     ///< <k-1|d|k> = sqrt(s k / (2 tau2)), anti-hermitian
};

ModeLadders mode_ladders(const FockSpec& spec, int i);

/// Fermionic operators a_i, a_i^dagger embedded in the full space.
struct FermionOps {
  OperatorMatrix a;
  OperatorMatrix adag;
};

FermionOps fermion_ops(const FockSpec& spec, int i);

/// Embed an Nb x Nb single-mode operator acting on mode i (identity on the fermions).
SparseMat embed_boson(const FockSpec& spec, int i, const SparseMat& single);
/// Embed a 2^n x 2^n fermionic operator (identity on the bosons).
SparseMat embed_fermion(const FockSpec& spec, const SparseMat& op);

/// B = sum_i tau2 cbar_i d_i + s_i c_i x_i.
OperatorMatrix assemble_B(const FockSpec& spec);
/// B = sum_i sqrt(s_i) (q_i^dagger a_i + q_i a_i^dagger).
OperatorMatrix assemble_B_ladder(const FockSpec& spec);

enum class SquareRoute { matrix_square, analytic };

/// matrix_square: B*B. analytic: sum_i s_i (q_i^dagger q_i + 2 tau2 a_i^dagger a_i).
OperatorMatrix square_B(const FockSpec& spec, SquareRoute route);

/// B*B compressed onto interior states, where it equals the analytic square.
OperatorMatrix interior_square(const FockSpec& spec);

/// The squared operator in position form with a chosen power of tau2 on the
/// second-derivative term: sum_i -tau2^p d_i^2 + s_i^2 x_i^2 + 2 tau2 s_i N_i - tau2 s_i.
OperatorMatrix square_B_position_form(const FockSpec& spec, int tau2_power);

/// Max violation, over interior columns, of
///   {B, a_i} = sqrt(s) q_i,        {B, a_i^dagger} = sqrt(s) q_i^dagger,
///   [B, q_i] = -2 tau2 sqrt(s) a_i, [B, q_i^dagger] = 2 tau2 sqrt(s) a_i^dagger,
/// with the right-hand sides built from `s_rhs` (pass spec.s for the true identities).
double intertwiner_violation(const FockSpec& spec, std::span<const double> s_rhs);
double intertwiners_check(const FockSpec& spec);

struct BosonFermionSplit {
  OperatorMatrix bosonic;    ///< sum_i s_i q_i^dagger q_i
  OperatorMatrix fermionic;  ///< 2 sum_i s_i a_i^dagger a_i
};

/// analytic square = bosonic + tau2 * fermionic.
BosonFermionSplit split_bosonic_fermionic(const FockSpec& spec);

/// Fermion parity on the full space.
OperatorMatrix grading(const FockSpec& spec);

/// D_tot = B (x) 1 + gamma (x) diag(spatial_modes).
OperatorMatrix dirac_total(const FockSpec& spec, std::span<const int> spatial_modes);
OperatorMatrix dirac_total(const OperatorMatrix& B, const OperatorMatrix& gamma,
                           std::span<const int> spatial_modes);

}  // namespace bdlab
