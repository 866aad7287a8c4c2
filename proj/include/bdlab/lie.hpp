#pragma once

#include <string>
#include <vector>

#include "bdlab/operator_matrix.hpp"

namespace bdlab {

enum class Group { U1, SU2 };

/// Defining representation of u(1) (T = i) or su(2) (T_a = i sigma_a).
/// [T_a, T_b] = f_abc T_c with f_abc = -2 epsilon_abc for SU2.
class LieStructure {
 public:
  explicit LieStructure(Group g);
  static LieStructure parse(const std::string& name);

  Group group() const { return group_; }
  std::string name() const { return group_ == Group::U1 ? "U1" : "SU2"; }
  int rep_dim() const { return group_ == Group::U1 ? 1 : 2; }
  int count() const { return static_cast<int>(gens_.size()); }
  const DenseMat& generator(int a) const;
  double structure_constant(int a, int b, int c) const;

  /// Real coordinate of M along T_a: Re tr(T_a^dagger M) / tr(T_a^dagger T_a).
  double component(int a, const DenseMat& m) const;

  /// max over a, b of ||[T_a, T_b] - f_abc T_c||_max and of the anti-hermiticity defect.
  double closure_defect() const;

 private:
  Group group_;
  std::vector<DenseMat> gens_;
};

/// exp(M) for anti-hermitian M, via the eigen-decomposition of the hermitian iM.
DenseMat unitary_exp(const DenseMat& m);

/// Nearest unitary (polar factor W V^dagger of the SVD).
DenseMat polar_unitary(const DenseMat& m);

/// ||U^dagger U - 1||_max.
double unitarity_defect(const DenseMat& u);

}  // namespace bdlab
