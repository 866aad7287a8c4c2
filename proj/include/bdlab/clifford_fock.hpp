#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bdlab/operator_matrix.hpp"

namespace bdlab {

/// Exterior algebra of R^n in the occupation basis. Bit i of a flat index is
/// the occupation of mode i (little-endian); index 0 is the vacuum.
class FermionSpace {
 public:
  explicit FermionSpace(int n);

  int modes() const { return n_; }
  std::size_t dim() const { return std::size_t{1} << n_; }

  std::size_t encode(std::span<const int> occupied) const;
  std::vector<int> decode(std::size_t index) const;

 private:
  int n_;
};

inline constexpr int kMaxFermionModes = 24;

struct ExtInt {
  OperatorMatrix ext;  ///< creation, a^dagger_i
  OperatorMatrix in;   ///< annihilation, a_i
};

/// Sign (-1)^(number of occupied modes below i).
ExtInt ext_int(const FermionSpace& space, int i);

struct CliffordPair {
  OperatorMatrix c;     ///< ext + int, hermitian, squares to 1
  OperatorMatrix cbar;  ///< ext - int, anti-hermitian, squares to -1
};

CliffordPair clifford(const FermionSpace& space, int i);

/// Diagonal sum_{i in S} w_i over occupation sets S.
OperatorMatrix number_operator(const FermionSpace& space, std::span<const double> weights);

/// Fermion parity (-1)^N.
OperatorMatrix fermion_parity(const FermionSpace& space);

/// Max over i, j of ||{a_i, a_j^dagger} - delta_ij||_max and ||{a_i, a_j}||_max.
double car_violation(std::span<const SparseMat> annihilators);

double check_car(const FermionSpace& space);

/// Max violation of c_i^2 = 1, cbar_i^2 = -1, {c_i, cbar_j} = 0 and the
/// off-diagonal anticommutators among c and among cbar.
double check_clifford(const FermionSpace& space);

}  // namespace bdlab
