#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bdlab/operator_matrix.hpp"

namespace bdlab {

struct EigenOptions {
  enum class Method { automatic, dense, lanczos };
  Method method = Method::automatic;
  std::uint64_t seed = 1;
  double rel_tol = 1e-9;          ///< residual tolerance relative to ||A||
  std::size_t dense_limit = 4096;  ///< automatic picks dense below this dimension
  int krylov_dim = 0;              ///< 0: max(60, 3 * count)
  int max_restarts = 300;          ///< per Lanczos cycle
  int max_cycles = 2000;
};

struct SpectrumResult {
  std::vector<double> eigenvalues;  ///< ascending
  std::vector<double> residuals;    ///< ||A v - lambda v|| per pair
  std::string method;
  double norm_estimate = 0.0;
};

/// Lowest `count` eigenvalues of a hermitian matrix.
///
/// The Lanczos path uses full reorthogonalization, explicit restarts from the
/// lowest Ritz vector and locking of converged pairs; fresh cycles start from a
/// seeded random vector orthogonal to everything locked so degenerate copies are
/// found, and the search stops once a fresh cycle cannot go below the count-th
/// locked value.
SpectrumResult spectrum(const OperatorMatrix& op, std::size_t count, const EigenOptions& options = {});

}  // namespace bdlab
