#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "bdlab/connection.hpp"

namespace bdlab {

/// Trig-polynomial vector field on T^d; TrigTerm::axis selects the component,
/// TrigTerm::generator is ignored.
struct VectorField {
  int dim = 1;
  double L = 6.283185307179586;
  std::vector<TrigTerm> terms;

  static VectorField constant(double L, std::vector<double> components);

  std::vector<double> eval(std::span<const double> point) const;
  double divergence(std::span<const double> point) const;
  double speed_bound() const;  ///< Euclidean norm of the per-component coefficient sums
  int max_harmonic() const;
  VectorField reversed() const;
  void validate() const;
};

struct FlowSpec {
  VectorField field;
  double duration = 0.0;
  std::vector<double> start;
};

/// steps + 1 points of the RK4 flow, unwrapped (coordinates may leave [0, L)).
std::vector<std::vector<double>> flow_path(const FlowSpec& flow, int steps);

/// Smallest admissible step count for transporting `conn` along `flow`.
int min_transport_steps(const Connection& conn, const FlowSpec& flow);

/// Path-ordered transport U(t) solving dU/dt = A(gamma'(t)) U, U(0) = 1.
/// Fourth-order Magnus step at the Gauss nodes, polar re-unitarization per step.
DenseMat holonomy_along_flow(const Connection& conn, const FlowSpec& flow, int steps);

/// tr(Hol) / dim for a flow that returns to its start modulo the period.
std::complex<double> wilson_loop(const Connection& conn, const FlowSpec& flow, int steps);

/// C^r-valued function sampled on the uniform G^d grid x_j = j L / G;
/// row index = sum_a j_a G^a.
struct GridSpinor {
  int dim = 1;
  double L = 6.283185307179586;
  int points = 0;
  DenseMat values;

  static GridSpinor sample(int dim, double L, int points, int rep_dim,
                           const std::function<Vec(std::span<const double>)>& fn);
  std::vector<double> grid_point(Eigen::Index row) const;
  /// Periodic 4-point cubic Lagrange interpolation per axis.
  Vec interpolate(std::span<const double> point) const;
};

struct HdOptions {
  int steps = 200;
  bool jacobian = false;  ///< multiply by exp(-1/2 int div X) so the action is unitary on L^2
};

/// (f e^X psi)(m') = f(m') Hol(gamma) psi(m), gamma the flow from m to m' = exp_t(X)(m).
GridSpinor apply_hd_element(const std::function<double(std::span<const double>)>& f, const Connection& conn,
                            const FlowSpec& flow, const GridSpinor& spinor, const HdOptions& options = {});

}  // namespace bdlab
