#include "bdlab/holonomy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "bdlab/errors.hpp"
#include "bdlab/spectral_basis.hpp"

namespace bdlab {

namespace {

using Point = std::vector<double>;

Point axpy(const Point& x, double h, const Point& v) {
  Point out(x);
  for (std::size_t a = 0; a < x.size(); ++a) out[a] += h * v[a];
  return out;
}

struct Sample {
  Point x;
  Point v;
};

/// RK4 samples (point and velocity) at t_j = j h.
std::vector<Sample> rk4_samples(const VectorField& X, const Point& start, double duration, int steps) {
  const double h = duration / steps;
  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  Point x = start;
  for (int j = 0;; ++j) {
    Point v = X.eval(x);
    out.push_back({x, v});
    if (j == steps) break;
    const Point k2 = X.eval(axpy(x, h / 2, v));
    const Point k3 = X.eval(axpy(x, h / 2, k2));
    const Point k4 = X.eval(axpy(x, h, k3));
    for (std::size_t a = 0; a < x.size(); ++a) x[a] += h / 6 * (v[a] + 2 * k2[a] + 2 * k3[a] + k4[a]);
  }
  return out;
}

/// Cubic Hermite interpolation between two samples at fraction c of a step h.
Point hermite(const Sample& p, const Sample& q, double h, double c) {
  const double h00 = (1 + 2 * c) * (1 - c) * (1 - c);
  const double h10 = c * (1 - c) * (1 - c);
  const double h01 = c * c * (3 - 2 * c);
  const double h11 = c * c * (c - 1);
  Point out(p.x.size());
  for (std::size_t a = 0; a < out.size(); ++a) {
    out[a] = h00 * p.x[a] + h10 * h * p.v[a] + h01 * q.x[a] + h11 * h * q.v[a];
  }
  return out;
}

DenseMat contract(const std::vector<DenseMat>& A, const Point& v) {
  DenseMat out = DenseMat::Zero(A[0].rows(), A[0].cols());
  for (std::size_t mu = 0; mu < A.size(); ++mu) out += v[mu] * A[mu];
  return out;
}

void check_flow(const FlowSpec& flow) {
  flow.field.validate();
  if (flow.start.size() != static_cast<std::size_t>(flow.field.dim)) throw DomainError("flow: start point dimension mismatch");
  if (!std::isfinite(flow.duration)) throw DomainError("flow: duration must be finite");
}

struct Transport {
  Point end;
  DenseMat hol;
  double div_integral = 0.0;
};

Transport transport(const Connection& conn, const FlowSpec& flow, int steps, bool with_div) {
  const auto samples = rk4_samples(flow.field, flow.start, flow.duration, steps);
  const double h = flow.duration / steps;
  const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
  const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
  const auto r = conn.lie().rep_dim();
  Transport out;
  out.hol = DenseMat::Identity(r, r);
  for (int j = 0; j < steps; ++j) {
    const auto& p = samples[static_cast<std::size_t>(j)];
    const auto& q = samples[static_cast<std::size_t>(j) + 1];
    const Point x1 = hermite(p, q, h, c1);
    const Point x2 = hermite(p, q, h, c2);
    const DenseMat A1 = contract(conn.eval(x1), flow.field.eval(x1));
    const DenseMat A2 = contract(conn.eval(x2), flow.field.eval(x2));
    const DenseMat omega = h / 2 * (A1 + A2) - std::sqrt(3.0) / 12.0 * h * h * (A1 * A2 - A2 * A1);
    out.hol = polar_unitary(unitary_exp(omega) * out.hol);
    if (with_div) out.div_integral += h / 2 * (flow.field.divergence(x1) + flow.field.divergence(x2));
  }
  out.end = samples.back().x;
  return out;
}

}  // namespace

VectorField VectorField::constant(double L, std::vector<double> components) {
  VectorField out;
  out.dim = static_cast<int>(components.size());
  out.L = L;
  for (int a = 0; a < out.dim; ++a) {
    if (components[static_cast<std::size_t>(a)] == 0.0) continue;
    out.terms.push_back({0, a, std::vector<int>(components.size(), 0), false, components[static_cast<std::size_t>(a)]});
  }
  return out;
}

void VectorField::validate() const {
  if (dim < 1 || dim > 3) throw DomainError("vector field: d must be 1, 2 or 3");
  if (!(L > 0.0)) throw DomainError("vector field: L must be positive");
  for (const auto& t : terms) {
    if (t.axis < 0 || t.axis >= dim) throw DomainError("vector field: component out of range");
    if (t.k.size() != static_cast<std::size_t>(dim)) throw DomainError("vector field: wavevector length must equal d");
    if (!std::isfinite(t.coeff)) throw DomainError("vector field: non-finite coefficient");
  }
}

std::vector<double> VectorField::eval(std::span<const double> point) const {
  std::vector<double> out(static_cast<std::size_t>(dim), 0.0);
  for (int a = 0; a < dim; ++a) {
    out[static_cast<std::size_t>(a)] = eval_trig(terms, L, point, [a](const TrigTerm& t) { return t.axis == a; }).value;
  }
  return out;
}

double VectorField::divergence(std::span<const double> point) const {
  double out = 0.0;
  for (int a = 0; a < dim; ++a) {
    out += eval_trig(terms, L, point, [a](const TrigTerm& t) { return t.axis == a; }).gradient[static_cast<std::size_t>(a)];
  }
  return out;
}

double VectorField::speed_bound() const {
  std::vector<double> sums(static_cast<std::size_t>(dim), 0.0);
  for (const auto& t : terms) sums[static_cast<std::size_t>(t.axis)] += std::abs(t.coeff);
  double sq = 0.0;
  for (double s : sums) sq += s * s;
  return std::sqrt(sq);
}

int VectorField::max_harmonic() const {
  int out = 0;
  for (const auto& t : terms) {
    for (int c : t.k) out = std::max(out, std::abs(c));
  }
  return out;
}

VectorField VectorField::reversed() const {
  VectorField out = *this;
  for (auto& t : out.terms) t.coeff = -t.coeff;
  return out;
}

std::vector<std::vector<double>> flow_path(const FlowSpec& flow, int steps) {
  check_flow(flow);
  if (steps < 1) throw DomainError("flow_path: steps must be >= 1");
  const auto samples = rk4_samples(flow.field, flow.start, flow.duration, steps);
  std::vector<std::vector<double>> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.x);
  return out;
}

int min_transport_steps(const Connection& conn, const FlowSpec& flow) {
  // At least four steps per wavelength of the fastest harmonic met along the path.
  const int K = std::max({conn.max_harmonic(), flow.field.max_harmonic(), 1});
  const double travel = std::abs(flow.duration) * flow.field.speed_bound();
  return std::max(1, static_cast<int>(std::ceil(4.0 * K * travel / conn.circumference())));
}

DenseMat holonomy_along_flow(const Connection& conn, const FlowSpec& flow, int steps) {
  check_flow(flow);
  if (flow.field.dim != conn.dim() || flow.field.L != conn.circumference()) {
    throw DomainError("holonomy: flow and connection live on different tori");
  }
  const int need = min_transport_steps(conn, flow);
  if (steps < need) {
    throw DomainError("holonomy: " + std::to_string(steps) + " steps is below the minimum " + std::to_string(need) +
                      " for this connection and flow");
  }
  return transport(conn, flow, steps, false).hol;
}

std::complex<double> wilson_loop(const Connection& conn, const FlowSpec& flow, int steps) {
  check_flow(flow);
  const auto path = flow_path(flow, steps);
  const double L = conn.circumference();
  for (std::size_t a = 0; a < flow.start.size(); ++a) {
    const double diff = path.back()[a] - flow.start[a];
    const double wrapped = diff - L * std::round(diff / L);
    if (std::abs(wrapped) > 1e-8 * L) throw DomainError("wilson_loop: flow does not close");
  }
  const DenseMat hol = holonomy_along_flow(conn, flow, steps);
  return hol.trace() / static_cast<double>(hol.rows());
}

GridSpinor GridSpinor::sample(int dim, double L, int points, int rep_dim,
                              const std::function<Vec(std::span<const double>)>& fn) {
  if (dim < 1 || dim > 3 || points < 4 || rep_dim < 1) throw DomainError("GridSpinor: need d in 1..3, >= 4 points, rep_dim >= 1");
  GridSpinor out;
  out.dim = dim;
  out.L = L;
  out.points = points;
  Eigen::Index total = 1;
  for (int a = 0; a < dim; ++a) total *= points;
  out.values.resize(total, rep_dim);
  for (Eigen::Index row = 0; row < total; ++row) {
    const Vec v = fn(out.grid_point(row));
    if (v.size() != rep_dim) throw DomainError("GridSpinor: sample has wrong length");
    out.values.row(row) = v.transpose();
  }
  return out;
}

std::vector<double> GridSpinor::grid_point(Eigen::Index row) const {
  std::vector<double> p(static_cast<std::size_t>(dim));
  for (int a = 0; a < dim; ++a) {
    p[static_cast<std::size_t>(a)] = static_cast<double>(row % points) * L / points;
    row /= points;
  }
  return p;
}

Vec GridSpinor::interpolate(std::span<const double> point) const {
  const double h = L / points;
  std::vector<std::array<Eigen::Index, 4>> idx(static_cast<std::size_t>(dim));
  std::vector<std::array<double, 4>> wts(static_cast<std::size_t>(dim));
  for (int a = 0; a < dim; ++a) {
    const double u = wrap_coordinate(point[static_cast<std::size_t>(a)], L) / h;
    const double base = std::floor(u);
    const double t = u - base;
    // Lagrange weights on nodes -1, 0, 1, 2.
    wts[static_cast<std::size_t>(a)] = {-t * (t - 1) * (t - 2) / 6, (t + 1) * (t - 1) * (t - 2) / 2,
                                        -(t + 1) * t * (t - 2) / 2, (t + 1) * t * (t - 1) / 6};
    for (int o = 0; o < 4; ++o) {
      const auto j = static_cast<Eigen::Index>(base) - 1 + o;
      idx[static_cast<std::size_t>(a)][static_cast<std::size_t>(o)] = ((j % points) + points) % points;
    }
  }
  Vec out = Vec::Zero(values.cols());
  const int corners = 1 << (2 * dim);
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    Eigen::Index row = 0;
    Eigen::Index stride = 1;
    for (int a = 0; a < dim; ++a) {
      const int o = (c >> (2 * a)) & 3;
      w *= wts[static_cast<std::size_t>(a)][static_cast<std::size_t>(o)];
      row += idx[static_cast<std::size_t>(a)][static_cast<std::size_t>(o)] * stride;
      stride *= points;
    }
    out += w * values.row(row).transpose();
  }
  return out;
}

GridSpinor apply_hd_element(const std::function<double(std::span<const double>)>& f, const Connection& conn,
                            const FlowSpec& flow, const GridSpinor& spinor, const HdOptions& options) {
  check_flow(flow);
  if (spinor.dim != conn.dim() || spinor.L != conn.circumference() || flow.field.dim != conn.dim() ||
      flow.field.L != conn.circumference()) {
    throw DomainError("apply_hd_element: spinor grid, flow and connection must share the torus");
  }
  if (spinor.values.cols() != conn.lie().rep_dim()) throw DomainError("apply_hd_element: spinor rank != representation dimension");
  const int need = min_transport_steps(conn, flow);
  if (options.steps < need) throw DomainError("apply_hd_element: too few transport steps");

  GridSpinor out = spinor;
  FlowSpec back{flow.field.reversed(), flow.duration, {}};
  for (Eigen::Index row = 0; row < spinor.values.rows(); ++row) {
    const auto target = spinor.grid_point(row);
    back.start = target;
    // Transport backwards from the target; the forward holonomy is the inverse.
    const Transport tr = transport(conn, back, options.steps, options.jacobian);
    Vec v = tr.hol.adjoint() * spinor.interpolate(tr.end);
    double scale = f(target);
    if (options.jacobian) scale *= std::exp(0.5 * tr.div_integral);
    out.values.row(row) = scale * v.transpose();
  }
  return out;
}

}  // namespace bdlab
