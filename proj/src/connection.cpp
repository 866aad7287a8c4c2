#include "bdlab/connection.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

#include "bdlab/errors.hpp"

namespace bdlab {

namespace {

void check_terms(const LieStructure& lie, int dim, const std::vector<TrigTerm>& terms) {
  for (const auto& t : terms) {
    if (t.generator < 0 || t.generator >= lie.count()) throw DomainError("connection term: generator out of range");
    if (t.axis < 0 || t.axis >= dim) throw DomainError("connection term: axis out of range");
    if (t.k.size() != static_cast<std::size_t>(dim)) throw DomainError("connection term: wavevector length must equal d");
    if (!std::isfinite(t.coeff)) throw DomainError("connection term: non-finite coefficient");
  }
}

}  // namespace

Connection::Connection(LieStructure lie, int dim, double L, std::vector<TrigTerm> terms)
    : lie_(std::move(lie)), d_(dim), L_(L), terms_(std::move(terms)) {
  if (dim < 1 || dim > 3) throw DomainError("connection: d must be 1, 2 or 3");
  if (!(L > 0.0)) throw DomainError("connection: L must be positive");
  check_terms(lie_, d_, terms_);
}

Connection Connection::parse(std::istream& in) {
  std::optional<LieStructure> lie;
  std::optional<int> dim;
  double L = 2.0 * std::numbers::pi;
  std::vector<TrigTerm> terms;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw DomainError("connection file line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "term") {
      if (!dim || !lie) fail("`group` and `d` must precede terms");
      TrigTerm t;
      std::string ks, kind;
      if (!(ls >> t.generator >> t.axis >> ks >> kind >> t.coeff)) fail("expected: term <generator> <axis> <k> <cos|sin> <coeff>");
      std::string extra;
      if (ls >> extra) fail("trailing text after term");
      std::stringstream kss(ks);
      std::string item;
      while (std::getline(kss, item, ':')) {
        try {
          std::size_t used = 0;
          t.k.push_back(std::stoi(item, &used));
          if (used != item.size()) fail("bad wavevector component '" + item + "'");
        } catch (const std::logic_error&) {
          fail("bad wavevector component '" + item + "'");
        }
      }
      if (kind != "cos" && kind != "sin") fail("expected cos or sin, got '" + kind + "'");
      t.sine = kind == "sin";
      try {
        check_terms(*lie, *dim, {t});
      } catch (const DomainError& e) {
        fail(e.what());
      }
      terms.push_back(std::move(t));
      continue;
    }
    std::string eq, value;
    if (!(ls >> eq >> value) || eq != "=") fail("expected `key = value` or a term line");
    if (head == "group") {
      try {
        lie = LieStructure::parse(value);
      } catch (const DomainError& e) {
        fail(e.what());
      }
    } else if (head == "d") {
      dim = std::atoi(value.c_str());
      if (*dim < 1 || *dim > 3) fail("d must be 1, 2 or 3");
    } else if (head == "L") {
      try {
        L = std::stod(value);
      } catch (const std::logic_error&) {
        fail("bad L");
      }
    } else {
      fail("unknown key '" + head + "'");
    }
  }
  if (!lie || !dim) throw DomainError("connection file: missing `group` or `d`");
  return Connection(*lie, *dim, L, std::move(terms));
}

std::string Connection::to_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "group = " << lie_.name() << "\nd = " << d_ << "\nL = " << L_ << "\n";
  for (const auto& t : terms_) {
    os << "term " << t.generator << " " << t.axis << " ";
    for (std::size_t a = 0; a < t.k.size(); ++a) os << (a ? ":" : "") << t.k[a];
    os << " " << (t.sine ? "sin" : "cos") << " " << t.coeff << "\n";
  }
  return os.str();
}

int Connection::max_harmonic() const {
  int out = 0;
  for (const auto& t : terms_) {
    for (int c : t.k) out = std::max(out, std::abs(c));
  }
  return out;
}

GaugeSample eval_gauge(const LieStructure& lie, const GaugeFunction& gf, int dim, double L,
                       std::span<const double> point) {
  const int n = lie.count();
  std::vector<DenseMat> factors;
  std::vector<std::vector<double>> grads;
  for (int a = 0; a < n; ++a) {
    const auto tv = eval_trig(gf.terms, L, point, [a](const TrigTerm& t) { return t.generator == a; });
    factors.push_back(unitary_exp(tv.value * lie.generator(a)));
    grads.push_back(tv.gradient);
  }
  const auto r = lie.rep_dim();
  GaugeSample out;
  out.g = DenseMat::Identity(r, r);
  for (const auto& f : factors) out.g = out.g * f;
  for (int mu = 0; mu < dim; ++mu) {
    DenseMat d = DenseMat::Zero(r, r);
    for (int a = 0; a < n; ++a) {
      DenseMat left = DenseMat::Identity(r, r);
      for (int b = 0; b < a; ++b) left = left * factors[static_cast<std::size_t>(b)];
      DenseMat right = DenseMat::Identity(r, r);
      for (int b = a + 1; b < n; ++b) right = right * factors[static_cast<std::size_t>(b)];
      const double dchi = grads[static_cast<std::size_t>(a)][static_cast<std::size_t>(mu)];
      d += left * (dchi * lie.generator(a) * factors[static_cast<std::size_t>(a)]) * right;
    }
    out.dg.push_back(d);
  }
  return out;
}

std::vector<DenseMat> Connection::eval(std::span<const double> point) const {
  if (point.size() != static_cast<std::size_t>(d_)) throw DomainError("connection: point dimension mismatch");
  const auto r = lie_.rep_dim();
  std::vector<DenseMat> A(static_cast<std::size_t>(d_), DenseMat::Zero(r, r));
  for (int mu = 0; mu < d_; ++mu) {
    for (int a = 0; a < lie_.count(); ++a) {
      const auto tv = eval_trig(terms_, L_, point, [&](const TrigTerm& t) { return t.axis == mu && t.generator == a; });
      if (tv.value != 0.0) A[static_cast<std::size_t>(mu)] += tv.value * lie_.generator(a);
    }
  }
  if (!gauge_) return A;
  const auto gs = eval_gauge(lie_, *gauge_, d_, L_, point);
  const DenseMat ginv = gs.g.adjoint();
  for (int mu = 0; mu < d_; ++mu) {
    auto& a = A[static_cast<std::size_t>(mu)];
    a = gs.g * a * ginv + gs.dg[static_cast<std::size_t>(mu)] * ginv;
  }
  return A;
}

Connection Connection::gauge_transformed(GaugeFunction g) const {
  if (gauge_) throw DomainError("connection: already gauge transformed");
  for (auto& t : g.terms) {
    t.axis = 0;
  }
  check_terms(lie_, d_, g.terms);
  Connection out = *this;
  out.gauge_ = std::move(g);
  return out;
}

DenseMat Connection::gauge_element(std::span<const double> point) const {
  if (!gauge_) return DenseMat::Identity(lie_.rep_dim(), lie_.rep_dim());
  return eval_gauge(lie_, *gauge_, d_, L_, point).g;
}

Connection translate_connection(const Connection& conn, const Connection& omega, double t) {
  if (conn.lie().group() != omega.lie().group() || conn.dim() != omega.dim() ||
      conn.circumference() != omega.circumference()) {
    throw DomainError("translate_connection: structure mismatch");
  }
  if (conn.gauge() || omega.gauge()) throw DomainError("translate_connection: gauge-transformed inputs unsupported");
  std::vector<TrigTerm> terms = conn.terms();
  for (auto term : omega.terms()) {
    term.coeff *= -t;
    terms.push_back(std::move(term));
  }
  return Connection(conn.lie(), conn.dim(), conn.circumference(), std::move(terms));
}

}  // namespace bdlab
