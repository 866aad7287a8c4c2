#include "bdlab/experiment.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "bdlab/bott_dirac.hpp"
#include "bdlab/connection.hpp"
#include "bdlab/eigensolver.hpp"
#include "bdlab/errors.hpp"
#include "bdlab/field_theory.hpp"
#include "bdlab/fluctuations.hpp"
#include "bdlab/holonomy.hpp"
#include "bdlab/lie.hpp"
#include "bdlab/test_functions.hpp"

namespace bdlab {

namespace {

using json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

// Whole-string numeric parses; nullopt on any leftover text.
std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || s.empty()) return std::nullopt;
  return v;
}

std::optional<long long> to_int(const std::string& s) {
  long long v = 0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || s.empty()) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> to_u64(const std::string& s) {
  std::uint64_t v = 0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || s.empty()) return std::nullopt;
  return v;
}

template <class T, class F>
std::optional<std::vector<T>> to_list(const std::string& s, F conv) {
  std::vector<T> out;
  if (trim(s).empty()) return out;
  for (const auto& part : split(s, ',')) {
    auto v = conv(part);
    if (!v) return std::nullopt;
    out.push_back(static_cast<T>(*v));
  }
  return out;
}

WeightRule parse_weight(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? std::string{} : text.substr(colon + 1);
  if (kind == "massive") {
    auto m = to_double(rest);
    if (!m) throw DomainError("expected massive:<mass>");
    if (!(*m > 0.0) || !std::isfinite(*m)) throw DomainError("mass must be positive");
    return WeightRule::massive(*m);
  }
  if (kind == "photon") {
    if (colon == std::string::npos) return WeightRule::photon();
    auto f = to_double(rest);
    if (!f || !(*f > 0.0) || !std::isfinite(*f)) throw DomainError("photon floor must be a positive number");
    return WeightRule::photon(*f);
  }
  if (kind == "custom") {
    auto list = to_list<double>(rest, to_double);
    if (!list || list->empty()) throw DomainError("expected custom:<s1>,<s2>,...");
    for (double v : *list) {
      if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("custom weights must be positive");
    }
    return WeightRule::custom_list(*list);
  }
  throw DomainError("expected massive:<m>, photon[:<floor>] or custom:<list>");
}

struct ThetaChoice {
  std::string kind;  // position | dilation | function | field
  int mode = 0;
  std::string function;
};

ThetaChoice parse_theta(const std::string& text) {
  ThetaChoice c;
  if (text == "field") {
    c.kind = "field";
    return c;
  }
  const auto p1 = text.find(':');
  if (p1 == std::string::npos) throw DomainError("expected position:<i>, dilation:<i>, function:<i>:<f> or field");
  c.kind = text.substr(0, p1);
  std::string rest = text.substr(p1 + 1);
  if (c.kind == "function") {
    const auto p2 = rest.find(':');
    if (p2 == std::string::npos) throw DomainError("expected function:<i>:<test function>");
    c.function = rest.substr(p2 + 1);
    rest = rest.substr(0, p2);
    TestFunction::parse(c.function);
  } else if (c.kind != "position" && c.kind != "dilation") {
    throw DomainError("unknown theta kind '" + c.kind + "'");
  }
  auto i = to_int(rest);
  if (!i || *i < 0) throw DomainError("theta mode index must be a non-negative integer");
  c.mode = static_cast<int>(*i);
  return c;
}

// Per-key setter: returns an empty string on success, else the problem.
using Setter = std::function<std::string(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto real = [](auto assign, bool positive) -> Setter {
      return [assign, positive](ExperimentConfig& c, const std::string& v) -> std::string {
        auto x = to_double(v);
        if (!x) return "expected a number, got '" + v + "'";
        if (!std::isfinite(*x)) return "must be finite";
        if (positive && !(*x > 0.0)) return "must be positive";
        assign(c, *x);
        return {};
      };
    };
    auto integer = [](auto assign, long long lo, long long hi) -> Setter {
      return [assign, lo, hi](ExperimentConfig& c, const std::string& v) -> std::string {
        auto x = to_int(v);
        if (!x) return "expected an integer, got '" + v + "'";
        if (*x < lo || *x > hi) return "must lie in " + std::to_string(lo) + ".." + std::to_string(hi);
        assign(c, *x);
        return {};
      };
    };
    auto reals = [](auto assign) -> Setter {
      return [assign](ExperimentConfig& c, const std::string& v) -> std::string {
        auto x = to_list<double>(v, to_double);
        if (!x) return "expected a comma-separated list of numbers, got '" + v + "'";
        for (double e : *x) {
          if (!std::isfinite(e)) return "entries must be finite";
        }
        assign(c, std::move(*x));
        return {};
      };
    };
    t["d"] = integer([](ExperimentConfig& c, long long x) { c.geometry.dim = static_cast<int>(x); }, 1, 3);
    t["L"] = real([](ExperimentConfig& c, double x) { c.geometry.circumference = x; }, true);
    t["tau1"] = real([](ExperimentConfig& c, double x) { c.sobolev.tau1 = x; }, true);
    t["sigma"] = real([](ExperimentConfig& c, double x) { c.sobolev.sigma = x; }, true);
    t["n"] = integer([](ExperimentConfig& c, long long x) { c.n = static_cast<int>(x); }, 1, 1'000'000);
    t["Nb"] = integer([](ExperimentConfig& c, long long x) { c.Nb = static_cast<int>(x); }, 2, 4096);
    t["tau2"] = real([](ExperimentConfig& c, double x) { c.tau2 = x; }, true);
    t["weight"] = [](ExperimentConfig& c, const std::string& v) -> std::string {
      try {
        c.weight = parse_weight(v);
      } catch (const std::exception& e) {
        return e.what();
      }
      return {};
    };
    t["zero_mode"] = [](ExperimentConfig& c, const std::string& v) -> std::string {
      if (v == "true") c.zero_mode = true;
      else if (v == "false") c.zero_mode = false;
      else return "expected true or false, got '" + v + "'";
      return {};
    };
    t["quad"] = [](ExperimentConfig& c, const std::string& v) -> std::string {
      try {
        QuadratureSpec::parse(v, std::uint64_t{0});  // seed presence is checked across keys
      } catch (const std::exception& e) {
        return e.what();
      }
      c.quad = v;
      return {};
    };
    t["seed"] = [](ExperimentConfig& c, const std::string& v) -> std::string {
      auto x = to_u64(v);
      if (!x) return "expected an unsigned 64-bit integer, got '" + v + "'";
      c.seed = *x;
      return {};
    };
    t["out"] = [](ExperimentConfig& c, const std::string& v) -> std::string {
      if (v.empty()) return "must not be empty";
      c.out = v;
      return {};
    };
    t["format"] = [](ExperimentConfig& c, const std::string& v) -> std::string {
      if (v != "csv" && v != "json") return "expected csv or json, got '" + v + "'";
      c.format = v;
      return {};
    };
    t["count"] = integer([](ExperimentConfig& c, long long x) { c.count = static_cast<std::size_t>(x); }, 1, 100000);
    t["function"] = [](ExperimentConfig& c, const std::string& v) -> std::string {
      try {
        TestFunction::parse(v);
      } catch (const std::exception& e) {
        return e.what();
      }
      c.function = v;
      return {};
    };
    t["point"] = reals([](ExperimentConfig& c, std::vector<double> x) { c.point = std::move(x); });
    t["omega"] = reals([](ExperimentConfig& c, std::vector<double> x) { c.omega = std::move(x); });
    t["t"] = reals([](ExperimentConfig& c, std::vector<double> x) { c.t_values = std::move(x); });
    t["grid"] = integer([](ExperimentConfig& c, long long x) { c.grid = static_cast<int>(x); }, 1, 4096);
    t["connection"] = [](ExperimentConfig& c, const std::string& v) -> std::string {
      if (v.empty()) return "must not be empty";
      c.connection = v;
      return {};
    };
    t["flow"] = reals([](ExperimentConfig& c, std::vector<double> x) { c.flow = std::move(x); });
    t["duration"] = real([](ExperimentConfig& c, double x) { c.duration = x; }, false);
    t["start"] = reals([](ExperimentConfig& c, std::vector<double> x) { c.start = std::move(x); });
    t["steps"] = integer([](ExperimentConfig& c, long long x) { c.steps = static_cast<int>(x); }, 0, 100'000'000);
    t["lambda"] = real([](ExperimentConfig& c, double x) { c.lambda = x; }, false);
    t["theta"] = [](ExperimentConfig& c, const std::string& v) -> std::string {
      try {
        parse_theta(v);
      } catch (const std::exception& e) {
        return e.what();
      }
      c.theta = v;
      return {};
    };
    t["margin"] = integer([](ExperimentConfig& c, long long x) { c.margin = static_cast<int>(x); }, 1, 4095);
    t["spatial_modes"] = [](ExperimentConfig& c, const std::string& v) -> std::string {
      auto x = to_list<long long>(v, to_int);
      if (!x || x->empty()) return "expected a non-empty comma-separated list of integers";
      c.spatial_modes.assign(x->begin(), x->end());
      return {};
    };
    return t;
  }();
  return table;
}

// Cross-key checks, each attributed to the key that last set the offending value.
void cross_check(const ExperimentConfig& c, const std::map<std::string, int>& line_of,
                 std::vector<ConfigError>& errors) {
  auto line = [&](const std::string& key) {
    auto it = line_of.find(key);
    return it == line_of.end() ? -1 : it->second;
  };
  auto fail = [&](const std::string& key, const std::string& msg) { errors.push_back({line(key), key, msg}); };
  if (c.weight.kind == WeightRule::Kind::custom && c.weight.custom.size() < static_cast<std::size_t>(c.n)) {
    fail("weight", "custom list has " + std::to_string(c.weight.custom.size()) + " weights for n = " +
                       std::to_string(c.n) + " modes");
  }
  if (c.weight.kind == WeightRule::Kind::photon && !c.weight.floor && c.zero_mode) {
    fail("weight", "photon weights without a floor give s = 0 on the zero mode; set a floor or zero_mode = false");
  }
  if (c.quad.rfind("mc:", 0) == 0 && line_of.count("seed") == 0) {
    fail("quad", "Monte Carlo quadrature needs an explicit seed");
  }
}

}  // namespace

int ExperimentConfig::effective_margin() const {
  if (margin) return *margin;
  // The dilation moves levels by two, so Theta [B, Theta] reaches five levels up.
  return theta.rfind("dilation", 0) == 0 ? 5 : 2;
}

std::string ConfigError::describe() const {
  std::string where = line > 0 ? "line " + std::to_string(line) : line == 0 ? "command line" : "defaults";
  return where + ": " + (key.empty() ? std::string{} : "'" + key + "': ") + message;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"basis",   "spectrum", "expectation", "translate",   "kernel",
                                              "holonomy", "wilson",  "fluctuate",   "dirac-total", "convergence"};
  return names;
}

ConfigResult parse_config(const std::string& text, const std::vector<std::pair<std::string, std::string>>& overrides) {
  ConfigResult result;
  ExperimentConfig cfg;
  std::map<std::string, int> line_of;
  const auto& table = setters();

  auto apply = [&](const std::string& key, const std::string& value, int line) {
    auto it = table.find(key);
    if (it == table.end()) {
      result.errors.push_back({line, key, "unknown key"});
      return;
    }
    std::string problem;
    try {
      problem = it->second(cfg, value);
    } catch (const std::exception& e) {
      problem = e.what();
    }
    if (!problem.empty()) {
      result.errors.push_back({line, key, problem});
      return;
    }
    line_of[key] = line;
  };

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      result.errors.push_back({line, {}, "expected 'key = value', got '" + body + "'"});
      continue;
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) {
      result.errors.push_back({line, {}, "missing key before '='"});
      continue;
    }
    auto seen = line_of.find(key);
    if (seen != line_of.end()) {
      result.errors.push_back(
          {line, key, "duplicate key, first set on line " + std::to_string(seen->second) + " and again on line " +
                          std::to_string(line)});
      continue;
    }
    apply(key, value, line);
  }
  for (const auto& [key, value] : overrides) apply(key, trim(value), 0);

  if (result.errors.empty()) cross_check(cfg, line_of, result.errors);
  if (result.errors.empty()) result.config = std::move(cfg);
  return result;
}

namespace {

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<long long, double, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

std::string fmt17(double v) {
  if (!std::isfinite(v)) throw NumericalFailure("non-finite value in output");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render_csv(const Table& t) {
  std::string out;
  for (std::size_t j = 0; j < t.header.size(); ++j) out += (j ? "," : "") + t.header[j];
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      if (auto* i = std::get_if<long long>(&row[j])) out += std::to_string(*i);
      else if (auto* d = std::get_if<double>(&row[j])) out += fmt17(*d);
      else out += std::get<std::string>(row[j]);
    }
    out += '\n';
  }
  return out;
}

json table_json(const Table& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::object();
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>) fmt17(v);
            r[t.header[j]] = v;
          },
          row[j]);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

void check_finite(const json& j) {
  if (j.is_number_float() && !std::isfinite(j.get<double>())) throw NumericalFailure("non-finite value in output");
  if (j.is_structured()) {
    for (const auto& e : j) check_finite(e);
  }
}

struct Artifact {
  Table table;
  json doc;  // null: the table rendered as JSON rows
};

std::string join_k(const std::vector<int>& k) {
  std::string s;
  for (std::size_t a = 0; a < k.size(); ++a) s += (a ? ":" : "") + std::to_string(k[a]);
  return s;
}

struct Setup {
  ModeBasis basis;
  FockSpec fock;
  std::vector<double> point;
};

ModeBasis make_basis(const ExperimentConfig& c) {
  BasisOptions opt;
  opt.include_zero_mode = c.zero_mode;
  return build_basis(c.geometry, c.sobolev, static_cast<std::size_t>(c.n), c.weight, opt);
}

Setup make_setup(const ExperimentConfig& c, bool need_fock_capacity) {
  ModeBasis basis = make_basis(c);
  FockSpec fock;
  fock.n = c.n;
  fock.Nb = c.Nb;
  fock.tau2 = c.tau2;
  fock.s = basis.weights();
  fock.validate();
  if (need_fock_capacity) fock.check_capacity();
  if (!c.point.empty() && c.point.size() != static_cast<std::size_t>(c.geometry.dim)) {
    throw DomainError("'point' needs d = " + std::to_string(c.geometry.dim) + " coordinates");
  }
  std::vector<double> point = c.point.empty() ? std::vector<double>(static_cast<std::size_t>(c.geometry.dim), 0.0)
                                              : c.point;
  return {std::move(basis), std::move(fock), std::move(point)};
}

json spec_json(const ExperimentConfig& c, const Setup& s) {
  json j;
  j["d"] = c.geometry.dim;
  j["L"] = c.geometry.circumference;
  j["tau1"] = c.sobolev.tau1;
  j["sigma"] = c.sobolev.sigma;
  j["n"] = c.n;
  j["Nb"] = c.Nb;
  j["tau2"] = c.tau2;
  j["weight"] = c.weight.describe();
  j["s"] = s.fock.s;
  return j;
}

json doubles(const std::vector<double>& v) {
  for (double x : v) fmt17(x);
  return json(v);
}

Artifact run_basis(const ExperimentConfig& c) {
  ModeBasis basis = make_basis(c);
  Artifact a;
  a.table.header = {"index", "k", "parity", "lambda", "s", "supnorm"};
  for (const Mode& m : basis.modes()) {
    a.table.rows.push_back({static_cast<long long>(m.index), join_k(m.k), std::string(parity_name(m.parity)), m.lambda,
                            m.s, m.supnorm});
  }
  return a;
}

Artifact run_spectrum(const ExperimentConfig& c) {
  Setup s = make_setup(c, true);
  const OperatorMatrix sq = interior_square(s.fock);
  const std::size_t count = std::min(c.count, sq.dim());
  EigenOptions opt;
  opt.seed = c.seed;
  const SpectrumResult r = spectrum(sq, count, opt);
  Artifact a;
  a.table.header = {"index", "eigenvalue", "residual"};
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    a.table.rows.push_back({static_cast<long long>(i), r.eigenvalues[i], r.residuals[i]});
  }
  a.doc["spec"] = spec_json(c, s);
  a.doc["eigenvalues"] = doubles(r.eigenvalues);
  a.doc["residuals"] = doubles(r.residuals);
  return a;
}

Artifact run_expectation(const ExperimentConfig& c) {
  Setup s = make_setup(c, false);
  const ConvergenceReport rep = convergence_report(s.basis);
  if (!rep.condition_sinv_converges) {
    throw ConditionVeto("sum s^-1 |xi|^2 diverges for d = " + std::to_string(c.geometry.dim) +
                        ", sigma = " + fmt17(c.sobolev.sigma) + ", weight " + c.weight.describe() +
                        "; ground-state expectations are not defined");
  }
  const TestFunction f = TestFunction::parse(c.function);
  const QuadratureSpec quad = c.quadrature();
  const Expectation e = expectation_ground(s.basis, s.fock, f, s.point, quad);
  const TailReport tail = tail_bound_check(s.basis, s.fock, f, s.point, 1, s.basis.size(), quad);
  Artifact a;
  a.table.header = {"n", "value_re", "value_im", "increment", "bound"};
  for (const TailRow& row : tail.rows) {
    a.table.rows.push_back({static_cast<long long>(row.n), row.value.real(), row.value.imag(), row.increment, row.bound});
  }
  a.doc["function"] = f.describe();
  a.doc["point"] = doubles(s.point);
  a.doc["value_re"] = e.value.real();
  a.doc["value_im"] = e.value.imag();
  a.doc["std_error"] = e.std_error;
  a.doc["method"] = e.method;
  a.doc["C"] = tail.C;
  a.doc["B"] = tail.B;
  a.doc["all_within"] = tail.all_within;
  a.doc["rows"] = table_json(a.table);
  return a;
}

Artifact run_translate(const ExperimentConfig& c) {
  Setup s = make_setup(c, false);
  if (!c.omega.empty() && c.omega.size() != static_cast<std::size_t>(c.n)) {
    throw DomainError("'omega' needs n = " + std::to_string(c.n) + " components");
  }
  const std::vector<double> omega = c.omega.empty() ? std::vector<double>(s.fock.s.size(), 1.0) : c.omega;
  Artifact a;
  a.table.header = {"t", "overlap", "closed_form"};
  for (double t : c.t_values) {
    double expo = 0.0;
    for (std::size_t i = 0; i < omega.size(); ++i) expo += s.fock.s[i] * t * t * omega[i] * omega[i] / (4.0 * c.tau2);
    a.table.rows.push_back({t, translate_overlap(s.fock, omega, t), std::exp(-expo)});
  }
  return a;
}

Artifact run_kernel(const ExperimentConfig& c) {
  Setup s = make_setup(c, true);
  const double L = c.geometry.circumference;
  auto at = [&](int j) {
    std::vector<double> p(static_cast<std::size_t>(c.geometry.dim), 0.0);
    p[0] = L * j / c.grid;
    return p;
  };
  Artifact a;
  a.table.header = {"m", "mprime", "re", "im"};
  for (int j = 0; j < c.grid; ++j) {
    for (int jp = 0; jp < c.grid; ++jp) {
      const KernelValue k = commutator_kernel(s.basis, s.fock, at(j), at(jp));
      a.table.rows.push_back({L * j / c.grid, L * jp / c.grid, k.matrix.real(), k.matrix.imag()});
    }
  }
  return a;
}

Connection load_connection(const ExperimentConfig& c) {
  if (c.connection.empty()) throw DomainError("'connection' is required for this subcommand");
  std::ifstream in(c.connection);
  if (!in) throw DomainError("cannot open connection file '" + c.connection + "'");
  Connection conn = Connection::parse(in);
  if (conn.dim() != c.geometry.dim) throw DomainError("connection file has d different from the config's d");
  if (std::abs(conn.circumference() - c.geometry.circumference) > 1e-12 * c.geometry.circumference) {
    throw DomainError("connection file has L different from the config's L");
  }
  return conn;
}

FlowSpec make_flow(const ExperimentConfig& c) {
  if (c.flow.size() != static_cast<std::size_t>(c.geometry.dim)) throw DomainError("'flow' needs d components");
  FlowSpec flow;
  flow.field = VectorField::constant(c.geometry.circumference, c.flow);
  flow.duration = c.duration.value_or(c.geometry.circumference);
  flow.start = c.start.empty() ? std::vector<double>(static_cast<std::size_t>(c.geometry.dim), 0.0) : c.start;
  if (flow.start.size() != static_cast<std::size_t>(c.geometry.dim)) throw DomainError("'start' needs d coordinates");
  return flow;
}

int transport_steps(const ExperimentConfig& c, const Connection& conn, const FlowSpec& flow) {
  const int minimum = min_transport_steps(conn, flow);
  if (c.steps == 0) return std::max(256, 16 * minimum);
  if (c.steps < minimum) {
    throw DomainError("steps = " + std::to_string(c.steps) + " is below the minimum " + std::to_string(minimum));
  }
  return c.steps;
}

Artifact run_holonomy(const ExperimentConfig& c) {
  const Connection conn = load_connection(c);
  const FlowSpec flow = make_flow(c);
  const int steps = transport_steps(c, conn, flow);
  const DenseMat U = holonomy_along_flow(conn, flow, steps);
  Artifact a;
  a.table.header = {"row", "col", "re", "im"};
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    for (Eigen::Index j = 0; j < U.cols(); ++j) {
      a.table.rows.push_back({static_cast<long long>(i), static_cast<long long>(j), U(i, j).real(), U(i, j).imag()});
    }
  }
  a.doc["group"] = conn.lie().name();
  a.doc["steps"] = steps;
  a.doc["unitarity_defect"] = unitarity_defect(U);
  a.doc["entries"] = table_json(a.table);
  return a;
}

Artifact run_wilson(const ExperimentConfig& c) {
  const Connection conn = load_connection(c);
  const FlowSpec flow = make_flow(c);
  const int steps = transport_steps(c, conn, flow);
  const std::complex<double> w = wilson_loop(conn, flow, steps);
  Artifact a;
  a.table.header = {"re", "im", "steps"};
  a.table.rows.push_back({w.real(), w.imag(), static_cast<long long>(steps)});
  return a;
}

Artifact run_fluctuate(const ExperimentConfig& c) {
  const ThetaChoice th = parse_theta(c.theta);
  if (th.kind != "field" && th.mode >= c.n) throw DomainError("'theta' mode index must be below n");
  if (c.effective_margin() >= c.Nb) {
    throw DomainError("interior margin " + std::to_string(c.effective_margin()) + " for theta '" + c.theta +
                      "' must be below Nb = " + std::to_string(c.Nb));
  }
  Setup s = make_setup(c, true);
  FluctuationSpec spec;
  if (th.kind == "position") spec.theta = theta_position(s.fock, th.mode);
  else if (th.kind == "dilation") spec.theta = theta_dilation(s.fock, th.mode);
  else if (th.kind == "function") spec.theta = theta_function(s.fock, th.mode, TestFunction::parse(th.function));
  else spec.theta = theta_field(s.basis, s.fock, s.point);
  spec.coupling = c.lambda;
  spec.symmetrize = true;
  const FluctSpectrum r = fluct_spectrum(spec, s.fock, c.count, c.effective_margin());
  Artifact a;
  a.table.header = {"index", "eigenvalue"};
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) a.table.rows.push_back({static_cast<long long>(i), r.eigenvalues[i]});
  a.doc["lambda"] = r.coupling;
  a.doc["eigenvalues"] = doubles(r.eigenvalues);
  a.doc["gap"] = r.gap;
  a.doc["hermiticity_defect"] = r.hermiticity_defect;
  return a;
}

Artifact run_dirac_total(const ExperimentConfig& c) {
  Setup s = make_setup(c, true);
  const std::size_t S = c.spatial_modes.size();
  if (s.fock.dim() * S > kMaxFockDim) throw CapacityError("dirac-total: Fock dimension times spatial modes too large");
  const OperatorMatrix B = assemble_B(s.fock);
  const OperatorMatrix gamma = grading(s.fock);
  const OperatorMatrix D = dirac_total(B, gamma, c.spatial_modes);
  const double anti = max_abs(anticommutator(kron(B.matrix(), identity(S)), kron(gamma.matrix(), identity(S))));
  std::vector<std::size_t> keep;
  for (std::size_t b : interior_states(s.fock, 1)) {
    for (std::size_t j = 0; j < S; ++j) keep.push_back(b * S + j);
  }
  const OperatorMatrix sq(compress(SparseMat(D.matrix() * D.matrix()), keep), Symmetry::hermitian);
  EigenOptions opt;
  opt.seed = c.seed;
  const SpectrumResult r = spectrum(sq, std::min(c.count, sq.dim()), opt);
  Artifact a;
  a.table.header = {"index", "eigenvalue", "residual"};
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    a.table.rows.push_back({static_cast<long long>(i), r.eigenvalues[i], r.residuals[i]});
  }
  a.doc["spatial_modes"] = c.spatial_modes;
  a.doc["grading_anticommutator"] = anti;
  a.doc["eigenvalues"] = doubles(r.eigenvalues);
  a.doc["residuals"] = doubles(r.residuals);
  return a;
}

Artifact run_convergence(const ExperimentConfig& c) {
  ModeBasis basis = make_basis(c);
  const ConvergenceReport rep = convergence_report(basis);
  Artifact a;
  a.table.header = {"index", "lambda", "s", "supnorm", "term_sinv", "term_sup", "partial_sinv", "partial_sup"};
  double ps = 0.0, pu = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    ps += rep.increments_sinv[i];
    pu += rep.increments_sup[i];
    const Mode& m = basis.mode(i);
    a.table.rows.push_back({static_cast<long long>(i), m.lambda, m.s, m.supnorm, rep.increments_sinv[i],
                            rep.increments_sup[i], ps, pu});
  }
  a.doc["sum_sinv_xi2"] = rep.sum_sinv_xi2;
  a.doc["sum_xi2"] = rep.sum_xi2;
  // An infinite tail means the sum diverges; JSON has no infinity, so null marks it.
  a.doc["tail_sinv_xi2"] = std::isfinite(rep.tail_sinv_xi2) ? json(rep.tail_sinv_xi2) : json(nullptr);
  a.doc["tail_xi2"] = std::isfinite(rep.tail_xi2) ? json(rep.tail_xi2) : json(nullptr);
  a.doc["weight_exponent"] = rep.weight_exponent;
  a.doc["decay_exponent"] = rep.decay_exponent;
  a.doc["condition_sinv_converges"] = rep.condition_sinv_converges;
  a.doc["condition_sup_converges"] = rep.condition_sup_converges;
  a.doc["modes"] = table_json(a.table);
  return a;
}

std::string default_format(const std::string& sub) {
  return sub == "spectrum" || sub == "fluctuate" ? "json" : "csv";
}

void write_atomic(const std::string& path, const std::string& bytes) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot move output into place at '" + path + "'");
  }
}

}  // namespace

std::string render_experiment(const ExperimentConfig& config, const std::string& subcommand) {
  static const std::map<std::string, std::function<Artifact(const ExperimentConfig&)>> runners{
      {"basis", run_basis},         {"spectrum", run_spectrum},   {"expectation", run_expectation},
      {"translate", run_translate}, {"kernel", run_kernel},       {"holonomy", run_holonomy},
      {"wilson", run_wilson},       {"fluctuate", run_fluctuate}, {"dirac-total", run_dirac_total},
      {"convergence", run_convergence}};
  auto it = runners.find(subcommand);
  if (it == runners.end()) throw DomainError("unknown subcommand '" + subcommand + "'");
  const Artifact a = it->second(config);
  const std::string format = config.format.value_or(default_format(subcommand));
  if (format == "csv") return render_csv(a.table);
  json doc = a.doc.is_null() ? table_json(a.table) : a.doc;
  check_finite(doc);
  return doc.dump(2) + "\n";
}

int run_experiment(const ExperimentConfig& config, const std::string& subcommand, std::ostream& err,
                   std::ostream& stdout_sink) {
  std::string bytes;
  try {
    bytes = render_experiment(config, subcommand);
  } catch (const ConditionVeto& e) {
    err << "bdlab " << subcommand << ": vetoed: " << e.what() << '\n';
    return exit_veto;
  } catch (const NumericalFailure& e) {
    err << "bdlab " << subcommand << ": numerical failure: " << e.what() << '\n';
    return exit_numerical;
  } catch (const ConvergenceError& e) {
    err << "bdlab " << subcommand << ": numerical failure: " << e.what() << '\n';
    return exit_numerical;
  } catch (const DomainError& e) {
    err << "bdlab " << subcommand << ": invalid configuration: " << e.what() << '\n';
    return exit_config;
  } catch (const IndexError& e) {
    err << "bdlab " << subcommand << ": invalid configuration: " << e.what() << '\n';
    return exit_config;
  } catch (const CapacityError& e) {
    err << "bdlab " << subcommand << ": invalid configuration: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    err << "bdlab " << subcommand << ": numerical failure: " << e.what() << '\n';
    return exit_numerical;
  }
  try {
    if (config.out == "-") {
      stdout_sink << bytes;
      stdout_sink.flush();
    } else {
      write_atomic(config.out, bytes);
    }
  } catch (const std::exception& e) {
    err << "bdlab " << subcommand << ": output: " << e.what() << '\n';
    return exit_config;
  }
  return exit_ok;
}

}  // namespace bdlab
