#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "bdlab/experiment.hpp"
#include "bdlab/rng.hpp"

using namespace bdlab;

namespace {

const char* kMinimal =
    "d = 1\n"
    "n = 2\n"
    "Nb = 4\n"
    "tau1 = 1\n"
    "sigma = 1\n"
    "tau2 = 1\n"
    "weight = massive:1\n"
    "seed = 42\n";

// One accepted value per key, for fixtures that only care about structure.
const std::map<std::string, std::string>& sample_values() {
  static const std::map<std::string, std::string> v{
      {"d", "1"},          {"L", "6.5"},         {"tau1", "1"},          {"sigma", "1"},
      {"n", "2"},          {"Nb", "4"},          {"tau2", "1"},          {"weight", "massive:1"},
      {"zero_mode", "true"}, {"quad", "gh:20"},  {"seed", "7"},          {"out", "-"},
      {"format", "csv"},   {"count", "3"},       {"function", "sin:1"},  {"point", "0.5"},
      {"omega", "1, 1"},   {"t", "1, 0.5"},      {"grid", "4"},          {"connection", "x.conn"},
      {"flow", "1"},       {"duration", "2"},    {"start", "0"},         {"steps", "10"},
      {"lambda", "0.1"},   {"theta", "position:0"}, {"margin", "2"},     {"spatial_modes", "0,1"}};
  return v;
}

ExperimentConfig parse_ok(const std::string& text, const std::vector<std::pair<std::string, std::string>>& ov = {}) {
  const auto r = parse_config(text, ov);
  for (const auto& e : r.errors) INFO(e.describe());
  REQUIRE(r.ok());
  return *r.config;
}

bool mentions(const ConfigResult& r, const std::string& key, int line) {
  return std::any_of(r.errors.begin(), r.errors.end(),
                     [&](const ConfigError& e) { return e.key == key && e.line == line; });
}

}  // namespace

TEST_CASE("minimal config parses into the documented fields") {
  const auto c = parse_ok(kMinimal);
  CHECK(c.geometry.dim == 1);
  CHECK(c.n == 2);
  CHECK(c.Nb == 4);
  CHECK(c.sobolev.tau1 == 1.0);
  CHECK(c.sobolev.sigma == 1.0);
  CHECK(c.tau2 == 1.0);
  CHECK(c.weight.kind == WeightRule::Kind::massive);
  CHECK(c.weight.mass == 1.0);
  CHECK(c.seed == 42);
  CHECK(c.out == "-");
  CHECK(!c.format);
}

TEST_CASE("every sample value is accepted, so fixtures below isolate one fault") {
  REQUIRE(sample_values().size() == config_keys().size());
  for (const auto& key : config_keys()) {
    INFO(key);
    REQUIRE(sample_values().count(key) == 1);
    CHECK(parse_config(key + " = " + sample_values().at(key) + "\n").ok());
  }
}

TEST_CASE("constraint, type and unknown-key errors name the key and line") {
  auto r = parse_config("d = 1\nsigma = -1\n");
  CHECK(!r.ok());
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].key == "sigma");
  CHECK(r.errors[0].line == 2);
  CHECK(r.errors[0].describe().find("line 2") != std::string::npos);

  r = parse_config("n = two\n");
  CHECK(mentions(r, "n", 1));
  r = parse_config("\n\n# comment\ncolour = blue\n");
  CHECK(mentions(r, "colour", 4));
  r = parse_config("d = 4\n");
  CHECK(mentions(r, "d", 1));
  r = parse_config("Nb = 1\n");
  CHECK(mentions(r, "Nb", 1));
  r = parse_config("weight = heavy:2\n");
  CHECK(mentions(r, "weight", 1));
  r = parse_config("quad = gh:1\n");
  CHECK(mentions(r, "quad", 1));
  r = parse_config("format = xml\n");
  CHECK(mentions(r, "format", 1));
  r = parse_config("L = nan\n");
  CHECK(mentions(r, "L", 1));
  r = parse_config("just text\n");
  CHECK(!r.ok());
  CHECK(r.errors[0].line == 1);
  // all errors are collected, not only the first
  r = parse_config("sigma = 0\ntau2 = -3\nfoo = 1\n");
  CHECK(r.errors.size() == 3);
}

TEST_CASE("duplicate keys report both lines for every key and placement") {
  for (const auto& key : config_keys()) {
    const std::string line = key + " = " + sample_values().at(key) + "\n";
    for (int first = 1; first <= 3; ++first) {
      for (int second = first + 1; second <= 5; ++second) {
        std::string text;
        for (int l = 1; l <= 5; ++l) text += (l == first || l == second) ? line : "# filler\n";
        const auto r = parse_config(text);
        INFO(key << " lines " << first << ", " << second);
        REQUIRE(r.errors.size() == 1);
        CHECK(r.errors[0].key == key);
        CHECK(r.errors[0].line == second);
        const std::string msg = r.errors[0].message;
        CHECK(msg.find("line " + std::to_string(first)) != std::string::npos);
        CHECK(msg.find("line " + std::to_string(second)) != std::string::npos);
      }
    }
  }
}

TEST_CASE("parsing is total on arbitrary bytes") {
  const std::string alphabet = "=#\n \t:,.-+eE0123456789abcdnNLgumhsx\r\x01\xff";
  for (std::uint64_t trial = 0; trial < 3000; ++trial) {
    std::string text;
    const auto len = static_cast<std::size_t>(counter_uniform(11, trial, 0) * 80);
    for (std::size_t k = 0; k < len; ++k) {
      text += alphabet[static_cast<std::size_t>(counter_uniform(11, trial, k + 1) * alphabet.size())];
    }
    CHECK_NOTHROW(parse_config(text));
  }
  // key/value shapes with random values for real keys
  for (std::uint64_t trial = 0; trial < 2000; ++trial) {
    const auto& keys = config_keys();
    const auto& key = keys[static_cast<std::size_t>(counter_uniform(12, trial, 0) * keys.size())];
    std::string value;
    for (int k = 0; k < 6; ++k) value += alphabet[static_cast<std::size_t>(counter_uniform(12, trial, k + 1) * 20)];
    CHECK_NOTHROW(parse_config(key + " = " + value + "\n"));
  }
}

TEST_CASE("overrides replace file values and report as command line") {
  const auto c = parse_ok(kMinimal, {{"n", "3"}, {"Nb", "5"}, {"weight", "massive:2"}});
  CHECK(c.n == 3);
  CHECK(c.Nb == 5);
  CHECK(c.weight.mass == 2.0);
  const auto r = parse_config(kMinimal, {{"sigma", "-1"}});
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].line == 0);
  CHECK(r.errors[0].describe().find("command line") != std::string::npos);
}

TEST_CASE("Monte Carlo quadrature needs an explicit seed") {
  CHECK(!parse_config("quad = mc:1000\n").ok());
  CHECK(parse_config("quad = mc:1000\nseed = 5\n").ok());
}

TEST_CASE("spectrum of the single-mode reference matches the occupation formula") {
  auto c = parse_ok("d = 1\nn = 1\nNb = 4\ntau1 = 1\nsigma = 1\ntau2 = 1\nweight = massive:1\nseed = 42\n");
  c.count = 5;
  const auto doc = nlohmann::json::parse(render_experiment(c, "spectrum"));
  // zero mode of the massive(1) rule has s = sqrt(0 + 1) = 1; levels 0..2 are interior
  std::vector<double> oracle;
  for (int k = 0; k <= 2; ++k) {
    for (int f = 0; f <= 1; ++f) oracle.push_back(1.0 * (2 * k + 2 * f));
  }
  std::sort(oracle.begin(), oracle.end());
  const auto ev = doc.at("eigenvalues").get<std::vector<double>>();
  REQUIRE(ev.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(ev[i] - oracle[i]) < 1e-12);
  CHECK(doc.at("residuals").size() == 5);
  CHECK(doc.at("spec").at("n") == 1);
}

TEST_CASE("every subcommand renders identical bytes on rerun") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "bdlab_test_cli";
  fs::create_directories(dir);
  const fs::path conn = dir / "u1.conn";
  {
    std::ofstream o(conn);
    o << "group = U1\nd = 1\nL = 6.283185307179586\nterm 0 0 0 cos 0.25\nterm 0 0 1 sin 0.1\n";
  }
  auto c = parse_ok(kMinimal, {{"connection", conn.string()}, {"grid", "6"}, {"count", "6"}});
  c.margin = 1;
  c.theta = "position:0";
  for (const auto& sub : subcommands()) {
    INFO(sub);
    const std::string a = render_experiment(c, sub);
    const std::string b = render_experiment(c, sub);
    CHECK(!a.empty());
    CHECK(a == b);
    CHECK(a.find('\r') == std::string::npos);
    CHECK(a.back() == '\n');
  }
}

TEST_CASE("CSV artifacts carry a header and 17 significant digits") {
  auto c = parse_ok(kMinimal);
  const std::string csv = render_experiment(c, "basis");
  CHECK(csv.rfind("index,k,parity,lambda,s,supnorm\n", 0) == 0);
  // sqrt2 weight of the k = 1 modes printed with %.17g
  CHECK(csv.find("1.4142135623730951") != std::string::npos);
  c.format = "json";
  CHECK(nlohmann::json::parse(render_experiment(c, "basis")).is_array());
}

TEST_CASE("exit codes: ok, config error, veto") {
  std::ostringstream err, out;
  auto c = parse_ok(kMinimal);
  CHECK(run_experiment(c, "basis", err, out) == exit_ok);
  CHECK(err.str().empty());
  CHECK(out.str().rfind("index,", 0) == 0);

  // massive weights in d = 3: sum s^-1 |xi|^2 ~ sum_k k^2 k^-1 k^-4sigma converges only for sigma > 1/2
  auto veto = parse_ok("d = 3\nn = 20\nsigma = 0.2\nseed = 1\n");
  err.str("");
  CHECK(run_experiment(veto, "expectation", err, out) == exit_veto);
  CHECK(err.str().find("vetoed") != std::string::npos);
  auto fine = parse_ok("d = 3\nn = 20\nsigma = 0.75\nseed = 1\n");
  out.str("");
  CHECK(run_experiment(fine, "expectation", err, out) == exit_ok);

  auto bad = parse_ok(kMinimal, {{"theta", "dilation:0"}});
  CHECK(run_experiment(bad, "fluctuate", err, out) == exit_config);
  CHECK(run_experiment(c, "holonomy", err, out) == exit_config);  // no connection file
  CHECK(run_experiment(c, "no-such-thing", err, out) == exit_config);
}

TEST_CASE("file output is written whole and leaves no temporary behind") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "bdlab_test_cli_out";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto c = parse_ok(kMinimal, {{"out", (dir / "basis.csv").string()}});
  std::ostringstream err, out;
  REQUIRE(run_experiment(c, "basis", err, out) == exit_ok);
  CHECK(out.str().empty());
  std::ifstream in(dir / "basis.csv", std::ios::binary);
  std::stringstream got;
  got << in.rdbuf();
  CHECK(got.str() == render_experiment(c, "basis"));
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    (void)e;
    ++files;
  }
  CHECK(files == 1);

  c.out = (dir / "missing" / "x.csv").string();
  CHECK(run_experiment(c, "basis", err, out) == exit_config);
  CHECK(!fs::exists(dir / "missing"));
}
