#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "bdlab/experiment.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> modes, cutoff, tau1, tau2, sigma, mass, seed, quad, out, format;

  std::vector<std::pair<std::string, std::string>> overrides() const {
    std::vector<std::pair<std::string, std::string>> o;
    auto add = [&](const char* key, const std::optional<std::string>& v) {
      if (v) o.emplace_back(key, *v);
    };
    add("n", modes);
    add("Nb", cutoff);
    add("tau1", tau1);
    add("tau2", tau2);
    add("sigma", sigma);
    if (mass) o.emplace_back("weight", "massive:" + *mass);
    add("seed", seed);
    add("quad", quad);
    add("out", out);
    add("format", format);
    return o;
  }
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "flat key = value config file");
  sub->add_option("--modes", f.modes, "number of modes n");
  sub->add_option("--boson-cutoff", f.cutoff, "bosonic levels per mode Nb");
  sub->add_option("--tau1", f.tau1, "Sobolev scale");
  sub->add_option("--tau2", f.tau2, "oscillator scale");
  sub->add_option("--sigma", f.sigma, "Sobolev exponent");
  sub->add_option("--mass", f.mass, "massive weight rule with this mass");
  sub->add_option("--seed", f.seed, "RNG seed");
  sub->add_option("--quad", f.quad, "gh:<order> or mc:<samples>");
  sub->add_option("--out", f.out, "output path, - for standard output");
  sub->add_option("--format", f.format, "csv or json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bdlab: truncated Bott-Dirac and gauge-field experiments"};
  app.require_subcommand(1);
  Flags flags;
  const std::map<std::string, std::string> about{
      {"basis", "Laplace eigenmodes, weights and sup-norms (csv)"},
      {"spectrum", "lowest eigenvalues of B^2 on interior states (json)"},
      {"expectation", "ground-state expectation of f with per-mode increments and tail bounds (csv)"},
      {"translate", "overlap of the ground state with its translate along omega (csv)"},
      {"kernel", "commutator kernel on a grid along the first axis (csv)"},
      {"holonomy", "parallel transport matrix along a flow (csv)"},
      {"wilson", "normalized trace of the holonomy (csv)"},
      {"fluctuate", "spectrum of the fluctuated operator (json)"},
      {"dirac-total", "lowest eigenvalues of the total Dirac square (csv)"},
      {"convergence", "per-mode convergence terms and partial sums (csv)"}};
  for (const auto& name : bdlab::subcommands()) {
    const auto it = about.find(name);
    add_flags(app.add_subcommand(name, it == about.end() ? "" : it->second), flags);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : bdlab::exit_config;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  std::string text;
  if (!flags.config.empty()) {
    std::ifstream in(flags.config, std::ios::binary);
    if (!in) {
      std::cerr << "bdlab: cannot read config '" << flags.config << "'\n";
      return bdlab::exit_config;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }

  const bdlab::ConfigResult parsed = bdlab::parse_config(text, flags.overrides());
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) std::cerr << "bdlab: " << (flags.config.empty() ? "" : flags.config + " ") << e.describe() << '\n';
    return bdlab::exit_config;
  }
  return bdlab::run_experiment(*parsed.config, sub, std::cerr, std::cout);
}
