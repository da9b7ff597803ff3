#include "qsl/app/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace qsl::app {

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::QuenchClassical: return "quench-classical";
    case ScenarioKind::QuenchQuantum: return "quench-quantum";
    case ScenarioKind::Stationary: return "stationary";
    case ScenarioKind::CustomOmega: return "custom-omega";
  }
  return "?";
}

std::string_view to_string(StateKind kind) {
  switch (kind) {
    case StateKind::HoEigenstate: return "ho-eigenstate";
    case StateKind::Gaussian: return "gaussian";
    case StateKind::ClassicalGaussian: return "classical-gaussian";
  }
  return "?";
}

namespace {

std::string with_line(const std::string& what, int line) {
  return line > 0 ? "line " + std::to_string(line) + ": " + what : what;
}

}  // namespace

ConfigError::ConfigError(const std::string& what, int line)
    : std::runtime_error(with_line(what, line)), line_(line) {}

double ScenarioConfig::post_quench_omega() const {
  switch (scenario) {
    case ScenarioKind::QuenchClassical:
    case ScenarioKind::QuenchQuantum: return 0.0;
    case ScenarioKind::Stationary: return units.omega0;
    case ScenarioKind::CustomOmega: return omega_final;
  }
  return 0.0;
}

GaussianSpec<double> ScenarioConfig::gaussian() const {
  auto spec = matched_gaussian(units);
  if (sigma_q) spec.sigma_q = *sigma_q;
  if (sigma_p) spec.sigma_p = *sigma_p;
  return spec;
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg, 0); };
  try {
    units.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (grid_n < 16) fail("grid.n must be at least 16");
  if (!(halfwidth_sigmas > 0)) fail("grid.halfwidth_sigmas must be positive");
  if (!(t_max > 0) || !std::isfinite(t_max)) fail("time.t_max must be positive");
  if (steps < kMinErmakovSteps) fail("time.steps must be at least 100");
  if (!(omega_final >= 0) || !std::isfinite(omega_final))
    fail("hamiltonian.omega_final must be finite and >= 0");
  if (bounds.empty()) fail("bounds: at least one bound is required");

  if (scenario == ScenarioKind::QuenchClassical && state != StateKind::ClassicalGaussian)
    fail("quench-classical needs state.kind = classical-gaussian");
  if (scenario == ScenarioKind::QuenchQuantum && state == StateKind::ClassicalGaussian)
    fail("quench-quantum needs a quantum state (ho-eigenstate or gaussian)");

  if (state == StateKind::HoEigenstate) {
    if (eigenstate_n < 0 || eigenstate_n > kMaxEigenstate)
      fail("state.n must lie in [0, 12]");
    const bool classical_bound = std::any_of(bounds.begin(), bounds.end(), [](BoundKind k) {
      return k == BoundKind::Csl || k == BoundKind::CslTimeAverage;
    });
    if (eigenstate_n > 0 && classical_bound)
      fail("bounds: csl needs a non-negative Wigner function; ho-eigenstate n > 0 has none");
    return;
  }
  const auto spec = gaussian();
  if (!(spec.sigma_q > 0) || !(spec.sigma_p > 0)) fail("state widths must be positive");
  const double matched_p = units.mass * units.omega0 * spec.sigma_q;
  if (std::abs(spec.sigma_p - matched_p) > 1e-9 * matched_p) {
    std::ostringstream msg;
    msg << "state: sigma_p = " << spec.sigma_p << " differs from m*omega0*sigma_q = " << matched_p
        << "; only trap-matched widths evolve exactly under the scaling map";
    fail(msg.str());
  }
  const bool quantum_bound = std::any_of(bounds.begin(), bounds.end(), [](BoundKind k) {
    return k == BoundKind::Qsl || k == BoundKind::Ssl;
  });
  if (state == StateKind::Gaussian || quantum_bound) {
    const double product = spec.sigma_q * spec.sigma_p;
    if (std::abs(product - units.hbar / 2) > 1e-9 * units.hbar)
      fail("state: qsl/ssl need a pure state, sigma_q*sigma_p = hbar/2");
  }
}

ScenarioConfig default_config(ScenarioKind kind) {
  ScenarioConfig c;
  c.scenario = kind;
  c.name = std::string(to_string(kind));
  switch (kind) {
    case ScenarioKind::QuenchClassical:
      c.state = StateKind::ClassicalGaussian;
      c.bounds = {BoundKind::Csl, BoundKind::CslTimeAverage};
      break;
    case ScenarioKind::QuenchQuantum:
      c.state = StateKind::HoEigenstate;
      c.bounds = {BoundKind::Qsl, BoundKind::Ssl};
      break;
    case ScenarioKind::Stationary:
    case ScenarioKind::CustomOmega:
      c.state = StateKind::HoEigenstate;
      c.bounds = {BoundKind::Qsl, BoundKind::Ssl};
      break;
  }
  return c;
}

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

template <typename T>
T read(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) throw ConfigError(key + ": expected a scalar value", line_of(n));
  try {
    return n.as<T>();
  } catch (const YAML::BadConversion&) {
    throw ConfigError(key + ": cannot parse '" + n.Scalar() + "'", line_of(n));
  }
}

double read_positive(const YAML::Node& n, const std::string& key) {
  const double v = read<double>(n, key);
  if (!(v > 0) || !std::isfinite(v)) throw ConfigError(key + " must be positive", line_of(n));
  return v;
}

// Visits every key of a mapping section, rejecting unknown and repeated keys.
template <typename Visit>
void for_each_key(const YAML::Node& section, const std::string& name,
                  const std::set<std::string>& allowed, Visit&& visit) {
  if (!section.IsMap()) throw ConfigError(name + ": expected a mapping", line_of(section));
  std::set<std::string> seen;
  for (const auto& kv : section) {
    const std::string key = kv.first.as<std::string>();
    const std::string full = name.empty() ? key : name + "." + key;
    if (!allowed.count(key)) throw ConfigError("unknown key '" + full + "'", line_of(kv.first));
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + full + "'", line_of(kv.first));
    visit(key, full, kv.second);
  }
}

ScenarioKind parse_scenario(const YAML::Node& n) {
  const auto s = read<std::string>(n, "scenario");
  for (auto k : {ScenarioKind::QuenchClassical, ScenarioKind::QuenchQuantum,
                 ScenarioKind::Stationary, ScenarioKind::CustomOmega})
    if (s == to_string(k)) return k;
  throw ConfigError("scenario: unknown value '" + s + "'", line_of(n));
}

StateKind parse_state_kind(const YAML::Node& n) {
  const auto s = read<std::string>(n, "state.kind");
  for (auto k : {StateKind::HoEigenstate, StateKind::Gaussian, StateKind::ClassicalGaussian})
    if (s == to_string(k)) return k;
  throw ConfigError("state.kind: unknown value '" + s + "'", line_of(n));
}

BoundKind parse_bound(const YAML::Node& n) {
  const auto s = read<std::string>(n, "bounds");
  for (auto k : {BoundKind::Qsl, BoundKind::Ssl, BoundKind::Csl, BoundKind::CslTimeAverage})
    if (s == to_string(k)) return k;
  throw ConfigError("bounds: unknown bound '" + s + "'", line_of(n));
}

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line + 1);
  }
  if (!root.IsMap()) throw ConfigError("expected a mapping at the top level", line_of(root));
  const YAML::Node kind = root["scenario"];
  if (!kind) throw ConfigError("missing required key 'scenario'", 1);
  ScenarioConfig c = default_config(parse_scenario(kind));

  bool has_omega_final = false;
  int hamiltonian_line = 0, sigma_line = 0, n_line = 0;
  for_each_key(root, "",
               {"scenario", "name", "units", "grid", "state", "hamiltonian", "time", "bounds", "output"},
               [&](const std::string& key, const std::string&, const YAML::Node& v) {
    if (key == "name") {
      c.name = read<std::string>(v, "name");
      if (c.name.empty()) throw ConfigError("name must not be empty", line_of(v));
    } else if (key == "units") {
      for_each_key(v, "units", {"hbar", "mass", "omega0"},
                   [&](const std::string& k, const std::string& full, const YAML::Node& x) {
        const double val = read_positive(x, full);
        (k == "hbar" ? c.units.hbar : k == "mass" ? c.units.mass : c.units.omega0) = val;
      });
    } else if (key == "grid") {
      for_each_key(v, "grid", {"n", "halfwidth_sigmas"},
                   [&](const std::string& k, const std::string& full, const YAML::Node& x) {
        if (k == "n") {
          c.grid_n = read<int>(x, full);
          if (c.grid_n < 16) throw ConfigError("grid.n must be at least 16", line_of(x));
        } else {
          c.halfwidth_sigmas = read_positive(x, full);
        }
      });
    } else if (key == "state") {
      for_each_key(v, "state", {"kind", "n", "sigma_q", "sigma_p"},
                   [&](const std::string& k, const std::string& full, const YAML::Node& x) {
        if (k == "kind") {
          c.state = parse_state_kind(x);
        } else if (k == "n") {
          c.eigenstate_n = read<int>(x, full);
          n_line = line_of(x);
          if (c.eigenstate_n < 0 || c.eigenstate_n > kMaxEigenstate)
            throw ConfigError("state.n must lie in [0, 12]", n_line);
        } else {
          (k == "sigma_q" ? c.sigma_q : c.sigma_p) = read_positive(x, full);
          sigma_line = line_of(x);
        }
      });
    } else if (key == "hamiltonian") {
      hamiltonian_line = line_of(v);
      for_each_key(v, "hamiltonian", {"omega_final"},
                   [&](const std::string&, const std::string& full, const YAML::Node& x) {
        c.omega_final = read<double>(x, full);
        if (!(c.omega_final >= 0) || !std::isfinite(c.omega_final))
          throw ConfigError("hamiltonian.omega_final must be finite and >= 0", line_of(x));
        has_omega_final = true;
      });
    } else if (key == "time") {
      for_each_key(v, "time", {"t_max", "steps"},
                   [&](const std::string& k, const std::string& full, const YAML::Node& x) {
        if (k == "t_max") {
          c.t_max = read_positive(x, full);
        } else {
          c.steps = read<int>(x, full);
          if (c.steps < kMinErmakovSteps) throw ConfigError("time.steps must be at least 100", line_of(x));
        }
      });
    } else if (key == "bounds") {
      c.bounds.clear();
      auto add = [&](const YAML::Node& x) {
        const BoundKind b = parse_bound(x);
        if (std::find(c.bounds.begin(), c.bounds.end(), b) != c.bounds.end())
          throw ConfigError("bounds: '" + std::string(to_string(b)) + "' listed twice", line_of(x));
        c.bounds.push_back(b);
      };
      if (v.IsSequence()) {
        for (const auto& x : v) add(x);
      } else {
        add(v);
      }
      if (c.bounds.empty()) throw ConfigError("bounds: at least one bound is required", line_of(v));
    } else if (key == "output") {
      for_each_key(v, "output", {"dir"},
                   [&](const std::string&, const std::string& full, const YAML::Node& x) {
        c.output_dir = read<std::string>(x, full);
      });
    }
  });

  if (c.scenario == ScenarioKind::CustomOmega && !has_omega_final)
    throw ConfigError("custom-omega needs hamiltonian.omega_final", line_of(kind));
  if (c.scenario != ScenarioKind::CustomOmega && hamiltonian_line > 0)
    throw ConfigError("hamiltonian section is only valid for custom-omega", hamiltonian_line);
  if (c.state == StateKind::HoEigenstate && sigma_line > 0)
    throw ConfigError("ho-eigenstate takes no widths", sigma_line);
  if (c.state != StateKind::HoEigenstate && n_line > 0)
    throw ConfigError("state.n is only valid for ho-eigenstate", n_line);
  try {
    c.validate();
  } catch (const ConfigError& e) {
    if (sigma_line > 0 && std::string_view(e.what()).starts_with("state"))
      throw ConfigError(e.what(), sigma_line);
    throw;
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string(), 0);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace qsl::app
