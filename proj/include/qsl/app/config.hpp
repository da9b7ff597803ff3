#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qsl/bounds.hpp"
#include "qsl/dynamics.hpp"
#include "qsl/states.hpp"

namespace qsl::app {

enum class ScenarioKind { QuenchClassical, QuenchQuantum, Stationary, CustomOmega };
enum class StateKind { HoEigenstate, Gaussian, ClassicalGaussian };

std::string_view to_string(ScenarioKind kind);
std::string_view to_string(StateKind kind);

/// Malformed or inconsistent configuration; line is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line);
  int line() const { return line_; }

 private:
  int line_;
};

struct ScenarioConfig {
  std::string name = "scenario";
  ScenarioKind scenario = ScenarioKind::QuenchClassical;
  UnitsSpec<double> units;
  int grid_n = 512;
  double halfwidth_sigmas = 8;
  StateKind state = StateKind::ClassicalGaussian;
  int eigenstate_n = 0;
  // Default to the matched widths of the omega0 trap.
  std::optional<double> sigma_q, sigma_p;
  double omega_final = 0;  ///< custom-omega only
  double t_max = 5;        ///< in units of 1/omega0
  int steps = 500;
  std::vector<BoundKind> bounds;
  std::filesystem::path output_dir;

  /// Post-quench trap frequency acting for t > 0.
  double post_quench_omega() const;
  GaussianSpec<double> gaussian() const;
  void validate() const;
};

ScenarioConfig default_config(ScenarioKind kind);

/// Parses a YAML scenario description. Unknown keys are errors.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace qsl::app
