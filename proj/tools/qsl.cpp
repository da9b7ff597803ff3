// Command-line front end: run a scenario file, or the cross-validation suite.

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "qsl/app/config.hpp"
#include "qsl/app/scenario.hpp"
#include "qsl/app/verify.hpp"

namespace {

enum Exit { kPass = 0, kFailure = 1, kConfigError = 2, kNumericFailure = 3 };

int run(const std::string& config_path, const std::optional<std::string>& out) {
  using namespace qsl::app;
  ScenarioConfig config;
  try {
    config = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return kConfigError;
  }
  const std::filesystem::path dir =
      out ? std::filesystem::path(*out)
          : !config.output_dir.empty() ? config.output_dir : std::filesystem::path("out") / config.name;
  try {
    const auto result = run_scenario(config);
    write_outputs(result, dir);
    write_summary(result, std::cout);
    std::cout << "wrote " << (dir / "series.csv").string() << " and " << (dir / "summary.txt").string()
              << '\n';
    for (const auto& r : result.reports) {
      try {
        qsl::check_dominance(r);
      } catch (const qsl::DominanceViolation& e) {
        std::cerr << "error: " << e.what() << '\n';
      }
    }
    return result.passed() ? kPass : kNumericFailure;
  } catch (const ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return kConfigError;
  } catch (const qsl::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}

int verify(int grid_n) {
  using namespace qsl::app;
  const auto results = verify_all({grid_n}, [](const CheckResult& r) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << std::endl;
  });
  std::size_t failed = 0;
  for (const auto& r : results) failed += !r.passed;
  if (failed == 0) {
    std::cout << "all " << results.size() << " checks passed\n";
    return kPass;
  }
  std::cout << failed << " of " << results.size() << " checks failed:";
  for (const auto& r : results)
    if (!r.passed) std::cout << ' ' << r.name;
  std::cout << '\n';
  return kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-space speed limits for harmonic-trap quenches"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario file and write series.csv and summary.txt");
  run_cmd->add_option("config", config_path, "Scenario file (YAML)")->required();
  run_cmd->add_option("--out", out, "Output directory");

  int grid_n = 512;
  auto* verify_cmd = app.add_subcommand("verify-all", "Run the oracle/grid cross-validation suite");
  verify_cmd->add_option("--grid-n", grid_n, "Grid nodes per axis")->check(CLI::Range(16, 8192));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  if (*run_cmd) return run(config_path, out);
  return verify(grid_n);
}
