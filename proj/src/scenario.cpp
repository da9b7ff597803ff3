#include "qsl/app/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "qsl/metrics.hpp"

namespace qsl::app {

namespace {

using Field = PhaseField<double>;
using Callable = std::function<double(double, double)>;

bool has(const ScenarioConfig& c, BoundKind k) {
  return std::find(c.bounds.begin(), c.bounds.end(), k) != c.bounds.end();
}

void require_inside(const Field& f, double t, const char* what) {
  const double ratio = boundary_ratio(f);
  if (ratio > kBoundaryTolerance) {
    std::ostringstream msg;
    msg << what << " at t = " << t << " reaches the grid boundary (edge/peak = " << ratio
        << " > 1e-10); increase grid.halfwidth_sigmas";
    throw NumericError(msg.str());
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

bool ScenarioResult::passed() const {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed(); });
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  const auto& u = config.units;
  const double omega = config.post_quench_omega();

  ScenarioResult result;
  result.config = config;
  result.trajectory = solve_ermakov<double>([omega](double) { return omega; }, u.omega0,
                                            config.t_max / u.omega0, config.steps);
  const auto& traj = result.trajectory;

  const auto spec = config.gaussian();
  const bool eigenstate = config.state == StateKind::HoEigenstate;
  Callable wigner;
  if (eigenstate)
    wigner = HoWigner<double>{config.eigenstate_n, u};
  else
    wigner = GaussianWigner<double>{spec};
  Callable density;
  if (config.state == StateKind::ClassicalGaussian)
    density = ClassicalGaussian<double>{spec};
  else
    density = SquaredWigner<double, Callable>{wigner, u.hbar};

  // Excited states spread over about sqrt(2n + 1) oscillator lengths.
  const double widen = eigenstate ? std::sqrt(1.0 + config.eigenstate_n / 2.0) : 1.0;
  const double k = config.halfwidth_sigmas;
  const Eigen::Index n = config.grid_n;
  const auto g0 = PhaseGrid<double>::centered(k * widen * spec.sigma_q, k * widen * spec.sigma_p,
                                              n, n, u.hbar, u.mass);
  const auto gt = quench_grid(u, widen * spec.sigma_q, widen * spec.sigma_p, traj, n, k);
  const auto h0 = quadratic_hamiltonian(u, omega, g0);
  const std::span<const double> times(traj.times);

  if (has(config, BoundKind::Qsl) || has(config, BoundKind::Ssl)) {
    const Field w0 = sample(g0, wigner);
    require_inside(w0, 0.0, "initial Wigner function");
    const auto series = overlap_series(times, [&](std::size_t i) {
      Field w = evolve_quench(wigner, traj, i, gt);
      require_inside(w, traj.times[i], "Wigner function");
      return w;
    }, OverlapMeasure::Fidelity, u);
    for (BoundKind kind : config.bounds) {
      if (kind == BoundKind::Qsl)
        result.reports.push_back(verify_rate_dominance(config.name, kind, series,
                                                       v_qsl(h0, w0, MoyalOrder::HbarSquared, u)));
      else if (kind == BoundKind::Ssl)
        result.reports.push_back(verify_rate_dominance(config.name, kind, series, v_ssl(h0, w0, u)));
    }
  }

  if (has(config, BoundKind::Csl) || has(config, BoundKind::CslTimeAverage)) {
    const Field rho0 = sample(g0, density);
    require_inside(rho0, 0.0, "initial density");
    const bool averaged = has(config, BoundKind::CslTimeAverage);
    const PoissonGenerator<double> ht(quadratic_hamiltonian(u, omega, gt));
    std::vector<double> norms;
    const auto series = overlap_series(times, [&](std::size_t i) {
      Field rho = evolve_quench(density, traj, i, gt);
      require_inside(rho, traj.times[i], "density");
      if (averaged) norms.push_back(liouvillian_norm(ht, rho));
      return rho;
    }, OverlapMeasure::Bhattacharyya, u);
    for (BoundKind kind : config.bounds) {
      if (kind == BoundKind::Csl)
        result.reports.push_back(verify_rate_dominance(config.name, kind, series, v_csl(h0, rho0)));
      else if (kind == BoundKind::CslTimeAverage)
        result.reports.push_back(
            verify_time_averaged_dominance(config.name, series, std::span<const double>(norms)));
    }
  }

  // Restore the configured order.
  std::stable_sort(result.reports.begin(), result.reports.end(), [&](const auto& a, const auto& b) {
    auto pos = [&](BoundKind kk) { return std::find(config.bounds.begin(), config.bounds.end(), kk); };
    return pos(a.kind) < pos(b.kind);
  });
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

void write_series_csv(const ScenarioResult& result, std::ostream& out) {
  out << "t,overlap,rate,v_bound,margin,bound\n";
  for (const auto& r : result.reports) {
    const std::string name(to_string(r.kind));
    for (std::size_t i = 0; i < r.overlap.times.size(); ++i) {
      out << fmt(r.overlap.times[i]) << ',' << fmt(r.overlap.value[i]) << ','
          << fmt(r.overlap.rate[i]) << ',' << fmt(r.velocity[i]) << ',' << fmt(r.margin[i]) << ','
          << name << '\n';
    }
  }
}

void write_summary(const ScenarioResult& result, std::ostream& out) {
  const auto& c = result.config;
  out << "scenario: " << c.name << " (" << to_string(c.scenario) << ")\n";
  out << "units: hbar=" << c.units.hbar << " mass=" << c.units.mass << " omega0=" << c.units.omega0
      << "\n";
  out << "state: " << to_string(c.state);
  if (c.state == StateKind::HoEigenstate)
    out << " n=" << c.eigenstate_n;
  else
    out << " sigma_q=" << c.gaussian().sigma_q << " sigma_p=" << c.gaussian().sigma_p;
  out << "\npost-quench omega: " << c.post_quench_omega() << "\n";
  out << "grid: n=" << c.grid_n << " halfwidth_sigmas=" << c.halfwidth_sigmas << "\n";
  out << "time: t_max=" << c.t_max << "/omega0 steps=" << c.steps << "\n\n";
  for (const auto& r : result.reports) {
    const std::size_t last = r.overlap.value.size() - 1;
    out << to_string(r.kind) << ": " << (r.passed() ? "PASS" : "FAIL") << "\n";
    out << "  velocity: " << fmt(r.velocity.back());
    if (r.kind == BoundKind::CslTimeAverage) out << " (time average over the run)";
    out << "\n  max margin: " << fmt(r.max_margin) << " at t=" << fmt(r.overlap.times[r.peak_index])
        << "\n  max tau margin: " << fmt(r.max_tau_margin) << "\n";
    out << "  overlap: " << fmt(r.overlap.value.front()) << " -> " << fmt(r.overlap.value[last])
        << "\n";
    if (r.first_violation)
      out << "  first violation at t=" << fmt(r.overlap.times[*r.first_violation]) << "\n";
  }
  out << "\nresult: " << (result.passed() ? "PASS" : "FAIL") << "\n";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", result.wall_seconds);
  out << "wall time: " << buf << " s\n";
}

void write_outputs(const ScenarioResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("series.csv");
    write_series_csv(result, f);
    if (!f) throw std::runtime_error("write failed: " + (dir / "series.csv").string());
  }
  {
    auto f = open("summary.txt");
    write_summary(result, f);
    if (!f) throw std::runtime_error("write failed: " + (dir / "summary.txt").string());
  }
}

}  // namespace qsl::app
