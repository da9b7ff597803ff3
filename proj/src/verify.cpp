#include "qsl/app/verify.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <random>
#include <sstream>

#include "qsl/app/scenario.hpp"
#include "qsl/qsl.hpp"

namespace qsl::app {

namespace {

constexpr double kPeakMargin = 0.3849001794597505;  // 2/(3 sqrt 3) at t = sqrt 2

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

class Suite {
 public:
  Suite(const std::function<void(const CheckResult&)>& cb) : cb_(cb) {}

  // fn returns {passed, detail}; exceptions fail the check.
  template <typename Fn>
  void run(const std::string& name, Fn&& fn) {
    CheckResult r{name, false, ""};
    try {
      auto [ok, detail] = fn();
      r.passed = ok;
      r.detail = std::move(detail);
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    if (cb_) cb_(r);
    results_.push_back(std::move(r));
  }

  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  std::function<void(const CheckResult&)> cb_;
  std::vector<CheckResult> results_;
};

std::pair<bool, std::string> within(double err, double tol, const std::string& what) {
  return {err < tol, what + " error " + sci(err) + " (tolerance " + sci(tol) + ")"};
}

PhaseGrid<double> ground_grid(const UnitsSpec<double>& u, int n) {
  const auto s = matched_gaussian(u);
  return PhaseGrid<double>::centered(8 * s.sigma_q, 8 * s.sigma_p, n, n, u.hbar, u.mass);
}

std::vector<std::size_t> sample_indices(std::size_t size, std::size_t count) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < count; ++k) idx.push_back(k * (size - 1) / (count - 1));
  return idx;
}

}  // namespace

std::vector<CheckResult> verify_all(const VerifyOptions& options,
                                    const std::function<void(const CheckResult&)>& on_result) {
  Suite suite(on_result);
  const int n = options.grid_n;
  const UnitsSpec<double> u{};
  const auto spec = matched_gaussian(u);
  const auto traj = solve_ermakov<double>([](double) { return 0.0; }, 1.0, 5.0, 500);
  const auto samples = sample_indices(traj.size(), 20);

  suite.run("grid.normalization", [&] {
    const auto g = ground_grid(u, n);
    return within(std::abs(integrate(classical_gaussian(spec, g)) - 1), 1e-10, "integral of rho0");
  });

  suite.run("grid.derivative-order", [&] {
    auto err = [&](int m) {
      const auto g = PhaseGrid<double>::centered(6, 6, m, m, 1, 1);
      const auto f = sample(g, [](double q, double p) { return std::exp(-q * q - p * p); });
      const auto exact = sample(g, [](double q, double p) { return -2 * q * std::exp(-q * q - p * p); });
      return (d_dq(f) - exact).values().abs().maxCoeff();
    };
    const double ratio = err(n / 2) / err(n);
    return std::pair{ratio >= 15.0, "error ratio on halving dq " + sci(ratio) + " (need >= 15)"};
  });

  suite.run("states.eigenstate-normalization", [&] {
    const auto g = PhaseGrid<double>::centered(8, 8, n, n, 1, 1);
    double worst = 0;
    for (int k = 0; k <= 3; ++k) {
      const auto w = sample(g, HoWigner<double>{k, u});
      worst = std::max({worst, std::abs(integrate(w) - 1), std::abs(purity(w, 1.0) - 1)});
    }
    return within(worst, 1e-6, "norm/purity");
  });

  suite.run("brackets.moyal-equals-poisson-quadratic", [&] {
    const auto g = ground_grid(u, n);
    const auto h = quadratic_hamiltonian(u, 0.3, g);
    const auto w = gaussian_wigner(spec, g);
    const double d = (moyal(h, w, MoyalOrder::HbarSquared, u) - poisson(h, w)).values().abs().maxCoeff();
    return within(d, 1e-9, "max |moyal - poisson|");
  });

  suite.run("bounds.stationary-speed", [&] {
    const auto g = ground_grid(u, n);
    return within(v_qsl(quadratic_hamiltonian(u, 1.0, g), ho_wigner(0, u, g), MoyalOrder::HbarSquared, u),
                  1e-6, "v_qsl of the trap ground state");
  });

  for (const auto& units : {u, UnitsSpec<double>{2.0, 3.0, 0.5}}) {
    std::ostringstream tag;
    tag << "(hbar=" << units.hbar << ",m=" << units.mass << ",omega0=" << units.omega0 << ")";
    suite.run("bounds.three-speeds-equal " + tag.str(), [&] {
      const auto g = ground_grid(units, n);
      const auto h = quadratic_hamiltonian(units, 0.0, g);
      const auto w0 = ho_wigner(0, units, g);
      const double expect = units.omega0 / 2;
      const double rel = std::max({std::abs(v_qsl(h, w0, MoyalOrder::HbarSquared, units) - expect),
                                   std::abs(v_ssl(h, w0, units) - expect),
                                   std::abs(v_csl(h, classical_gaussian(matched_gaussian(units), g)) - expect)}) /
                         expect;
      return within(rel, 1e-4, "relative v_qsl/v_ssl/v_csl vs omega0/2");
    });
    suite.run("bounds.energy-variance-identity " + tag.str(), [&] {
      const auto g = ground_grid(units, n);
      const double v = v_qsl(quadratic_hamiltonian(units, 0.0, g), ho_wigner(0, units, g),
                             MoyalOrder::HbarSquared, units);
      const double de = oracles::gaussian_energy_variance(units, 0.0).value;
      return within(std::abs(v - std::sqrt(2.0) * de / units.hbar) / v, 1e-4, "relative v_qsl vs sqrt2 dE/hbar");
    });
  }

  suite.run("oracles.bhattacharyya-along-quench", [&] {
    const auto g = quench_grid(u, spec.sigma_q, spec.sigma_p, traj, n, 8.0);
    const ClassicalGaussian<double> c{spec};
    const auto rho0 = sample(g, c);
    double worst = 0;
    for (auto i : samples) {
      const double grid_b = bhattacharyya(rho0, evolve_quench(c, traj, i, g)).value;
      worst = std::max(worst, std::abs(grid_b - oracles::quench_bhattacharyya(traj.b[i], traj.bdot[i], u, spec).value));
    }
    return within(worst, 1e-6, "max |B_grid - B_oracle| over 20 times");
  });

  suite.run("metrics.closed-form-fidelities", [&] {
    double worst = 0;
    for (int k = 0; k <= 3; ++k) {
      const double widen = std::sqrt(1.0 + k / 2.0);
      const auto g = quench_grid(u, widen * spec.sigma_q, widen * spec.sigma_p, traj, n, 8.0);
      const HoWigner<double> w{k, u};
      const auto w0 = sample(g, w);
      for (auto i : samples) {
        const double f = fidelity(w0, evolve_quench(w, traj, i, g), u).value;
        worst = std::max(worst, std::abs(f - closed_form_fidelity(k, traj.b[i], traj.bdot[i], 1.0)));
      }
    }
    return within(worst, 1e-5, "max |F_grid - F_n| for n=0..3 over 20 times");
  });

  suite.run("metrics.quantum-classical-n0", [&] {
    const auto g = quench_grid(u, spec.sigma_q, spec.sigma_p, traj, n, 8.0);
    const HoWigner<double> w{0, u};
    const ClassicalGaussian<double> c{spec};
    const auto w0 = sample(g, w);
    const auto rho0 = sample(g, c);
    double worst = 0;
    for (auto i : samples)
      worst = std::max(worst, std::abs(fidelity(w0, evolve_quench(w, traj, i, g), u).value -
                                       bhattacharyya(rho0, evolve_quench(c, traj, i, g)).value));
    return within(worst, 1e-6, "max |F - B|");
  });

  suite.run("metrics.F1-equals-F0-cubed", [&] {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> ub(0.1, 10.0), ud(-5.0, 5.0);
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
      const double b = ub(rng), bd = ud(rng);
      const double f0 = closed_form_fidelity(0, b, bd, 1.0);
      worst = std::max(worst, std::abs(closed_form_fidelity(1, b, bd, 1.0) - f0 * f0 * f0));
    }
    return within(worst, 1e-12, "max |F1 - F0^3| over 100 pairs");
  });

  suite.run("dynamics.symplectic-determinant", [&] {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ub(0.05, 20.0), ud(-20.0, 20.0), um(0.1, 10.0);
    double worst = 0;
    for (int k = 0; k < 1000; ++k)
      worst = std::max(worst, std::abs(scaling_map(ub(rng), ud(rng), um(rng)).determinant() - 1));
    return within(worst, 1e-10, "max |det - 1| over 1000 maps");
  });

  suite.run("dynamics.ermakov-vs-analytic", [&] {
    double worst = 0;
    for (std::size_t i = 0; i < traj.size(); ++i)
      worst = std::max(worst, std::abs(traj.b[i] - oracles::free_quench_b(1.0, traj.times[i])));
    return within(worst, 1e-8, "max |b_rk4 - sqrt(1+t^2)| at 500 steps");
  });

  suite.run("dynamics.purity-drift", [&] {
    const auto g = quench_grid(u, spec.sigma_q, spec.sigma_p, traj, n, 8.0);
    const HoWigner<double> w{0, u};
    const double p0 = purity(sample(g, w), 1.0);
    double worst = 0;
    for (auto i : samples) worst = std::max(worst, std::abs(purity(evolve_quench(w, traj, i, g), 1.0) - p0));
    return within(worst, 1e-6, "max purity drift");
  });

  ScenarioConfig free = default_config(ScenarioKind::QuenchClassical);
  free.grid_n = n;
  std::optional<ScenarioResult> free_result;
  suite.run("bounds.free-quench-dominance", [&] {
    free_result = run_scenario(free);
    const auto& r = *free_result;
    const auto& csl = r.reports.front();
    const bool ok = r.passed() && std::abs(csl.max_margin - kPeakMargin) < 1e-4 &&
                    std::abs(csl.velocity.front() - 0.5) < 5e-5;
    return std::pair{ok, "v_csl " + sci(csl.velocity.front()) + ", peak margin " + std::to_string(csl.max_margin) +
                             " (golden 0.384900), max tau margin " + sci(csl.max_tau_margin) + ", timeavg " +
                             (r.reports.back().passed() ? "holds" : "violated")};
  });

  suite.run("bounds.quantum-quench-dominance", [&] {
    auto c = default_config(ScenarioKind::QuenchQuantum);
    c.grid_n = n;
    c.eigenstate_n = 1;
    const auto r = run_scenario(c);
    double worst = 0;
    const auto& rep = r.reports.front();
    for (std::size_t i = 0; i < rep.overlap.times.size(); ++i)
      worst = std::max(worst, std::abs(rep.overlap.value[i] - closed_form_fidelity(1, r.trajectory.b[i],
                                                                                   r.trajectory.bdot[i], 1.0)));
    return std::pair{r.passed() && worst < 1e-5,
                     "n=1 dominance " + std::string(r.passed() ? "holds" : "violated") + ", max |F - F1| " + sci(worst)};
  });

  suite.run("cli.unit-covariance", [&] {
    auto scaled = free;
    scaled.units = {2.0, 3.0, 0.5};
    if (!free_result) free_result = run_scenario(free);
    const auto& a = *free_result;
    const auto b = run_scenario(scaled);
    double worst = 0;
    for (std::size_t k = 0; k < a.reports.size(); ++k)
      for (std::size_t i = 0; i < a.trajectory.size(); ++i)
        worst = std::max({worst, std::abs(a.reports[k].overlap.value[i] - b.reports[k].overlap.value[i]),
                          std::abs(a.reports[k].margin[i] - b.reports[k].margin[i])});
    return within(worst, 1e-6, "max change of overlaps/margins at hbar=2, m=3, omega0=0.5");
  });

  suite.run("cli.deterministic-output", [&] {
    std::ostringstream a, b;
    auto c = free;
    c.steps = 100;
    write_series_csv(run_scenario(c), a);
    write_series_csv(run_scenario(c), b);
    return std::pair{a.str() == b.str(), "two runs give " + std::string(a.str() == b.str() ? "identical" : "different") + " CSV"};
  });

  return suite.take();
}

}  // namespace qsl::app
