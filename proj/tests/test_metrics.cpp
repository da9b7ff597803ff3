#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "qsl/dynamics.hpp"
#include "qsl/metrics.hpp"
#include "qsl/oracles.hpp"
#include "test_support.hpp"

using qsl::OverlapMeasure;
using qsl::PhaseField;
using qsl::test::kNatural;
using qsl::test::square_grid;

namespace {

const double kTwoOverSqrt5 = 2 / std::sqrt(5.0);

qsl::QuenchTrajectory<double> free_quench(double t_max = 5.0, int steps = 500) {
  return qsl::solve_ermakov<double>([](double) { return 0.0; }, 1.0, t_max, steps);
}

}  // namespace

TEST_CASE("fidelity") {
  const auto g = square_grid(8, 256);
  const auto w0 = qsl::ho_wigner(0, kNatural, g);
  SUBCASE("pure state with itself") {
    const auto f = qsl::fidelity(w0, w0, kNatural);
    CHECK(std::abs(f.value - 1.0) < 1e-6);
    CHECK(std::abs(f.residual) < 1e-6);
  }
  SUBCASE("ground state against its evolution at t = 1/omega0") {
    const double s2 = std::sqrt(2.0);
    const auto gw = qsl::PhaseGrid<double>::centered(12, 8, 512, 256, 1, 1);
    const auto a = qsl::sample(gw, qsl::HoWigner<double>{0, kNatural});
    const auto b = qsl::pullback(qsl::HoWigner<double>{0, kNatural}, qsl::scaling_map(s2, 1 / s2, 1.0), gw);
    CHECK(std::abs(qsl::fidelity(a, b, kNatural).value - kTwoOverSqrt5) < 1e-6);
    CHECK(qsl::fidelity(a, b, kNatural).value == doctest::Approx(qsl::fidelity(b, a, kNatural).value).epsilon(1e-12));
  }
  SUBCASE("orthogonal eigenstates") {
    const auto w1 = qsl::ho_wigner(1, kNatural, g);
    CHECK(qsl::fidelity(w0, w1, kNatural).value < 1e-8);
  }
  SUBCASE("residual beyond 1e-5 is an error") {
    CHECK_THROWS_AS(qsl::fidelity(w0, 1.01 * w0, kNatural), qsl::NumericError);
  }
  SUBCASE("grid mismatch") {
    CHECK_THROWS_AS(qsl::fidelity(w0, qsl::ho_wigner(0, kNatural, square_grid(9, 256)), kNatural),
                    qsl::GridMismatch);
  }
}

TEST_CASE("bures_angle") {
  CHECK(qsl::bures_angle(1.0) == 0.0);
  CHECK(qsl::bures_angle(0.0) == doctest::Approx(std::numbers::pi / 2));
  CHECK(std::abs(std::pow(std::sin(qsl::bures_angle(0.8)), 2) - 0.2) < 1e-12);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double b = u(rng);
    CHECK(std::abs((1 - b) - std::pow(std::sin(qsl::bures_angle(b)), 2)) < 1e-12);
  }
  CHECK_THROWS_AS(qsl::bures_angle(1.0 + 1e-9), std::domain_error);
  CHECK_THROWS_AS(qsl::bures_angle(-0.1), std::domain_error);
}

TEST_CASE("bhattacharyya and hellinger") {
  const auto g = square_grid(8, 256);
  const auto spec = qsl::matched_gaussian(kNatural);
  const auto rho0 = qsl::classical_gaussian(spec, g);

  SUBCASE("identical densities") {
    CHECK(std::abs(qsl::bhattacharyya(rho0, rho0).value - 1.0) < 1e-8);
    CHECK(qsl::hellinger(rho0, rho0) < 1e-4);
  }
  SUBCASE("disjoint supports") {
    const auto left = qsl::sample(g, [](double q, double) { return q < -1 ? 0.1 : 0.0; });
    const auto right = qsl::sample(g, [](double q, double) { return q > 1 ? 0.1 : 0.0; });
    CHECK(qsl::bhattacharyya(left, right).value == 0.0);
    CHECK(qsl::hellinger(left, right) == 1.0);
  }
  SUBCASE("matched quench at t = 1/omega0") {
    const double s2 = std::sqrt(2.0);
    const auto gw = qsl::PhaseGrid<double>::centered(12, 8, 512, 256, 1, 1);
    const qsl::ClassicalGaussian<double> c{spec};
    const auto a = qsl::sample(gw, c);
    const auto b = qsl::pullback(c, qsl::scaling_map(s2, 1 / s2, 1.0), gw);
    CHECK(std::abs(qsl::bhattacharyya(a, b).value - kTwoOverSqrt5) < 1e-6);
    CHECK(qsl::bhattacharyya(a, b).value == doctest::Approx(qsl::bhattacharyya(b, a).value).epsilon(1e-12));
    CHECK(std::abs(qsl::hellinger(a, b) - std::sqrt(1 - kTwoOverSqrt5)) < 1e-6);
  }
  SUBCASE("negative densities") {
    const auto tiny = qsl::sample(g, [](double q, double) { return q > 0 ? -1e-13 : 0.0; });
    CHECK(qsl::bhattacharyya(rho0, rho0 + tiny).value == doctest::Approx(qsl::bhattacharyya(rho0, rho0).value).epsilon(1e-6));
    const auto w1 = qsl::ho_wigner(1, kNatural, g);
    CHECK_THROWS_AS(qsl::bhattacharyya(rho0, w1), qsl::NumericError);
  }
}

TEST_CASE("finite_difference_rate is exact for quadratics") {
  std::vector<double> v;
  for (int i = 0; i < 7; ++i) v.push_back(1 + 2 * (0.1 * i) - 3 * (0.1 * i) * (0.1 * i));
  const auto r = qsl::finite_difference_rate(std::span<const double>(v), 0.1);
  for (int i = 0; i < 7; ++i) CHECK(r[i] == doctest::Approx(2 - 6 * 0.1 * i).epsilon(1e-12));
}

TEST_CASE("overlap_series") {
  SUBCASE("stationary eigenstate") {
    const auto traj = qsl::solve_ermakov<double>([](double) { return 1.0; }, 1.0, 2.0, 100);
    const auto g = square_grid(8, 128);
    const qsl::HoWigner<double> w{2, kNatural};
    const auto s = qsl::overlap_series(std::span<const double>(traj.times),
                                       [&](std::size_t i) { return qsl::evolve_quench(w, traj, i, g); },
                                       OverlapMeasure::Fidelity, kNatural);
    for (std::size_t i = 0; i < s.value.size(); ++i) {
      CHECK(std::abs(s.value[i] - 1.0) < 1e-6);
      CHECK(std::abs(s.rate[i]) < 1e-6);
    }
  }
  SUBCASE("free quench follows the closed-form F0") {
    const auto traj = free_quench();
    const auto spec = qsl::matched_gaussian(kNatural);
    const auto g = qsl::quench_grid(kNatural, spec.sigma_q, spec.sigma_p, traj, 512, 8.0);
    const qsl::HoWigner<double> w{0, kNatural};
    const auto s = qsl::overlap_series(std::span<const double>(traj.times),
                                       [&](std::size_t i) { return qsl::evolve_quench(w, traj, i, g); },
                                       OverlapMeasure::Fidelity, kNatural);
    CHECK(std::abs(s.value[0] - 1.0) < 1e-6);
    double worst = 0;
    for (std::size_t i = 0; i < traj.size(); ++i)
      worst = std::max(worst, std::abs(s.value[i] - qsl::closed_form_fidelity(0, traj.b[i], traj.bdot[i], 1.0)));
    CHECK(worst < 1e-6);
    CHECK(std::abs(s.rate[0]) < traj.dt() * traj.dt());
    CHECK(s.max_residual < 1e-5);

    SUBCASE("classical counterpart coincides") {
      const qsl::ClassicalGaussian<double> c{spec};
      const auto b = qsl::overlap_series(std::span<const double>(traj.times),
                                         [&](std::size_t i) { return qsl::evolve_quench(c, traj, i, g); },
                                         OverlapMeasure::Bhattacharyya, kNatural);
      for (std::size_t i = 0; i < traj.size(); ++i) {
        CHECK(std::abs(b.value[i] - s.value[i]) < 1e-6);
        const auto oracle = qsl::oracles::quench_bhattacharyya(traj.b[i], traj.bdot[i], kNatural, spec);
        CHECK(std::abs(b.value[i] - oracle.value) < 1e-6);
      }
    }
  }
  SUBCASE("preconditions") {
    const auto g = square_grid(4, 16);
    std::vector<PhaseField<double>> states(4, qsl::sample(g, qsl::HoWigner<double>{0, kNatural}));
    std::vector<double> t{0, 1, 2, 3};
    CHECK_THROWS_AS(qsl::overlap_series(std::span<const double>(t), std::span<const PhaseField<double>>(states),
                                        OverlapMeasure::Fidelity, kNatural),
                    std::invalid_argument);
    states.push_back(states.front());
    t = {0, 1, 2, 3.5, 4};
    CHECK_THROWS_AS(qsl::overlap_series(std::span<const double>(t), std::span<const PhaseField<double>>(states),
                                        OverlapMeasure::Fidelity, kNatural),
                    std::invalid_argument);
  }
}

TEST_CASE("closed-form fidelities") {
  for (int n = 0; n <= 3; ++n) {
    CHECK(std::abs(qsl::closed_form_fidelity(n, 1.0, 0.0, 1.0) - 1.0) < 1e-12);
    CHECK(std::abs(qsl::closed_form_fidelity(n, 1.0, 0.0, 2.7) - 1.0) < 1e-12);
  }
  CHECK(std::abs(qsl::closed_form_fidelity(0, std::sqrt(2.0), 1 / std::sqrt(2.0), 1.0) - kTwoOverSqrt5) < 1e-12);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ub(0.1, 10.0), ud(-5.0, 5.0);
  for (int k = 0; k < 100; ++k) {
    const double b = ub(rng), bd = ud(rng);
    const double f0 = qsl::closed_form_fidelity(0, b, bd, 1.0);
    CHECK(std::abs(qsl::closed_form_fidelity(1, b, bd, 1.0) - f0 * f0 * f0) < 1e-12);
  }
  CHECK_THROWS_AS(qsl::closed_form_fidelity(4, 1.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(qsl::closed_form_fidelity(0, 0.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("grid fidelities of excited states match the closed forms") {
  const auto traj = free_quench();
  const auto spec = qsl::matched_gaussian(kNatural);
  for (int n = 0; n <= 3; ++n) {
    const double widen = std::sqrt(1.0 + n / 2.0);
    const auto g = qsl::quench_grid(kNatural, widen * spec.sigma_q, widen * spec.sigma_p, traj, 512, 8.0);
    const qsl::HoWigner<double> w{n, kNatural};
    const auto w0 = qsl::sample(g, w);
    for (std::size_t i = 0; i < traj.size(); i += 25) {
      const double grid_f = qsl::fidelity(w0, qsl::evolve_quench(w, traj, i, g), kNatural).value;
      CHECK(std::abs(grid_f - qsl::closed_form_fidelity(n, traj.b[i], traj.bdot[i], 1.0)) < 1e-6);
    }
  }
}
