#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "qsl/grid.hpp"
#include "test_support.hpp"

using qsl::PhaseField;
using qsl::PhaseGrid;
using qsl::test::square_grid;

namespace {

PhaseField<double> gaussian_2d(const PhaseGrid<double>& g, double sigma) {
  return qsl::sample(g, [&](double q, double p) {
    return std::exp(-(q * q + p * p) / (2 * sigma * sigma)) /
           (2 * std::numbers::pi * sigma * sigma);
  });
}

}  // namespace

TEST_CASE("grid construction rejects degenerate input") {
  CHECK_THROWS_AS(PhaseGrid<double>(1, 0, 0, 1, 32, 32, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(PhaseGrid<double>(0, 1, 0, 1, 15, 32, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(PhaseGrid<double>(0, 1, 0, 1, 32, 32, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(PhaseGrid<double>(0, 1, 0, 1, 32, 32, 1, -1), std::invalid_argument);
  const PhaseGrid<double> g(0, 1, -2, 2, 17, 33, 1, 1);
  CHECK(g.dq() == doctest::Approx(1.0 / 16));
  CHECK(g.dp() == doctest::Approx(4.0 / 32));
  CHECK(g.q(16) == doctest::Approx(1.0));
}

TEST_CASE("fields reject non-finite values and mismatched grids") {
  const auto g = square_grid(1, 16);
  auto v = qsl::FieldArray<double>::Zero(16, 16).eval();
  v(3, 4) = std::nan("");
  CHECK_THROWS_AS(PhaseField<double>(g, v), qsl::NumericError);
  const PhaseField<double> a(g), b(square_grid(2, 16));
  CHECK_THROWS_AS(a + b, qsl::GridMismatch);
}

TEST_CASE("integrate") {
  SUBCASE("zero field") { CHECK(qsl::integrate(PhaseField<double>(square_grid(3, 32))) == 0.0); }
  SUBCASE("constant on unit square is exact") {
    const PhaseGrid<double> g(0, 1, 0, 1, 21, 37, 1, 1);
    const auto one = qsl::sample(g, [](double, double) { return 1.0; });
    CHECK(std::abs(qsl::integrate(one) - 1.0) < 1e-12);
  }
  SUBCASE("normalized Gaussian on +-8 sigma, 256 x 256") {
    const double sigma = 0.7;
    const auto f = gaussian_2d(square_grid(8 * sigma, 256), sigma);
    CHECK(std::abs(qsl::integrate(f) - 1.0) < 1e-10);
  }
  SUBCASE("linearity") {
    const auto g = square_grid(6, 64);
    std::mt19937 rng(7);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 10; ++trial) {
      const auto f = qsl::sample(g, [&](double q, double p) { return std::sin(q * nd(rng)) + p; });
      const auto h = qsl::sample(g, [&](double q, double p) { return q * p * nd(rng); });
      const double a = nd(rng), b = nd(rng);
      const double lhs = qsl::integrate(a * f + b * h);
      const double rhs = a * qsl::integrate(f) + b * qsl::integrate(h);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("long double instantiation integrates a Gaussian") {
  const auto g = PhaseGrid<long double>::centered(9.0L, 9.0L, 160, 160, 1.0L, 1.0L);
  const auto f = qsl::sample(g, [](long double q, long double p) {
    return std::exp(-(q * q + p * p) / 2) / (2 * std::numbers::pi_v<long double>);
  });
  CHECK(std::abs(static_cast<double>(qsl::integrate(f) - 1.0L)) < 1e-12);
}

TEST_CASE("first derivatives") {
  const auto g = square_grid(4, 64);
  SUBCASE("constant -> 0 in the interior") {
    const auto c = qsl::sample(g, [](double, double) { return 3.5; });
    CHECK(qsl::test::interior_max_diff(qsl::d_dq(c), PhaseField<double>(g), 2) < 1e-12);
    CHECK(qsl::test::interior_max_diff(qsl::d_dp(c), PhaseField<double>(g), 2) < 1e-12);
  }
  SUBCASE("linear ramp is exact") {
    const auto ramp = qsl::sample(g, [](double q, double) { return q; });
    const auto one = qsl::sample(g, [](double, double) { return 1.0; });
    CHECK(qsl::test::interior_max_diff(qsl::d_dq(ramp), one, 2) < 1e-10);
  }
  SUBCASE("quartic is exact") {
    const auto f = qsl::sample(g, [](double, double p) { return p * p * p * p; });
    const auto df = qsl::sample(g, [](double, double p) { return 4 * p * p * p; });
    CHECK(qsl::test::interior_max_diff(qsl::d_dp(f), df, 2) < 1e-9);
  }
  SUBCASE("zero extension only touches two boundary layers") {
    const auto c = qsl::sample(g, [](double, double) { return 1.0; });
    const auto d = qsl::d_dq(c);
    CHECK(d(0, 10) != 0.0);
    CHECK(d(2, 10) == 0.0);
  }
}

TEST_CASE("d_dq converges at fourth order") {
  auto error_at = [](Eigen::Index n) {
    const auto g = square_grid(6, n);
    const auto f = qsl::sample(g, [](double q, double p) { return std::exp(-q * q - p * p); });
    const auto exact =
        qsl::sample(g, [](double q, double p) { return -2 * q * std::exp(-q * q - p * p); });
    return qsl::test::max_abs(qsl::d_dq(f) - exact);
  };
  const double coarse = error_at(65), fine = error_at(129), finer = error_at(257);
  CHECK(coarse / fine >= 15.0);
  CHECK(fine / finer >= 16.0 * 0.9);
}

TEST_CASE("summation by parts") {
  const auto g = square_grid(8, 128);
  const auto f = qsl::sample(g, [](double q, double p) { return std::exp(-q * q - 0.5 * p * p) * (1 + q); });
  const auto h = qsl::sample(g, [](double q, double p) { return std::exp(-(q - 0.5) * (q - 0.5) - p * p) * p * p; });
  const double lhs = qsl::integrate(f * qsl::d_dq(h)) + qsl::integrate(qsl::d_dq(f) * h);
  const double norm = std::sqrt(qsl::integrate(f * f) * qsl::integrate(h * h));
  CHECK(std::abs(lhs) < 1e-8 * norm);
}

TEST_CASE("third derivatives") {
  const auto g = square_grid(3, 96);
  const Eigen::Index m = 6;
  SUBCASE("q^3 -> 6") {
    const auto f = qsl::sample(g, [](double q, double) { return q * q * q; });
    const auto six = qsl::sample(g, [](double, double) { return 6.0; });
    CHECK(qsl::test::interior_max_diff(qsl::d3(f, 3, 0), six, m) < 1e-8);
  }
  SUBCASE("q p^2 -> d3(1,2) = 2") {
    const auto f = qsl::sample(g, [](double q, double p) { return q * p * p; });
    const auto two = qsl::sample(g, [](double, double) { return 2.0; });
    CHECK(qsl::test::interior_max_diff(qsl::d3(f, 1, 2), two, m) < 1e-8);
  }
  SUBCASE("odd parity for an even field") {
    const auto gg = square_grid(6, 128);
    const auto f = qsl::sample(gg, [](double q, double p) { return std::exp(-q * q - p * p); });
    const auto d = qsl::d3(f, 3, 0);
    const auto& v = d.values();
    const double asym = (v + v.colwise().reverse()).abs().maxCoeff();
    CHECK(asym < 1e-10);
  }
  SUBCASE("rejects orders not summing to 3") {
    const auto f = PhaseField<double>(g);
    CHECK_THROWS_AS(qsl::d3(f, 2, 2), std::invalid_argument);
    CHECK_THROWS_AS(qsl::d3(f, -1, 4), std::invalid_argument);
  }
}

TEST_CASE("boundary ratio flags truncated fields") {
  const auto g = square_grid(2, 64);
  const auto wide = qsl::sample(g, [](double q, double p) { return std::exp(-(q * q + p * p) / 4); });
  const auto narrow = qsl::sample(g, [](double q, double p) { return std::exp(-(q * q + p * p) * 16); });
  CHECK(qsl::boundary_ratio(wide) > 0.1);
  CHECK(qsl::boundary_ratio(narrow) < 1e-20);
  CHECK(qsl::boundary_ratio(PhaseField<double>(g)) == 0.0);
}
