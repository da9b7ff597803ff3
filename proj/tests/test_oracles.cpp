#include "doctest.h"

#include <cmath>

#include "qsl/metrics.hpp"
#include "qsl/oracles.hpp"
#include "test_support.hpp"

using qsl::oracles::Provenance;
using qsl::test::kNatural;

TEST_CASE("gaussian_energy_variance") {
  CHECK(qsl::oracles::gaussian_energy_variance(kNatural, 1.0).value < 1e-15);
  const auto free = qsl::oracles::gaussian_energy_variance(kNatural, 0.0);
  CHECK(free.value == doctest::Approx(1 / (2 * std::sqrt(2.0))).epsilon(1e-14));
  CHECK(free.provenance == Provenance::GaussianMoment);
  CHECK(std::sqrt(2.0) * free.value == doctest::Approx(0.5).epsilon(1e-14));

  const qsl::UnitsSpec<double> u{2.0, 3.0, 0.5};
  CHECK(qsl::oracles::gaussian_energy_variance(u, 0.0).value ==
        doctest::Approx(u.hbar * u.omega0 / (2 * std::sqrt(2.0))).epsilon(1e-14));
  CHECK(qsl::oracles::gaussian_energy_variance(u, u.omega0).value < 1e-15);

  SUBCASE("moment and ladder routes agree") {
    for (double w : {0.0, 0.3, 0.9, 1.7, 4.0}) {
      CAPTURE(w);
      CHECK(qsl::oracles::gaussian_energy_variance(u, w).value ==
            doctest::Approx(qsl::oracles::eigenstate_energy_variance(0, u, w).value).epsilon(1e-13));
    }
  }
}

TEST_CASE("eigenstate_energy_variance") {
  for (int n = 0; n <= 5; ++n) CHECK(qsl::oracles::eigenstate_energy_variance(n, kNatural, 1.0).value == 0.0);
  // n = 1, free: c2 = -1/4, (2*3 + 0) = 6.
  CHECK(qsl::oracles::eigenstate_energy_variance(1, kNatural, 0.0).value ==
        doctest::Approx(std::sqrt(6.0) / 4).epsilon(1e-14));
  CHECK_THROWS_AS(qsl::oracles::eigenstate_energy_variance(-1, kNatural, 0.0), std::invalid_argument);
}

TEST_CASE("quench_bhattacharyya") {
  const auto spec = qsl::matched_gaussian(kNatural);
  CHECK(qsl::oracles::quench_bhattacharyya(1.0, 0.0, kNatural, spec).value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(qsl::oracles::quench_bhattacharyya(std::sqrt(2.0), 1 / std::sqrt(2.0), kNatural, spec).value -
                 2 / std::sqrt(5.0)) < 1e-15);
  for (double t : {0.0, 0.5, 1.0, 2.5, 5.0}) {
    const double b = qsl::oracles::free_quench_b(1.0, t), bd = qsl::oracles::free_quench_bdot(1.0, t);
    CHECK(qsl::oracles::quench_bhattacharyya(b, bd, kNatural, spec).value ==
          doctest::Approx(qsl::closed_form_fidelity(0, b, bd, 1.0)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(qsl::oracles::quench_bhattacharyya(0.0, 0.0, kNatural, spec), std::invalid_argument);
}

TEST_CASE("quench_vcsl") {
  const auto spec = qsl::matched_gaussian(kNatural);
  CHECK(qsl::oracles::quench_vcsl(kNatural, spec, 0.0).value == 0.0);
  CHECK(qsl::oracles::quench_vcsl(kNatural, spec, 1.0).value == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(qsl::oracles::quench_vcsl(kNatural, spec, -3.0).value ==
        doctest::Approx(3 * qsl::oracles::quench_vcsl(kNatural, spec, 1.0).value).epsilon(1e-15));
  const qsl::GaussianSpec<double> wide{0, 0, spec.sigma_q, 2 * spec.sigma_p};
  CHECK(qsl::oracles::quench_vcsl(kNatural, wide, 1.0).value == doctest::Approx(0.25).epsilon(1e-15));
  const qsl::UnitsSpec<double> u{2.0, 3.0, 0.5};
  CHECK(qsl::oracles::quench_vcsl(u, qsl::matched_gaussian(u), u.omega0 * u.omega0).value ==
        doctest::Approx(u.omega0 / 2).epsilon(1e-14));
}

TEST_CASE("free quench scaling solution") {
  CHECK(qsl::oracles::free_quench_b(1.0, 0.0) == 1.0);
  CHECK(qsl::oracles::free_quench_bdot(1.0, 0.0) == 0.0);
  CHECK(qsl::oracles::free_quench_b(1.0, 1.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(qsl::oracles::free_quench_bdot(1.0, 1.0) == doctest::Approx(1 / std::sqrt(2.0)));
}
