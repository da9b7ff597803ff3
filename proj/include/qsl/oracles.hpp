#pragma once

// Grid-free reference values. Nothing here touches a PhaseGrid.

#include <Eigen/Core>
#include <Eigen/LU>

#include <cmath>
#include <stdexcept>
#include <string>

#include "qsl/states.hpp"

namespace qsl::oracles {

enum class Provenance { ClosedForm, GaussianMoment, Substitution };

template <typename Scalar = double>
struct OracleResult {
  std::string name;
  Scalar value = 0;
  Provenance provenance = Provenance::Substitution;
};

/**
 * Energy spread of the omega0 ground state under H = p^2/2m + m omega^2 q^2/2.
 *
 * The Wigner function is a zero-mean Gaussian with covariance
 * Sigma = diag(hbar/(2 m omega0), m hbar omega0 / 2). Writing H = v^T M v / 2,
 *   <H^2>_W - <H>_W^2 = tr((M Sigma)^2) / 2            (Isserlis)
 * and the star-square H*H differs from H^2 by -(hbar^2/4) det M, so
 *   Delta E^2 = tr((M Sigma)^2) / 2 - hbar^2 det(M) / 4.
 */
template <typename Scalar>
OracleResult<Scalar> gaussian_energy_variance(const UnitsSpec<Scalar>& units,
                                              Scalar post_quench_omega) {
  units.validate();
  using Mat = Eigen::Matrix<Scalar, 2, 2>;
  Mat m;
  m << units.mass * post_quench_omega * post_quench_omega, Scalar(0), Scalar(0),
      Scalar(1) / units.mass;
  Mat sigma;
  sigma << units.hbar / (Scalar(2) * units.mass * units.omega0), Scalar(0), Scalar(0),
      units.mass * units.hbar * units.omega0 / Scalar(2);
  const Mat ms = m * sigma;
  const Scalar var = Scalar(0.5) * (ms * ms).trace() -
                     units.hbar * units.hbar * m.determinant() / Scalar(4);
  using std::sqrt;
  return {"gaussian_energy_variance", sqrt(var > 0 ? var : Scalar(0)),
          Provenance::GaussianMoment};
}

/**
 * Energy spread of the n-th omega0 eigenstate under the trap of frequency
 * omega, from ladder operators: H = c1 (2N + 1) + c2 (a^2 + a^2dag) with
 * c2 = (hbar/4)(omega^2/omega0 - omega0), so
 * Delta E^2 = c2^2 ((n+1)(n+2) + n(n-1)).
 */
template <typename Scalar>
OracleResult<Scalar> eigenstate_energy_variance(int n, const UnitsSpec<Scalar>& units,
                                                Scalar post_quench_omega) {
  if (n < 0) throw std::invalid_argument("eigenstate_energy_variance: negative n");
  units.validate();
  const Scalar c2 = units.hbar / Scalar(4) *
                    (post_quench_omega * post_quench_omega / units.omega0 - units.omega0);
  const Scalar k = Scalar((n + 1) * (n + 2) + n * (n - 1));
  using std::abs;
  using std::sqrt;
  return {"eigenstate_energy_variance", abs(c2) * sqrt(k), Provenance::Substitution};
}

/// B(t) = 2 [ (1 + b^2)^2 / b^2 + (m sigma_q b' / sigma_p)^2 ]^(-1/2).
template <typename Scalar>
OracleResult<Scalar> quench_bhattacharyya(Scalar b, Scalar bdot, const UnitsSpec<Scalar>& units,
                                          const GaussianSpec<Scalar>& spec) {
  if (!(b > 0)) throw std::invalid_argument("quench_bhattacharyya: b must be positive");
  const Scalar k = units.mass * spec.sigma_q * bdot / spec.sigma_p;
  const Scalar s = (Scalar(1) + b * b) * (Scalar(1) + b * b) / (b * b) + k * k;
  using std::sqrt;
  return {"quench_bhattacharyya", Scalar(2) / sqrt(s), Provenance::ClosedForm};
}

/// v_CSL = m sigma_q |b''(0)| / (2 sigma_p).
template <typename Scalar>
OracleResult<Scalar> quench_vcsl(const UnitsSpec<Scalar>& units, const GaussianSpec<Scalar>& spec,
                                 Scalar bddot0) {
  spec.validate();
  using std::abs;
  return {"quench_vcsl", units.mass * spec.sigma_q * abs(bddot0) / (Scalar(2) * spec.sigma_p),
          Provenance::ClosedForm};
}

/// Scaling solution of a sudden switch-off of the trap: b = sqrt(1 + (omega0 t)^2).
template <typename Scalar>
Scalar free_quench_b(Scalar omega0, Scalar t) {
  using std::sqrt;
  return sqrt(Scalar(1) + omega0 * omega0 * t * t);
}

template <typename Scalar>
Scalar free_quench_bdot(Scalar omega0, Scalar t) {
  return omega0 * omega0 * t / free_quench_b(omega0, t);
}

}  // namespace qsl::oracles
