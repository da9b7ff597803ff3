#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qsl/diagnostics.hpp"
#include "qsl/grid.hpp"
#include "qsl/states.hpp"

namespace qsl {

inline constexpr double kOverlapResidualLimit = 1e-5;
inline constexpr double kNegativeDensityClip = 1e-12;

/// An overlap clamped to [0, 1]; residual = raw - value.
template <typename Scalar = double>
struct Overlap {
  Scalar value = 0;
  Scalar residual = 0;
};

enum class OverlapMeasure { Fidelity, Bhattacharyya };

namespace detail {

template <typename Scalar>
Overlap<Scalar> clamp_overlap(Scalar raw, const char* what) {
  const Scalar value = std::clamp(raw, Scalar(0), Scalar(1));
  const Scalar residual = raw - value;
  if (std::abs(residual) > Scalar(kOverlapResidualLimit)) {
    std::ostringstream msg;
    msg << what << ": overlap " << static_cast<double>(raw)
        << " lies outside [0, 1] by more than 1e-5";
    throw NumericError(msg.str());
  }
  return {value, residual};
}

template <typename Scalar>
FieldArray<Scalar> clipped_density(const PhaseField<Scalar>& rho, const char* what) {
  if (rho.values().minCoeff() < -Scalar(kNegativeDensityClip))
    throw NumericError(std::string(what) + ": density has negative values below -1e-12");
  return rho.values().max(Scalar(0));
}

}  // namespace detail

/// F = 2 pi hbar * integral W0 Wt for pure-state Wigner functions.
template <typename Scalar>
Overlap<Scalar> fidelity(const PhaseField<Scalar>& w0, const PhaseField<Scalar>& wt,
                         const UnitsSpec<Scalar>& units) {
  require_same_grid(w0, wt, "fidelity");
  const Scalar raw = Scalar(2) * std::numbers::pi_v<Scalar> * units.hbar * integrate(w0 * wt);
  return detail::clamp_overlap(raw, "fidelity");
}

/// arccos(sqrt(overlap)); sin^2 of the result equals 1 - overlap.
template <typename Scalar>
Scalar bures_angle(Scalar overlap) {
  if (!(overlap >= 0) || !(overlap <= 1))
    throw std::domain_error("bures_angle: overlap must lie in [0, 1]");
  using std::acos;
  using std::sqrt;
  return acos(sqrt(overlap));
}

/// B = integral sqrt(rho0 rhot) dq dp.
template <typename Scalar>
Overlap<Scalar> bhattacharyya(const PhaseField<Scalar>& rho0, const PhaseField<Scalar>& rhot) {
  require_same_grid(rho0, rhot, "bhattacharyya");
  const FieldArray<Scalar> a = detail::clipped_density(rho0, "bhattacharyya");
  const FieldArray<Scalar> b = detail::clipped_density(rhot, "bhattacharyya");
  const Scalar raw = integrate(PhaseField<Scalar>(rho0.grid(), (a * b).sqrt()));
  return detail::clamp_overlap(raw, "bhattacharyya");
}

/// Hellinger distance sqrt(1 - B).
template <typename Scalar>
Scalar hellinger(const PhaseField<Scalar>& rho0, const PhaseField<Scalar>& rhot) {
  using std::sqrt;
  return sqrt(Scalar(1) - bhattacharyya(rho0, rhot).value);
}

/// Overlap against the t = 0 state and its time derivative along a trajectory.
template <typename Scalar = double>
struct OverlapSeries {
  OverlapMeasure measure = OverlapMeasure::Fidelity;
  std::vector<Scalar> times;
  std::vector<Scalar> value;
  std::vector<Scalar> rate;
  Scalar max_residual = 0;  ///< largest |pre-clamp residual| seen
};

/**
 * Second-order finite-difference derivative on a uniform time grid: centered
 * in the interior, one-sided three-point stencils at both ends.
 */
template <typename Scalar>
std::vector<Scalar> finite_difference_rate(std::span<const Scalar> values, Scalar dt) {
  const std::size_t n = values.size();
  if (n < 3) throw std::invalid_argument("finite_difference_rate: need at least 3 samples");
  std::vector<Scalar> rate(n);
  const Scalar inv = Scalar(1) / (Scalar(2) * dt);
  // End stencils in difference form: exactly zero on constant data.
  rate[0] = (Scalar(4) * (values[1] - values[0]) - (values[2] - values[0])) * inv;
  for (std::size_t i = 1; i + 1 < n; ++i) rate[i] = (values[i + 1] - values[i - 1]) * inv;
  rate[n - 1] =
      (Scalar(3) * (values[n - 1] - values[n - 2]) - (values[n - 2] - values[n - 3])) * inv;
  return rate;
}

inline constexpr std::size_t kMinSeriesPoints = 5;

/**
 * Builds the overlap series for states produced on demand by state_at(i),
 * i = 0 .. times.size()-1, so that only two fields are alive at once.
 * Times must be uniformly spaced.
 */
template <typename Scalar, typename StateAt>
OverlapSeries<Scalar> overlap_series(std::span<const Scalar> times, StateAt&& state_at,
                                     OverlapMeasure measure, const UnitsSpec<Scalar>& units) {
  if (times.size() < kMinSeriesPoints)
    throw std::invalid_argument("overlap_series: need at least 5 time points");
  const Scalar dt = times[1] - times[0];
  if (!(dt > 0)) throw std::invalid_argument("overlap_series: times must increase");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs((times[i] - times[i - 1]) - dt) > Scalar(1e-9) * dt)
      throw std::invalid_argument("overlap_series: time grid is not uniform");
  }

  OverlapSeries<Scalar> series;
  series.measure = measure;
  series.times.assign(times.begin(), times.end());
  series.value.reserve(times.size());

  const PhaseField<Scalar> first = state_at(std::size_t{0});
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Overlap<Scalar> o = [&] {
      const PhaseField<Scalar> s = i == 0 ? first : state_at(i);
      return measure == OverlapMeasure::Fidelity ? fidelity(first, s, units)
                                                 : bhattacharyya(first, s);
    }();
    series.value.push_back(o.value);
    series.max_residual = std::max(series.max_residual, std::abs(o.residual));
  }
  series.rate = finite_difference_rate(std::span<const Scalar>(series.value), dt);
  return series;
}

/// Overlap series of an already materialized trajectory.
template <typename Scalar>
OverlapSeries<Scalar> overlap_series(std::span<const Scalar> times,
                                     std::span<const PhaseField<Scalar>> states,
                                     OverlapMeasure measure, const UnitsSpec<Scalar>& units) {
  if (states.size() != times.size())
    throw std::invalid_argument("overlap_series: one state per time is required");
  return overlap_series(times, [&](std::size_t i) { return states[i]; }, measure, units);
}

/**
 * Closed-form fidelity F_n between the n-th trap eigenstate and its evolution
 * under a frequency modulation with scaling factor b and rate bdot, n = 0..3.
 */
template <typename Scalar>
Scalar closed_form_fidelity(int n, Scalar b, Scalar bdot, Scalar omega0) {
  if (!(b > 0)) throw std::invalid_argument("closed_form_fidelity: b must be positive");
  using std::pow;
  const Scalar w = omega0, w2 = omega0 * omega0;
  const Scalar b2 = b * b;
  const Scalar d = (b2 + 1) * (b2 + 1) * w2 + b2 * bdot * bdot;
  switch (n) {
    case 0:
      return Scalar(2) * b * w / pow(d, Scalar(0.5));
    case 1:
      return Scalar(8) * b2 * b * w2 * w / pow(d, Scalar(1.5));
    case 2: {
      const Scalar k = b2 * ((b2 - Scalar(10)) * w2 + bdot * bdot) + w2;
      return b * w * k * k / (Scalar(2) * pow(d, Scalar(2.5)));
    }
    case 3: {
      const Scalar k = Scalar(3) * b2 * bdot * bdot +
                       (Scalar(3) * b2 * b2 - Scalar(14) * b2 + Scalar(3)) * w2;
      return Scalar(2) * b2 * b * w2 * w * k * k / pow(d, Scalar(3.5));
    }
    default:
      throw std::invalid_argument("closed_form_fidelity: only n = 0..3 are available");
  }
}

}  // namespace qsl
