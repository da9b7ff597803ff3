#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qsl/brackets.hpp"
#include "qsl/diagnostics.hpp"
#include "qsl/grid.hpp"
#include "qsl/metrics.hpp"
#include "qsl/states.hpp"

namespace qsl {

/// Which speed limit a velocity belongs to.
enum class BoundKind { Qsl, Ssl, Csl, CslTimeAverage };

inline std::string_view to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::Qsl: return "qsl";
    case BoundKind::Ssl: return "ssl";
    case BoundKind::Csl: return "csl";
    case BoundKind::CslTimeAverage: return "csl-timeavg";
  }
  return "?";
}

inline constexpr double kPurityFloor = 1e-4;
inline constexpr double kNormalizationSlack = 1e-4;
inline constexpr double kDominanceSlack = 1e-3;

namespace detail {

template <typename Scalar>
void require_pure(const PhaseField<Scalar>& w0, const UnitsSpec<Scalar>& units,
                  const char* what) {
  const Scalar p = purity(w0, units.hbar);
  if (p < Scalar(1) - Scalar(kPurityFloor)) {
    std::ostringstream msg;
    msg << what << ": state purity " << static_cast<double>(p)
        << " < 1 - 1e-4; only pure states are supported";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace detail

/// Phase-space speed (2 pi hbar * integral {{H, W0}}^2)^(1/2) for a pure state.
template <typename Scalar>
Scalar v_qsl(const PhaseField<Scalar>& h, const PhaseField<Scalar>& w0, MoyalOrder order,
             const UnitsSpec<Scalar>& units) {
  require_same_grid(h, w0, "v_qsl");
  detail::require_pure(w0, units, "v_qsl");
  const PhaseField<Scalar> gen = moyal(h, w0, order, units);
  using std::sqrt;
  return sqrt(Scalar(2) * std::numbers::pi_v<Scalar> * units.hbar * integrate(gen * gen));
}

/// Semiclassical speed: the same norm with the Poisson bracket.
template <typename Scalar>
Scalar v_ssl(const PhaseField<Scalar>& h, const PhaseField<Scalar>& w0,
             const UnitsSpec<Scalar>& units) {
  return v_qsl(h, w0, MoyalOrder::Poisson, units);
}

/// ||{H, sqrt(rho)}||_2 in the plain dq dp measure.
template <typename Scalar>
Scalar liouvillian_norm(const PoissonGenerator<Scalar>& h, const PhaseField<Scalar>& rho) {
  const PhaseField<Scalar> root(rho.grid(), detail::clipped_density(rho, "liouvillian_norm").sqrt());
  const PhaseField<Scalar> gen = h(root);
  using std::sqrt;
  return sqrt(integrate(gen * gen));
}

template <typename Scalar>
Scalar liouvillian_norm(const PhaseField<Scalar>& h, const PhaseField<Scalar>& rho) {
  require_same_grid(h, rho, "liouvillian_norm");
  return liouvillian_norm(PoissonGenerator<Scalar>(h), rho);
}

/// Classical speed ||{H, sqrt(rho0)}||_2 for a normalized density.
template <typename Scalar>
Scalar v_csl(const PhaseField<Scalar>& h, const PhaseField<Scalar>& rho0) {
  const Scalar mass = integrate(rho0);
  if (std::abs(mass - Scalar(1)) > Scalar(kNormalizationSlack)) {
    std::ostringstream msg;
    msg << "v_csl: density integrates to " << static_cast<double>(mass) << ", expected 1";
    throw std::invalid_argument(msg.str());
  }
  return liouvillian_norm(h, rho0);
}

/// Running trapezoidal averages (1/t) * integral_0^t values; entry 0 is values[0].
template <typename Scalar>
std::vector<Scalar> running_time_average(std::span<const Scalar> times,
                                         std::span<const Scalar> values) {
  if (times.size() != values.size() || times.size() < 2)
    throw std::invalid_argument("running_time_average: need >= 2 matching samples");
  std::vector<Scalar> avg(times.size());
  avg[0] = values[0];
  Scalar area = 0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    area += Scalar(0.5) * (values[i] + values[i - 1]) * (times[i] - times[i - 1]);
    avg[i] = area / (times[i] - times[0]);
  }
  return avg;
}

/// Instantaneous norms ||{H, sqrt(rho_t)}||_2 along a density trajectory.
template <typename Scalar, typename DensityAt>
std::vector<Scalar> liouvillian_norm_series(const PhaseField<Scalar>& h, std::size_t count,
                                            DensityAt&& density_at) {
  const PoissonGenerator<Scalar> gen(h);
  std::vector<Scalar> norms;
  norms.reserve(count);
  for (std::size_t i = 0; i < count; ++i) norms.push_back(liouvillian_norm(gen, density_at(i)));
  return norms;
}

/// Time-averaged classical speed over the whole trajectory.
template <typename Scalar, typename DensityAt>
Scalar v_csl_timeavg(const PhaseField<Scalar>& h, std::span<const Scalar> times,
                     DensityAt&& density_at) {
  const auto norms = liouvillian_norm_series(h, times.size(), density_at);
  return running_time_average(times, std::span<const Scalar>(norms)).back();
}

template <typename Scalar = double>
struct TauBound {
  Scalar tau = 0;
  bool rate_free = false;  ///< v = 0 with no evolution: bound holds trivially
};

/// (1 - overlap) / v, the minimal time compatible with the speed v.
template <typename Scalar>
TauBound<Scalar> tau_bound(Scalar overlap_at_tau, Scalar v) {
  if (!(overlap_at_tau >= 0) || !(overlap_at_tau <= 1))
    throw std::domain_error("tau_bound: overlap must lie in [0, 1]");
  if (!(v > 0)) {
    if (overlap_at_tau == Scalar(1)) return {Scalar(0), true};
    throw std::domain_error("tau_bound: velocity must be positive");
  }
  return {(Scalar(1) - overlap_at_tau) / v, false};
}

/// Outcome of checking one bound along one trajectory.
template <typename Scalar = double>
struct BoundReport {
  std::string scenario_id;
  BoundKind kind = BoundKind::Csl;
  OverlapSeries<Scalar> overlap;
  std::vector<Scalar> velocity;    ///< bound velocity used at each time
  std::vector<Scalar> margin;      ///< |rate| / v, or the integrated ratio for csl-timeavg
  std::vector<Scalar> tau_margin;  ///< (1 - overlap(t)) / (t v(t)), 0 at t = 0
  Scalar max_margin = 0;           ///< over interior times
  std::size_t peak_index = 0;
  Scalar max_tau_margin = 0;
  std::optional<std::size_t> first_violation;

  bool passed() const { return !first_violation.has_value(); }
};

/// Raised by check_dominance(); carries the first offending time index.
class DominanceViolation : public NumericError {
 public:
  DominanceViolation(const std::string& what, std::size_t index)
      : NumericError(what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

namespace detail {

template <typename Scalar>
Scalar safe_ratio(Scalar num, Scalar den) {
  if (num == Scalar(0)) return Scalar(0);
  if (!(den > 0)) return std::numeric_limits<Scalar>::infinity();
  return num / den;
}

template <typename Scalar>
void finish_report(BoundReport<Scalar>& r) {
  const Scalar limit = Scalar(1) + Scalar(kDominanceSlack);
  const auto& t = r.overlap.times;
  const std::size_t n = t.size();
  r.tau_margin.assign(n, Scalar(0));
  for (std::size_t i = 1; i < n; ++i) {
    const Scalar elapsed = t[i] - t[0];
    r.tau_margin[i] = safe_ratio(Scalar(1) - r.overlap.value[i], r.velocity[i] * elapsed);
  }
  r.max_margin = 0;
  r.max_tau_margin = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (r.margin[i] > r.max_margin) {
      r.max_margin = r.margin[i];
      r.peak_index = i;
    }
    r.max_tau_margin = std::max(r.max_tau_margin, r.tau_margin[i]);
    if (!r.first_violation && (!(r.margin[i] <= limit) || !(r.tau_margin[i] <= limit)))
      r.first_violation = i;
  }
  if (n > 1) {
    r.max_tau_margin = std::max(r.max_tau_margin, r.tau_margin[n - 1]);
    if (!r.first_violation && !(r.tau_margin[n - 1] <= limit)) r.first_violation = n - 1;
  }
}

}  // namespace detail

/**
 * Rate dominance |d overlap/dt| <= v at every interior time, together with the
 * integrated form (1 - overlap(t)) <= t v. Margins above 1 + 1e-3 are recorded
 * as violations.
 */
template <typename Scalar>
BoundReport<Scalar> verify_rate_dominance(std::string scenario_id, BoundKind kind,
                                          OverlapSeries<Scalar> series, Scalar velocity) {
  BoundReport<Scalar> r;
  r.scenario_id = std::move(scenario_id);
  r.kind = kind;
  const std::size_t n = series.times.size();
  r.velocity.assign(n, velocity);
  r.margin.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    r.margin[i] = detail::safe_ratio(std::abs(series.rate[i]), velocity);
  r.overlap = std::move(series);
  detail::finish_report(r);
  return r;
}

/**
 * Time-averaged variant: with vbar(t) the running average of the
 * instantaneous norms, checks 1 - B(t) <= t vbar(t). The margin column holds
 * (1 - B(t)) / (t vbar(t)).
 */
template <typename Scalar>
BoundReport<Scalar> verify_time_averaged_dominance(std::string scenario_id,
                                                   OverlapSeries<Scalar> series,
                                                   std::span<const Scalar> instantaneous_norms) {
  BoundReport<Scalar> r;
  r.scenario_id = std::move(scenario_id);
  r.kind = BoundKind::CslTimeAverage;
  r.velocity = running_time_average(std::span<const Scalar>(series.times), instantaneous_norms);
  const std::size_t n = series.times.size();
  r.margin.assign(n, Scalar(0));
  for (std::size_t i = 1; i < n; ++i) {
    r.margin[i] = detail::safe_ratio(Scalar(1) - series.value[i],
                                     (series.times[i] - series.times[0]) * r.velocity[i]);
  }
  r.overlap = std::move(series);
  detail::finish_report(r);
  return r;
}

template <typename Scalar>
void check_dominance(const BoundReport<Scalar>& r) {
  if (r.passed()) return;
  const std::size_t i = *r.first_violation;
  std::ostringstream msg;
  msg << r.scenario_id << '/' << to_string(r.kind) << ": speed limit violated at index " << i
      << " (t = " << static_cast<double>(r.overlap.times[i])
      << ", margin = " << static_cast<double>(r.margin[i])
      << ", tau margin = " << static_cast<double>(r.tau_margin[i]) << ")";
  throw DominanceViolation(msg.str(), i);
}

}  // namespace qsl
