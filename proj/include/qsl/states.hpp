#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qsl/diagnostics.hpp"
#include "qsl/grid.hpp"

namespace qsl {

/// Physical constants of a harmonic-trap problem.
template <typename Scalar = double>
struct UnitsSpec {
  Scalar hbar = 1;
  Scalar mass = 1;
  Scalar omega0 = 1;  ///< reference trap frequency

  void validate() const {
    if (!(hbar > 0) || !(mass > 0) || !(omega0 > 0))
      throw std::invalid_argument("UnitsSpec: hbar, mass and omega0 must be positive");
    if (!std::isfinite(static_cast<double>(x0())))
      throw std::invalid_argument("UnitsSpec: oscillator length is not finite");
  }

  /// Oscillator length sqrt(hbar / (m * omega0)).
  Scalar x0() const { using std::sqrt; return sqrt(hbar / (mass * omega0)); }
};

/**
 * Gaussian widths use the 1/e half-width convention of the classical density
 *   rho(q, p) = exp(-(q-qc)^2/sigma_q^2 - (p-pc)^2/sigma_p^2) / (pi sigma_q sigma_p).
 * The matching Wigner function is proportional to sqrt(rho), so its standard
 * deviations are sigma_q and sigma_p themselves.
 */
template <typename Scalar = double>
struct GaussianSpec {
  Scalar center_q = 0;
  Scalar center_p = 0;
  Scalar sigma_q = 1;
  Scalar sigma_p = 1;

  void validate() const {
    if (!(sigma_q > 0) || !(sigma_p > 0))
      throw std::invalid_argument("GaussianSpec: widths must be positive");
  }
};

/// Widths of the trap ground state: sigma_q = x0/sqrt(2), sigma_p = hbar/(x0 sqrt(2)).
template <typename Scalar>
GaussianSpec<Scalar> matched_gaussian(const UnitsSpec<Scalar>& units) {
  using std::sqrt;
  const Scalar x0 = units.x0();
  return {0, 0, x0 / sqrt(Scalar(2)), units.hbar / (x0 * sqrt(Scalar(2)))};
}

inline constexpr int kMaxEigenstate = 12;

/// L_n(x) via L_{k+1} = ((2k+1-x) L_k - k L_{k-1}) / (k+1).
template <typename Scalar>
Scalar laguerre(int n, Scalar x) {
  if (n < 0) throw std::invalid_argument("laguerre: negative order");
  Scalar prev = 1;
  if (n == 0) return prev;
  Scalar cur = Scalar(1) - x;
  for (int k = 1; k < n; ++k) {
    const Scalar next = ((Scalar(2 * k + 1) - x) * cur - Scalar(k) * prev) / Scalar(k + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Trap energy h(q, p) = p^2/2m + m omega^2 q^2 / 2.
template <typename Scalar>
Scalar oscillator_energy(const UnitsSpec<Scalar>& u, Scalar omega, Scalar q, Scalar p) {
  return p * p / (Scalar(2) * u.mass) + Scalar(0.5) * u.mass * omega * omega * q * q;
}

// Closed-form phase-space functions. Each is a callable (q, p) -> value so it
// can be sampled directly or evaluated at transported points.

/// Wigner function of the n-th eigenstate of the omega0 trap.
template <typename Scalar = double>
struct HoWigner {
  int n = 0;
  UnitsSpec<Scalar> units;

  Scalar operator()(Scalar q, Scalar p) const {
    using std::exp;
    const Scalar e = oscillator_energy(units, units.omega0, q, p) /
                     (units.hbar * units.omega0);
    const Scalar sign = (n % 2 == 0) ? Scalar(1) : Scalar(-1);
    return sign / (std::numbers::pi_v<Scalar> * units.hbar) * exp(-Scalar(2) * e) *
           laguerre(n, Scalar(4) * e);
  }
};

/// Normalized Gaussian Wigner function with standard deviations (sigma_q, sigma_p).
template <typename Scalar = double>
struct GaussianWigner {
  GaussianSpec<Scalar> spec;

  Scalar operator()(Scalar q, Scalar p) const {
    using std::exp;
    const Scalar x = (q - spec.center_q) / spec.sigma_q;
    const Scalar y = (p - spec.center_p) / spec.sigma_p;
    return exp(-Scalar(0.5) * (x * x + y * y)) /
           (Scalar(2) * std::numbers::pi_v<Scalar> * spec.sigma_q * spec.sigma_p);
  }
};

/// Classical Gaussian density exp(-x^2 - y^2) / (pi sigma_q sigma_p).
template <typename Scalar = double>
struct ClassicalGaussian {
  GaussianSpec<Scalar> spec;

  Scalar operator()(Scalar q, Scalar p) const {
    using std::exp;
    const Scalar x = (q - spec.center_q) / spec.sigma_q;
    const Scalar y = (p - spec.center_p) / spec.sigma_p;
    return exp(-(x * x + y * y)) /
           (std::numbers::pi_v<Scalar> * spec.sigma_q * spec.sigma_p);
  }
};

/// 2*pi*hbar * W(q, p)^2 for any Wigner callable W.
template <typename Scalar, typename WignerFn>
struct SquaredWigner {
  WignerFn wigner;
  Scalar hbar;

  Scalar operator()(Scalar q, Scalar p) const {
    const Scalar w = wigner(q, p);
    return Scalar(2) * std::numbers::pi_v<Scalar> * hbar * w * w;
  }
};

/// Pointwise square root of a non-negative callable.
template <typename Scalar, typename Fn>
struct SqrtOf {
  Fn fn;
  Scalar operator()(Scalar q, Scalar p) const {
    using std::sqrt;
    const Scalar v = fn(q, p);
    return v > 0 ? sqrt(v) : Scalar(0);
  }
};

inline constexpr double kBoundaryTolerance = 1e-10;

namespace detail {

template <typename Scalar>
void warn_if_truncated(const PhaseField<Scalar>& f, const char* what) {
  const Scalar ratio = boundary_ratio(f);
  if (ratio > Scalar(kBoundaryTolerance)) {
    std::ostringstream msg;
    msg << what << ": boundary magnitude " << static_cast<double>(ratio)
        << " of peak; grid may truncate the state";
    warn(msg.str());
  }
}

}  // namespace detail

template <typename Scalar>
PhaseField<Scalar> ho_wigner(int n, const UnitsSpec<Scalar>& units,
                             const PhaseGrid<Scalar>& grid) {
  if (n < 0 || n > kMaxEigenstate)
    throw std::invalid_argument("ho_wigner: n must lie in [0, 12]");
  units.validate();
  auto field = sample(grid, HoWigner<Scalar>{n, units});
  detail::warn_if_truncated(field, "ho_wigner");
  return field;
}

template <typename Scalar>
PhaseField<Scalar> gaussian_wigner(const GaussianSpec<Scalar>& spec,
                                   const PhaseGrid<Scalar>& grid) {
  spec.validate();
  auto field = sample(grid, GaussianWigner<Scalar>{spec});
  detail::warn_if_truncated(field, "gaussian_wigner");
  return field;
}

template <typename Scalar>
PhaseField<Scalar> classical_gaussian(const GaussianSpec<Scalar>& spec,
                                      const PhaseGrid<Scalar>& grid) {
  spec.validate();
  auto field = sample(grid, ClassicalGaussian<Scalar>{spec});
  detail::warn_if_truncated(field, "classical_gaussian");
  return field;
}

/// rho = 2*pi*hbar*W^2. With require_nonnegative set, a Wigner value below
/// -1e-10 * max(W) is rejected: such a state has no classical counterpart.
template <typename Scalar>
PhaseField<Scalar> classical_from_wigner(const PhaseField<Scalar>& w,
                                         const UnitsSpec<Scalar>& units,
                                         bool require_nonnegative = false) {
  if (require_nonnegative) {
    const Scalar floor = -Scalar(1e-10) * w.values().maxCoeff();
    if (w.values().minCoeff() < floor)
      throw NumericError("classical_from_wigner: Wigner function has negative regions");
  }
  return PhaseField<Scalar>(
      w.grid(), Scalar(2) * std::numbers::pi_v<Scalar> * units.hbar * w.values().square());
}

/// H(q, p) = p^2/2m + m omega^2 q^2/2 sampled on the grid; omega = 0 is free motion.
template <typename Scalar>
PhaseField<Scalar> quadratic_hamiltonian(const UnitsSpec<Scalar>& units, Scalar omega,
                                         const PhaseGrid<Scalar>& grid) {
  if (!(omega >= 0)) throw std::invalid_argument("quadratic_hamiltonian: omega must be >= 0");
  return sample(grid, [&](Scalar q, Scalar p) { return oscillator_energy(units, omega, q, p); });
}

/// Purity 2*pi*hbar * integral of W^2.
template <typename Scalar>
Scalar purity(const PhaseField<Scalar>& w, Scalar hbar) {
  return Scalar(2) * std::numbers::pi_v<Scalar> * hbar * integrate(w * w);
}

}  // namespace qsl
