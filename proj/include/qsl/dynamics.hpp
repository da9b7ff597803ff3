#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qsl/diagnostics.hpp"
#include "qsl/grid.hpp"
#include "qsl/states.hpp"

namespace qsl {

/**
 * Linear phase-space map (q, p) -> (alpha q + beta p, gamma q + delta p).
 *
 * Maps produced by this module are area preserving (det = 1). A state is
 * transported by pulling back: f_t(q, p) = f_0(map(q, p)).
 */
template <typename Scalar = double>
struct SymplecticMap {
  Scalar alpha = 1, beta = 0, gamma = 0, delta = 1;

  Scalar determinant() const { return alpha * delta - beta * gamma; }

  std::pair<Scalar, Scalar> operator()(Scalar q, Scalar p) const {
    return {alpha * q + beta * p, gamma * q + delta * p};
  }

  /// Inverse map; uses det = 1.
  SymplecticMap inverse() const { return {delta, -beta, -gamma, alpha}; }
};

/// Scaling solution b(t) of the Ermakov equation b'' + omega(t)^2 b = omega0^2 / b^3.
template <typename Scalar = double>
struct QuenchTrajectory {
  std::vector<Scalar> times;
  std::vector<Scalar> b;
  std::vector<Scalar> bdot;
  Scalar bddot0 = 0;

  std::size_t size() const { return times.size(); }
  Scalar dt() const { return times.size() > 1 ? times[1] - times[0] : Scalar(0); }
  Scalar b_max() const { return *std::max_element(b.begin(), b.end()); }
  Scalar bdot_max_abs() const {
    Scalar m = 0;
    for (Scalar v : bdot) m = std::max(m, std::abs(v));
    return m;
  }
};

inline constexpr int kMinErmakovSteps = 100;
inline constexpr double kFocusingFloor = 1e-12;

/**
 * Integrates the Ermakov equation from b(0) = 1, b'(0) = 0 with classical RK4
 * at fixed step t_max / steps. omega_of_t is the frequency acting for t >= 0;
 * a sudden quench is expressed by returning the post-quench value at t = 0.
 */
template <typename Scalar>
QuenchTrajectory<Scalar> solve_ermakov(const std::function<Scalar(Scalar)>& omega_of_t,
                                       Scalar omega0, Scalar t_max, int steps) {
  if (steps < kMinErmakovSteps)
    throw std::invalid_argument("solve_ermakov: need at least 100 steps");
  if (!(t_max > 0)) throw std::invalid_argument("solve_ermakov: t_max must be positive");
  if (!(omega0 > 0)) throw std::invalid_argument("solve_ermakov: omega0 must be positive");

  const Scalar w0sq = omega0 * omega0;
  auto omega_sq = [&](Scalar t) {
    const Scalar w = omega_of_t(t);
    if (!std::isfinite(static_cast<double>(w))) {
      std::ostringstream msg;
      msg << "solve_ermakov: omega(t) is not finite at t = " << static_cast<double>(t);
      throw std::invalid_argument(msg.str());
    }
    return w * w;
  };
  // (b, b') -> (b', omega0^2/b^3 - omega^2 b)
  auto accel = [&](Scalar t, Scalar b) { return w0sq / (b * b * b) - omega_sq(t) * b; };

  const Scalar h = t_max / Scalar(steps);
  QuenchTrajectory<Scalar> traj;
  traj.times.reserve(steps + 1);
  traj.b.reserve(steps + 1);
  traj.bdot.reserve(steps + 1);
  traj.times.push_back(0);
  traj.b.push_back(1);
  traj.bdot.push_back(0);
  traj.bddot0 = accel(Scalar(0), Scalar(1));

  Scalar b = 1, v = 0;
  for (int k = 0; k < steps; ++k) {
    const Scalar t = Scalar(k) * h;
    const Scalar k1b = v, k1v = accel(t, b);
    const Scalar k2b = v + Scalar(0.5) * h * k1v, k2v = accel(t + Scalar(0.5) * h, b + Scalar(0.5) * h * k1b);
    const Scalar k3b = v + Scalar(0.5) * h * k2v, k3v = accel(t + Scalar(0.5) * h, b + Scalar(0.5) * h * k2b);
    const Scalar k4b = v + h * k3v, k4v = accel(t + h, b + h * k3b);
    b += h / Scalar(6) * (k1b + Scalar(2) * k2b + Scalar(2) * k3b + k4b);
    v += h / Scalar(6) * (k1v + Scalar(2) * k2v + Scalar(2) * k3v + k4v);
    if (!(b > Scalar(kFocusingFloor))) {
      std::ostringstream msg;
      msg << "solve_ermakov: b collapsed below 1e-12 at t = "
          << static_cast<double>(t + h) << " (focusing singularity)";
      throw NumericError(msg.str());
    }
    traj.times.push_back(Scalar(k + 1) * h);
    traj.b.push_back(b);
    traj.bdot.push_back(v);
  }
  return traj;
}

/// (q, p) -> (q/b, b p - m q b').
template <typename Scalar>
SymplecticMap<Scalar> scaling_map(Scalar b, Scalar bdot, Scalar mass) {
  if (!(b > 0)) throw std::invalid_argument("scaling_map: b must be positive");
  return {Scalar(1) / b, Scalar(0), -mass * bdot, b};
}

namespace detail {

// Cubic Lagrange weights for nodes at offsets -1, 0, 1, 2 and fraction t in [0, 1).
template <typename Scalar>
void cubic_weights(Scalar t, Scalar (&w)[4]) {
  w[0] = -t * (t - 1) * (t - 2) / Scalar(6);
  w[1] = (t + 1) * (t - 1) * (t - 2) / Scalar(2);
  w[2] = -(t + 1) * t * (t - 2) / Scalar(2);
  w[3] = (t + 1) * t * (t - 1) / Scalar(6);
}

template <typename Scalar>
bool inside(const PhaseGrid<Scalar>& g, Scalar q, Scalar p) {
  return q >= g.q_min() && q <= g.q_max() && p >= g.p_min() && p <= g.p_max();
}

// Bicubic (tensor cubic Lagrange) interpolation with zero extension.
template <typename Scalar>
Scalar interpolate(const PhaseField<Scalar>& f, Scalar q, Scalar p) {
  const auto& g = f.grid();
  if (!inside(g, q, p)) return Scalar(0);
  const Scalar x = (q - g.q_min()) / g.dq();
  const Scalar y = (p - g.p_min()) / g.dp();
  const Eigen::Index i0 = std::min<Eigen::Index>(static_cast<Eigen::Index>(x), g.nq() - 1);
  const Eigen::Index j0 = std::min<Eigen::Index>(static_cast<Eigen::Index>(y), g.np() - 1);
  Scalar wq[4], wp[4];
  cubic_weights(x - Scalar(i0), wq);
  cubic_weights(y - Scalar(j0), wp);

  const auto& v = f.values();
  Scalar acc = 0;
  for (int a = 0; a < 4; ++a) {
    const Eigen::Index i = i0 - 1 + a;
    if (i < 0 || i >= g.nq() || wq[a] == Scalar(0)) continue;
    Scalar row = 0;
    for (int c = 0; c < 4; ++c) {
      const Eigen::Index j = j0 - 1 + c;
      if (j < 0 || j >= g.np()) continue;
      row += wp[c] * v(i, j);
    }
    acc += wq[a] * row;
  }
  return acc;
}

}  // namespace detail

inline constexpr double kLostMassTolerance = 1e-8;

/**
 * Pulls f0 back through the map: f_t(q, p) = f0(map(q, p)), with bicubic
 * interpolation of f0. Points that land outside the grid read as zero. Warns
 * when more than 1e-8 of the (absolute) mass of f0 has no preimage on the grid.
 */
template <typename Scalar>
PhaseField<Scalar> transport(const PhaseField<Scalar>& f0, const SymplecticMap<Scalar>& map) {
  const auto& g = f0.grid();
  const auto inv = map.inverse();
  Scalar total = 0, lost = 0;
  for (Eigen::Index i = 0; i < g.nq(); ++i) {
    for (Eigen::Index j = 0; j < g.np(); ++j) {
      const Scalar a = std::abs(f0(i, j));
      total += a;
      const auto [q, p] = inv(g.q(i), g.p(j));
      if (!detail::inside(g, q, p)) lost += a;
    }
  }
  if (total > 0 && lost / total > Scalar(kLostMassTolerance)) {
    std::ostringstream msg;
    msg << "transport: fraction " << static_cast<double>(lost / total)
        << " of the mass maps outside the grid";
    warn(msg.str());
  }
  return sample(g, [&](Scalar q, Scalar p) {
    const auto [qs, ps] = map(q, p);
    return detail::interpolate(f0, qs, ps);
  });
}

/// Pullback of a closed-form state: samples fn(map(q, p)) exactly.
template <typename Scalar, typename Fn>
PhaseField<Scalar> pullback(Fn&& fn, const SymplecticMap<Scalar>& map,
                            const PhaseGrid<Scalar>& grid) {
  return sample(grid, [&](Scalar q, Scalar p) {
    const auto [qs, ps] = map(q, p);
    return fn(qs, ps);
  });
}

template <typename Scalar>
SymplecticMap<Scalar> trajectory_map(const QuenchTrajectory<Scalar>& traj, std::size_t index,
                                     Scalar mass) {
  if (index >= traj.size()) {
    std::ostringstream msg;
    msg << "trajectory index " << index << " out of range [0, " << traj.size() << ")";
    throw std::out_of_range(msg.str());
  }
  return scaling_map(traj.b[index], traj.bdot[index], mass);
}

/// State at traj.times[index] by bicubic transport of a sampled initial field.
template <typename Scalar>
PhaseField<Scalar> evolve_quench(const PhaseField<Scalar>& state0,
                                 const QuenchTrajectory<Scalar>& traj, std::size_t index) {
  return transport(state0, trajectory_map(traj, index, state0.grid().mass()));
}

/// State at traj.times[index] for a closed-form initial state (no interpolation).
template <typename Scalar, typename Fn>
PhaseField<Scalar> evolve_quench(Fn&& state0, const QuenchTrajectory<Scalar>& traj,
                                 std::size_t index, const PhaseGrid<Scalar>& grid) {
  return pullback(std::forward<Fn>(state0), trajectory_map(traj, index, grid.mass()), grid);
}

/**
 * Grid that holds a state of widths (sigma_q, sigma_p) over a whole quench:
 * half-widths L_q = k b_max sigma_q and L_p = k sigma_p max(1, m sigma_q max|b'| / sigma_p).
 */
template <typename Scalar>
PhaseGrid<Scalar> quench_grid(const UnitsSpec<Scalar>& units, Scalar sigma_q, Scalar sigma_p,
                              const QuenchTrajectory<Scalar>& traj, Eigen::Index n,
                              Scalar halfwidth_sigmas) {
  const Scalar half_q = halfwidth_sigmas * traj.b_max() * sigma_q;
  const Scalar stretch = std::max(Scalar(1), units.mass * sigma_q * traj.bdot_max_abs() / sigma_p);
  const Scalar half_p = halfwidth_sigmas * sigma_p * stretch;
  return PhaseGrid<Scalar>::centered(half_q, half_p, n, n, units.hbar, units.mass);
}

}  // namespace qsl
