#pragma once

#include "qsl/grid.hpp"
#include "qsl/states.hpp"

namespace qsl {

/// Truncation level of the semiclassical expansion of the Moyal bracket.
enum class MoyalOrder { Poisson, HbarSquared };

/// f -> {h, f} with the derivatives of h computed once.
template <typename Scalar>
class PoissonGenerator {
 public:
  explicit PoissonGenerator(const PhaseField<Scalar>& h)
      : grid_(h.grid()), hq_(d_dq(h).values()), hp_(d_dp(h).values()) {}

  const PhaseGrid<Scalar>& grid() const { return grid_; }

  PhaseField<Scalar> operator()(const PhaseField<Scalar>& f) const {
    if (!(f.grid() == grid_)) throw GridMismatch("poisson: fields live on different grids");
    return PhaseField<Scalar>(grid_, hq_ * d_dp(f).values() - hp_ * d_dq(f).values());
  }

 private:
  PhaseGrid<Scalar> grid_;
  FieldArray<Scalar> hq_, hp_;
};

/// {H, f} = dH/dq df/dp - dH/dp df/dq, the generator in df/dt = {H, f}.
template <typename Scalar>
PhaseField<Scalar> poisson(const PhaseField<Scalar>& h, const PhaseField<Scalar>& f) {
  require_same_grid(h, f, "poisson");
  return PoissonGenerator<Scalar>(h)(f);
}

/**
 * Moyal bracket of h with f expanded in hbar.
 *
 * Expanding (2/hbar) h sin((hbar/2) L) f with L = <-d_q ->d_p - <-d_p ->d_q
 * to cubic order gives
 *
 *   {{h, f}} = {h, f} - hbar^2/24 (h_qqq f_ppp - 3 h_qqp f_qpp
 *                                  + 3 h_qpp f_qqp - h_ppp f_qqq) + O(hbar^4).
 */
template <typename Scalar>
PhaseField<Scalar> moyal(const PhaseField<Scalar>& h, const PhaseField<Scalar>& f,
                         MoyalOrder order, const UnitsSpec<Scalar>& units) {
  require_same_grid(h, f, "moyal");
  PhaseField<Scalar> bracket = poisson(h, f);
  if (order == MoyalOrder::Poisson) return bracket;

  auto term = [&](int iq, int ip) {
    return (d3(h, iq, ip) * d3(f, 3 - iq, 3 - ip)).values();
  };
  // term(iq, ip) pairs h differentiated (iq, ip) times with f differentiated (ip, iq) times.
  const FieldArray<Scalar> cubic =
      term(3, 0) - Scalar(3) * term(2, 1) + Scalar(3) * term(1, 2) - term(0, 3);
  const Scalar coeff = units.hbar * units.hbar / Scalar(24);
  return PhaseField<Scalar>(h.grid(), bracket.values() - coeff * cubic);
}

}  // namespace qsl
