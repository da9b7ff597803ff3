#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "qsl/diagnostics.hpp"

namespace qsl {

/// Row-major storage: row index runs over q, column index over p.
template <typename Scalar>
using FieldArray =
    Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/**
 * Uniform rectangular discretization of the (q, p) plane together with the
 * physical constants every field on it refers to.
 *
 * Node (i, j) sits at q = q_min + i*dq, p = p_min + j*dp. The phase-space
 * measure used by quantum quantities is 2*pi*hbar*dq*dp; integrate() itself
 * returns the plain dq*dp integral.
 */
template <typename Scalar = double>
class PhaseGrid {
 public:
  static constexpr Eigen::Index kMinNodes = 16;

  PhaseGrid(Scalar q_min, Scalar q_max, Scalar p_min, Scalar p_max,
            Eigen::Index nq, Eigen::Index np, Scalar hbar, Scalar mass)
      : q_min_(q_min), q_max_(q_max), p_min_(p_min), p_max_(p_max),
        nq_(nq), np_(np), hbar_(hbar), mass_(mass) {
    if (!(q_max > q_min) || !(p_max > p_min))
      throw std::invalid_argument("PhaseGrid: empty q or p range");
    if (nq < kMinNodes || np < kMinNodes)
      throw std::invalid_argument("PhaseGrid: need at least 16 nodes per axis");
    if (!(hbar > 0) || !(mass > 0))
      throw std::invalid_argument("PhaseGrid: hbar and mass must be positive");
    if (!(dq() > 0) || !(dp() > 0) || !std::isfinite(static_cast<double>(dq())) ||
        !std::isfinite(static_cast<double>(dp())))
      throw std::invalid_argument("PhaseGrid: degenerate spacing");
  }

  /// Symmetric grid [-half_q, half_q] x [-half_p, half_p].
  static PhaseGrid centered(Scalar half_q, Scalar half_p, Eigen::Index nq,
                            Eigen::Index np, Scalar hbar, Scalar mass) {
    return PhaseGrid(-half_q, half_q, -half_p, half_p, nq, np, hbar, mass);
  }

  Scalar q_min() const { return q_min_; }
  Scalar q_max() const { return q_max_; }
  Scalar p_min() const { return p_min_; }
  Scalar p_max() const { return p_max_; }
  Eigen::Index nq() const { return nq_; }
  Eigen::Index np() const { return np_; }
  Scalar hbar() const { return hbar_; }
  Scalar mass() const { return mass_; }

  Scalar dq() const { return (q_max_ - q_min_) / Scalar(nq_ - 1); }
  Scalar dp() const { return (p_max_ - p_min_) / Scalar(np_ - 1); }
  Scalar q(Eigen::Index i) const { return q_min_ + Scalar(i) * dq(); }
  Scalar p(Eigen::Index j) const { return p_min_ + Scalar(j) * dp(); }

  friend bool operator==(const PhaseGrid&, const PhaseGrid&) = default;

 private:
  Scalar q_min_, q_max_, p_min_, p_max_;
  Eigen::Index nq_, np_;
  Scalar hbar_, mass_;
};

/// A real scalar field sampled on a PhaseGrid. Values are always finite.
template <typename Scalar = double>
class PhaseField {
 public:
  using Array = FieldArray<Scalar>;

  explicit PhaseField(const PhaseGrid<Scalar>& grid)
      : grid_(grid), values_(Array::Zero(grid.nq(), grid.np())) {}

  template <typename Derived>
  PhaseField(const PhaseGrid<Scalar>& grid,
             const Eigen::ArrayBase<Derived>& values)
      : grid_(grid), values_(values) {
    if (values_.rows() != grid.nq() || values_.cols() != grid.np())
      throw std::invalid_argument("PhaseField: value shape does not match grid");
    if (!values_.allFinite())
      throw NumericError("PhaseField: non-finite value");
  }

  const PhaseGrid<Scalar>& grid() const { return grid_; }
  const Array& values() const { return values_; }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }

 private:
  PhaseGrid<Scalar> grid_;
  Array values_;
};

template <typename Scalar>
void require_same_grid(const PhaseField<Scalar>& a, const PhaseField<Scalar>& b,
                       const char* where) {
  if (!(a.grid() == b.grid()))
    throw GridMismatch(std::string(where) + ": fields live on different grids");
}

/// Samples fn(q, p) at every node.
template <typename Scalar, typename Fn>
PhaseField<Scalar> sample(const PhaseGrid<Scalar>& grid, Fn&& fn) {
  FieldArray<Scalar> v(grid.nq(), grid.np());
  for (Eigen::Index i = 0; i < grid.nq(); ++i) {
    const Scalar q = grid.q(i);
    for (Eigen::Index j = 0; j < grid.np(); ++j) v(i, j) = fn(q, grid.p(j));
  }
  return PhaseField<Scalar>(grid, v);
}

// Elementwise arithmetic. Every binary operation checks grid identity.

template <typename Scalar>
PhaseField<Scalar> operator+(const PhaseField<Scalar>& a, const PhaseField<Scalar>& b) {
  require_same_grid(a, b, "operator+");
  return PhaseField<Scalar>(a.grid(), a.values() + b.values());
}

template <typename Scalar>
PhaseField<Scalar> operator-(const PhaseField<Scalar>& a, const PhaseField<Scalar>& b) {
  require_same_grid(a, b, "operator-");
  return PhaseField<Scalar>(a.grid(), a.values() - b.values());
}

template <typename Scalar>
PhaseField<Scalar> operator*(const PhaseField<Scalar>& a, const PhaseField<Scalar>& b) {
  require_same_grid(a, b, "operator*");
  return PhaseField<Scalar>(a.grid(), a.values() * b.values());
}

template <typename Scalar>
PhaseField<Scalar> operator*(Scalar s, const PhaseField<Scalar>& a) {
  return PhaseField<Scalar>(a.grid(), s * a.values());
}

template <typename Scalar>
PhaseField<Scalar> operator-(const PhaseField<Scalar>& a) {
  return PhaseField<Scalar>(a.grid(), -a.values());
}

/// Trapezoidal double integral over the grid rectangle (plain dq dp measure).
/// Summation order is fixed (rows in order, columns in order).
template <typename Scalar>
Scalar integrate(const PhaseField<Scalar>& f) {
  const auto& g = f.grid();
  const auto& v = f.values();
  const Eigen::Index nq = g.nq(), np = g.np();
  Scalar total = 0;
  for (Eigen::Index i = 0; i < nq; ++i) {
    Scalar row = Scalar(0.5) * (v(i, 0) + v(i, np - 1));
    for (Eigen::Index j = 1; j < np - 1; ++j) row += v(i, j);
    total += (i == 0 || i == nq - 1) ? Scalar(0.5) * row : row;
  }
  return total * g.dq() * g.dp();
}

/// Largest |value| on the outermost two rows/columns divided by the global
/// largest |value|; 0 for the zero field.
template <typename Scalar>
Scalar boundary_ratio(const PhaseField<Scalar>& f) {
  const auto a = f.values().abs();
  const Scalar peak = a.maxCoeff();
  if (peak == Scalar(0)) return Scalar(0);
  const Scalar edge = std::max({a.topRows(2).maxCoeff(), a.bottomRows(2).maxCoeff(),
                                a.leftCols(2).maxCoeff(), a.rightCols(2).maxCoeff()});
  return edge / peak;
}

namespace detail {

enum class Axis { Q, P };

// Fourth-order central difference, values outside the grid read as zero.
template <typename Scalar>
PhaseField<Scalar> central_difference(const PhaseField<Scalar>& f, Axis axis) {
  const auto& g = f.grid();
  const auto& v = f.values();
  const Eigen::Index nq = g.nq(), np = g.np();
  const Scalar h = axis == Axis::Q ? g.dq() : g.dp();
  const Scalar scale = Scalar(1) / (Scalar(12) * h);
  FieldArray<Scalar> out(nq, np);

  // Zero padding by two nodes on both sides of the differentiated axis.
  if (axis == Axis::Q) {
    FieldArray<Scalar> pad = FieldArray<Scalar>::Zero(nq + 4, np);
    pad.middleRows(2, nq) = v;
    out = (pad.topRows(nq) - Scalar(8) * pad.middleRows(1, nq) +
           Scalar(8) * pad.middleRows(3, nq) - pad.bottomRows(nq)) * scale;
  } else {
    FieldArray<Scalar> pad = FieldArray<Scalar>::Zero(nq, np + 4);
    pad.middleCols(2, np) = v;
    out = (pad.leftCols(np) - Scalar(8) * pad.middleCols(1, np) +
           Scalar(8) * pad.middleCols(3, np) - pad.rightCols(np)) * scale;
  }
  return PhaseField<Scalar>(g, out);
}

}  // namespace detail

/// dF/dq by fourth-order central differences with zero extension.
template <typename Scalar>
PhaseField<Scalar> d_dq(const PhaseField<Scalar>& f) {
  return detail::central_difference(f, detail::Axis::Q);
}

/// dF/dp by fourth-order central differences with zero extension.
template <typename Scalar>
PhaseField<Scalar> d_dp(const PhaseField<Scalar>& f) {
  return detail::central_difference(f, detail::Axis::P);
}

/// Mixed third derivative d^3 f / dq^iq dp^ip, iq + ip == 3, built by
/// composing the first-derivative stencils.
template <typename Scalar>
PhaseField<Scalar> d3(const PhaseField<Scalar>& f, int iq, int ip) {
  if (iq < 0 || ip < 0 || iq + ip != 3) {
    std::ostringstream msg;
    msg << "d3: derivative orders must be non-negative and sum to 3 (got " << iq
        << ", " << ip << ")";
    throw std::invalid_argument(msg.str());
  }
  PhaseField<Scalar> out = f;
  for (int k = 0; k < iq; ++k) out = d_dq(out);
  for (int k = 0; k < ip; ++k) out = d_dp(out);
  return out;
}

using PhaseGridd = PhaseGrid<double>;
using PhaseFieldd = PhaseField<double>;

}  // namespace qsl
