#pragma once

// Composition of two w-bit uniform variates into one 2w-bit uniform variate.
//
// Two evaluation routes are provided and are expected to agree:
//   * a floating route that evaluates the normalization formulas literally on
//     grid-valued inputs (normalize_discrete, normalize_unit), and
//   * an integer route that encodes the accepted pair as a lattice index and
//     converts it to a double with a single correctly rounded division
//     (compose_index, index_to_unit).

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include "widerand/error.hpp"
#include "widerand/resolution.hpp"

namespace widerand {

namespace detail {

using uint128 = unsigned __int128;

inline int bit_width128(uint128 x) noexcept {
  const auto hi = static_cast<std::uint64_t>(x >> 64);
  if (hi != 0) return 64 + std::bit_width(hi);
  return std::bit_width(static_cast<std::uint64_t>(x));
}

/// Nearest binary64 value to num/den (round half to even).
inline double ratio_nearest(uint128 num, std::uint64_t den) {
  if (den == 0) throw Error(ErrorKind::InvalidParameter, "zero denominator");
  if (num == 0) return 0.0;

  uint128 q = num / den;
  uint128 r = num % den;
  int shift = 0;
  // Extend the quotient until it carries 53 mantissa bits plus a guard bit
  // and a round bit; the remainder is the sticky part.
  for (int len = bit_width128(q); len < 55; len = bit_width128(q)) {
    const int s = 55 - len;
    const uint128 rs = r << s;
    q = (q << s) | (rs / den);
    r = rs % den;
    shift += s;
  }

  const int extra = bit_width128(q) - 53;
  auto mantissa = static_cast<std::uint64_t>(q >> extra);
  const uint128 rem = q & ((uint128{1} << extra) - 1);
  const uint128 half = uint128{1} << (extra - 1);
  const bool sticky = r != 0;
  if (rem > half || (rem == half && (sticky || (mantissa & 1U) != 0))) ++mantissa;
  return std::ldexp(static_cast<double>(mantissa), extra - shift);
}

inline void require_grid_point(const GridRange& r, double x, const char* what) {
  if (!r.on_grid(x)) {
    throw Error(ErrorKind::PreconditionViolation,
                std::string(what) + " is not a point of its source grid");
  }
}

}  // namespace detail

/// z = x1 + k*x2. Exact for w-bit grid inputs because w <= 26.
inline double combine(double x1, double x2, const ResolutionParam& p) noexcept {
  return x1 + p.k() * x2;
}

/// Interval [a0 + k*b, a + k*b0] on which the density of x1 + k*x2 is flat.
inline Interval uniform_interval(const Interval& r1, const Interval& r2,
                                 const ResolutionParam& p) noexcept {
  return {r1.lo + p.k() * r2.hi, r1.hi + p.k() * r2.lo};
}

inline Interval uniform_interval(const GridRange& r1, const GridRange& r2,
                                 const ResolutionParam& p) noexcept {
  return uniform_interval(r1.bounds(), r2.bounds(), p);
}

/// Boundary draws of x1 are dropped; every interior grid point is kept.
inline bool is_accepted(double x1, const GridRange& r1) {
  detail::require_grid_point(r1, x1, "x1");
  return x1 != r1.lo() && x1 != r1.hi();
}

/// Continuous map of the flat interval onto [0, 1]:
///   (x1 + k*x2 - (a0 + k*b)) / (a - a0 - k*(b - b0)).
inline double normalize_continuous(double x1, double x2, const GridRange& r1,
                                   const GridRange& r2, const ResolutionParam& p) {
  const double k = p.k();
  const double denominator = (r1.hi() - r1.lo()) - k * (r2.hi() - r2.lo());
  if (!(denominator > 0.0)) {
    throw Error(ErrorKind::InvalidRange, "flat interval has non-positive width");
  }
  const double z = (x1 + k * x2 - (r1.lo() + k * r2.hi())) / denominator;
  if (z < 0.0 || z > 1.0) {
    throw Error(ErrorKind::PreconditionViolation,
                "composed value lies outside the flat interval");
  }
  return z;
}

/// Grid-exact normalization with the denominator folded once per range pair.
///
///   z' = (trunc[(x1 - a0 - k)/k] + x2 - b0) / (trunc[(a - a0 - 2k)/k] + b - b0) * (1 - k')
///
/// The smallest accepted pair (a0 + k, b0) maps to 0 and the largest
/// (a - k, b) maps to 1 - k'. Both grids must use step k.
class DiscreteNormalizer {
 public:
  DiscreteNormalizer(const GridRange& r1, const GridRange& r2, const ResolutionParam& p)
      : r1_(r1), r2_(r2), p_(p) {
    if (r1.step() != p.k() || r2.step() != p.k()) {
      throw Error(ErrorKind::InvalidRange, "source grids must use step k");
    }
    if (static_cast<double>(r2.count()) * p.k() > 1.0) {
      throw Error(ErrorKind::InvalidRange, "second grid spans more than one unit");
    }
    const double k = p.k();
    denominator_ = std::trunc((r1.hi() - r1.lo() - 2.0 * k) / k) + r2.hi() - r2.lo();
    scale_ = 1.0 - p.k_prime();
  }

  double operator()(double x1, double x2) const {
    if (!is_accepted(x1, r1_)) {
      throw Error(ErrorKind::PreconditionViolation, "x1 on a rejected boundary");
    }
    detail::require_grid_point(r2_, x2, "x2");
    const double k = p_.k();
    const double numerator = std::trunc((x1 - r1_.lo() - k) / k) + x2 - r2_.lo();
    return numerator / denominator_ * scale_;
  }

  const GridRange& first_range() const noexcept { return r1_; }
  const GridRange& second_range() const noexcept { return r2_; }

 private:
  GridRange r1_;
  GridRange r2_;
  ResolutionParam p_;
  double denominator_ = 0.0;
  double scale_ = 0.0;
};

inline double normalize_discrete(double x1, double x2, const GridRange& r1,
                                 const GridRange& r2, const ResolutionParam& p) {
  return DiscreteNormalizer(r1, r2, p)(x1, x2);
}

/// Single full-width source on [0, 1-k]:
///   z' = (1 - k^2) * (trunc[x1/k] + x2 - 1) / (trunc[1/k] - 2 - k).
inline double normalize_unit(double x1, double x2, const ResolutionParam& p) {
  const double k = p.k();
  const double top = 1.0 - k;
  const auto on_unit_grid = [&](double x) {
    return x >= 0.0 && x <= top && std::floor(x / k) == x / k;
  };
  if (!on_unit_grid(x1) || !on_unit_grid(x2)) {
    throw Error(ErrorKind::PreconditionViolation, "inputs must lie on the unit grid");
  }
  if (x1 == 0.0 || x1 == top) {
    throw Error(ErrorKind::PreconditionViolation, "x1 on a rejected boundary");
  }
  return (1.0 - k * k) * (std::trunc(x1 / k) + x2 - 1.0) / (std::trunc(1.0 / k) - 2.0 - k);
}

/// j = (i1 - 1)*m + i2 for an accepted pair; a bijection onto [0, (m-2)*m).
inline std::uint64_t compose_index(std::uint64_t i1, std::uint64_t i2, std::uint64_t m) {
  if (i1 < 1 || i1 + 2 > m) {
    throw Error(ErrorKind::PreconditionViolation,
                "i1 = " + std::to_string(i1) + " outside the accepted band");
  }
  if (i2 >= m) {
    throw Error(ErrorKind::PreconditionViolation,
                "i2 = " + std::to_string(i2) + " outside [0, m-1]");
  }
  return (i1 - 1) * m + i2;
}

/// Number of lattice points, (m-2)*m.
inline std::uint64_t lattice_size(std::uint64_t m) noexcept { return (m - 2) * m; }

/// Decodes j and returns the discrete normalization of the pair
/// (i1*k, i2*k) on grids starting at zero, computed as
/// N*(2^2w - 1) / (D * 2^2w) with a single rounding, where
/// N = (i1-1)*2^w + i2 and D = (m-3)*2^w + (m-1).
inline double index_to_unit(std::uint64_t j, std::uint64_t m, const ResolutionParam& p) {
  if (m < 4 || m > p.grid_points()) {
    throw Error(ErrorKind::InvalidRange, "need 4 <= m <= 2^w");
  }
  if (j >= lattice_size(m)) {
    throw Error(ErrorKind::PreconditionViolation,
                "lattice index " + std::to_string(j) + " out of range");
  }
  const int w = p.width();
  const std::uint64_t i1 = j / m + 1;
  const std::uint64_t i2 = j % m;
  const std::uint64_t numerator = ((i1 - 1) << w) + i2;
  const std::uint64_t denominator = ((m - 3) << w) + (m - 1);
  const detail::uint128 scaled =
      static_cast<detail::uint128>(numerator) * ((detail::uint128{1} << (2 * w)) - 1);
  return std::ldexp(detail::ratio_nearest(scaled, denominator), -2 * w);
}

/// 1 - z'. Maps [0, 1-k'] onto [k', 1], so zero is never produced.
inline double open_unit(double z, const ResolutionParam&) noexcept { return 1.0 - z; }

}  // namespace widerand
