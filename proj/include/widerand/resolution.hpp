#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "widerand/error.hpp"

namespace widerand {

/// Word size of the base source together with the derived grid step
/// k = 2^-w and the composed precision k' = k^2.
///
/// w is limited to [2, 26] so that the 2w-bit composed fraction fits in the
/// 52 explicit fraction bits of a binary64 value.
class ResolutionParam {
 public:
  static constexpr int kMinWidth = 2;
  static constexpr int kMaxWidth = 26;

  explicit ResolutionParam(int w) : w_(w) {
    if (w < kMinWidth || w > kMaxWidth) {
      throw Error(ErrorKind::InvalidParameter,
                  "word size " + std::to_string(w) + " outside [2, 26]");
    }
    k_ = std::ldexp(1.0, -w);
    k_prime_ = k_ * k_;
  }

  int width() const noexcept { return w_; }
  double k() const noexcept { return k_; }
  double k_prime() const noexcept { return k_prime_; }

  /// 2^w, the number of grid points of a full-width source.
  std::uint64_t grid_points() const noexcept { return std::uint64_t{1} << w_; }

  friend bool operator==(const ResolutionParam&, const ResolutionParam&) = default;

 private:
  int w_;
  double k_;
  double k_prime_;
};

/// Closed real interval [lo, hi]. No grid constraints.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Range of a finite-precision uniform source: the points lo + i*step for
/// i = 0..m-1, with hi = lo + (m-1)*step.
class GridRange {
 public:
  /// Throws InvalidRange unless (hi - lo)/step is a non-negative integer and
  /// the grid has at least four points.
  static GridRange make(double lo, double hi, double step) {
    if (!(step > 0.0) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw Error(ErrorKind::InvalidRange, "grid needs finite bounds and a positive step");
    }
    const double spans = (hi - lo) / step;
    if (!(spans >= 0.0) || std::floor(spans) != spans) {
      throw Error(ErrorKind::InvalidRange, "bounds are not aligned to the grid step");
    }
    const auto m = static_cast<std::uint64_t>(spans) + 1;
    if (m < 4) {
      throw Error(ErrorKind::InvalidRange,
                  "grid has " + std::to_string(m) + " points, at least 4 are required");
    }
    return GridRange(lo, hi, step, m);
  }

  /// m points of spacing `step` starting at `lo`.
  static GridRange with_count(std::uint64_t m, double step, double lo = 0.0) {
    if (m < 4) {
      throw Error(ErrorKind::InvalidRange,
                  "grid has " + std::to_string(m) + " points, at least 4 are required");
    }
    return make(lo, lo + static_cast<double>(m - 1) * step, step);
  }

  /// Full-width value-space grid [0, 1-k] of a w-bit source.
  static GridRange unit(const ResolutionParam& p) {
    return with_count(p.grid_points(), p.k());
  }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double step() const noexcept { return step_; }
  std::uint64_t count() const noexcept { return m_; }
  Interval bounds() const noexcept { return {lo_, hi_}; }

  double at(std::uint64_t i) const noexcept { return lo_ + static_cast<double>(i) * step_; }

  bool on_grid(double x) const noexcept {
    if (x < lo_ || x > hi_) return false;
    const double spans = (x - lo_) / step_;
    return std::floor(spans) == spans;
  }

  friend bool operator==(const GridRange&, const GridRange&) = default;

 private:
  GridRange(double lo, double hi, double step, std::uint64_t m)
      : lo_(lo), hi_(hi), step_(step), m_(m) {}

  double lo_;
  double hi_;
  double step_;
  std::uint64_t m_;
};

}  // namespace widerand
