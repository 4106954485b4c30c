#pragma once

#include <cstdint>
#include <utility>

#include "widerand/combiner.hpp"
#include "widerand/error.hpp"
#include "widerand/resolution.hpp"
#include "widerand/sources.hpp"

namespace widerand {

/// One composed output: the lattice index of the accepted pair and its value.
struct ExtendedSample {
  std::uint64_t j = 0;
  double value = 0.0;

  friend bool operator==(const ExtendedSample&, const ExtendedSample&) = default;
};

/// Running tally of first-word draws.
struct DrawCounts {
  std::uint64_t draws = 0;
  std::uint64_t rejected = 0;
};

/// Draws i1 from `first` until it is interior (not 0, not m-1), then one i2
/// from `second`. Both sources must share the modulus m, with m*k <= 1.
template <IntegerSource First, IntegerSource Second>
ExtendedSample next_extended(First& first, Second& second, const ResolutionParam& p,
                             DrawCounts* counts = nullptr) {
  const std::uint64_t m = first.modulus();
  if (second.modulus() != m) {
    throw Error(ErrorKind::InvalidRange, "both sources must share one modulus");
  }
  if (m < 4 || m > p.grid_points()) {
    throw Error(ErrorKind::InvalidRange, "source modulus must satisfy 4 <= m <= 2^w");
  }
  std::uint64_t i1 = first.next();
  std::uint64_t draws = 1;
  while (i1 == 0 || i1 == m - 1) {
    i1 = first.next();
    ++draws;
  }
  if (counts != nullptr) {
    counts->draws += draws;
    counts->rejected += draws - 1;
  }
  const std::uint64_t i2 = second.next();
  const std::uint64_t j = compose_index(i1, i2, m);
  return {j, index_to_unit(j, m, p)};
}

template <IntegerSource Source>
ExtendedSample next_extended(Source& source, const ResolutionParam& p,
                             DrawCounts* counts = nullptr) {
  return next_extended(source, source, p, counts);
}

/// Owning wrapper around a source that produces extended samples and keeps a
/// tally of rejected first-word draws.
template <IntegerSource Source>
class ExtendedGenerator {
 public:
  ExtendedGenerator(Source source, ResolutionParam p) : source_(std::move(source)), p_(p) {}

  ExtendedSample operator()() { return next_extended(source_, p_, &counts_); }
  double next_value() { return (*this)().value; }

  const DrawCounts& counts() const noexcept { return counts_; }
  const ResolutionParam& resolution() const noexcept { return p_; }
  Source& source() noexcept { return source_; }

 private:
  Source source_;
  ResolutionParam p_;
  DrawCounts counts_;
};

/// Like ExtendedGenerator, but x1 and x2 come from two independent sources.
template <IntegerSource First, IntegerSource Second>
class PairedGenerator {
 public:
  PairedGenerator(First first, Second second, ResolutionParam p)
      : first_(std::move(first)), second_(std::move(second)), p_(p) {}

  ExtendedSample operator()() { return next_extended(first_, second_, p_, &counts_); }
  double next_value() { return (*this)().value; }

  const DrawCounts& counts() const noexcept { return counts_; }
  const ResolutionParam& resolution() const noexcept { return p_; }

 private:
  First first_;
  Second second_;
  ResolutionParam p_;
  DrawCounts counts_;
};

/// Loop-based composition on real-valued draws in [min, max].
///
/// R1 is redrawn while R1 < Rmin or R1 > Rmax, with
/// Rmin = min + k*(max-min) and Rmax = max - k*(max-min); then one R2 is drawn
/// and Z = (R1 + k*R2 - (min + k*max)) / ((max-min)*(1-k)).
/// The bounds and the affine constants are folded at construction.
class Prngd {
 public:
  struct Draw {
    double r1;
    double r2;
    double z;
  };

  Prngd(double min, double max, const ResolutionParam& p) : k_(p.k()) {
    if (!(max > min)) throw Error(ErrorKind::InvalidRange, "need max > min");
    const double span = max - min;
    r_min_ = min + k_ * span;
    r_max_ = max - k_ * span;
    offset_ = min + k_ * max;
    scale_ = span * (1.0 - k_);
  }

  template <RealSource Source>
  Draw draw(Source& source) const {
    double r1 = -1.0;
    do {
      r1 = source.next();
    } while (r1 < r_min_ || r1 > r_max_);
    const double r2 = source.next();
    return {r1, r2, (r1 + k_ * r2 - offset_) / scale_};
  }

  template <RealSource Source>
  double operator()(Source& source) const {
    return draw(source).z;
  }

  double r_min() const noexcept { return r_min_; }
  double r_max() const noexcept { return r_max_; }

 private:
  double k_;
  double r_min_ = 0.0;
  double r_max_ = 0.0;
  double offset_ = 0.0;
  double scale_ = 0.0;
};

template <RealSource Source>
double prngd_next(Source& source, double min, double max, const ResolutionParam& p) {
  return Prngd(min, max, p)(source);
}

}  // namespace widerand
