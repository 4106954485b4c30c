#pragma once

// Uniformity checks for composed streams: an exhaustive exact oracle for
// small grids, Pearson chi-square and Kolmogorov-Smirnov tests for large
// streams, the low-bits test on lattice indices, and rejection-rate counting.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "widerand/combiner.hpp"
#include "widerand/error.hpp"
#include "widerand/generator.hpp"
#include "widerand/resolution.hpp"
#include "widerand/sources.hpp"

namespace widerand::stats {

/// Two-sided acceptance band for p-values.
struct PBand {
  double lo = 0.001;
  double hi = 0.999;

  bool contains(double p) const noexcept { return p >= lo && p <= hi; }
};

struct TestReport {
  std::string test_name;
  double statistic = 0.0;
  double p_value = 0.0;
  std::uint64_t n = 0;
  bool pass = false;
};

struct OracleResult {
  std::uint64_t m = 0;
  int w = 0;
  std::uint64_t distinct_count = 0;
  double min_value = 0.0;
  double max_value = 0.0;
  std::uint64_t max_multiplicity = 0;
  bool uniform = false;
};

// ---------------------------------------------------------------------------
// Special functions

namespace detail {

constexpr double kGammaEps = 1e-15;
constexpr int kGammaMaxIter = 100000;

// P(a, x) by its power series; valid for x < a + 1.
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < kGammaMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kGammaEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by the Lentz continued fraction; valid for x >= a + 1.
inline double gamma_q_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kGammaEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kGammaMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kGammaEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
inline double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) {
    throw Error(ErrorKind::InvalidParameter, "incomplete gamma needs a > 0 and x >= 0");
  }
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return std::clamp(1.0 - detail::gamma_p_series(a, x), 0.0, 1.0);
  return std::clamp(detail::gamma_q_fraction(a, x), 0.0, 1.0);
}

/// Upper tail of the chi-square distribution.
inline double chi_square_pvalue(double statistic, std::uint64_t dof) {
  return regularized_gamma_q(0.5 * static_cast<double>(dof), 0.5 * statistic);
}

/// Upper tail of the Kolmogorov distribution, P(K > lambda).
inline double kolmogorov_pvalue(double lambda) {
  if (lambda <= 0.0) return 1.0;
  constexpr double term_floor = 1e-12;
  if (lambda < 1.0) {
    // Theta-function form; the alternating series converges too slowly here.
    constexpr double pi = std::numbers::pi;
    const double pref = std::sqrt(2.0 * pi) / lambda;
    double cdf = 0.0;
    for (int k = 1; k < 1000; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * pi * pi / (8.0 * lambda * lambda));
      cdf += term;
      if (term < term_floor) break;
    }
    return std::clamp(1.0 - pref * cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k < 1000; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1) ? term : -term;
    if (term < term_floor) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Tests

/// Pearson statistic against equal expected counts. No minimum-count rule;
/// callers that bin raw samples enforce their own.
inline TestReport chi_square_from_counts(std::span<const std::uint64_t> counts,
                                         const PBand& band = {},
                                         std::string name = "chi2") {
  if (counts.size() < 2) throw Error(ErrorKind::InvalidParameter, "need at least two bins");
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  if (n == 0) throw Error(ErrorKind::InsufficientData, "all bins are empty");

  const double expected = static_cast<double>(n) / static_cast<double>(counts.size());
  double statistic = 0.0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    statistic += d * d;
  }
  statistic /= expected;
  const double p = chi_square_pvalue(statistic, counts.size() - 1);
  return {std::move(name), statistic, p, n, band.contains(p)};
}

/// Bins samples from [0, 1] into `bins` equal cells (1.0 joins the top cell)
/// and runs the Pearson test. Requires at least 10 samples per bin.
inline TestReport chi_square_uniformity(std::span<const double> samples, std::uint64_t bins,
                                        const PBand& band = {}) {
  if (bins < 2) throw Error(ErrorKind::InvalidParameter, "need at least two bins");
  if (samples.size() < 10 * bins) {
    throw Error(ErrorKind::InsufficientData,
                std::to_string(samples.size()) + " samples for " + std::to_string(bins) +
                    " bins; need at least " + std::to_string(10 * bins));
  }
  std::vector<std::uint64_t> counts(bins, 0);
  const double scale = static_cast<double>(bins);
  for (double x : samples) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw Error(ErrorKind::PreconditionViolation, "sample outside [0, 1]");
    }
    const auto cell = std::min(static_cast<std::uint64_t>(x * scale), bins - 1);
    ++counts[cell];
  }
  return chi_square_from_counts(counts, band, "chi2");
}

/// One-sample Kolmogorov-Smirnov test against U(0, 1) with the asymptotic
/// p-value at lambda = sqrt(n) * D. Requires n >= 100.
inline TestReport ks_uniformity(std::span<const double> samples, const PBand& band = {}) {
  if (samples.size() < 100) {
    throw Error(ErrorKind::InsufficientData,
                std::to_string(samples.size()) + " samples; KS needs at least 100");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double x = std::clamp(sorted[i], 0.0, 1.0);
    const double above = static_cast<double>(i + 1) / n - x;
    const double below = x - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  const double p = kolmogorov_pvalue(std::sqrt(n) * d);
  return {"ks", d, p, sorted.size(), band.contains(p)};
}

/// Chi-square on the low-order w bits of each lattice index, keeping the top
/// log2(bins) of those bits. `bins` must be a power of two no larger than 2^w.
/// Requires at least 5 expected counts per bin.
inline TestReport low_bits_uniformity(std::span<const ExtendedSample> samples,
                                      const ResolutionParam& p, std::uint64_t bins,
                                      const PBand& band = {}) {
  if (bins < 2 || !std::has_single_bit(bins) || bins > p.grid_points()) {
    throw Error(ErrorKind::InvalidParameter, "bins must be a power of two in [2, 2^w]");
  }
  if (samples.size() < 5 * bins) {
    throw Error(ErrorKind::InsufficientData,
                std::to_string(samples.size()) + " samples for " + std::to_string(bins) +
                    " bins; need at least " + std::to_string(5 * bins));
  }
  const int w = p.width();
  const int drop = w - (std::bit_width(bins) - 1);
  const std::uint64_t mask = p.grid_points() - 1;
  std::vector<std::uint64_t> counts(bins, 0);
  for (const auto& s : samples) ++counts[(s.j & mask) >> drop];
  return chi_square_from_counts(counts, band, "lowbits");
}

/// Largest m the exhaustive oracle will enumerate (m^2 pairs).
constexpr std::uint64_t kOracleMaxM = 4096;

/// Enumerates all m^2 grid pairs on [0, (m-1)k]^2, drops boundary x1 draws and
/// maps the rest through the discrete normalization. `uniform` certifies
/// that every accepted pair lands on its own output value.
inline OracleResult exhaustive_oracle(std::uint64_t m, const ResolutionParam& p) {
  if (m > kOracleMaxM) {
    throw Error(ErrorKind::OversizeEnumeration,
                "m = " + std::to_string(m) + " exceeds the oracle limit of " +
                    std::to_string(kOracleMaxM));
  }
  if (m < 4) throw Error(ErrorKind::InvalidRange, "m >= 4 required");
  if (m > p.grid_points()) throw Error(ErrorKind::InvalidRange, "m * k must not exceed 1");

  const GridRange range = GridRange::with_count(m, p.k());
  const DiscreteNormalizer normalize(range, range, p);
  std::vector<double> values;
  values.reserve(lattice_size(m));
  for (std::uint64_t i1 = 0; i1 < m; ++i1) {
    const double x1 = range.at(i1);
    if (!is_accepted(x1, range)) continue;
    for (std::uint64_t i2 = 0; i2 < m; ++i2) values.push_back(normalize(x1, range.at(i2)));
  }
  std::sort(values.begin(), values.end());

  OracleResult result;
  result.m = m;
  result.w = p.width();
  result.min_value = values.front();
  result.max_value = values.back();
  std::uint64_t run = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i == 0 || values[i] != values[i - 1]) {
      ++result.distinct_count;
      run = 1;
    } else {
      ++run;
    }
    result.max_multiplicity = std::max(result.max_multiplicity, run);
  }
  result.uniform = result.distinct_count == lattice_size(m) && result.max_multiplicity == 1;
  return result;
}

namespace detail {

inline ResolutionParam width_for_modulus(std::uint64_t m) {
  if (m < 4) throw Error(ErrorKind::InvalidRange, "source modulus must be >= 4");
  const int w = std::max(ResolutionParam::kMinWidth, static_cast<int>(std::bit_width(m - 1)));
  return ResolutionParam(w);
}

}  // namespace detail

/// Fraction of first-word draws rejected while producing n composed outputs,
/// with i1 from `first` and i2 from `second`.
template <IntegerSource First, IntegerSource Second>
double rejection_rate(First& first, Second& second, std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidParameter, "n must be >= 1");
  const ResolutionParam p = detail::width_for_modulus(first.modulus());
  DrawCounts counts;
  for (std::uint64_t i = 0; i < n; ++i) next_extended(first, second, p, &counts);
  return static_cast<double>(counts.rejected) / static_cast<double>(counts.draws);
}

template <IntegerSource Source>
double rejection_rate(Source& source, std::uint64_t n) {
  return rejection_rate(source, source, n);
}

}  // namespace widerand::stats
