#pragma once

// Base uniform sources. Every integer source reports its modulus m and emits
// values in [0, m-1]; a source object is single-owner mutable state.

#include <array>
#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "widerand/error.hpp"

namespace widerand {

template <class S>
concept IntegerSource = requires(S& s, const S& cs) {
  { s.next() } -> std::same_as<std::uint64_t>;
  { cs.modulus() } -> std::same_as<std::uint64_t>;
};

template <class S>
concept RealSource = requires(S& s) {
  { s.next() } -> std::same_as<double>;
};

struct Seed {
  std::uint64_t value = 0;
};

enum class SourceKind { Mrg32k3a, Xorshift32, Counter };

inline std::string_view to_string(SourceKind kind) noexcept {
  switch (kind) {
    case SourceKind::Mrg32k3a: return "mrg32k3a";
    case SourceKind::Xorshift32: return "xorshift32";
    case SourceKind::Counter: return "counter";
  }
  return "unknown";
}

inline SourceKind parse_source_kind(std::string_view name) {
  if (name == "mrg32k3a") return SourceKind::Mrg32k3a;
  if (name == "xorshift32") return SourceKind::Xorshift32;
  if (name == "counter") return SourceKind::Counter;
  throw Error(ErrorKind::InvalidParameter, "unknown source '" + std::string(name) + "'");
}

/// splitmix64 avalanche mixer, used only to expand seeds.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// L'Ecuyer's combined multiple recursive generator: two order-3 recurrences
/// modulo m1 = 2^32 - 209 and m2 = 2^32 - 22853, combined as (p1 - p2) mod m1.
class Mrg32k3a {
 public:
  static constexpr std::int64_t kM1 = 4294967087;
  static constexpr std::int64_t kM2 = 4294944443;
  static constexpr std::int64_t kA12 = 1403580;
  static constexpr std::int64_t kA13n = 810728;
  static constexpr std::int64_t kA21 = 527612;
  static constexpr std::int64_t kA23n = 1370589;

  using Component = std::array<std::int64_t, 3>;

  explicit Mrg32k3a(Seed seed) {
    SplitMix64 mix(seed.value);
    do {
      for (auto& s : s1_) s = static_cast<std::int64_t>(mix.next() % kM1);
    } while (s1_ == Component{0, 0, 0});
    do {
      for (auto& s : s2_) s = static_cast<std::int64_t>(mix.next() % kM2);
    } while (s2_ == Component{0, 0, 0});
  }

  /// Explicit state, oldest word first. Throws InvalidSeed for a state the
  /// recurrences cannot use.
  Mrg32k3a(const Component& first, const Component& second) : s1_(first), s2_(second) {
    for (auto s : s1_) {
      if (s < 0 || s >= kM1) throw Error(ErrorKind::InvalidSeed, "first component word >= m1");
    }
    for (auto s : s2_) {
      if (s < 0 || s >= kM2) throw Error(ErrorKind::InvalidSeed, "second component word >= m2");
    }
    if (s1_ == Component{0, 0, 0} || s2_ == Component{0, 0, 0}) {
      throw Error(ErrorKind::InvalidSeed, "component state is all zero");
    }
  }

  std::uint64_t next() noexcept {
    std::int64_t p1 = (kA12 * s1_[1] - kA13n * s1_[0]) % kM1;
    if (p1 < 0) p1 += kM1;
    s1_ = {s1_[1], s1_[2], p1};

    std::int64_t p2 = (kA21 * s2_[2] - kA23n * s2_[0]) % kM2;
    if (p2 < 0) p2 += kM2;
    s2_ = {s2_[1], s2_[2], p2};

    std::int64_t d = p1 - p2;
    if (d < 0) d += kM1;
    return static_cast<std::uint64_t>(d);
  }

  std::uint64_t modulus() const noexcept { return static_cast<std::uint64_t>(kM1); }

  const Component& first_component() const noexcept { return s1_; }
  const Component& second_component() const noexcept { return s2_; }

 private:
  Component s1_{};
  Component s2_{};
};

/// Marsaglia xorshift with shifts (13, 17, 5). Statistically weak; kept as a
/// fast source and as a negative control. Never emits 0.
class Xorshift32 {
 public:
  explicit Xorshift32(Seed seed) {
    SplitMix64 mix(seed.value);
    do {
      state_ = static_cast<std::uint32_t>(mix.next());
    } while (state_ == 0);
  }

  static Xorshift32 from_state(std::uint32_t state) {
    if (state == 0) throw Error(ErrorKind::InvalidSeed, "xorshift32 state must be nonzero");
    Xorshift32 x(Seed{});
    x.state_ = state;
    return x;
  }

  std::uint64_t next() noexcept {
    std::uint32_t x = state_;
    x ^= x << 13;
    x ^= x >> 17;
    x ^= x << 5;
    state_ = x;
    return x;
  }

  std::uint64_t modulus() const noexcept { return std::uint64_t{1} << 32; }
  std::uint32_t state() const noexcept { return state_; }

 private:
  std::uint32_t state_ = 1;
};

/// Deterministic enumerator: emits state mod m, then increments state.
class CounterSource {
 public:
  explicit CounterSource(std::uint64_t m, std::uint64_t start = 0) : m_(m), state_(start) {
    if (m == 0) throw Error(ErrorKind::InvalidParameter, "counter modulus must be >= 1");
  }

  std::uint64_t next() noexcept { return state_++ % m_; }
  std::uint64_t modulus() const noexcept { return m_; }

 private:
  std::uint64_t m_;
  std::uint64_t state_;
};

/// Always emits the same value.
class ConstantSource {
 public:
  ConstantSource(std::uint64_t value, std::uint64_t m) : value_(value), m_(m) {
    if (value >= m) throw Error(ErrorKind::InvalidParameter, "constant outside [0, m-1]");
  }

  std::uint64_t next() noexcept { return value_; }
  std::uint64_t modulus() const noexcept { return m_; }

 private:
  std::uint64_t value_;
  std::uint64_t m_;
};

/// Finite scripted integer stream; throws SourceExhausted once drained.
class IntegerSequence {
 public:
  IntegerSequence(std::vector<std::uint64_t> values, std::uint64_t m)
      : values_(std::move(values)), m_(m) {
    for (auto v : values_) {
      if (v >= m_) throw Error(ErrorKind::InvalidParameter, "scripted value outside [0, m-1]");
    }
  }

  std::uint64_t next() {
    if (pos_ == values_.size()) throw Error(ErrorKind::SourceExhausted, "integer sequence drained");
    return values_[pos_++];
  }
  std::uint64_t modulus() const noexcept { return m_; }
  std::size_t consumed() const noexcept { return pos_; }

 private:
  std::vector<std::uint64_t> values_;
  std::uint64_t m_;
  std::size_t pos_ = 0;
};

/// Finite scripted real stream; throws SourceExhausted once drained.
class RealSequence {
 public:
  explicit RealSequence(std::vector<double> values) : values_(std::move(values)) {}

  double next() {
    if (pos_ == values_.size()) throw Error(ErrorKind::SourceExhausted, "real sequence drained");
    return values_[pos_++];
  }
  std::size_t consumed() const noexcept { return pos_; }

 private:
  std::vector<double> values_;
  std::size_t pos_ = 0;
};

/// Narrows a source to exactly uniform w-bit integers. With
/// T = floor(m_src / 2^w) * 2^w, draws >= T are discarded and the rest are
/// reduced modulo 2^w.
template <IntegerSource Source>
class WidthReducer {
 public:
  WidthReducer(Source source, int w) : source_(std::move(source)) {
    if (w < 1 || w > 63) throw Error(ErrorKind::InvalidParameter, "width outside [1, 63]");
    m_ = std::uint64_t{1} << w;
    const std::uint64_t m_src = source_.modulus();
    if (m_src < m_) {
      throw Error(ErrorKind::InvalidParameter,
                  "source modulus " + std::to_string(m_src) + " narrower than 2^" +
                      std::to_string(w));
    }
    threshold_ = (m_src / m_) * m_;
  }

  std::uint64_t next() {
    std::uint64_t v = source_.next();
    while (v >= threshold_) {
      ++discarded_;
      v = source_.next();
    }
    return v & (m_ - 1);
  }

  std::uint64_t modulus() const noexcept { return m_; }
  std::uint64_t threshold() const noexcept { return threshold_; }
  std::uint64_t discarded() const noexcept { return discarded_; }
  Source& base() noexcept { return source_; }

 private:
  Source source_;
  std::uint64_t m_ = 0;
  std::uint64_t threshold_ = 0;
  std::uint64_t discarded_ = 0;
};

template <IntegerSource Source>
WidthReducer<Source> reduce_to_width(Source source, int w) {
  return WidthReducer<Source>(std::move(source), w);
}

/// Presents an integer source as grid values lo + i*step.
template <IntegerSource Source>
class GridFloatAdapter {
 public:
  GridFloatAdapter(Source source, double lo, double step)
      : source_(std::move(source)), lo_(lo), step_(step) {}

  double next() { return lo_ + static_cast<double>(source_.next()) * step_; }

 private:
  Source source_;
  double lo_;
  double step_;
};

/// Expands a 64-bit seed into the initial state words of `kind`:
/// six words (three per component) for MRG32k3a, one for xorshift32, and the
/// starting count for the counter.
inline std::vector<std::uint64_t> seed_expand(Seed seed, SourceKind kind) {
  switch (kind) {
    case SourceKind::Mrg32k3a: {
      const Mrg32k3a g(seed);
      std::vector<std::uint64_t> out;
      for (auto s : g.first_component()) out.push_back(static_cast<std::uint64_t>(s));
      for (auto s : g.second_component()) out.push_back(static_cast<std::uint64_t>(s));
      return out;
    }
    case SourceKind::Xorshift32:
      return {Xorshift32(seed).state()};
    case SourceKind::Counter:
      return {seed.value};
  }
  return {};
}

}  // namespace widerand
