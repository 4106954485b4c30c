// Acceptance suite: runs every exit criterion at its stated tolerance and
// runtime limit and prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "rational_oracle.hpp"
#include "widerand/widerand.hpp"

namespace {

using namespace widerand;
using widerand::testing::Rational;

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  std::string name;
  double time_limit_s;  // <= 0: no limit
  std::function<Outcome()> check;
};

Outcome oracle_power_of_two() {
  const auto r = stats::exhaustive_oracle(8, ResolutionParam(3));
  const bool ok = r.distinct_count == 48 && r.max_multiplicity == 1 && r.min_value == 0.0 &&
                  r.max_value == 63.0 / 64 && r.uniform;
  std::ostringstream s;
  s << "distinct=" << r.distinct_count << " multiplicity=" << r.max_multiplicity
    << " min=" << io::format_decimal(r.min_value) << " max=" << io::format_decimal(r.max_value);
  return {ok, s.str()};
}

Outcome oracle_general_range() {
  const auto a = stats::exhaustive_oracle(6, ResolutionParam(3));
  const auto b = stats::exhaustive_oracle(48, ResolutionParam(6));
  const bool ok = a.uniform && a.distinct_count == 24 && b.uniform && b.distinct_count == 2208;
  std::ostringstream s;
  s << "m=6 distinct=" << a.distinct_count << " m=48 distinct=" << b.distinct_count;
  return {ok, s.str()};
}

Outcome formula_equivalence() {
  std::uint64_t pairs = 0;
  std::uint64_t worst_ulp = 0;
  for (int w = 3; w <= 10; ++w) {
    const ResolutionParam p(w);
    const auto r = GridRange::unit(p);
    const DiscreteNormalizer discrete(r, r, p);
    const std::uint64_t m = p.grid_points();
    const Rational k = widerand::testing::step_of(w);
    const Rational top = Rational(1) - k;
    for (std::uint64_t i1 = 1; i1 + 1 < m; ++i1) {
      for (std::uint64_t i2 = 0; i2 < m; ++i2) {
        ++pairs;
        const Rational x1 = Rational(static_cast<widerand::testing::int128>(i1)) * k;
        const Rational x2 = Rational(static_cast<widerand::testing::int128>(i2)) * k;
        const Rational exact = widerand::testing::discrete_exact(x1, x2, 0, top, 0, top, k);
        if (!(exact == widerand::testing::unit_exact(x1, x2, k))) {
          return {false, "rational mismatch at w=" + std::to_string(w)};
        }
        const double via_index = index_to_unit(compose_index(i1, i2, m), m, p);
        if (!widerand::testing::is_nearest(via_index, exact)) {
          return {false, "index route not nearest at w=" + std::to_string(w)};
        }
        for (double other : {discrete(r.at(i1), r.at(i2)), normalize_unit(r.at(i1), r.at(i2), p)}) {
          const auto d = widerand::testing::ulp_distance(via_index, other);
          worst_ulp = std::max(worst_ulp, d);
          if (d > 2) return {false, "binary64 routes differ by " + std::to_string(d) + " ulp"};
        }
      }
    }
  }
  return {true, std::to_string(pairs) + " pairs, worst " + std::to_string(worst_ulp) + " ulp"};
}

Outcome algorithm_worked_example() {
  RealSequence src({0.0, 0.25, 0.5});
  const double z = prngd_next(src, 0.0, 7.0 / 8, ResolutionParam(3));
  const double nearest = 13.0 / 49.0;  // correctly rounded quotient
  const auto d = widerand::testing::ulp_distance(z, nearest);
  return {d <= 1 && widerand::testing::is_nearest(nearest, Rational(13, 49)),
          "Z=" + io::format_decimal(z) + " ulp=" + std::to_string(d)};
}

Outcome rejection_rate_m256() {
  auto src = reduce_to_width(Mrg32k3a(Seed{20240601}), 8);
  constexpr double n = 1e6;
  const double rate = stats::rejection_rate(src, static_cast<std::uint64_t>(n));
  const double p = 2.0 / 256;
  const double bound = 5.0 * std::sqrt(p * (1 - p) / n);
  const double dev = std::fabs(rate - p);
  std::ostringstream s;
  s << "observed=" << rate << " |dev|=" << dev << " bound=" << bound;
  return {dev < bound, s.str()};
}

Outcome statistical_battery() {
  const ResolutionParam p(26);
  ExtendedGenerator gen(reduce_to_width(Mrg32k3a(Seed{31415926}), 26), p);
  constexpr std::size_t big = 10000000;
  constexpr std::size_t small = 1000000;
  std::vector<double> values(big);
  std::vector<ExtendedSample> head(small);
  for (std::size_t i = 0; i < big; ++i) {
    const auto s = gen();
    values[i] = s.value;
    if (i < small) head[i] = s;
  }
  const stats::PBand band{0.001, 0.999};
  const auto chi2 = stats::chi_square_uniformity(values, 1024, band);
  const auto ks = stats::ks_uniformity(std::span<const double>(values.data(), small), band);
  const auto low = stats::low_bits_uniformity(head, p, 256, band);

  PairedGenerator degenerate(reduce_to_width(Mrg32k3a(Seed{27182818}), 26),
                             ConstantSource(12345, p.grid_points()), p);
  std::vector<ExtendedSample> bad(small);
  for (auto& s : bad) s = degenerate();
  const auto control = stats::low_bits_uniformity(bad, p, 256, band);

  std::ostringstream s;
  s << "chi2 p=" << chi2.p_value << " ks p=" << ks.p_value << " lowbits p=" << low.p_value
    << " control p=" << control.p_value;
  return {chi2.pass && ks.pass && low.pass && control.p_value < 1e-6, s.str()};
}

Outcome open_interval() {
  const ResolutionParam p(26);
  ExtendedGenerator gen(reduce_to_width(Mrg32k3a(Seed{99}), 26), p);
  double lowest = 2.0;
  bool zero = false;
  for (int i = 0; i < 1000000; ++i) {
    const double v = open_unit(gen().value, p);
    zero = zero || v == 0.0;
    lowest = std::min(lowest, v);
  }
  return {!zero && lowest >= p.k_prime() && open_unit(0.0, p) == 1.0 &&
              open_unit(1.0 - p.k_prime(), p) == p.k_prime(),
          "min=" + io::format_decimal(lowest)};
}

Outcome determinism() {
  const std::vector<std::string> args{"gen", "--seed", "2718", "--n", "100000", "--format", "bin"};
  std::string outputs[2];
  for (auto& o : outputs) {
    std::istringstream in;
    std::ostringstream out;
    std::ostringstream err;
    if (cli::run_cli(args, in, out, err) != cli::kExitOk) return {false, err.str()};
    o = out.str();
  }
  return {outputs[0] == outputs[1] && outputs[0].size() == 800000,
          std::to_string(outputs[0].size()) + " bytes identical"};
}

Outcome bench_informational() {
  const std::vector<std::string> args{"bench", "--source", "mrg32k3a", "--n", "1000000"};
  std::istringstream in;
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run_cli(args, in, out, err);
  const std::string text = out.str();
  const auto pos = text.find("ratio=");
  if (code != cli::kExitOk || pos == std::string::npos) return {false, err.str()};
  const double ratio = std::stod(text.substr(pos + 6));
  std::string summary = text;
  for (auto& c : summary) c = c == '\n' ? ';' : c;
  return {ratio > 0.0, "no numeric target; " + summary};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"exact uniformity, power of two (m=8, w=3)", 1.0, oracle_power_of_two},
      {"exact uniformity, general range (m=6, w=3; m=48, w=6)", 1.0, oracle_general_range},
      {"formula equivalence, w in [3, 10]", 10.0, formula_equivalence},
      {"loop generator worked example = 13/49", 0.0, algorithm_worked_example},
      {"rejection rate at m=256 over 1e6 draws", 5.0, rejection_rate_m256},
      {"statistical battery and negative control", 60.0, statistical_battery},
      {"open-interval contract over 1e6 outputs", 5.0, open_interval},
      {"determinism of binary output (1e5 samples)", 0.0, determinism},
      {"throughput report (informational)", 0.0, bench_informational},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome{false, ""};
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    bool pass = outcome.pass;
    if (c.time_limit_s > 0.0 && elapsed.count() >= c.time_limit_s) {
      pass = false;
      outcome.detail += " (over time limit)";
    }
    failures += pass ? 0 : 1;
    std::cout << (pass ? "PASS " : "FAIL ") << c.name << " [" << elapsed.count() << " s] "
              << outcome.detail << '\n';
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << '\n';
  return failures == 0 ? 0 : 1;
}
