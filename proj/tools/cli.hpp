#pragma once

// Command implementations for the `widerand` tool. Each run_* function takes
// a parsed RunConfig, writes to the given streams and returns the process
// exit code, so the commands can be driven in-process from tests.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "widerand/widerand.hpp"

namespace widerand::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitTestFail = 3;

struct RunConfig {
  std::string subcommand;
  SourceKind source = SourceKind::Mrg32k3a;
  std::uint64_t seed = 0;
  std::uint64_t n = 0;
  int w = ResolutionParam::kMaxWidth;
  std::uint64_t m = 0;  // 0: 2^w
  io::Format format = io::Format::Text;
  bool open_interval = false;
  std::string test = "all";
  std::uint64_t bins = 1024;
  stats::PBand band;
  std::string out_path;
  std::string in_path;
  unsigned shards = 1;
};

/// Thrown for invalid flag combinations; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline stats::PBand parse_band(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("--p-band expects lo,hi");
  try {
    std::size_t used_lo = 0;
    std::size_t used_hi = 0;
    const std::string lo_text = text.substr(0, comma);
    const std::string hi_text = text.substr(comma + 1);
    const stats::PBand band{std::stod(lo_text, &used_lo), std::stod(hi_text, &used_hi)};
    if (used_lo != lo_text.size() || used_hi != hi_text.size() || band.lo < 0.0 ||
        band.hi > 1.0 || band.lo > band.hi) {
      throw UsageError("--p-band needs 0 <= lo <= hi <= 1");
    }
    return band;
  } catch (const std::logic_error&) {
    throw UsageError("--p-band expects two numbers, lo,hi");
  }
}

inline std::uint64_t effective_modulus(const RunConfig& cfg) {
  const std::uint64_t full = std::uint64_t{1} << cfg.w;
  if (cfg.source != SourceKind::Counter) {
    if (cfg.m != 0 && cfg.m != full) throw UsageError("--m is only adjustable for the counter source");
    return full;
  }
  const std::uint64_t m = cfg.m == 0 ? full : cfg.m;
  if (m < 4 || m > full) throw UsageError("--m must satisfy 4 <= m <= 2^w");
  return m;
}

/// Calls f(generator) with an extended generator for the configured source.
/// MRG32k3a and xorshift32 are narrowed to w bits; the counter source uses
/// two counters (x1 and x2) that both start at `seed`.
template <class F>
decltype(auto) with_generator(const RunConfig& cfg, std::uint64_t seed, F&& f) {
  const ResolutionParam p(cfg.w);
  const std::uint64_t m = effective_modulus(cfg);
  switch (cfg.source) {
    case SourceKind::Mrg32k3a: {
      ExtendedGenerator gen(reduce_to_width(Mrg32k3a(Seed{seed}), cfg.w), p);
      return f(gen);
    }
    case SourceKind::Xorshift32: {
      ExtendedGenerator gen(reduce_to_width(Xorshift32(Seed{seed}), cfg.w), p);
      return f(gen);
    }
    case SourceKind::Counter:
      break;
  }
  PairedGenerator gen(CounterSource(m, seed), CounterSource(m, seed), p);
  return f(gen);
}

inline std::vector<ExtendedSample> generate_samples(const RunConfig& cfg, std::uint64_t seed,
                                                    std::uint64_t n) {
  return with_generator(cfg, seed, [n](auto& gen) {
    std::vector<ExtendedSample> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(gen());
    return out;
  });
}

/// Seed of shard s. Shard 0 keeps the configured seed so a single shard
/// reproduces the unsharded stream.
inline std::uint64_t shard_seed(std::uint64_t seed, unsigned shard) {
  SplitMix64 mix(seed);
  std::uint64_t s = seed;
  for (unsigned i = 0; i < shard; ++i) s = mix.next();
  return s;
}

inline std::vector<double> generate_values(const RunConfig& cfg) {
  const ResolutionParam p(cfg.w);
  const auto finish = [&](std::vector<ExtendedSample> samples, std::vector<double>& out) {
    for (const auto& s : samples) out.push_back(cfg.open_interval ? open_unit(s.value, p) : s.value);
  };

  std::vector<double> values;
  values.reserve(cfg.n);
  if (cfg.shards <= 1) {
    finish(generate_samples(cfg, cfg.seed, cfg.n), values);
    return values;
  }

  std::vector<std::vector<ExtendedSample>> parts(cfg.shards);
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> failures(cfg.shards);
  for (unsigned s = 0; s < cfg.shards; ++s) {
    const std::uint64_t count = cfg.n / cfg.shards + (s < cfg.n % cfg.shards ? 1 : 0);
    workers.emplace_back([&, s, count] {
      try {
        parts[s] = generate_samples(cfg, shard_seed(cfg.seed, s), count);
      } catch (...) {
        failures[s] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  for (auto& part : parts) finish(std::move(part), values);
  return values;
}

inline int run_gen(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.n == 0) throw UsageError("--n must be >= 1");
  if (cfg.shards == 0) throw UsageError("--shards must be >= 1");
  if (cfg.shards > 1 && cfg.source == SourceKind::Counter) {
    throw UsageError("--shards is not supported for the counter source");
  }
  if (cfg.source == SourceKind::Xorshift32) {
    err << "warning: xorshift32 is a statistically weak source\n";
  }
  const std::vector<double> values = generate_values(cfg);

  std::ofstream file;
  std::ostream* sink = &out;
  if (!cfg.out_path.empty()) {
    file.open(cfg.out_path, std::ios::binary | std::ios::trunc);
    if (!file) {
      err << "error: cannot open '" << cfg.out_path << "' for writing\n";
      return kExitRuntime;
    }
    sink = &file;
  }
  for (double v : values) io::write_value(*sink, v, cfg.format);
  sink->flush();
  if (!*sink) {
    err << "error: write failed\n";
    return kExitRuntime;
  }
  return kExitOk;
}

inline nlohmann::json report_json(const stats::TestReport& r) {
  return {{"test", r.test_name},
          {"statistic", r.statistic},
          {"p_value", r.p_value},
          {"n", r.n},
          {"verdict", r.pass ? "pass" : "fail"}};
}

inline int run_test(const RunConfig& cfg, std::istream& in, std::ostream& out, std::ostream&) {
  const bool all = cfg.test == "all";
  const bool chi2 = all || cfg.test == "chi2";
  const bool ks = all || cfg.test == "ks";
  bool lowbits = all || cfg.test == "lowbits";
  if (!chi2 && !ks && !lowbits) throw UsageError("--test must be chi2, ks, lowbits or all");

  std::vector<double> values;
  std::vector<ExtendedSample> samples;
  const ResolutionParam p(cfg.w);
  if (!cfg.in_path.empty()) {
    if (cfg.test == "lowbits") {
      throw UsageError("lowbits needs lattice indices; it runs on generated streams only");
    }
    lowbits = false;
    if (cfg.in_path == "-") {
      values = io::read_stream(in, cfg.format);
    } else {
      std::ifstream file(cfg.in_path, std::ios::binary);
      if (!file) throw Error(ErrorKind::Parse, "cannot open '" + cfg.in_path + "'");
      values = io::read_stream(file, cfg.format);
    }
  } else {
    if (cfg.n == 0) throw UsageError("--n must be >= 1");
    samples = generate_samples(cfg, cfg.seed, cfg.n);
    values.reserve(samples.size());
    for (const auto& s : samples) {
      values.push_back(cfg.open_interval ? open_unit(s.value, p) : s.value);
    }
  }
  if (values.empty()) throw Error(ErrorKind::InsufficientData, "input stream is empty");

  std::vector<stats::TestReport> reports;
  if (chi2) reports.push_back(stats::chi_square_uniformity(values, cfg.bins, cfg.band));
  if (ks) reports.push_back(stats::ks_uniformity(values, cfg.band));
  if (lowbits) {
    const std::uint64_t bins = std::min<std::uint64_t>(256, p.grid_points());
    reports.push_back(stats::low_bits_uniformity(samples, p, bins, cfg.band));
  }

  bool pass = true;
  for (const auto& r : reports) {
    out << report_json(r).dump() << '\n';
    pass = pass && r.pass;
  }
  return pass ? kExitOk : kExitTestFail;
}

inline int run_oracle(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const stats::OracleResult r = stats::exhaustive_oracle(cfg.m, ResolutionParam(cfg.w));
  out << "distinct=" << r.distinct_count << " min=" << io::format_decimal(r.min_value)
      << " max=" << io::format_decimal(r.max_value)
      << " uniform=" << (r.uniform ? "true" : "false") << '\n';
  return r.uniform ? kExitOk : kExitTestFail;
}

namespace detail {

template <class F>
double samples_per_second(std::uint64_t n, F&& step) {
  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t i = 0; i < n; ++i) step();
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  return static_cast<double>(n) / std::max(elapsed.count(), 1e-9);
}

}  // namespace detail

/// Throughput of the raw base source and of the extended composition on top
/// of it. Informational; never fails on the numbers.
inline int run_bench(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.n == 0) throw UsageError("--n must be >= 1");
  const std::uint64_t m = effective_modulus(cfg);
  const std::uint64_t warmup = std::min<std::uint64_t>(cfg.n, 100000);

  volatile std::uint64_t sink_bits = 0;
  volatile double sink_value = 0.0;
  const auto time_raw = [&](auto source) {
    for (std::uint64_t i = 0; i < warmup; ++i) sink_bits = sink_bits ^ source.next();
    return detail::samples_per_second(cfg.n, [&] { sink_bits = sink_bits ^ source.next(); });
  };
  double raw = 0.0;
  switch (cfg.source) {
    case SourceKind::Mrg32k3a: raw = time_raw(Mrg32k3a(Seed{cfg.seed})); break;
    case SourceKind::Xorshift32: raw = time_raw(Xorshift32(Seed{cfg.seed})); break;
    case SourceKind::Counter: raw = time_raw(CounterSource(m, cfg.seed)); break;
  }
  const double extended = with_generator(cfg, cfg.seed, [&](auto& gen) {
    for (std::uint64_t i = 0; i < warmup; ++i) sink_value = gen().value;
    return detail::samples_per_second(cfg.n, [&] { sink_value = gen().value; });
  });

  const std::string name(to_string(cfg.source));
  out << "raw source=" << name << " n=" << cfg.n << " rate=" << io::format_decimal(raw)
      << " samples/s\n";
  out << "extended source=" << name << " w=" << cfg.w << " n=" << cfg.n
      << " rate=" << io::format_decimal(extended) << " samples/s\n";
  out << "ratio=" << io::format_decimal(extended / raw) << '\n';
  return kExitOk;
}

inline int dispatch(const RunConfig& cfg, std::istream& in, std::ostream& out, std::ostream& err) {
  if (cfg.subcommand == "gen") return run_gen(cfg, out, err);
  if (cfg.subcommand == "test") return run_test(cfg, in, out, err);
  if (cfg.subcommand == "oracle") return run_oracle(cfg, out, err);
  if (cfg.subcommand == "bench") return run_bench(cfg, out, err);
  throw UsageError("unknown subcommand '" + cfg.subcommand + "'");
}

/// Parses `args` (without the program name), runs the subcommand and maps
/// failures onto the exit-code contract: 0 ok, 1 runtime, 2 usage, 3 test fail.
inline int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
                   std::ostream& err) {
  RunConfig cfg;
  std::string source = "mrg32k3a";
  std::string format = "text";
  std::string band = "0.001,0.999";
  std::optional<std::uint64_t> n;

  CLI::App app{"Extended-precision uniform generator built from two w-bit draws"};
  app.name("widerand");
  app.require_subcommand(1, 1);

  const auto add_source_flags = [&](CLI::App* sub) {
    sub->add_option("--source", source, "Base source")
        ->check(CLI::IsMember({"mrg32k3a", "xorshift32", "counter"}));
    sub->add_option("--seed", cfg.seed, "64-bit seed (counter: start value)");
    sub->add_option("--n", n, "Number of samples");
    sub->add_option("--w", cfg.w, "Word size in bits")->check(CLI::Range(2, 26));
    sub->add_option("--m", cfg.m, "Counter modulus (default 2^w)");
    sub->add_flag("--open-interval", cfg.open_interval, "Emit 1 - z, excluding zero");
  };

  CLI::App* gen = app.add_subcommand("gen", "Generate extended-precision samples");
  add_source_flags(gen);
  gen->add_option("--format", format, "Output format")->check(CLI::IsMember({"bin", "text", "hex"}));
  gen->add_option("--out", cfg.out_path, "Output file (default stdout)");
  gen->add_option("--shards", cfg.shards, "Independent seeded streams, concatenated in order");

  CLI::App* test = app.add_subcommand("test", "Run uniformity tests");
  add_source_flags(test);
  test->add_option("--format", format, "Input format for --in")
      ->check(CLI::IsMember({"bin", "text", "hex"}));
  test->add_option("--in", cfg.in_path, "Read samples from a file ('-' for stdin)");
  test->add_option("--test", cfg.test, "Tests to run")
      ->check(CLI::IsMember({"chi2", "ks", "lowbits", "all"}));
  test->add_option("--bins", cfg.bins, "Chi-square bins");
  test->add_option("--p-band", band, "Passing p-value band lo,hi");

  CLI::App* oracle = app.add_subcommand("oracle", "Exhaustive exact-uniformity check");
  oracle->add_option("--m", cfg.m, "Grid points per source")->required();
  oracle->add_option("--w", cfg.w, "Word size in bits")->check(CLI::Range(2, 26));

  CLI::App* bench = app.add_subcommand("bench", "Throughput of raw and extended generation");
  add_source_flags(bench);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    cfg.subcommand = app.get_subcommands().front()->get_name();
    cfg.source = parse_source_kind(source);
    cfg.format = io::parse_format(format);
    cfg.band = parse_band(band);
    if (n) {
      cfg.n = *n;
    } else {
      cfg.n = cfg.subcommand == "gen" ? 1000 : 1000000;
    }
    return dispatch(cfg, in, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::InvalidParameter:
      case ErrorKind::InvalidRange:
      case ErrorKind::OversizeEnumeration:
        return kExitUsage;
      default:
        return kExitRuntime;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace widerand::cli
