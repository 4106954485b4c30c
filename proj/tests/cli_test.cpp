#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"

namespace widerand::cli {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

class TempFile {
 public:
  explicit TempFile(const std::string& name)
      : path_(std::filesystem::temp_directory_path() / ("widerand_" + name)) {}
  ~TempFile() { std::filesystem::remove(path_); }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

TEST(CliGenTest, CounterEnumeratesLattice) {
  // x1 counter: 0 rejected, 1; x2 counter: 0 -> j = 0. Then (2, 1) -> j = 9.
  const auto r = run({"gen", "--source", "counter", "--w", "3", "--m", "8", "--n", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto out = lines(r.out);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0], "0");
  EXPECT_EQ(out[1], io::format_decimal(index_to_unit(9, 8, ResolutionParam(3))));
  EXPECT_EQ(out[2], io::format_decimal(index_to_unit(18, 8, ResolutionParam(3))));
}

TEST(CliGenTest, DeterministicBinaryOutput) {
  const std::vector<std::string> args{"gen", "--seed", "77", "--n", "2000", "--format", "bin"};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, kExitOk);
  EXPECT_EQ(a.out.size(), 2000u * 8);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, run({"gen", "--seed", "78", "--n", "2000", "--format", "bin"}).out);
}

TEST(CliGenTest, OpenIntervalNeverZero) {
  const auto r = run({"gen", "--source", "counter", "--w", "3", "--n", "200", "--open-interval"});
  ASSERT_EQ(r.code, kExitOk);
  for (const auto& line : lines(r.out)) {
    EXPECT_NE(std::stod(line), 0.0);
    EXPECT_GE(std::stod(line), 1.0 / 64);
  }
}

TEST(CliGenTest, HexFormat) {
  const auto r = run({"gen", "--source", "counter", "--w", "3", "--n", "1", "--format", "hex"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "0x0p+0\n");
}

TEST(CliGenTest, ShardsAreDeterministicAndSingleShardMatches) {
  const auto one = run({"gen", "--seed", "9", "--n", "1000", "--format", "bin"});
  const auto single = run({"gen", "--seed", "9", "--n", "1000", "--format", "bin", "--shards", "1"});
  EXPECT_EQ(one.out, single.out);
  const auto a = run({"gen", "--seed", "9", "--n", "1001", "--format", "bin", "--shards", "4"});
  const auto b = run({"gen", "--seed", "9", "--n", "1001", "--format", "bin", "--shards", "4"});
  ASSERT_EQ(a.code, kExitOk);
  EXPECT_EQ(a.out.size(), 1001u * 8);
  EXPECT_EQ(a.out, b.out);
  // Shard 0 (251 samples) is the unsharded prefix.
  EXPECT_EQ(a.out.substr(0, 251 * 8), one.out.substr(0, 251 * 8));
}

TEST(CliGenTest, UsageErrors) {
  EXPECT_EQ(run({"gen", "--w", "27"}).code, kExitUsage);
  EXPECT_EQ(run({"gen", "--w", "1"}).code, kExitUsage);
  EXPECT_EQ(run({"gen", "--source", "ranlux"}).code, kExitUsage);
  EXPECT_EQ(run({"gen", "--format", "csv"}).code, kExitUsage);
  EXPECT_EQ(run({"gen", "--n", "0"}).code, kExitUsage);
  EXPECT_EQ(run({"gen", "--bogus"}).code, kExitUsage);
  EXPECT_EQ(run({"gen", "--m", "100"}).code, kExitUsage);
  EXPECT_EQ(run({"gen", "--source", "counter", "--w", "3", "--m", "9"}).code, kExitUsage);
  EXPECT_EQ(run({}).code, kExitUsage);
}

TEST(CliGenTest, UnwritableOutputIsRuntimeError) {
  EXPECT_EQ(run({"gen", "--n", "5", "--out", "/nonexistent-dir/x.bin"}).code, kExitRuntime);
}

TEST(CliTestTest, GeneratedMrgStreamPasses) {
  const auto r = run({"test", "--seed", "3", "--n", "1000000", "--test", "chi2", "--bins", "1024"});
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
  const auto report = nlohmann::json::parse(lines(r.out).at(0));
  EXPECT_EQ(report["test"], "chi2");
  EXPECT_EQ(report["verdict"], "pass");
  EXPECT_EQ(report["n"], 1000000);
}

TEST(CliTestTest, AllRunsThreeTests) {
  const auto r = run({"test", "--seed", "4", "--n", "200000"});
  EXPECT_EQ(r.code, kExitOk) << r.out;
  EXPECT_EQ(lines(r.out).size(), 3u);
}

TEST(CliTestTest, PointMassFileFailsKs) {
  std::string text;
  for (int i = 0; i < 1000; ++i) text += "0.5\n";
  const auto r = run({"test", "--in", "-", "--format", "text", "--test", "ks"}, text);
  EXPECT_EQ(r.code, kExitTestFail);
  EXPECT_EQ(nlohmann::json::parse(lines(r.out).at(0))["verdict"], "fail");
}

TEST(CliTestTest, EmptyInputIsInsufficientData) {
  const auto r = run({"test", "--in", "-", "--format", "bin"}, "");
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(r.err.find("insufficient data"), std::string::npos) << r.err;
}

TEST(CliTestTest, MalformedInputReportsOffset) {
  const auto r = run({"test", "--in", "-", "--format", "text"}, "0.5\nnope\n");
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(r.err.find("byte offset 4"), std::string::npos) << r.err;
}

TEST(CliTestTest, LowBitsNeedsGeneratedStream) {
  EXPECT_EQ(run({"test", "--in", "-", "--test", "lowbits"}, "0.5\n").code, kExitUsage);
}

TEST(CliTestTest, BadBand) {
  EXPECT_EQ(run({"test", "--p-band", "0.9,0.1"}).code, kExitUsage);
  EXPECT_EQ(run({"test", "--p-band", "abc"}).code, kExitUsage);
}

TEST(CliTestTest, BinaryFileRoundTrip) {
  TempFile file("roundtrip.bin");
  ASSERT_EQ(run({"gen", "--seed", "12", "--n", "20000", "--format", "bin", "--out", file.str()}).code,
            kExitOk);
  const auto generated = run({"gen", "--seed", "12", "--n", "20000", "--format", "bin"});
  std::ifstream in(file.str(), std::ios::binary);
  const std::string on_disk{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  EXPECT_EQ(on_disk, generated.out);

  std::istringstream reread(on_disk);
  const auto values = io::read_stream(reread, io::Format::Binary);
  const auto direct = generate_samples(RunConfig{}, 12, 20000);
  ASSERT_EQ(values.size(), direct.size());
  for (std::size_t i = 0; i < values.size(); ++i) ASSERT_EQ(values[i], direct[i].value);

  const auto r = run({"test", "--in", file.str(), "--format", "bin", "--bins", "64"});
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
  EXPECT_EQ(lines(r.out).size(), 2u);
}

TEST(CliOracleTest, PowerOfTwo) {
  const auto r = run({"oracle", "--m", "8", "--w", "3"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "distinct=48 min=0 max=0.984375 uniform=true\n");
}

TEST(CliOracleTest, GeneralRange) {
  const auto r = run({"oracle", "--m", "6", "--w", "3"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("distinct=24"), std::string::npos);
  EXPECT_NE(r.out.find("uniform=true"), std::string::npos);
}

TEST(CliOracleTest, Guards) {
  const auto small = run({"oracle", "--m", "3", "--w", "3"});
  EXPECT_EQ(small.code, kExitUsage);
  EXPECT_NE(small.err.find("invalid range"), std::string::npos);
  const auto big = run({"oracle", "--m", "5000"});
  EXPECT_EQ(big.code, kExitUsage);
  EXPECT_NE(big.err.find("oversize"), std::string::npos);
  EXPECT_EQ(run({"oracle"}).code, kExitUsage);
}

TEST(CliBenchTest, ReportsTwoRatesAndRatio) {
  for (const std::string source : {"counter", "mrg32k3a"}) {
    const auto r = run({"bench", "--source", source, "--n", "20000"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto out = lines(r.out);
    ASSERT_EQ(out.size(), 3u);
    EXPECT_EQ(out[0].rfind("raw source=" + source, 0), 0u);
    EXPECT_EQ(out[1].rfind("extended source=" + source, 0), 0u);
    ASSERT_EQ(out[2].rfind("ratio=", 0), 0u);
    EXPECT_GT(std::stod(out[2].substr(6)), 0.0);
  }
  EXPECT_EQ(run({"bench", "--n", "0"}).code, kExitUsage);
}

}  // namespace
}  // namespace widerand::cli
