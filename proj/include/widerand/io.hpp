#pragma once

// Sample stream formats: raw little-endian binary64 with no header,
// newline-delimited decimal text (17 significant digits, exact round trip),
// and newline-delimited hexadecimal floats.

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "widerand/error.hpp"

namespace widerand::io {

enum class Format { Binary, Text, Hex };

inline Format parse_format(std::string_view name) {
  if (name == "bin") return Format::Binary;
  if (name == "text") return Format::Text;
  if (name == "hex") return Format::Hex;
  throw Error(ErrorKind::InvalidParameter, "unknown format '" + std::string(name) + "'");
}

inline std::string format_decimal(double x) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x,
                                 std::chars_format::general, 17);
  return std::string(buf.data(), end);
}

inline std::string format_hex(double x) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::hex);
  std::string_view digits(buf.data(), static_cast<std::size_t>(end - buf.data()));
  if (!digits.empty() && digits.front() == '-') return "-0x" + std::string(digits.substr(1));
  return "0x" + std::string(digits);
}

inline void write_value(std::ostream& out, double x, Format format) {
  switch (format) {
    case Format::Binary: {
      auto bits = std::bit_cast<std::uint64_t>(x);
      std::array<char, 8> bytes{};
      for (auto& b : bytes) {
        b = static_cast<char>(bits & 0xffU);
        bits >>= 8;
      }
      out.write(bytes.data(), bytes.size());
      break;
    }
    case Format::Text:
      out << format_decimal(x) << '\n';
      break;
    case Format::Hex:
      out << format_hex(x) << '\n';
      break;
  }
}

namespace detail {

inline double parse_token(std::string_view token, Format format, std::size_t offset) {
  bool negative = false;
  std::string_view digits = token;
  auto fmt = std::chars_format::general;
  if (format == Format::Hex) {
    if (!digits.empty() && digits.front() == '-') {
      negative = true;
      digits.remove_prefix(1);
    }
    if (digits.starts_with("0x") || digits.starts_with("0X")) digits.remove_prefix(2);
    fmt = std::chars_format::hex;
  }
  double value = 0.0;
  const char* first = digits.data();
  const char* last = digits.data() + digits.size();
  auto [ptr, ec] = std::from_chars(first, last, value, fmt);
  if (ec != std::errc{} || ptr != last || digits.empty()) {
    throw Error(ErrorKind::Parse, "malformed value '" + std::string(token) +
                                      "' at byte offset " + std::to_string(offset));
  }
  return negative ? -value : value;
}

}  // namespace detail

/// Reads a whole stream. Parse errors report the byte offset of the
/// offending record.
inline std::vector<double> read_stream(std::istream& in, Format format) {
  const std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::vector<double> values;

  if (format == Format::Binary) {
    const std::size_t whole = data.size() / 8 * 8;
    if (whole != data.size()) {
      throw Error(ErrorKind::Parse, "truncated binary64 record at byte offset " +
                                        std::to_string(whole));
    }
    values.reserve(data.size() / 8);
    for (std::size_t off = 0; off < data.size(); off += 8) {
      std::uint64_t bits = 0;
      for (int b = 7; b >= 0; --b) {
        bits = (bits << 8) | static_cast<unsigned char>(data[off + static_cast<std::size_t>(b)]);
      }
      values.push_back(std::bit_cast<double>(bits));
    }
    return values;
  }

  std::size_t pos = 0;
  while (pos < data.size()) {
    std::size_t eol = data.find('\n', pos);
    if (eol == std::string::npos) eol = data.size();
    std::string_view line(data.data() + pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) values.push_back(detail::parse_token(line, format, pos));
    pos = eol + 1;
  }
  return values;
}

}  // namespace widerand::io
