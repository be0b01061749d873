#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

#include "nodata/rng.hpp"

namespace nodata {

/// A binary string. Datapoints are non-empty bit strings; rubric encodings
/// reuse the same type and may be empty (an empty rubric encodes to "").
class BitString {
 public:
  BitString() = default;

  /// Validates that every character is '0' or '1'. Empty input is allowed
  /// here; use parse() at boundaries where a datapoint is expected.
  explicit BitString(std::string bits);

  /// Parses a datapoint: non-empty, every character '0' or '1'.
  static BitString parse(std::string_view text);

  /// Low n bits of value, most significant first. n must be <= 64.
  static BitString from_value(std::uint64_t value, std::size_t n);

  static BitString zeros(std::size_t n) { return BitString(std::string(n, '0')); }

  /// Uniform random string of n bits.
  static BitString random(Rng& rng, std::size_t n);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }

  int bit(std::size_t i) const { return bits_.at(i) - '0'; }
  void flip_bit(std::size_t i) { bits_.at(i) = bits_.at(i) == '0' ? '1' : '0'; }

  std::size_t popcount() const noexcept;

  /// First min(n, size()) bits.
  BitString prefix(std::size_t n) const;
  /// Last min(n, size()) bits.
  BitString suffix(std::size_t n) const;
  BitString window(std::size_t pos, std::size_t len) const;

  bool contains(const BitString& pattern) const noexcept;
  bool starts_with(const BitString& pattern) const noexcept;
  bool ends_with(const BitString& pattern) const noexcept;

  const std::string& str() const noexcept { return bits_; }

  friend bool operator==(const BitString&, const BitString&) = default;
  friend std::strong_ordering operator<=>(const BitString&, const BitString&) = default;

 private:
  std::string bits_;
};

/// FNV-1a over the characters. Stable across platforms and processes, unlike
/// std::hash, so it is safe to fold into seed derivations.
std::uint64_t stable_hash(const BitString& s) noexcept;

std::ostream& operator<<(std::ostream& os, const BitString& s);

}  // namespace nodata

template <>
struct std::hash<nodata::BitString> {
  std::size_t operator()(const nodata::BitString& s) const noexcept {
    return static_cast<std::size_t>(nodata::stable_hash(s));
  }
};
