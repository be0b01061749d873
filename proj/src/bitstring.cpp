#include "nodata/bitstring.hpp"

#include <algorithm>

#include "nodata/errors.hpp"

namespace nodata {

BitString::BitString(std::string bits) : bits_(std::move(bits)) {
  for (char c : bits_) {
    if (c != '0' && c != '1') {
      throw FormatError("bit string may only contain '0' and '1', got \"" + bits_ + "\"");
    }
  }
}

BitString BitString::parse(std::string_view text) {
  if (text.empty()) {
    throw FormatError("datapoint bit string must be non-empty");
  }
  return BitString(std::string(text));
}

BitString BitString::from_value(std::uint64_t value, std::size_t n) {
  if (n > 64) {
    throw ConfigError("from_value supports at most 64 bits");
  }
  std::string out(n, '0');
  for (std::size_t i = 0; i < n; ++i) {
    if ((value >> (n - 1 - i)) & 1ULL) out[i] = '1';
  }
  return BitString(std::move(out));
}

BitString BitString::random(Rng& rng, std::size_t n) {
  std::string out(n, '0');
  std::uint64_t chunk = 0;
  int left = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (left == 0) {
      chunk = rng.next_u64();
      left = 64;
    }
    out[i] = (chunk & 1ULL) ? '1' : '0';
    chunk >>= 1;
    --left;
  }
  return BitString(std::move(out));
}

std::size_t BitString::popcount() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), '1'));
}

BitString BitString::prefix(std::size_t n) const {
  BitString out;
  out.bits_ = bits_.substr(0, std::min(n, bits_.size()));
  return out;
}

BitString BitString::suffix(std::size_t n) const {
  const std::size_t len = std::min(n, bits_.size());
  BitString out;
  out.bits_ = bits_.substr(bits_.size() - len, len);
  return out;
}

BitString BitString::window(std::size_t pos, std::size_t len) const {
  BitString out;
  out.bits_ = bits_.substr(pos, len);
  return out;
}

bool BitString::contains(const BitString& pattern) const noexcept {
  return bits_.find(pattern.bits_) != std::string::npos;
}

bool BitString::starts_with(const BitString& pattern) const noexcept {
  return bits_.starts_with(pattern.bits_);
}

bool BitString::ends_with(const BitString& pattern) const noexcept {
  return bits_.ends_with(pattern.bits_);
}

std::uint64_t stable_hash(const BitString& s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s.str()) {
    h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::ostream& operator<<(std::ostream& os, const BitString& s) { return os << s.str(); }

}  // namespace nodata
