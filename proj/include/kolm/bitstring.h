#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace kolm {

// Finite sequence over {0,1}, stored MSB-first in packed bytes. Unused bits of
// the last byte are always zero so equality and hashing can work on bytes.
// Strings up to 120 bits stay inside the std::string small buffer.
class BitString {
 public:
  BitString() = default;

  // Parses a literal of '0'/'1' characters. Throws std::invalid_argument on
  // any other character.
  explicit BitString(std::string_view literal);

  // Minimal binary representation of `value`; bin(0) = "0".
  static BitString bin(std::uint64_t value);
  // `value` written on exactly `width` bits (leading zeros kept).
  static BitString fixed_width(std::uint64_t value, std::size_t width);
  // Inverse of to_hex(); throws std::invalid_argument on malformed input.
  static BitString from_hex(std::string_view text);

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  bool operator[](std::size_t i) const {
    return (static_cast<unsigned char>(bytes_[i >> 3]) >> (7 - (i & 7))) & 1u;
  }

  void push_back(bool bit);
  void append(const BitString& other);
  void append(const BitString& other, std::size_t pos, std::size_t count);
  // Appends `count` copies of `bit`.
  void append_repeated(bool bit, std::size_t count);
  // Appends bits [pos, pos+count) of `other`, each negated.
  void append_negated(const BitString& other, std::size_t pos, std::size_t count);
  // Shortens to `n` bits; n must not exceed size().
  void truncate(std::size_t n);
  void clear() { truncate(0); }

  BitString substr(std::size_t pos, std::size_t count) const;
  BitString substr(std::size_t pos) const { return substr(pos, size_ - pos); }
  bool starts_with(const BitString& prefix) const;

  // Unsigned value of the bits read as a binary numeral (empty = 0).
  // Requires size() <= 64.
  std::uint64_t to_uint() const;

  std::string to_string() const;
  // "<bit count>:<hex bytes>", e.g. "0110" -> "4:60".
  std::string to_hex() const;

  friend BitString operator+(BitString lhs, const BitString& rhs) {
    lhs.append(rhs);
    return lhs;
  }
  friend bool operator==(const BitString& a, const BitString& b) {
    return a.size_ == b.size_ && a.bytes_ == b.bytes_;
  }
  // Shortlex order: shorter strings first, equal lengths lexicographically.
  friend bool operator<(const BitString& a, const BitString& b);

  std::size_t hash() const { return std::hash<std::string>{}(bytes_) ^ size_; }

 private:
  std::string bytes_;
  std::size_t size_ = 0;
};

// Every string of length n in lexicographic order, as the value of index i.
inline BitString nth_string(std::uint64_t i, std::size_t n) {
  return BitString::fixed_width(i, n);
}

}  // namespace kolm

template <>
struct std::hash<kolm::BitString> {
  std::size_t operator()(const kolm::BitString& b) const { return b.hash(); }
};
