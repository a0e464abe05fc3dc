#include "kolm/bitstring.h"

#include <stdexcept>

namespace kolm {

BitString::BitString(std::string_view literal) {
  for (char c : literal) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("bit string literal may only contain 0 and 1");
    }
    push_back(c == '1');
  }
}

BitString BitString::bin(std::uint64_t value) {
  if (value == 0) return BitString("0");
  int width = 64;
  while (((value >> (width - 1)) & 1u) == 0) --width;
  return fixed_width(value, static_cast<std::size_t>(width));
}

BitString BitString::fixed_width(std::uint64_t value, std::size_t width) {
  BitString out;
  for (std::size_t i = width; i > 0; --i) {
    out.push_back(i - 1 < 64 && ((value >> (i - 1)) & 1u));
  }
  return out;
}

void BitString::push_back(bool bit) {
  if ((size_ & 7) == 0) bytes_.push_back('\0');
  if (bit) bytes_.back() = static_cast<char>(bytes_.back() | (0x80 >> (size_ & 7)));
  ++size_;
}

void BitString::append(const BitString& other) { append(other, 0, other.size_); }

void BitString::append(const BitString& other, std::size_t pos, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) push_back(other[pos + i]);
}

void BitString::append_repeated(bool bit, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) push_back(bit);
}

void BitString::append_negated(const BitString& other, std::size_t pos, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) push_back(!other[pos + i]);
}

void BitString::truncate(std::size_t n) {
  if (n >= size_) return;
  bytes_.resize((n + 7) >> 3);
  if (n & 7) {
    const auto keep = static_cast<unsigned char>(0xFF00 >> (n & 7));
    bytes_.back() = static_cast<char>(static_cast<unsigned char>(bytes_.back()) & keep);
  }
  size_ = n;
}

BitString BitString::substr(std::size_t pos, std::size_t count) const {
  if (pos > size_) throw std::out_of_range("BitString::substr");
  if (count > size_ - pos) count = size_ - pos;
  BitString out;
  out.append(*this, pos, count);
  return out;
}

bool BitString::starts_with(const BitString& prefix) const {
  if (prefix.size_ > size_) return false;
  for (std::size_t i = 0; i < prefix.size_; ++i) {
    if ((*this)[i] != prefix[i]) return false;
  }
  return true;
}

std::uint64_t BitString::to_uint() const {
  if (size_ > 64) throw std::overflow_error("BitString::to_uint: more than 64 bits");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < size_; ++i) v = (v << 1) | ((*this)[i] ? 1u : 0u);
  return v;
}

std::string BitString::to_string() const {
  std::string s;
  s.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) s.push_back((*this)[i] ? '1' : '0');
  return s;
}

std::string BitString::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s = std::to_string(size_) + ":";
  for (char byte : bytes_) {
    const auto b = static_cast<unsigned char>(byte);
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 15]);
  }
  return s;
}

BitString BitString::from_hex(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw std::invalid_argument("hex bit string must be <bits>:<hex>");
  }
  std::size_t bits = 0;
  for (char c : text.substr(0, colon)) {
    if (c < '0' || c > '9') throw std::invalid_argument("bad bit count in hex bit string");
    bits = bits * 10 + static_cast<std::size_t>(c - '0');
  }
  const auto hex = text.substr(colon + 1);
  if (hex.size() != 2 * ((bits + 7) / 8)) {
    throw std::invalid_argument("hex payload length does not match bit count");
  }
  auto nibble = [](char c) -> unsigned {
    if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
    throw std::invalid_argument("bad hex digit");
  };
  BitString out;
  for (std::size_t i = 0; i < bits; ++i) {
    const unsigned byte = nibble(hex[2 * (i / 8)]) << 4 | nibble(hex[2 * (i / 8) + 1]);
    out.push_back((byte >> (7 - (i & 7))) & 1u);
  }
  // Reject nonzero padding so every table line has one canonical spelling.
  const std::string canonical = out.to_hex();
  if (canonical.substr(canonical.find(':') + 1) != hex) {
    throw std::invalid_argument("nonzero padding bits in hex bit string");
  }
  return out;
}

bool operator<(const BitString& a, const BitString& b) {
  if (a.size_ != b.size_) return a.size_ < b.size_;
  // Byte compare equals bitwise lexicographic compare for equal lengths.
  for (std::size_t i = 0; i < a.bytes_.size(); ++i) {
    const auto x = static_cast<unsigned char>(a.bytes_[i]);
    const auto y = static_cast<unsigned char>(b.bytes_[i]);
    if (x != y) return x < y;
  }
  return false;
}

}  // namespace kolm
