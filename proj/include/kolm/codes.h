#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kolm/bitstring.h"
#include "kolm/error.h"

namespace kolm {

// Self-delimiting integer code: bin(d) with every bit doubled, then "01".
// |sd_encode(d)| = 2*floor(log2 d) + 4 for d >= 1, and 4 for d = 0.
BitString sd_encode(std::uint64_t d);
std::size_t sd_length(std::uint64_t d);

struct SdDecoded {
  std::uint64_t value = 0;
  std::size_t consumed = 0;
};

// Reads one SD integer starting at `pos`. Throws Error(kMalformedPair) on a
// "10" pair and Error(kUnexpectedEnd) when the bits run out first. A bare
// "01" (no digit pairs, outside the image of sd_encode) reads as 0.
SdDecoded sd_decode(const BitString& bits, std::size_t pos = 0);

// One item packs raw; two or more pack as SD(|item|)·item for each item.
BitString pack_condition(std::span<const BitString> items);
BitString pack_condition(std::initializer_list<BitString> items);
std::vector<BitString> unpack_condition(const BitString& bits, std::size_t count);

// (|n_x - n_y|, t_x, t_y, w, b) from the two-part symmetry-of-information code.
struct LambdaRecord {
  std::uint64_t delta_n = 0;
  std::uint64_t t_x = 0;
  std::uint64_t t_y = 0;
  std::uint64_t w = 1;
  bool b = false;  // n_x > n_y

  bool operator==(const LambdaRecord&) const = default;
};

// SD(delta_n)·SD(t_x)·SD(t_y)·SD(w)·b
BitString encode_lambda(const LambdaRecord& r);
std::size_t lambda_length(const LambdaRecord& r);

struct LambdaDecoded {
  LambdaRecord record;
  std::size_t consumed = 0;
};

LambdaDecoded decode_lambda(const BitString& bits, std::size_t pos = 0);

}  // namespace kolm
