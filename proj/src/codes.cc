#include "kolm/codes.h"

#include <stdexcept>

namespace kolm {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::kMalformedPair: return "MalformedPair";
    case Errc::kUnexpectedEnd: return "UnexpectedEnd";
    case Errc::kTrailingBits: return "TrailingBits";
    case Errc::kBoundTooLarge: return "BoundTooLarge";
    case Errc::kAboveBound: return "AboveBound";
    case Errc::kFingerprintMismatch: return "FingerprintMismatch";
    case Errc::kCorruptCache: return "CorruptCache";
    case Errc::kThresholdUnavailable: return "ThresholdUnavailable";
    case Errc::kPartialProfile: return "PartialProfile";
    case Errc::kNonPositiveDeficiency: return "NonPositiveDeficiency";
    case Errc::kIndexOverflow: return "IndexOverflow";
    case Errc::kMalformedInput: return "MalformedInput";
    case Errc::kRankOutOfRange: return "RankOutOfRange";
    case Errc::kNoWitness: return "NoWitness";
    case Errc::kEmptyQualifyingSet: return "EmptyQualifyingSet";
    case Errc::kWrongIndexWidth: return "WrongIndexWidth";
    case Errc::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

BitString sd_encode(std::uint64_t d) {
  const BitString digits = BitString::bin(d);
  BitString out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    out.push_back(digits[i]);
    out.push_back(digits[i]);
  }
  out.push_back(false);
  out.push_back(true);
  return out;
}

std::size_t sd_length(std::uint64_t d) {
  std::size_t width = 1;
  while (d >> width) ++width;
  return 2 * width + 2;
}

SdDecoded sd_decode(const BitString& bits, std::size_t pos) {
  SdDecoded out;
  std::size_t digits = 0;
  for (std::size_t i = pos;; i += 2) {
    if (i + 2 > bits.size()) throw Error(Errc::kUnexpectedEnd, "SD integer truncated");
    const bool hi = bits[i];
    const bool lo = bits[i + 1];
    if (!hi && lo) {
      out.consumed = i + 2 - pos;
      return out;
    }
    if (hi && !lo) throw Error(Errc::kMalformedPair, "pair \"10\" in SD integer");
    if (digits == 64) throw std::overflow_error("SD integer exceeds 64 bits");
    out.value = (out.value << 1) | (hi ? 1u : 0u);
    ++digits;
  }
}

BitString pack_condition(std::span<const BitString> items) {
  if (items.size() == 1) return items.front();
  BitString out;
  for (const auto& item : items) {
    out.append(sd_encode(item.size()));
    out.append(item);
  }
  return out;
}

BitString pack_condition(std::initializer_list<BitString> items) {
  return pack_condition(std::span<const BitString>(items.begin(), items.size()));
}

std::vector<BitString> unpack_condition(const BitString& bits, std::size_t count) {
  std::vector<BitString> items;
  if (count == 1) {
    items.push_back(bits);
    return items;
  }
  std::size_t pos = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const SdDecoded len = sd_decode(bits, pos);
    pos += len.consumed;
    if (len.value > bits.size() - pos) throw Error(Errc::kUnexpectedEnd, "condition item truncated");
    items.push_back(bits.substr(pos, len.value));
    pos += len.value;
  }
  if (pos != bits.size()) throw Error(Errc::kTrailingBits, "bits left after last condition item");
  return items;
}

BitString encode_lambda(const LambdaRecord& r) {
  BitString out = sd_encode(r.delta_n);
  out.append(sd_encode(r.t_x));
  out.append(sd_encode(r.t_y));
  out.append(sd_encode(r.w));
  out.push_back(r.b);
  return out;
}

std::size_t lambda_length(const LambdaRecord& r) {
  return sd_length(r.delta_n) + sd_length(r.t_x) + sd_length(r.t_y) + sd_length(r.w) + 1;
}

LambdaDecoded decode_lambda(const BitString& bits, std::size_t pos) {
  LambdaDecoded out;
  std::size_t at = pos;
  auto next = [&] {
    const SdDecoded d = sd_decode(bits, at);
    at += d.consumed;
    return d.value;
  };
  out.record.delta_n = next();
  out.record.t_x = next();
  out.record.t_y = next();
  out.record.w = next();
  if (at >= bits.size()) throw Error(Errc::kUnexpectedEnd, "lambda record missing direction bit");
  out.record.b = bits[at++];
  out.consumed = at - pos;
  return out;
}

}  // namespace kolm
