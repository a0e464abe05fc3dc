#pragma once

#include <stdexcept>
#include <string>

namespace kolm {

enum class Errc {
  kMalformedPair,
  kUnexpectedEnd,
  kTrailingBits,
  kBoundTooLarge,
  kAboveBound,
  kFingerprintMismatch,
  kCorruptCache,
  kThresholdUnavailable,
  kPartialProfile,
  kNonPositiveDeficiency,
  kIndexOverflow,
  kMalformedInput,
  kRankOutOfRange,
  kNoWitness,
  kEmptyQualifyingSet,
  kWrongIndexWidth,
  kInvalidArgument,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace kolm
