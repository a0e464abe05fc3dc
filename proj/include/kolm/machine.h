#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kolm/bitstring.h"

namespace kolm {

// Opcode prefix code (MSB-first):
//   00 LIT      01 ZEROS    100 COPY     101 COPYALL
//   1100 REWIND 1101 DUP    1110 HALT    11110 SKIP   11111 FLIP
// LIT, ZEROS, COPY, SKIP and FLIP are followed by an SD-coded operand; LIT is
// further followed by operand-many raw payload bits.
enum class Mnemonic : std::uint8_t { kLit, kZeros, kCopy, kCopyAll, kRewind, kDup, kHalt, kSkip, kFlip };

inline constexpr int kMnemonicCount = 9;

struct OpcodeInfo {
  Mnemonic mnemonic;
  const char* name;
  const char* codeword;
  bool has_operand;
};

const OpcodeInfo& opcode_info(Mnemonic m);
const OpcodeInfo (&opcode_table())[kMnemonicCount];

struct Instruction {
  Mnemonic mnemonic = Mnemonic::kHalt;
  std::uint64_t operand = 0;
  BitString payload;  // LIT only

  bool operator==(const Instruction&) const = default;
};

// Length in bits of the encoded instruction.
std::size_t encoded_length(const Instruction& ins);
BitString encode(const Instruction& ins);
BitString encode(const std::vector<Instruction>& program);
std::string to_string(const Instruction& ins);

enum class Mode : std::uint8_t { kPlain, kPrefixFree };

const char* mode_name(Mode mode);
std::optional<Mode> parse_mode(const std::string& name);

struct MachineConfig {
  std::uint64_t fuel = 4096;
  std::uint64_t output_cap = 64;

  bool operator==(const MachineConfig&) const = default;
};

enum class FailReason : std::uint8_t {
  kNone,
  kIncompleteOpcode,
  // Operand SD code is malformed: a "10" pair, or "01" before any digit.
  kOperandUnderflow,
  kConditionOverrun,
  kFuelExhausted,
  kOutputCapExceeded,
  kTrailingBitsAfterHalt,
  kHaltNotReached,
};

const char* fail_reason_name(FailReason r);

struct ParseResult {
  std::vector<Instruction> program;
  FailReason error = FailReason::kNone;

  bool ok() const { return error == FailReason::kNone; }
};

// Unique left-to-right decomposition of `p`. Plain mode requires the bits to
// split exactly into complete instructions; prefix-free mode requires the
// decomposition to reach HALT exactly at the last bit.
ParseResult parse_program(const BitString& p, Mode mode);

struct ExecOutcome {
  bool halted = false;
  BitString output;  // meaningful iff halted
  FailReason fail_reason = FailReason::kNone;
  std::uint64_t cost = 0;

  bool operator==(const ExecOutcome&) const = default;
};

ExecOutcome execute(const BitString& p, const BitString& condition, Mode mode,
                    const MachineConfig& cfg);

// Mutable execution state. `execute` drives it over a parsed program; the
// table enumerator drives it incrementally and rolls back with restore().
class MachineState {
 public:
  struct Checkpoint {
    std::size_t output_size;
    std::size_t cursor;
    std::uint64_t cost;
  };

  MachineState(const BitString& condition, const MachineConfig& cfg)
      : condition_(&condition), cfg_(cfg) {}

  // Executes one instruction; HALT only charges its cost. Returns kNone on
  // success. On failure the state is unspecified until restore().
  FailReason step(const Instruction& ins);

  Checkpoint checkpoint() const { return {output_.size(), cursor_, cost_}; }
  void restore(const Checkpoint& c) {
    output_.truncate(c.output_size);
    cursor_ = c.cursor;
    cost_ = c.cost;
  }

  const BitString& output() const { return output_; }
  std::size_t cursor() const { return cursor_; }
  std::uint64_t cost() const { return cost_; }
  std::size_t condition_remaining() const { return condition_->size() - cursor_; }
  const MachineConfig& config() const { return cfg_; }

 private:
  FailReason charge(std::uint64_t units);

  const BitString* condition_;
  MachineConfig cfg_;
  BitString output_;
  std::size_t cursor_ = 0;
  std::uint64_t cost_ = 0;
};

// Content hash of the normative opcode table, operand code and cost model.
std::uint64_t machine_fingerprint();
std::string machine_fingerprint_hex();

}  // namespace kolm
