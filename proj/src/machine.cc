#include "kolm/machine.h"

#include <cstdio>
#include <limits>

#include "kolm/codes.h"

namespace kolm {
namespace {

constexpr OpcodeInfo kOpcodes[kMnemonicCount] = {
    {Mnemonic::kLit, "LIT", "00", true},
    {Mnemonic::kZeros, "ZEROS", "01", true},
    {Mnemonic::kCopy, "COPY", "100", true},
    {Mnemonic::kCopyAll, "COPYALL", "101", false},
    {Mnemonic::kRewind, "REWIND", "1100", false},
    {Mnemonic::kDup, "DUP", "1101", false},
    {Mnemonic::kHalt, "HALT", "1110", false},
    {Mnemonic::kSkip, "SKIP", "11110", true},
    {Mnemonic::kFlip, "FLIP", "11111", true},
};

constexpr std::size_t codeword_length(Mnemonic m) {
  switch (m) {
    case Mnemonic::kLit:
    case Mnemonic::kZeros: return 2;
    case Mnemonic::kCopy:
    case Mnemonic::kCopyAll: return 3;
    case Mnemonic::kRewind:
    case Mnemonic::kDup:
    case Mnemonic::kHalt: return 4;
    case Mnemonic::kSkip:
    case Mnemonic::kFlip: return 5;
  }
  return 0;
}

// Bit reader over a program; every read reports exhaustion instead of throwing.
class ProgramReader {
 public:
  explicit ProgramReader(const BitString& p) : p_(p) {}

  bool at_end() const { return pos_ == p_.size(); }
  std::size_t pos() const { return pos_; }

  FailReason read_opcode(Mnemonic* out) {
    bool b[5];
    auto take = [&](int i) {
      if (at_end()) return false;
      b[i] = p_[pos_++];
      return true;
    };
    if (!take(0) || !take(1)) return FailReason::kIncompleteOpcode;
    if (!b[0]) {
      *out = b[1] ? Mnemonic::kZeros : Mnemonic::kLit;
      return FailReason::kNone;
    }
    if (!take(2)) return FailReason::kIncompleteOpcode;
    if (!b[1]) {
      *out = b[2] ? Mnemonic::kCopyAll : Mnemonic::kCopy;
      return FailReason::kNone;
    }
    if (!take(3)) return FailReason::kIncompleteOpcode;
    if (!b[2]) {
      *out = b[3] ? Mnemonic::kDup : Mnemonic::kRewind;
      return FailReason::kNone;
    }
    if (!b[3]) {
      *out = Mnemonic::kHalt;
      return FailReason::kNone;
    }
    if (!take(4)) return FailReason::kIncompleteOpcode;
    *out = b[4] ? Mnemonic::kFlip : Mnemonic::kSkip;
    return FailReason::kNone;
  }

  // SD operand; values past 64 bits saturate, which every consumer rejects.
  FailReason read_operand(std::uint64_t* out) {
    std::uint64_t v = 0;
    std::size_t digits = 0;
    for (;;) {
      if (p_.size() - pos_ < 2) return FailReason::kIncompleteOpcode;
      const bool hi = p_[pos_];
      const bool lo = p_[pos_ + 1];
      pos_ += 2;
      if (!hi && lo) {
        if (digits == 0) return FailReason::kOperandUnderflow;
        *out = v;
        return FailReason::kNone;
      }
      if (hi && !lo) return FailReason::kOperandUnderflow;
      if (v > (std::numeric_limits<std::uint64_t>::max() >> 1)) {
        v = std::numeric_limits<std::uint64_t>::max();
      } else {
        v = (v << 1) | (hi ? 1u : 0u);
      }
      ++digits;
    }
  }

  FailReason read_payload(std::uint64_t count, BitString* out) {
    if (count > p_.size() - pos_) return FailReason::kIncompleteOpcode;
    *out = p_.substr(pos_, count);
    pos_ += count;
    return FailReason::kNone;
  }

 private:
  const BitString& p_;
  std::size_t pos_ = 0;
};

}  // namespace

const OpcodeInfo& opcode_info(Mnemonic m) { return kOpcodes[static_cast<int>(m)]; }

const OpcodeInfo (&opcode_table())[kMnemonicCount] { return kOpcodes; }

std::size_t encoded_length(const Instruction& ins) {
  std::size_t len = codeword_length(ins.mnemonic);
  if (opcode_info(ins.mnemonic).has_operand) len += sd_length(ins.operand);
  if (ins.mnemonic == Mnemonic::kLit) len += ins.payload.size();
  return len;
}

BitString encode(const Instruction& ins) {
  const OpcodeInfo& info = opcode_info(ins.mnemonic);
  BitString out(info.codeword);
  if (info.has_operand) out.append(sd_encode(ins.operand));
  if (ins.mnemonic == Mnemonic::kLit) out.append(ins.payload);
  return out;
}

BitString encode(const std::vector<Instruction>& program) {
  BitString out;
  for (const auto& ins : program) out.append(encode(ins));
  return out;
}

std::string to_string(const Instruction& ins) {
  const OpcodeInfo& info = opcode_info(ins.mnemonic);
  std::string s = info.name;
  if (info.has_operand) s += " " + std::to_string(ins.operand);
  if (ins.mnemonic == Mnemonic::kLit) s += " " + ins.payload.to_string();
  return s;
}

const char* mode_name(Mode mode) { return mode == Mode::kPlain ? "plain" : "prefix"; }

std::optional<Mode> parse_mode(const std::string& name) {
  if (name == "plain") return Mode::kPlain;
  if (name == "prefix" || name == "prefix-free") return Mode::kPrefixFree;
  return std::nullopt;
}

const char* fail_reason_name(FailReason r) {
  switch (r) {
    case FailReason::kNone: return "None";
    case FailReason::kIncompleteOpcode: return "IncompleteOpcode";
    case FailReason::kOperandUnderflow: return "OperandUnderflow";
    case FailReason::kConditionOverrun: return "ConditionOverrun";
    case FailReason::kFuelExhausted: return "FuelExhausted";
    case FailReason::kOutputCapExceeded: return "OutputCapExceeded";
    case FailReason::kTrailingBitsAfterHalt: return "TrailingBitsAfterHalt";
    case FailReason::kHaltNotReached: return "HaltNotReached";
  }
  return "Unknown";
}

ParseResult parse_program(const BitString& p, Mode mode) {
  ParseResult result;
  ProgramReader reader(p);
  while (!reader.at_end()) {
    Instruction ins;
    if ((result.error = reader.read_opcode(&ins.mnemonic)) != FailReason::kNone) return result;
    if (opcode_info(ins.mnemonic).has_operand &&
        (result.error = reader.read_operand(&ins.operand)) != FailReason::kNone) {
      return result;
    }
    if (ins.mnemonic == Mnemonic::kLit &&
        (result.error = reader.read_payload(ins.operand, &ins.payload)) != FailReason::kNone) {
      return result;
    }
    result.program.push_back(std::move(ins));
    if (mode == Mode::kPrefixFree && result.program.back().mnemonic == Mnemonic::kHalt) {
      if (!reader.at_end()) result.error = FailReason::kTrailingBitsAfterHalt;
      return result;
    }
  }
  if (mode == Mode::kPrefixFree) result.error = FailReason::kHaltNotReached;
  return result;
}

FailReason MachineState::charge(std::uint64_t units) {
  if (units > cfg_.fuel - cost_) {
    cost_ = cfg_.fuel + 1;
    return FailReason::kFuelExhausted;
  }
  cost_ += units;
  return FailReason::kNone;
}

FailReason MachineState::step(const Instruction& ins) {
  if (FailReason r = charge(1); r != FailReason::kNone) return r;

  const BitString& cond = *condition_;
  const std::uint64_t room =
      output_.size() >= cfg_.output_cap ? 0 : cfg_.output_cap - output_.size();
  auto emit = [&](std::uint64_t bits) {
    if (bits > room) return FailReason::kOutputCapExceeded;
    return charge(bits);
  };

  switch (ins.mnemonic) {
    case Mnemonic::kLit: {
      if (FailReason r = emit(ins.operand); r != FailReason::kNone) return r;
      output_.append(ins.payload);
      break;
    }
    case Mnemonic::kZeros: {
      if (FailReason r = emit(ins.operand); r != FailReason::kNone) return r;
      output_.append_repeated(false, ins.operand);
      break;
    }
    case Mnemonic::kCopy:
    case Mnemonic::kFlip:
    case Mnemonic::kCopyAll: {
      const std::uint64_t k =
          ins.mnemonic == Mnemonic::kCopyAll ? condition_remaining() : ins.operand;
      if (k > condition_remaining()) return FailReason::kConditionOverrun;
      if (FailReason r = emit(k); r != FailReason::kNone) return r;
      if (ins.mnemonic == Mnemonic::kFlip) {
        output_.append_negated(cond, cursor_, k);
      } else {
        output_.append(cond, cursor_, k);
      }
      cursor_ += k;
      break;
    }
    case Mnemonic::kSkip: {
      if (ins.operand > condition_remaining()) return FailReason::kConditionOverrun;
      cursor_ += ins.operand;
      break;
    }
    case Mnemonic::kRewind:
      cursor_ = 0;
      break;
    case Mnemonic::kDup: {
      const std::size_t n = output_.size();
      if (FailReason r = emit(n); r != FailReason::kNone) return r;
      output_.append(output_, 0, n);
      break;
    }
    case Mnemonic::kHalt:
      break;
  }
  return FailReason::kNone;
}

ExecOutcome execute(const BitString& p, const BitString& condition, Mode mode,
                    const MachineConfig& cfg) {
  ExecOutcome outcome;
  const ParseResult parsed = parse_program(p, mode);
  if (!parsed.ok()) {
    outcome.fail_reason = parsed.error;
    return outcome;
  }
  MachineState state(condition, cfg);
  for (const Instruction& ins : parsed.program) {
    if (FailReason r = state.step(ins); r != FailReason::kNone) {
      outcome.fail_reason = r;
      outcome.cost = state.cost();
      return outcome;
    }
    if (ins.mnemonic == Mnemonic::kHalt) break;
  }
  outcome.halted = true;
  outcome.output = state.output();
  outcome.cost = state.cost();
  return outcome;
}

std::uint64_t machine_fingerprint() {
  std::string canon = "kolm-machine/1;";
  for (const auto& op : kOpcodes) {
    canon += op.codeword;
    canon += '=';
    canon += op.name;
    canon += op.has_operand ? "+sd" : "";
    canon += op.mnemonic == Mnemonic::kLit ? "+payload" : "";
    canon += ';';
  }
  canon += "sd=double-bits+01;bin0=0;cost=ops+output-bits;dup-empty=noop;copyall-end=noop";
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string machine_fingerprint_hex() {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(machine_fingerprint()));
  return buf;
}

}  // namespace kolm
