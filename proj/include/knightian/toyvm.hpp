#pragma once

// toyvm-1: a total, budgeted, prefix-free bit-emitting machine.
//
// Program layout: gamma(l + 1) ++ body, where gamma is the Elias-gamma code
// and l is the body length in bits. The body is read as 3-bit opcodes, most
// significant bit first; 0-2 trailing bits that do not fill an opcode are
// padding and are ignored.
//
//   000 EMIT0   append 0 to the output
//   001 EMIT1   append 1 to the output
//   010 RAND    append the next bit of the random stream
//   011 HALT    stop (halted)
//   100 INC     counter = (counter + 1) mod 8
//   101 DEC     counter = (counter + 7) mod 8
//   110 JMP     pc = max(0, pc - 2)
//   111 JNZ     if counter != 0: pc = max(0, pc - 2), else fall through
//
// Falling off the end of the body halts, so the empty program halts
// immediately with empty output. Every executed instruction costs one step.
// Execution also stops (not halted) when the step budget is spent, when RAND
// would exceed the random-bit budget, or when an emit would exceed the output
// budget. Random bits only ever reach the output, never control flow, so
// swapping EMIT0 <-> EMIT1 and complementing the random stream complements
// the output: the machine is bit-flip symmetric.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "knightian/bits.hpp"
#include "knightian/error.hpp"

namespace knightian::toyvm {

inline constexpr const char* kMachineVersion = "toyvm-1";
inline constexpr unsigned kOpcodeBits = 3;
inline constexpr unsigned kCounterModulus = 8;
inline constexpr unsigned kJumpBack = 2;
inline constexpr unsigned kDefaultEnumerateLimit = 24;

enum class Op : std::uint8_t { Emit0 = 0, Emit1 = 1, Rand = 2, Halt = 3, Inc = 4, Dec = 5, Jmp = 6, Jnz = 7 };

const char* op_name(Op op);

class BadHeader : public ValidationError {
 public:
  explicit BadHeader(const std::string& detail) : ValidationError("BadHeader", detail) {}
};

class LengthMismatch : public ValidationError {
 public:
  LengthMismatch(std::size_t expected, std::size_t got)
      : ValidationError("LengthMismatch", "expected " + std::to_string(expected) + " bits, got " +
                                              std::to_string(got)),
        expected(expected),
        got(got) {}
  std::size_t expected;
  std::size_t got;
};

class Program {
 public:
  /// Parses a complete program; the input must be exactly header + body.
  static Program decode(const Bits& code);
  static Program from_body(const Bits& body);
  static Program assemble(const std::vector<Op>& ops);

  const Bits& code() const { return code_; }
  /// |P| in bits, header included.
  std::size_t length() const { return code_.size(); }
  std::size_t body_length() const { return code_.size() - body_offset_; }
  Bits body() const { return Bits(code_.begin() + static_cast<std::ptrdiff_t>(body_offset_), code_.end()); }
  const std::vector<Op>& ops() const { return ops_; }
  bool uses_rand() const;

  std::string to_string() const { return knightian::to_string(code_); }
  /// e.g. "EMIT0 INC JNZ" (padding bits are not shown).
  std::string disassemble() const;

  friend bool operator==(const Program& a, const Program& b) { return a.code_ == b.code_; }

 private:
  Program(Bits code, std::size_t body_offset);
  Bits code_;
  std::size_t body_offset_ = 0;
  std::vector<Op> ops_;
};

struct MachineConfig {
  std::uint32_t step_budget = 256;
  std::uint32_t rand_budget = 16;
  std::uint32_t output_budget = 64;

  /// Throws ValidationError("BadConfig") unless step/output budgets are >= 1.
  void validate() const;
};

struct RunResult {
  Bits output;
  bool halted = false;
  std::uint32_t steps_used = 0;
  std::uint32_t rands_used = 0;
};

enum class Status : std::uint8_t { Running, Halted, Exhausted };

struct MachineState {
  std::uint32_t pc = 0;
  std::uint32_t steps = 0;
  std::uint32_t rands = 0;
  std::uint32_t emitted = 0;
  std::uint8_t counter = 0;
  Status status = Status::Running;
};

enum class EventKind : std::uint8_t { Emit, Random, Halted, Exhausted };

struct Event {
  EventKind kind;
  std::uint8_t bit = 0;  // meaningful for Emit only
};

/// Executes from `state` up to and including the next output-producing
/// instruction, or until the machine stops. A Random event has consumed one
/// random bit; which bit it was is the caller's business.
Event advance(const Program& p, MachineState& state, const MachineConfig& cfg);

/// Throws ValidationError("ShortRandomStream") if the stream is shorter than
/// cfg.rand_budget.
RunResult run(const Program& p, const MachineConfig& cfg, const Bits& rand_stream);

/// Number of programs with |P| <= max_len.
std::uint64_t count_programs(unsigned max_len);

/// All programs with |P| <= max_len, shortest first, then lexicographic.
std::vector<Program> enumerate(unsigned max_len, unsigned limit = kDefaultEnumerateLimit);

struct OutputDistribution {
  /// n-bit output prefixes with positive probability.
  std::map<Bits, double> probs;
  /// Mass of executions that stop before emitting n bits.
  double bottom = 0.0;
};

/// Exact distribution of the first n output bits, by branching at every RAND.
OutputDistribution output_distribution(const Program& p, unsigned n, const MachineConfig& cfg);

}  // namespace knightian::toyvm
