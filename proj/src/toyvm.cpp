#include "knightian/toyvm.hpp"

#include <algorithm>

namespace knightian::toyvm {

const char* op_name(Op op) {
  switch (op) {
    case Op::Emit0: return "EMIT0";
    case Op::Emit1: return "EMIT1";
    case Op::Rand: return "RAND";
    case Op::Halt: return "HALT";
    case Op::Inc: return "INC";
    case Op::Dec: return "DEC";
    case Op::Jmp: return "JMP";
    case Op::Jnz: return "JNZ";
  }
  return "?";
}

Program::Program(Bits code, std::size_t body_offset) : code_(std::move(code)), body_offset_(body_offset) {
  const std::size_t n = (code_.size() - body_offset_) / kOpcodeBits;
  ops_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t at = body_offset_ + i * kOpcodeBits;
    const unsigned v = (code_[at] << 2) | (code_[at + 1] << 1) | code_[at + 2];
    ops_.push_back(static_cast<Op>(v));
  }
}

Program Program::decode(const Bits& code) {
  std::size_t pos = 0;
  std::uint64_t v = 0;
  if (!read_elias_gamma(code, pos, v)) {
    throw BadHeader("no complete Elias-gamma length header in " + std::to_string(code.size()) + " bits");
  }
  const std::size_t expected = pos + static_cast<std::size_t>(v - 1);
  if (code.size() != expected) throw LengthMismatch(expected, code.size());
  return Program(code, pos);
}

Program Program::from_body(const Bits& body) {
  Bits code = elias_gamma(body.size() + 1);
  const std::size_t offset = code.size();
  code.insert(code.end(), body.begin(), body.end());
  return Program(std::move(code), offset);
}

Program Program::assemble(const std::vector<Op>& ops) {
  Bits body;
  for (Op op : ops) {
    const auto v = static_cast<unsigned>(op);
    body.push_back((v >> 2) & 1u);
    body.push_back((v >> 1) & 1u);
    body.push_back(v & 1u);
  }
  return from_body(body);
}

bool Program::uses_rand() const {
  return std::find(ops_.begin(), ops_.end(), Op::Rand) != ops_.end();
}

std::string Program::disassemble() const {
  std::string s;
  for (Op op : ops_) {
    if (!s.empty()) s += ' ';
    s += op_name(op);
  }
  return s;
}

void MachineConfig::validate() const {
  if (step_budget < 1) throw ValidationError("BadConfig", "step_budget must be >= 1");
  if (output_budget < 1) throw ValidationError("BadConfig", "output_budget must be >= 1");
}

Event advance(const Program& p, MachineState& s, const MachineConfig& cfg) {
  const auto& ops = p.ops();
  while (true) {
    if (s.status == Status::Halted) return {EventKind::Halted};
    if (s.status == Status::Exhausted) return {EventKind::Exhausted};
    if (s.pc >= ops.size()) {
      s.status = Status::Halted;
      continue;
    }
    if (s.steps >= cfg.step_budget) {
      s.status = Status::Exhausted;
      continue;
    }
    const Op op = ops[s.pc];
    switch (op) {
      case Op::Emit0:
      case Op::Emit1:
        if (s.emitted >= cfg.output_budget) {
          s.status = Status::Exhausted;
          continue;
        }
        ++s.steps;
        ++s.pc;
        ++s.emitted;
        return {EventKind::Emit, static_cast<std::uint8_t>(op == Op::Emit1)};
      case Op::Rand:
        if (s.rands >= cfg.rand_budget || s.emitted >= cfg.output_budget) {
          s.status = Status::Exhausted;
          continue;
        }
        ++s.steps;
        ++s.pc;
        ++s.rands;
        ++s.emitted;
        return {EventKind::Random};
      case Op::Halt:
        ++s.steps;
        s.status = Status::Halted;
        continue;
      case Op::Inc:
        ++s.steps;
        s.counter = static_cast<std::uint8_t>((s.counter + 1) % kCounterModulus);
        ++s.pc;
        break;
      case Op::Dec:
        ++s.steps;
        s.counter = static_cast<std::uint8_t>((s.counter + kCounterModulus - 1) % kCounterModulus);
        ++s.pc;
        break;
      case Op::Jmp:
        ++s.steps;
        s.pc = s.pc >= kJumpBack ? s.pc - kJumpBack : 0;
        break;
      case Op::Jnz:
        ++s.steps;
        if (s.counter != 0) {
          s.pc = s.pc >= kJumpBack ? s.pc - kJumpBack : 0;
        } else {
          ++s.pc;
        }
        break;
    }
  }
}

RunResult run(const Program& p, const MachineConfig& cfg, const Bits& rand_stream) {
  cfg.validate();
  if (rand_stream.size() < cfg.rand_budget) {
    throw ValidationError("ShortRandomStream", "need " + std::to_string(cfg.rand_budget) + " bits, got " +
                                                   std::to_string(rand_stream.size()));
  }
  RunResult r;
  MachineState s;
  while (true) {
    const Event e = advance(p, s, cfg);
    if (e.kind == EventKind::Emit) {
      r.output.push_back(e.bit);
    } else if (e.kind == EventKind::Random) {
      r.output.push_back(rand_stream[s.rands - 1]);
    } else {
      r.halted = e.kind == EventKind::Halted;
      break;
    }
  }
  r.steps_used = s.steps;
  r.rands_used = s.rands;
  return r;
}

namespace {

std::size_t header_length(std::uint64_t body_len) {
  return elias_gamma(body_len + 1).size();
}

}  // namespace

std::uint64_t count_programs(unsigned max_len) {
  std::uint64_t total = 0;
  for (std::uint64_t l = 0;; ++l) {
    if (header_length(l) + l > max_len) break;
    total += std::uint64_t{1} << l;
  }
  return total;
}

std::vector<Program> enumerate(unsigned max_len, unsigned limit) {
  if (max_len > limit) throw LimitExceeded("enumerate max_len", limit, max_len);
  std::vector<Program> out;
  out.reserve(static_cast<std::size_t>(count_programs(max_len)));
  for (std::uint64_t l = 0;; ++l) {
    if (header_length(l) + l > max_len) break;
    for (std::uint64_t body = 0; body < (std::uint64_t{1} << l); ++body) {
      out.push_back(Program::from_body(to_bits(body, static_cast<unsigned>(l))));
    }
  }
  return out;
}

namespace {

void branch(const Program& p, const MachineConfig& cfg, unsigned n, MachineState s, Bits& prefix, double mass,
            OutputDistribution& out) {
  while (prefix.size() < n) {
    const Event e = advance(p, s, cfg);
    if (e.kind == EventKind::Emit) {
      prefix.push_back(e.bit);
    } else if (e.kind == EventKind::Random) {
      const std::size_t keep = prefix.size();
      prefix.push_back(0);
      branch(p, cfg, n, s, prefix, mass / 2.0, out);
      prefix.resize(keep);
      prefix.push_back(1);
      branch(p, cfg, n, s, prefix, mass / 2.0, out);
      prefix.resize(keep);
      return;
    } else {
      out.bottom += mass;
      return;
    }
  }
  out.probs[prefix] += mass;
}

}  // namespace

OutputDistribution output_distribution(const Program& p, unsigned n, const MachineConfig& cfg) {
  cfg.validate();
  if (n > cfg.output_budget) throw LimitExceeded("output_distribution n", cfg.output_budget, n);
  OutputDistribution out;
  Bits prefix;
  branch(p, cfg, n, MachineState{}, prefix, 1.0, out);
  return out;
}

}  // namespace knightian::toyvm
