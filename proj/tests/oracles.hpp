#pragma once

// Independent reference computations used to freeze golden values. None of
// these call into the code under test except for plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "knightian/bits.hpp"

namespace oracle {

using knightian::Bits;

/// Body length encoded by a complete program, or nullopt if `code` is not
/// exactly gamma(l + 1) ++ body.
inline std::optional<std::size_t> parse_program(const Bits& code) {
  std::size_t zeros = 0;
  while (zeros < code.size() && code[zeros] == 0) ++zeros;
  if (zeros == code.size()) return std::nullopt;
  const std::size_t header = 2 * zeros + 1;
  if (header > code.size()) return std::nullopt;
  std::uint64_t v = 0;
  for (std::size_t i = zeros; i < header; ++i) v = v * 2 + code[i];
  const std::size_t body = static_cast<std::size_t>(v - 1);
  if (header + body != code.size()) return std::nullopt;
  return body;
}

struct Outcome {
  Bits output;
  bool halted = false;
};

/// Straight transcription of the toyvm-1 opcode table.
inline Outcome run_body(const Bits& body, std::uint32_t step_budget, std::uint32_t rand_budget,
                        std::uint32_t output_budget, const Bits& stream) {
  std::vector<int> ops;
  for (std::size_t i = 0; i + 3 <= body.size(); i += 3) ops.push_back(body[i] * 4 + body[i + 1] * 2 + body[i + 2]);
  Outcome o;
  long pc = 0;
  int counter = 0;
  std::uint32_t steps = 0, rands = 0;
  while (true) {
    if (pc >= static_cast<long>(ops.size())) {
      o.halted = true;
      return o;
    }
    if (steps == step_budget) return o;
    const int op = ops[static_cast<std::size_t>(pc)];
    if ((op == 0 || op == 1 || op == 2) && o.output.size() == output_budget) return o;
    if (op == 2 && rands == rand_budget) return o;
    ++steps;
    switch (op) {
      case 0: o.output.push_back(0); ++pc; break;
      case 1: o.output.push_back(1); ++pc; break;
      case 2: o.output.push_back(stream[rands++]); ++pc; break;
      case 3: o.halted = true; return o;
      case 4: counter = (counter + 1) % 8; ++pc; break;
      case 5: counter = (counter + 7) % 8; ++pc; break;
      case 6: pc = std::max(0L, pc - 2); break;
      case 7: pc = counter != 0 ? std::max(0L, pc - 2) : pc + 1; break;
    }
  }
}

/// Distribution of the first n output bits by trying all 2^rand_budget
/// random streams; ⊥ collects runs that emit fewer than n bits.
struct BruteDistribution {
  std::map<Bits, double> probs;
  double bottom = 0.0;
};

inline BruteDistribution brute_distribution(const Bits& body, unsigned n, std::uint32_t step_budget,
                                            std::uint32_t rand_budget, std::uint32_t output_budget) {
  BruteDistribution d;
  const double w = std::ldexp(1.0, -static_cast<int>(rand_budget));
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << rand_budget); ++s) {
    const Bits stream = knightian::to_bits(s, rand_budget);
    const Outcome o = run_body(body, step_budget, rand_budget, output_budget, stream);
    if (o.output.size() >= n) {
      d.probs[Bits(o.output.begin(), o.output.begin() + n)] += w;
    } else {
      d.bottom += w;
    }
  }
  return d;
}

/// CHSH win probability from the Bell-pair correlator P(a = b) = cos^2(dA - dB).
inline double chsh_closed_form(double a0, double a1, double b0, double b1) {
  const double a[2] = {a0, a1}, b[2] = {b0, b1};
  double total = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const double same = std::pow(std::cos(a[x] - b[y]), 2);
      total += (x & y) ? 1.0 - same : same;
    }
  }
  return total / 4.0;
}

/// Random point of the probability simplex (flat Dirichlet).
inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t k) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& x : w) total += (x = e(rng));
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace oracle
