#pragma once

// Universal-prior sequential prediction over the programs of toyvm-1 up to a
// length bound L. Every number here is relative to (toyvm-1, L, budgets).
//
// Pr_U[h] below is the mixture semimeasure sum_P w_P Pr_{D_P}[h], where
// Pr_{D_P}[h] is the probability that P emits at least |h| bits beginning
// with h. Hypotheses that stop before emitting the next bit abstain: they add
// mass to neither extension, and next-bit predictions are normalized over the
// hypotheses that do commit.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "knightian/bits.hpp"
#include "knightian/kernels.hpp"
#include "knightian/toyvm.hpp"

namespace knightian::prior {

struct Hypothesis {
  const toyvm::Program* program = nullptr;  // owned by the mixture
  double log2_prior = 0.0;       // -|P| - log2 C
  double log2_likelihood = 0.0;  // log2 Pr_{D_P}[history]
  toyvm::MachineState cursor;    // poised on the next output event
  toyvm::Event next{toyvm::EventKind::Halted};
};

class UnsupportedSequence : public ValidationError {
 public:
  explicit UnsupportedSequence(std::size_t step)
      : ValidationError("UnsupportedSequence", "reference program assigns zero probability at step " +
                                                   std::to_string(step)) {}
};

/// Immutable: update() returns a new mixture.
class Mixture {
 public:
  /// All programs with |P| <= L. Throws LimitExceeded past the enumerate guard.
  static Mixture build(unsigned max_len, const toyvm::MachineConfig& cfg,
                       kernels::Exec policy = kernels::Exec::Parallel);

  unsigned max_len() const { return max_len_; }
  const toyvm::MachineConfig& config() const { return cfg_; }
  const std::vector<Hypothesis>& hypotheses() const { return hyps_; }
  const Bits& history() const { return history_; }

  /// C = sum_P 2^-|P| over the hypotheses.
  double normalizer() const;
  double log2_normalizer() const { return log2_c_; }

  double prior_weight(std::size_t i) const;
  /// Normalized posterior; all zero if the history has zero mass.
  std::vector<double> posterior_weights() const;

  /// log2 Pr_U[history] (semimeasure).
  double log2_mass() const { return log2_mass_; }
  /// log2 of the product of the normalized next-bit predictions along the
  /// history; >= log2_mass().
  double log2_sequential() const { return log2_sequential_; }

  /// (Pr_U[h0], Pr_U[h1]) / Pr_U[h]. Both zero if nothing commits to a next
  /// bit or the history has zero mass.
  std::pair<double, double> next_masses() const;

  Mixture update(std::uint8_t bit, kernels::Exec policy = kernels::Exec::Parallel) const;

 private:
  unsigned max_len_ = 0;
  toyvm::MachineConfig cfg_;
  std::shared_ptr<const std::vector<toyvm::Program>> programs_;
  std::vector<Hypothesis> hyps_;
  Bits history_;
  double log2_c_ = 0.0;
  double log2_mass_ = 0.0;
  double log2_sequential_ = 0.0;
};

/// Pr[next bit = 1] = Pr_U[h1] / (Pr_U[h0] + Pr_U[h1]). Throws ZeroMassHistory.
double predict_next(const Mixture& m);

inline Mixture update(const Mixture& m, std::uint8_t bit) { return m.update(bit); }

/// log2 Pr_{D_P}[seq] by following the single execution consistent with seq
/// (random bits are read off seq itself). -inf if P cannot produce seq.
double log2_program_probability(const toyvm::Program& p, const Bits& seq, const toyvm::MachineConfig& cfg);

struct RegretStep {
  std::size_t step = 0;
  std::uint8_t bit = 0;
  double p_u = 0.0;
  double p_q = 0.0;
  double ratio = 0.0;
  double cum_ratio = 0.0;
};

struct MistakeTally {
  double epsilon = 0.0;
  /// Steps with p_u < (1 - epsilon) p_q.
  std::size_t count = 0;
  /// sum of log2 ratio over the non-mistake steps.
  double offset_log2 = 0.0;
  /// (-log2 w_Q + offset) / log2(1/(1-epsilon)); the product bound forces
  /// count <= bound.
  double bound = 0.0;
};

struct RegretReport {
  toyvm::Program q;
  double log2_prior_q = 0.0;
  std::vector<RegretStep> steps;
  double ratio_product = 1.0;
  double log2_ratio_product = 0.0;
  std::vector<MistakeTally> mistakes;
};

/// Throws ValidationError("NotAHypothesis") if Q is not in the mixture and
/// UnsupportedSequence if Pr_{D_Q}[sequence] = 0. `m` should have an empty
/// history; the sequence is fed from there.
RegretReport regret_report(const toyvm::Program& q, const Bits& sequence, const Mixture& m,
                           const std::vector<double>& eps_list);

struct DiagonalResult {
  Bits bits;
  /// Normalized probability the mixture gave each realized bit.
  std::vector<double> realized_probability;
  double log2_cumulative = 0.0;
};

/// b_n = 0 if Pr_U[h1] > Pr_U[h0], else 1. Throws ZeroMassHistory with the
/// failing step if the walk leaves the support.
DiagonalResult diagonal_sequence(const Mixture& m, unsigned n);

/// Exact sum of 2^-|P| over programs with |P| <= L that halt within budgets,
/// as numerator / 2^exponent.
struct Dyadic {
  std::uint64_t numerator = 0;
  unsigned exponent = 0;

  double value() const;
  /// Lowest terms, e.g. "1/2", "0", "13/32".
  std::string to_string() const;
};

Dyadic omega_truncated(unsigned max_len, const toyvm::MachineConfig& cfg,
                       kernels::Exec policy = kernels::Exec::Parallel);

}  // namespace knightian::prior
