#pragma once

// Time-bounded Kolmogorov complexity, set complexity and c-sophistication by
// exhaustive search over deterministic toyvm-1 programs (no RAND opcode).
// Values are only meaningful together with the search bound and budgets they
// were computed under, which every result carries.
//
// Set-listing convention: a program lists S (all elements n bits wide) when
// it halts with output gamma(m) ++ e_1 ++ ... ++ e_m, where gamma is the
// Elias-gamma code of m >= 1 and the e_i are n-bit strings, with nothing
// after e_m. The listed set is {e_1, ..., e_m}; order and repeats are
// irrelevant. The width n comes from the set being asked about.

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "knightian/bits.hpp"
#include "knightian/kernels.hpp"
#include "knightian/toyvm.hpp"

namespace knightian::soph {

struct ComplexityResult {
  unsigned value = 0;
  toyvm::Program witness;
  unsigned search_bound = 0;
  std::uint32_t step_budget = 0;
};

struct NotFound {
  unsigned search_bound = 0;
  std::uint32_t step_budget = 0;
};

using Complexity = std::variant<ComplexityResult, NotFound>;

inline bool found(const Complexity& c) { return std::holds_alternative<ComplexityResult>(c); }
inline const ComplexityResult& result(const Complexity& c) { return std::get<ComplexityResult>(c); }

class SetListing {
 public:
  /// Sorts and deduplicates. Throws ValidationError("BadSet") if empty or the
  /// elements differ in length.
  explicit SetListing(std::vector<Bits> elements);

  const std::vector<Bits>& elements() const { return elements_; }
  std::size_t width() const { return elements_.front().size(); }
  std::size_t size() const { return elements_.size(); }
  bool contains(const Bits& x) const;

  friend auto operator<=>(const SetListing&, const SetListing&) = default;

 private:
  std::vector<Bits> elements_;
};

/// Parses a program output under the listing convention; nullopt if it does
/// not conform.
std::optional<SetListing> parse_listing(const Bits& output, std::size_t width);

/// Output that lists `s` (elements in sorted order).
Bits encode_listing(const SetListing& s);

struct SophResult {
  unsigned value = 0;
  SetListing witness_set;
  toyvm::Program witness_program;
  unsigned k_of_x = 0;
  double log2_size = 0.0;
};

using Sophistication = std::variant<SophResult, NotFound>;

/// Runs every deterministic program with |P| <= L once and answers all three
/// queries from the results.
class Tabulator {
 public:
  Tabulator(unsigned max_len, const toyvm::MachineConfig& cfg, kernels::Exec policy = kernels::Exec::Parallel);

  unsigned max_len() const { return max_len_; }
  const toyvm::MachineConfig& config() const { return cfg_; }

  Complexity kolmogorov(const Bits& x) const;
  Complexity set_complexity(const SetListing& s) const;
  Sophistication sophistication(const Bits& x, unsigned c) const;

  /// Every set of `width`-bit strings listed by some program, with its K(S)
  /// program (the first in enumeration order).
  const std::map<SetListing, std::size_t>& listed_sets(std::size_t width) const;

 private:
  NotFound not_found() const { return {max_len_, cfg_.step_budget}; }
  ComplexityResult make(std::size_t program_index) const;

  unsigned max_len_;
  toyvm::MachineConfig cfg_;
  std::vector<toyvm::Program> programs_;
  std::map<Bits, std::size_t> shortest_output_;
  mutable std::map<std::size_t, std::map<SetListing, std::size_t>> sets_by_width_;
  std::vector<std::size_t> halted_;  // indices of halting deterministic programs
  std::vector<Bits> outputs_;
};

Complexity kolmogorov(const Bits& x, unsigned max_len, const toyvm::MachineConfig& cfg);
Complexity set_complexity(const SetListing& s, unsigned max_len, const toyvm::MachineConfig& cfg);
Sophistication sophistication(const Bits& x, unsigned c, unsigned max_len, const toyvm::MachineConfig& cfg);

struct TableRow {
  Bits x;
  std::optional<unsigned> k;
  std::map<unsigned, std::optional<unsigned>> soph;  // keyed by c
};

/// K and Soph_c for every string of length `n`.
std::vector<TableRow> tabulate(const Tabulator& tab, unsigned n, const std::vector<unsigned>& cs);

}  // namespace knightian::soph
