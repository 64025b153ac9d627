#include "knightian/sophistication.hpp"

#include <algorithm>
#include <cmath>

#include "knightian/error.hpp"

namespace knightian::soph {

SetListing::SetListing(std::vector<Bits> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw ValidationError("BadSet", "a listed set must be nonempty");
  const auto w = elements_.front().size();
  for (const auto& e : elements_) {
    if (e.size() != w) throw ValidationError("BadSet", "elements must share one length");
  }
  std::sort(elements_.begin(), elements_.end());
  elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
}

bool SetListing::contains(const Bits& x) const {
  return std::binary_search(elements_.begin(), elements_.end(), x);
}

std::optional<SetListing> parse_listing(const Bits& output, std::size_t width) {
  std::size_t pos = 0;
  std::uint64_t m = 0;
  if (!read_elias_gamma(output, pos, m)) return std::nullopt;
  if (output.size() - pos != m * width) return std::nullopt;
  std::vector<Bits> elems;
  elems.reserve(static_cast<std::size_t>(m));
  for (std::uint64_t i = 0; i < m; ++i) {
    const auto from = output.begin() + static_cast<std::ptrdiff_t>(pos + i * width);
    elems.emplace_back(from, from + static_cast<std::ptrdiff_t>(width));
  }
  return SetListing(std::move(elems));
}

Bits encode_listing(const SetListing& s) {
  Bits out = elias_gamma(s.size());
  for (const auto& e : s.elements()) out.insert(out.end(), e.begin(), e.end());
  return out;
}

Tabulator::Tabulator(unsigned max_len, const toyvm::MachineConfig& cfg, kernels::Exec policy)
    : max_len_(max_len), cfg_(cfg) {
  cfg_.validate();
  auto all = toyvm::enumerate(max_len);
  programs_.reserve(all.size());
  for (auto& p : all) {
    if (!p.uses_rand()) programs_.push_back(std::move(p));
  }
  const auto runs = kernels::run_all(programs_, cfg_, policy);
  outputs_.resize(programs_.size());
  for (std::size_t i = 0; i < programs_.size(); ++i) {
    if (!runs[i].halted) continue;
    halted_.push_back(i);
    outputs_[i] = runs[i].output;
    shortest_output_.emplace(runs[i].output, i);  // keeps the first, i.e. shortest
  }
}

ComplexityResult Tabulator::make(std::size_t i) const {
  return {static_cast<unsigned>(programs_[i].length()), programs_[i], max_len_, cfg_.step_budget};
}

Complexity Tabulator::kolmogorov(const Bits& x) const {
  const auto it = shortest_output_.find(x);
  if (it == shortest_output_.end()) return not_found();
  return make(it->second);
}

const std::map<SetListing, std::size_t>& Tabulator::listed_sets(std::size_t width) const {
  auto [it, inserted] = sets_by_width_.try_emplace(width);
  if (inserted) {
    for (auto i : halted_) {
      if (auto s = parse_listing(outputs_[i], width)) it->second.emplace(std::move(*s), i);
    }
  }
  return it->second;
}

Complexity Tabulator::set_complexity(const SetListing& s) const {
  const auto& sets = listed_sets(s.width());
  const auto it = sets.find(s);
  if (it == sets.end()) return not_found();
  return make(it->second);
}

Sophistication Tabulator::sophistication(const Bits& x, unsigned c) const {
  const auto kx = kolmogorov(x);
  if (!found(kx)) return not_found();
  const double budget = static_cast<double>(result(kx).value) + c;

  std::optional<SophResult> best;
  for (const auto& [set, idx] : listed_sets(x.size())) {
    if (!set.contains(x)) continue;
    const auto ks = static_cast<unsigned>(programs_[idx].length());
    const double lg = std::log2(static_cast<double>(set.size()));
    if (ks + lg > budget + 1e-12) continue;
    if (!best || ks < best->value ||
        (ks == best->value && programs_[idx].code() < best->witness_program.code())) {
      best = SophResult{ks, set, programs_[idx], result(kx).value, lg};
    }
  }
  if (!best) return not_found();
  return *best;
}

Complexity kolmogorov(const Bits& x, unsigned max_len, const toyvm::MachineConfig& cfg) {
  return Tabulator(max_len, cfg).kolmogorov(x);
}

Complexity set_complexity(const SetListing& s, unsigned max_len, const toyvm::MachineConfig& cfg) {
  return Tabulator(max_len, cfg).set_complexity(s);
}

Sophistication sophistication(const Bits& x, unsigned c, unsigned max_len, const toyvm::MachineConfig& cfg) {
  return Tabulator(max_len, cfg).sophistication(x, c);
}

std::vector<TableRow> tabulate(const Tabulator& tab, unsigned n, const std::vector<unsigned>& cs) {
  std::vector<TableRow> rows;
  for (const auto& x : all_bitstrings(n)) {
    TableRow r;
    r.x = x;
    if (auto k = tab.kolmogorov(x); found(k)) r.k = result(k).value;
    for (auto c : cs) {
      auto s = tab.sophistication(x, c);
      r.soph[c] = std::holds_alternative<SophResult>(s) ? std::optional<unsigned>(std::get<SophResult>(s).value)
                                                        : std::nullopt;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace knightian::soph
