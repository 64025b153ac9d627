#include "knightian/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace knightian::kernels {

std::vector<toyvm::RunResult> run_all(const std::vector<toyvm::Program>& programs,
                                      const toyvm::MachineConfig& cfg, Exec policy) {
  std::vector<toyvm::RunResult> out(programs.size());
  const Bits zeros(cfg.rand_budget, 0);
  for_each_index(programs.size(), policy, [&](std::size_t i) { out[i] = toyvm::run(programs[i], cfg, zeros); });
  return out;
}

double log2_sum(const std::vector<double>& log2_terms) {
  return log2_weighted_sum(log2_terms, std::vector<double>(log2_terms.size(), 1.0));
}

double log2_weighted_sum(const std::vector<double>& log2_terms, const std::vector<double>& weights) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double top = kNegInf;
  for (std::size_t i = 0; i < log2_terms.size(); ++i) {
    if (weights[i] > 0.0) top = std::max(top, log2_terms[i]);
  }
  if (top == kNegInf) return kNegInf;
  long double acc = 0.0L;
  for (std::size_t i = 0; i < log2_terms.size(); ++i) {
    if (weights[i] > 0.0 && log2_terms[i] != kNegInf) {
      acc += static_cast<long double>(weights[i]) * std::exp2l(static_cast<long double>(log2_terms[i] - top));
    }
  }
  return top + static_cast<double>(std::log2l(acc));
}

}  // namespace knightian::kernels
