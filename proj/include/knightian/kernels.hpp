#pragma once

// Data-parallel loops shared by the enumeration-heavy modules. Every kernel
// takes an Exec policy; Exec::Serial is the reference path the tests compare
// the OpenMP path against, and results never depend on the policy.

#include <cstddef>
#include <cstdint>
#include <exception>
#include <vector>

#include "knightian/toyvm.hpp"

namespace knightian::kernels {

enum class Exec { Serial, Parallel };

/// Calls f(i) for i in [0, n). Under Exec::Parallel iterations run on the
/// OpenMP team in arbitrary order, so f must only write to slot i. If any
/// iteration throws, the exception of the lowest such index is rethrown
/// after the loop, as the serial path would.
template <typename F>
void for_each_index(std::size_t n, Exec policy, F&& f) {
  const auto count = static_cast<std::ptrdiff_t>(n);
  if (policy == Exec::Parallel) {
    std::exception_ptr first;
    std::ptrdiff_t first_index = count;
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      try {
        f(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical(knightian_for_each_index)
        if (i < first_index) {
          first_index = i;
          first = std::current_exception();
        }
      }
    }
    if (first) std::rethrow_exception(first);
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) f(static_cast<std::size_t>(i));
  }
}

/// Runs every program with an all-zero random stream of length
/// cfg.rand_budget.
std::vector<toyvm::RunResult> run_all(const std::vector<toyvm::Program>& programs,
                                      const toyvm::MachineConfig& cfg, Exec policy);

/// log2(sum_i 2^x_i), summed in index order so the result is independent of
/// how the terms were produced. Returns -inf for an empty or all -inf input.
double log2_sum(const std::vector<double>& log2_terms);

/// log2(sum_i 2^(a_i) * c_i) for nonnegative weights c_i.
double log2_weighted_sum(const std::vector<double>& log2_terms, const std::vector<double>& weights);

}  // namespace knightian::kernels
