#pragma once

#include <span>
#include <stdexcept>

namespace coexsim::metrics {

/// Jain's fairness index (Σx)² / (n·Σx²) over non-negative allocations.
/// Ranges over [1/n, 1]; 1 iff all nonzero entries are equal and none is
/// zero. An all-zero allocation is defined as 1 (vacuously fair: nobody is
/// disadvantaged when nothing has been allocated).
inline double jain_fairness_index(std::span<const double> allocations) {
  if (allocations.empty()) throw std::invalid_argument("jfi: need at least one allocation");
  double sum = 0.0, sum_sq = 0.0;
  for (const double x : allocations) {
    sum += x;
    sum_sq += x * x;
  }
  if (sum_sq == 0.0) return 1.0;
  return (sum * sum) / (static_cast<double>(allocations.size()) * sum_sq);
}

}  // namespace coexsim::metrics
