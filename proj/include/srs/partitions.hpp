#pragma once

// Integer partitions of m, expressed as multiplicity sets {n_j} with
// sum_j j * n_j = m. They index the products of lower perturbative orders
// that feed order m + 1.

#include <cstddef>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "srs/error.hpp"

namespace srs {

struct PartitionTerm {
  /// (order j, multiplicity n_j), ascending in j, only n_j > 0.
  std::vector<std::pair<int, int>> factors;
  /// prod_j 1 / n_j!
  double weight = 1.0;
};

namespace detail {

inline void enumerate_partitions(int remaining, int max_part, std::vector<int>& multiplicity,
                                 std::vector<PartitionTerm>& out) {
  if (remaining == 0) {
    PartitionTerm term;
    for (int j = 1; j < static_cast<int>(multiplicity.size()); ++j) {
      const int n = multiplicity[static_cast<std::size_t>(j)];
      if (n == 0) continue;
      term.factors.emplace_back(j, n);
      double factorial = 1.0;
      for (int i = 2; i <= n; ++i) factorial *= i;
      term.weight /= factorial;
    }
    out.push_back(std::move(term));
    return;
  }
  for (int part = std::min(remaining, max_part); part >= 1; --part) {
    ++multiplicity[static_cast<std::size_t>(part)];
    enumerate_partitions(remaining - part, part, multiplicity, out);
    --multiplicity[static_cast<std::size_t>(part)];
  }
}

}  // namespace detail

/// All partitions of m (m >= 0; m = 0 gives the single empty product).
/// Results are cached; safe to call concurrently.
inline const std::vector<PartitionTerm>& partition_terms(int m) {
  if (m < 0) throw DomainError("partition_terms: negative argument");
  static std::mutex mutex;
  static std::map<int, std::vector<PartitionTerm>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(m);
  if (it == cache.end()) {
    std::vector<PartitionTerm> terms;
    std::vector<int> multiplicity(static_cast<std::size_t>(m) + 1, 0);
    detail::enumerate_partitions(m, m, multiplicity, terms);
    it = cache.emplace(m, std::move(terms)).first;
  }
  return it->second;
}

}  // namespace srs
