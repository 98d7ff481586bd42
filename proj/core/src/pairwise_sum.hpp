#pragma once

#include <cstddef>
#include <span>

namespace dipolegate::detail {

// Pairwise summation; the result depends only on the input order, not on how
// the caller partitioned the work that produced it.
inline double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 64;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace dipolegate::detail
