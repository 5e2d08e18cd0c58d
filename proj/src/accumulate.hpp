#pragma once

#include <algorithm>
#include <cstddef>

namespace mcse::detail {

// Sums are taken in blocks of 512 terms with four double partial sums each;
// block totals are carried in long double. Error stays near one rounding per
// block even at n = 1e8, and the inner loop still vectorizes.
inline constexpr std::size_t kAccumulateBlock = 512;

inline long double blocked_sum(const double* x, std::size_t n) {
  long double total = 0.0L;
  std::size_t i = 0;
  while (i < n) {
    const std::size_t end = std::min(n, i + kAccumulateBlock);
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    for (; i + 4 <= end; i += 4) {
      acc0 += x[i];
      acc1 += x[i + 1];
      acc2 += x[i + 2];
      acc3 += x[i + 3];
    }
    for (; i < end; ++i) acc0 += x[i];
    total += static_cast<long double>((acc0 + acc1) + (acc2 + acc3));
  }
  return total;
}

inline long double blocked_dot(const double* a, const double* b, std::size_t n) {
  long double total = 0.0L;
  std::size_t i = 0;
  while (i < n) {
    const std::size_t end = std::min(n, i + kAccumulateBlock);
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    for (; i + 4 <= end; i += 4) {
      acc0 += a[i] * b[i];
      acc1 += a[i + 1] * b[i + 1];
      acc2 += a[i + 2] * b[i + 2];
      acc3 += a[i + 3] * b[i + 3];
    }
    for (; i < end; ++i) acc0 += a[i] * b[i];
    total += static_cast<long double>((acc0 + acc1) + (acc2 + acc3));
  }
  return total;
}

}  // namespace mcse::detail
