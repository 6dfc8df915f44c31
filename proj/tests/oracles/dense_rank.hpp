#pragma once

// Test-only rank oracle: dense Gaussian elimination over exact rationals.

#include <gmpxx.h>

#include <vector>

#include "autfn/linalg.hpp"

namespace oracle {

inline std::int64_t dense_rank(const autfn::SparseIntMatrix& m) {
  const auto rows = m.rows(), cols = m.cols();
  std::vector<std::vector<mpq_class>> a(rows, std::vector<mpq_class>(cols));
  for (const auto& e : m.triplets()) a[e.row][e.col] = mpq_class(static_cast<long>(e.value));
  std::int64_t rank = 0;
  for (std::int64_t c = 0; c < cols && rank < rows; ++c) {
    std::int64_t piv = -1;
    for (std::int64_t r = rank; r < rows; ++r)
      if (a[r][c] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(a[piv], a[rank]);
    for (std::int64_t r = rank + 1; r < rows; ++r) {
      if (a[r][c] == 0) continue;
      const mpq_class f = a[r][c] / a[rank][c];
      for (std::int64_t k = c; k < cols; ++k) a[r][k] -= f * a[rank][k];
    }
    ++rank;
  }
  return rank;
}

}  // namespace oracle
