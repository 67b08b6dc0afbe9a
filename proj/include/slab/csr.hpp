#pragma once

#include <cstdint>
#include <span>
#include <vector>

// Compressed sparse row matrix with sorted column indices per row.
// matvec parallelizes over rows; each row is summed serially in column
// order, so the parallel product is bit-identical to the serial one.

namespace slab {

struct CsrMatrix {
  std::int64_t rows = 0;
  std::vector<std::int64_t> rowPtr;  // rows+1
  std::vector<std::int32_t> col;
  std::vector<double> val;

  void matvec(std::span<const double> x, std::span<double> y, bool parallel = true) const {
    const std::ptrdiff_t n = rows;
    if (parallel) {
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t r = 0; r < n; ++r) y[static_cast<std::size_t>(r)] = row_dot(r, x);
    } else {
      for (std::ptrdiff_t r = 0; r < n; ++r) y[static_cast<std::size_t>(r)] = row_dot(r, x);
    }
  }

  double row_dot(std::int64_t r, std::span<const double> x) const {
    double s = 0.0;
    for (std::int64_t k = rowPtr[static_cast<std::size_t>(r)];
         k < rowPtr[static_cast<std::size_t>(r) + 1]; ++k)
      s += val[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(col[static_cast<std::size_t>(k)])];
    return s;
  }

  double diag_entry(std::int64_t r) const {
    for (std::int64_t k = rowPtr[static_cast<std::size_t>(r)];
         k < rowPtr[static_cast<std::size_t>(r) + 1]; ++k)
      if (col[static_cast<std::size_t>(k)] == r) return val[static_cast<std::size_t>(k)];
    return 0.0;
  }

  double entry(std::int64_t r, std::int64_t c) const {
    for (std::int64_t k = rowPtr[static_cast<std::size_t>(r)];
         k < rowPtr[static_cast<std::size_t>(r) + 1]; ++k)
      if (col[static_cast<std::size_t>(k)] == c) return val[static_cast<std::size_t>(k)];
    return 0.0;
  }

  double row_sum(std::int64_t r) const {
    double s = 0.0;
    for (std::int64_t k = rowPtr[static_cast<std::size_t>(r)];
         k < rowPtr[static_cast<std::size_t>(r) + 1]; ++k)
      s += val[static_cast<std::size_t>(k)];
    return s;
  }

  // Max |A - A^T| over all entries; exact zero for energy Hessians.
  double max_asymmetry() const {
    double m = 0.0;
    for (std::int64_t r = 0; r < rows; ++r)
      for (std::int64_t k = rowPtr[static_cast<std::size_t>(r)];
           k < rowPtr[static_cast<std::size_t>(r) + 1]; ++k) {
        const std::int64_t c = col[static_cast<std::size_t>(k)];
        const double d = std::abs(val[static_cast<std::size_t>(k)] - entry(c, r));
        if (d > m) m = d;
      }
    return m;
  }
};

}  // namespace slab
