#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

// Data-parallel vector kernels. Every reduction uses a fixed block
// decomposition (block partials accumulated in index order), so results are
// bit-identical for any OpenMP thread count. The serial_* variants run the
// same block scheme without OpenMP and are kept as the reference for tests
// and the benchmark tool.

namespace slab {

inline constexpr std::size_t kReduceBlock = 4096;

namespace detail {

template <class BlockFn>
inline double blocked_reduce_add(std::size_t n, BlockFn&& block, bool parallel) {
  const std::size_t nb = (n + kReduceBlock - 1) / kReduceBlock;
  if (nb == 0) return 0.0;
  std::vector<double> partial(nb, 0.0);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
      const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
      const std::size_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
      partial[static_cast<std::size_t>(b)] = block(lo, hi);
    }
  } else {
    for (std::size_t b = 0; b < nb; ++b) {
      const std::size_t lo = b * kReduceBlock;
      const std::size_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
      partial[b] = block(lo, hi);
    }
  }
  double acc = 0.0;
  for (std::size_t b = 0; b < nb; ++b) acc += partial[b];
  return acc;
}

}  // namespace detail

inline double dot(std::span<const double> x, std::span<const double> y, bool parallel = true) {
  return detail::blocked_reduce_add(
      x.size(),
      [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i];
        return s;
      },
      parallel);
}

inline double serial_dot(std::span<const double> x, std::span<const double> y) {
  return dot(x, y, false);
}

inline double sum(std::span<const double> x, bool parallel = true) {
  return detail::blocked_reduce_add(
      x.size(),
      [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += x[i];
        return s;
      },
      parallel);
}

inline double serial_sum(std::span<const double> x) { return sum(x, false); }

// Max-magnitude reduction; order independent, plain omp reduction is fine.
inline double max_abs(std::span<const double> x) {
  double m = 0.0;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) reduction(max : m)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double v = std::abs(x[static_cast<std::size_t>(i)]);
    if (v > m) m = v;
  }
  return m;
}

inline double serial_max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    y[static_cast<std::size_t>(i)] += alpha * x[static_cast<std::size_t>(i)];
}

inline void scale(double alpha, std::span<double> x) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] *= alpha;
}

inline double nrm2(std::span<const double> x, bool parallel = true) {
  return std::sqrt(dot(x, x, parallel));
}

}  // namespace slab
