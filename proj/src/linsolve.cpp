#include "slab/linsolve.hpp"

#include <algorithm>
#include <cmath>

#include "slab/kernels.hpp"

namespace slab {

namespace {
inline bool is_fixed(const std::vector<std::uint8_t>* fixed, std::int64_t i) {
  return fixed && (*fixed)[static_cast<std::size_t>(i)] != 0;
}

void zero_fixed(std::span<double> v, const std::vector<std::uint8_t>* fixed) {
  if (!fixed) return;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(v.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    if ((*fixed)[static_cast<std::size_t>(i)]) v[static_cast<std::size_t>(i)] = 0.0;
}

void remove_mean(std::span<double> v, const std::vector<std::uint8_t>* fixed) {
  double s = 0.0, cnt = 0.0;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (is_fixed(fixed, static_cast<std::int64_t>(i))) continue;
    s += v[i];
    cnt += 1.0;
  }
  if (cnt == 0.0) return;
  const double mean = s / cnt;
  for (std::size_t i = 0; i < n; ++i)
    if (!is_fixed(fixed, static_cast<std::int64_t>(i))) v[i] -= mean;
}
}  // namespace

JacobiPrecond::JacobiPrecond(const LinOp& op, const std::vector<std::uint8_t>* fixed) {
  const std::int64_t n = op.A->rows;
  invDiag_.resize(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const double d = op.diag(i);
    invDiag_[static_cast<std::size_t>(i)] =
        (is_fixed(fixed, i) || std::abs(d) < 1e-300) ? 0.0 : 1.0 / std::abs(d);
  }
}

void JacobiPrecond::apply(std::span<const double> r, std::span<double> z) const {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(r.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    z[static_cast<std::size_t>(i)] =
        invDiag_[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
}

VerticalLinePrecond::VerticalLinePrecond(const SlabGrid& grid, const LinOp& op,
                                         const std::vector<std::uint8_t>* fixed)
    : grid_(&grid) {
  const std::int64_t nl = grid.latCount();
  const int levels = grid.levels();
  d_.assign(static_cast<std::size_t>(nl) * levels, 1.0);
  l_.assign(static_cast<std::size_t>(nl) * levels, 0.0);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t lat = 0; lat < nl; ++lat) {
    // extract the vertical chain (diag + up-couplings), cut at fixed dofs
    std::vector<double> dg(static_cast<std::size_t>(levels));
    std::vector<double> off(static_cast<std::size_t>(levels), 0.0);
    for (int j = 0; j < levels; ++j) {
      const std::int64_t r = grid.dof(lat, j);
      if (is_fixed(fixed, r)) {
        dg[static_cast<std::size_t>(j)] = 1.0;
        continue;
      }
      dg[static_cast<std::size_t>(j)] = std::max(op.diag(r), 1e-300);
      if (j + 1 < levels) {
        const std::int64_t up = grid.dof(lat, j + 1);
        if (!is_fixed(fixed, up)) off[static_cast<std::size_t>(j)] = op.A->entry(r, up);
      }
    }
    // LDL^T with pivot clamping
    for (int j = 0; j < levels; ++j) {
      double piv = dg[static_cast<std::size_t>(j)];
      if (j > 0) {
        const double lj = l_[static_cast<std::size_t>(lat * levels + j)];
        piv -= lj * lj * d_[static_cast<std::size_t>(lat * levels + j - 1)];
      }
      const double floor = 1e-8 * std::abs(dg[static_cast<std::size_t>(j)]) + 1e-300;
      if (piv < floor) piv = floor;
      d_[static_cast<std::size_t>(lat * levels + j)] = piv;
      if (j + 1 < levels)
        l_[static_cast<std::size_t>(lat * levels + j + 1)] = off[static_cast<std::size_t>(j)] / piv;
    }
  }
}

void VerticalLinePrecond::apply(std::span<const double> r, std::span<double> z) const {
  const SlabGrid& g = *grid_;
  const std::int64_t nl = g.latCount();
  const int levels = g.levels();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t lat = 0; lat < nl; ++lat) {
    // forward: L w = r
    double prev = 0.0;
    for (int j = 0; j < levels; ++j) {
      const std::size_t c = static_cast<std::size_t>(lat * levels + j);
      double w = r[static_cast<std::size_t>(g.dof(lat, j))];
      if (j > 0) w -= l_[c] * prev;
      z[static_cast<std::size_t>(g.dof(lat, j))] = w;
      prev = w;
    }
    // diagonal + backward: L^T x = D^{-1} w
    for (int j = levels - 1; j >= 0; --j) {
      const std::size_t idx = static_cast<std::size_t>(g.dof(lat, j));
      double x = z[idx] / d_[static_cast<std::size_t>(lat * levels + j)];
      if (j + 1 < levels)
        x -= l_[static_cast<std::size_t>(lat * levels + j + 1)] *
             z[static_cast<std::size_t>(g.dof(lat, j + 1))];
      z[idx] = x;
    }
  }
}

std::unique_ptr<Preconditioner> make_preconditioner(const SlabGrid& grid, const LinOp& op,
                                                    const std::vector<std::uint8_t>* fixed) {
  return std::make_unique<VerticalLinePrecond>(grid, op, fixed);
}

double scaled_residual(const LinOp& op, std::span<const double> b, std::span<const double> x,
                       const std::vector<std::uint8_t>* fixed) {
  const std::int64_t n = op.A->rows;
  std::vector<double> Ax(static_cast<std::size_t>(n));
  op.apply(x, Ax);
  double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (is_fixed(fixed, i)) continue;
    const double scale = std::max(std::abs(op.diag(i)), 1e-30);
    const double r = std::abs(b[static_cast<std::size_t>(i)] - Ax[static_cast<std::size_t>(i)]) / scale;
    if (r > m) m = r;
  }
  return m;
}

PcgResult pcg(const LinOp& op, std::span<const double> b, std::span<double> x,
              const std::vector<std::uint8_t>* fixed, const Preconditioner& M,
              const PcgOptions& opts) {
  const std::int64_t n = op.A->rows;
  std::vector<double> r(static_cast<std::size_t>(n)), z(static_cast<std::size_t>(n)),
      p(static_cast<std::size_t>(n)), Ap(static_cast<std::size_t>(n));
  std::vector<double> scale(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i)
    scale[static_cast<std::size_t>(i)] = std::max(std::abs(op.diag(i)), 1e-30);

  PcgResult res;
  op.apply(x, Ap);
  for (std::int64_t i = 0; i < n; ++i)
    r[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] - Ap[static_cast<std::size_t>(i)];
  zero_fixed(r, fixed);
  if (opts.zeroMean) remove_mean(r, fixed);

  auto scaled_max = [&]() {
    double m = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      if (is_fixed(fixed, i)) continue;
      const double v = std::abs(r[static_cast<std::size_t>(i)]) / scale[static_cast<std::size_t>(i)];
      if (v > m) m = v;
    }
    return m;
  };

  res.residual = scaled_max();
  if (res.residual <= opts.tol) {
    res.converged = true;
    return res;
  }

  M.apply(r, z);
  zero_fixed(z, fixed);
  if (opts.zeroMean) remove_mean(z, fixed);
  p = z;
  double rz = dot(r, z);

  for (int it = 1; it <= opts.maxIter; ++it) {
    op.apply(p, Ap);
    zero_fixed(Ap, fixed);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) {
      res.indefinite = true;
      res.iterations = it;
      res.residual = scaled_max();
      return res;
    }
    const double alpha = rz / pAp;
    axpy(alpha, p, x);
    axpy(-alpha, Ap, r);
    if (opts.zeroMean) {
      remove_mean(r, fixed);
      remove_mean(x, fixed);
    }
    res.iterations = it;
    res.residual = scaled_max();
    if (res.residual <= opts.tol) {
      res.converged = true;
      return res;
    }
    M.apply(r, z);
    zero_fixed(z, fixed);
    if (opts.zeroMean) remove_mean(z, fixed);
    const double rzNew = dot(r, z);
    const double beta = rzNew / rz;
    rz = rzNew;
    const std::ptrdiff_t nn = n;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < nn; ++i)
      p[static_cast<std::size_t>(i)] =
          z[static_cast<std::size_t>(i)] + beta * p[static_cast<std::size_t>(i)];
  }
  return res;
}

}  // namespace slab
