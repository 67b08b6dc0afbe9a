#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "slab/csr.hpp"
#include "slab/grid.hpp"

namespace slab {

// Sparse operator A + diag(extraDiag). The extra diagonal carries trace
// reaction terms (Newton) and spectral shifts (inverse iteration) without
// copying the matrix.
struct LinOp {
  const CsrMatrix* A = nullptr;
  std::span<const double> extraDiag;  // empty or dofCount-sized

  void apply(std::span<const double> x, std::span<double> y) const {
    A->matvec(x, y);
    if (!extraDiag.empty()) {
      const std::ptrdiff_t n = A->rows;
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t i = 0; i < n; ++i)
        y[static_cast<std::size_t>(i)] +=
            extraDiag[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    }
  }

  double diag(std::int64_t r) const {
    double d = A->diag_entry(r);
    if (!extraDiag.empty()) d += extraDiag[static_cast<std::size_t>(r)];
    return d;
  }
};

class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(std::span<const double> r, std::span<double> z) const = 0;
};

class JacobiPrecond : public Preconditioner {
 public:
  JacobiPrecond(const LinOp& op, const std::vector<std::uint8_t>* fixed);
  void apply(std::span<const double> r, std::span<double> z) const override;

 private:
  std::vector<double> invDiag_;
};

// Exact tridiagonal solve along each vertical line (the stiff direction on
// graded meshes); lateral couplings stay on the diagonal. SPD is enforced by
// pivot clamping so indefinite Newton trace terms cannot break CG.
class VerticalLinePrecond : public Preconditioner {
 public:
  VerticalLinePrecond(const SlabGrid& grid, const LinOp& op,
                      const std::vector<std::uint8_t>* fixed);
  void apply(std::span<const double> r, std::span<double> z) const override;

 private:
  const SlabGrid* grid_;
  std::vector<double> d_;    // factored pivots, chain-major
  std::vector<double> l_;    // subdiagonal multipliers
};

std::unique_ptr<Preconditioner> make_preconditioner(const SlabGrid& grid, const LinOp& op,
                                                    const std::vector<std::uint8_t>* fixed);

struct PcgOptions {
  double tol = 1e-10;        // on the diagonally scaled max-norm residual
  int maxIter = 20000;
  bool zeroMean = false;     // project out constants (pure Neumann problems)
};

struct PcgResult {
  int iterations = 0;
  double residual = 0.0;     // scaled max-norm at exit
  bool converged = false;
  bool indefinite = false;   // negative curvature encountered
};

// Solves op x = b with dofs in `fixed` frozen at their incoming x values.
PcgResult pcg(const LinOp& op, std::span<const double> b, std::span<double> x,
              const std::vector<std::uint8_t>* fixed, const Preconditioner& M,
              const PcgOptions& opts);

// Scaled residual max_i |b - op x|_i / max(diag_i, eps) over free dofs.
double scaled_residual(const LinOp& op, std::span<const double> b, std::span<const double> x,
                       const std::vector<std::uint8_t>* fixed);

}  // namespace slab
