#pragma once

#include <string>
#include <vector>

#include "slab/grid.hpp"

// Fourier symbol sigma_a(rho) of the Dirichlet-to-Neumann operator on the
// slab: solve (y^a theta')' = rho^2 y^a theta on (0,1), theta(0)=1,
// theta'(1)=0, and return the weighted boundary flux -y^a theta' at y=0.
// The discrete flux is extracted variationally (reaction at the constrained
// node), which keeps the exact small-rho balance sigma/rho^2 -> sum W_j.

namespace slab {

// Vertical-only discretization data: levels plus exact cell integrals.
struct VerticalMesh {
  std::vector<double> y;      // M+1 levels
  std::vector<double> kappa;  // M face conductances
  std::vector<double> mass;   // M+1 lumped y^a masses (trapezoid of W)

  static VerticalMesh graded(int M, double gamma, double a);
  static VerticalMesh from_grid(const SlabGrid& grid);
};

double symbol_at(const VerticalMesh& mesh, double rho);
double symbol_at(double a, double rho, int M, double gamma_mesh);

struct SymbolTable {
  double a = 0.0;
  std::vector<double> rho;
  std::vector<double> sigma;
  double asymptoticConstant = 0.0;  // c in sigma ~ c rho^{1-a}, slope pinned to 1-a
  double freeSlope = 0.0;           // unconstrained log-log slope over the fit window
  double fitResidual = 0.0;         // sup |sigma rho^{a-1}/c - 1| over the window
  int fitWindowBegin = 0;           // first sample index inside the top decade
};

// Log-spaced rho samples (a leading rho=0 sample when rhoMin==0); the
// asymptotic fit uses the top decade of the range.
SymbolTable build_symbol_table(double a, double rhoMin, double rhoMax, int count, int M);
SymbolTable build_symbol_table(double a, double rhoMin, double rhoMax, int count,
                               const VerticalMesh& mesh);

// csv columns: rho, sigma, local_slope
void write_symbol_csv(const SymbolTable& table, const std::string& path);

struct SpectralResult {
  std::vector<double> values;
  double imagResidue = 0.0;  // max |imag| left after the inverse transform
};

// Applies the operator spectrally on a periodic lateral grid: DFT, multiply
// mode k by sigma(|xi_k|), inverse DFT. Symbols are computed on the grid's
// own vertical mesh so physical and spectral paths share the discretization.
SpectralResult apply_spectral(const SlabGrid& grid, std::span<const double> u);

}  // namespace slab
