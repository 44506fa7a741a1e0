#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qclab/fuchsian.hpp"

namespace qclab {

/// Midpoint rule in polar coordinates on the disk |z| < rho_cutoff.
/// Cells are ring-major: cell (i,j) covers r in [i,i+1]*dr, theta in
/// [j,j+1]*dtheta, is evaluated at its center and weighted by r*dr*dtheta.
struct QuadratureSpec {
  int n_r = 512;
  int n_theta = 512;
  double rho_cutoff = 1.0 - 1e-4;

  QuadratureSpec half() const {
    return QuadratureSpec{n_r / 2, n_theta / 2, rho_cutoff};
  }
  std::size_t cells() const {
    return static_cast<std::size_t>(n_r) * static_cast<std::size_t>(n_theta);
  }
};

/// Realized cell centers and weights, in fixed deterministic order.
struct DiskGrid {
  QuadratureSpec spec;
  std::vector<double> zr, zi, w;

  static DiskGrid build(const QuadratureSpec& spec);
  std::size_t size() const { return zr.size(); }
};

/// Cells of a DiskGrid restricted to the fundamental domain of a group
/// (membership sampled at cell centers). Straddle cells, where the four
/// cell corners disagree with the center, are tracked on both sides of
/// the boundary so their mass can be charged to the quadrature error.
struct DomainGrid {
  std::vector<std::uint32_t> index;  // positions in the full grid
  std::vector<double> zr, zi, w;
  std::vector<std::uint32_t> straddle_in;   // positions in *this* grid
  std::vector<std::uint32_t> straddle_out;  // positions in the full grid

  static DomainGrid build(const DiskGrid& grid, const FuchsianGroup& g);
  std::size_t size() const { return zr.size(); }
};

/// Compensated (Kahan) summation in index order.
double kahan_sum(const double* x, std::size_t n);
double kahan_sum(const std::vector<double>& x);

/// Kahan sum of x[idx] over the index list, in list order.
double kahan_sum_at(const std::vector<double>& x,
                    const std::vector<std::uint32_t>& idx);

/// Exact integral of |z|^k over the full unit disk: 2*pi/(k+2).
double monomial_l1_exact(int k);

/// Upper bound for the mass of sum_k c_k z^k on the annulus
/// rho_cutoff < |z| < 1 dropped by the grid: sum |c_k| 2 pi (1-rho^(k+2))/(k+2).
double annulus_l1_bound(const std::vector<std::complex<double>>& coeffs,
                        double rho_cutoff);

}  // namespace qclab
