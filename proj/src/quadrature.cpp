#include "qclab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qclab {

DiskGrid DiskGrid::build(const QuadratureSpec& spec) {
  if (spec.n_r < 1 || spec.n_theta < 1) {
    throw std::invalid_argument("DiskGrid: need n_r, n_theta >= 1");
  }
  if (!(spec.rho_cutoff > 0.0) || !(spec.rho_cutoff < 1.0)) {
    throw std::invalid_argument("DiskGrid: rho_cutoff must be in (0,1)");
  }
  DiskGrid g;
  g.spec = spec;
  std::size_t n = spec.cells();
  g.zr.resize(n);
  g.zi.resize(n);
  g.w.resize(n);
  double dr = spec.rho_cutoff / spec.n_r;
  double dt = 2.0 * std::numbers::pi / spec.n_theta;
  std::size_t at = 0;
  for (int i = 0; i < spec.n_r; ++i) {
    double r = (i + 0.5) * dr;
    double wt = r * dr * dt;
    for (int j = 0; j < spec.n_theta; ++j, ++at) {
      double t = (j + 0.5) * dt;
      g.zr[at] = r * std::cos(t);
      g.zi[at] = r * std::sin(t);
      g.w[at] = wt;
    }
  }
  return g;
}

DomainGrid DomainGrid::build(const DiskGrid& grid, const FuchsianGroup& g) {
  DomainGrid dom;
  const QuadratureSpec& spec = grid.spec;
  double dr = spec.rho_cutoff / spec.n_r;
  double dt = 2.0 * std::numbers::pi / spec.n_theta;
  std::size_t at = 0;
  for (int i = 0; i < spec.n_r; ++i) {
    for (int j = 0; j < spec.n_theta; ++j, ++at) {
      complexd z(grid.zr[at], grid.zi[at]);
      bool center_in = g.in_fundamental_domain_disk(z);
      bool straddle = false;
      for (int ci = 0; ci < 4 && !straddle; ++ci) {
        double r = (ci & 1) ? (i + 1) * dr : i * dr;
        double t = (ci & 2) ? (j + 1) * dt : j * dt;
        complexd corner(r * std::cos(t), r * std::sin(t));
        if (g.in_fundamental_domain_disk(corner) != center_in) straddle = true;
      }
      if (center_in) {
        if (straddle) {
          dom.straddle_in.push_back(
              static_cast<std::uint32_t>(dom.index.size()));
        }
        dom.index.push_back(static_cast<std::uint32_t>(at));
        dom.zr.push_back(grid.zr[at]);
        dom.zi.push_back(grid.zi[at]);
        dom.w.push_back(grid.w[at]);
      } else if (straddle) {
        dom.straddle_out.push_back(static_cast<std::uint32_t>(at));
      }
    }
  }
  return dom;
}

double kahan_sum(const double* x, std::size_t n) {
  double s = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double y = x[i] - comp;
    double t = s + y;
    comp = (t - s) - y;
    s = t;
  }
  return s;
}

double kahan_sum(const std::vector<double>& x) {
  return kahan_sum(x.data(), x.size());
}

double kahan_sum_at(const std::vector<double>& x,
                    const std::vector<std::uint32_t>& idx) {
  double s = 0.0, comp = 0.0;
  for (std::uint32_t i : idx) {
    double y = x[i] - comp;
    double t = s + y;
    comp = (t - s) - y;
    s = t;
  }
  return s;
}

double monomial_l1_exact(int k) {
  if (k < 0) throw std::invalid_argument("monomial_l1_exact: k >= 0");
  return 2.0 * std::numbers::pi / (k + 2);
}

double annulus_l1_bound(const std::vector<std::complex<double>>& coeffs,
                        double rho_cutoff) {
  double total = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    double tail = 1.0 - std::pow(rho_cutoff, static_cast<double>(k + 2));
    total += std::abs(coeffs[k]) * 2.0 * std::numbers::pi * tail / (k + 2);
  }
  return total;
}

}  // namespace qclab
