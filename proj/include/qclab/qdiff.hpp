#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qclab/fuchsian.hpp"
#include "qclab/kernels.hpp"
#include "qclab/quadrature.hpp"

namespace qclab {

/// Polynomial quadratic differential phi = (sum_k c_k z^k) dz^2 on the unit
/// disk, identified with its coefficient vector.
class QuadraticDifferential {
 public:
  QuadraticDifferential() : c_(1, complexd(0.0, 0.0)) {}
  explicit QuadraticDifferential(std::vector<complexd> coeffs);

  static QuadraticDifferential monomial(int k, complexd c = complexd(1.0, 0.0));
  /// Shorthand: "1", "z", "z2" ... "z9".
  static QuadraticDifferential parse(const std::string& text);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const;
  const std::vector<complexd>& coeffs() const { return c_; }
  complexd coeff(int k) const;
  complexd eval(complexd z) const;  // Horner

  QuadraticDifferential scaled(complexd factor) const;

 private:
  std::vector<complexd> c_;  // trailing zeros trimmed, never empty
};

/// phi(m(z)) * m'(z)^2, the pullback of phi under a disk Moebius map.
complexd pullback_eval(const DiskCoeffs& map, const QuadraticDifferential& phi,
                       complexd z);

/// Pointwise truncated theta series: sum over reduced words of length
/// <= max_len of the pullback of phi, compensated summation in word order.
complexd theta_truncated_eval(const FuchsianGroup& g,
                              const QuadraticDifferential& phi, int max_len,
                              complexd z, std::size_t budget = 1000000);

/// L^1 mass of phi over the unit disk: midpoint-polar core plus a closed-form
/// bound for the annulus beyond the grid cutoff. refine_delta is the change
/// in the core when the grid is halved in both directions.
struct L1Norm {
  double core = 0.0;
  double refine_delta = 0.0;
  double annulus_bound = 0.0;
  double value() const { return core + annulus_bound; }
};

L1Norm l1_norm_disk(const QuadraticDifferential& phi, const QuadratureSpec& grid,
                    kernels::Kind kernel = kernels::Kind::Auto,
                    int threads = 1);

struct ThetaOptions {
  QuadratureSpec grid{};
  int explicit_shells = -1;  // >= 0: run exactly this many shells, no rule
  int max_shells = 16;
  std::size_t word_budget = 60000;
  double shell_rel_threshold = 1e-3;  // stop once shell mass < this * ||phi||
  kernels::Kind kernel = kernels::Kind::Auto;
  int threads = 1;
};

/// Per-shell record: after adding all words of length n, for each phi.
/// Domain integrals run over the interior domain cells only (center and all
/// corners inside); cells that straddle a domain wall are charged to
/// straddle_mass so neighboring word tiles cannot double-count them.
struct ShellReport {
  int n = 0;
  std::size_t words = 0;
  std::vector<double> mass;      // integral over F of |w* phi|, length n words
  std::vector<double> unfolded;  // cumulative mass of shells 0..n
  std::vector<double> quotient;  // ||Theta_{<=n} phi|| over interior cells
};

/// Shell-by-shell accumulation of the theta series of several phi at once
/// over the fundamental-domain cells of the group.
struct ThetaAccumulation {
  int shells_done = 0;
  std::size_t words_used = 0;
  std::string stop_reason;  // "rule" | "max-shells" | "word-budget" | "explicit"
  std::vector<ShellReport> shells;
  std::vector<L1Norm> l1;              // per phi
  std::vector<double> straddle_mass;   // per phi, see below
  std::size_t domain_cells = 0;
  std::size_t straddle_in_cells = 0;
  std::size_t straddle_out_cells = 0;
  std::string kernel_name;

  double quotient(int phi_index) const {
    return shells.back().quotient[phi_index];
  }
  double unfolded(int phi_index) const {
    return shells.back().unfolded[phi_index];
  }
};

/// Runs the accumulation. Straddle mass per phi is the integral of
/// |Theta phi| over domain cells whose corners disagree with their center
/// plus the integral of |phi| over excluded cells with the same defect —
/// the quadrature's exposure to the domain boundary. Those cells are left
/// out of the mass/unfolded/quotient sums and surface only in this error
/// channel. Throws budget_error if explicit_shells can't be reached within
/// word_budget.
ThetaAccumulation accumulate_theta(const FuchsianGroup& g,
                                   const std::vector<QuadraticDifferential>& phis,
                                   const ThetaOptions& opt);

struct ThetaRatioResult {
  double ratio = 0.0;
  double quotient = 0.0;
  double l1_core = 0.0;   // grid core, the ratio's denominator
  double l1_value = 0.0;  // core + annulus bound, the reported norm
  double ratio_half = 0.0;  // same computation on the half-resolution grid
  double err_truncation = 0.0;
  double err_quadrature = 0.0;
  double err_total = 0.0;
  double straddle_mass = 0.0;
  double annulus_bound = 0.0;
  int shells_used = 0;
  std::size_t words_used = 0;
  std::string stop_reason;
  std::string kernel_name;
  std::vector<ShellReport> shells;
};

/// ||Theta_N phi|| over the fundamental domain divided by ||phi|| over the
/// disk, both as grid cores over the same cell structure (so the trivial
/// group gives exactly 1); the annulus tails are charged to the error bar
/// on both sides. explicit_shells < 0 lets the shell rule pick N; the
/// half-grid rerun uses the same N. err_truncation is the last shell's
/// relative mass; err_quadrature combines the half-grid delta, straddle
/// mass, and annulus bound.
ThetaRatioResult theta_ratio(const FuchsianGroup& g,
                             const QuadraticDifferential& phi,
                             const ThetaOptions& opt);

struct NormEstimateOptions {
  QuadratureSpec grid{256, 256, 1.0 - 1e-4};
  int max_degree = 6;
  int restarts = 200;
  int sweeps = 3;
  std::uint64_t seed = 12345;
  int max_shells = 16;
  std::size_t word_budget = 60000;
  double shell_rel_threshold = 1e-3;
  kernels::Kind kernel = kernels::Kind::Auto;
  int threads = 1;
};

struct NormEstimateResult {
  double best_ratio = 0.0;
  std::vector<complexd> witness;  // scaled so the largest coefficient is 1
  int best_restart = -1;
  std::size_t evaluations = 0;
  double err_truncation = 0.0;
  double err_quadrature = 0.0;
  double err_total = 0.0;
  int shells_used = 0;
  std::size_t words_used = 0;
  std::string stop_reason;
  std::string kernel_name;
};

/// Lower-bound search for the operator norm of the truncated theta series:
/// maximizes theta_ratio over polynomial witnesses of degree <= max_degree
/// by seeded random restarts (restart r uses mt19937_64(seed*1000003 + r);
/// the first max_degree+1 restarts start from the basis monomials) plus
/// greedy coordinate refinement. Deterministic for fixed options; the best
/// ratio is nondecreasing in the number of restarts.
NormEstimateResult estimate_theta_norm(const FuchsianGroup& g,
                                       const NormEstimateOptions& opt);

}  // namespace qclab
