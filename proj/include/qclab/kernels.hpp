#pragma once

#include <cstddef>
#include <string>

namespace qclab::kernels {

/// SoA view of evaluation points (cell centers).
struct Cells {
  const double* zr;
  const double* zi;
  std::size_t n;
};

/// SoA view of one shell of group elements as unit-disk Moebius maps
/// w(z) = (alpha z + beta) / (conj(beta) z + conj(alpha)).
struct Words {
  const double* ar;  // Re alpha
  const double* ai;  // Im alpha
  const double* br;  // Re beta
  const double* bi;  // Im beta
  std::size_t n;
};

/// One polynomial sum_k c[k] z^k in SoA coefficient form.
struct Poly {
  const double* cr;
  const double* ci;
  int degree;
};

/// Adds, for every cell j in [begin,end) and every word w in the shell,
/// the monomial pullback terms
///     t_k(j) = (w(z_j))^k * (w'(z_j))^2,  k = 0..degree,
/// into t_re[k][j]/t_im[k][j], and their absolute values |w'|^2 |w|^k into
/// abs_acc[k][j]. Evaluation order (words outer to inner, the power chain)
/// is fixed, so results are independent of how cells are partitioned.
using accumulate_basis_fn = void (*)(const Cells&, const Words&, int degree,
                                     double* const* t_re, double* const* t_im,
                                     double* const* abs_acc, std::size_t begin,
                                     std::size_t end);

/// Adds, for every cell and word, the full pullback term
///     phi(w(z)) * (w'(z))^2
/// for each listed polynomial into acc_re[f]/acc_im[f], and its modulus
/// into abs_acc[f] (Horner evaluation at w(z)).
using accumulate_phi_fn = void (*)(const Cells&, const Words&,
                                   const Poly* phis, int n_phi,
                                   double* const* acc_re,
                                   double* const* acc_im,
                                   double* const* abs_acc, std::size_t begin,
                                   std::size_t end);

/// out[j] = |sum_k c_k t_k(j)| * weight[j] for cells j in [begin,end).
using weighted_abs_fn = void (*)(const double* const* t_re,
                                 const double* const* t_im, int degree,
                                 const double* cr, const double* ci,
                                 const double* weight, std::size_t begin,
                                 std::size_t end, double* out);

struct KernelSet {
  accumulate_basis_fn accumulate_basis;
  accumulate_phi_fn accumulate_phi;
  weighted_abs_fn weighted_abs;
  const char* name;
};

enum class Kind { Auto, Scalar, Avx2 };

Kind parse_kind(const std::string& name);  // "auto" | "scalar" | "avx2"
const char* to_string(Kind k);

bool avx2_compiled();
bool avx2_available();

/// Resolves Auto to the best available implementation. Requesting Avx2 on
/// a machine without it throws std::runtime_error.
const KernelSet& select(Kind kind);

extern const KernelSet scalar_kernels;

}  // namespace qclab::kernels
