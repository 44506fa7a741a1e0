// Reference implementation of the pullback-accumulation kernels.
//
// The arithmetic here is the contract: kernels_avx2.cpp evaluates the same
// expressions in the same order, four cells per instruction, so results are
// bit-identical lane by lane. Keep every formula and its parenthesization
// in lockstep between the two files, and keep -ffp-contract=off.

#include <cmath>
#include <stdexcept>

#include "qclab/kernels.hpp"

namespace qclab::kernels {

namespace {

constexpr int kMaxDegree = 16;
constexpr int kMaxPhi = 8;

void accumulate_basis_scalar(const Cells& cells, const Words& words,
                             int degree, double* const* t_re,
                             double* const* t_im, double* const* abs_acc,
                             std::size_t begin, std::size_t end) {
  if (degree < 0 || degree > kMaxDegree) {
    throw std::invalid_argument("accumulate_basis: degree out of range");
  }
  for (std::size_t j = begin; j < end; ++j) {
    const double zr = cells.zr[j];
    const double zi = cells.zi[j];
    double accR[kMaxDegree + 1] = {};
    double accI[kMaxDegree + 1] = {};
    double accA[kMaxDegree + 1] = {};
    for (std::size_t w = 0; w < words.n; ++w) {
      const double ar = words.ar[w], ai = words.ai[w];
      const double br = words.br[w], bi = words.bi[w];
      // q = conj(beta) z + conj(alpha)
      const double qr = ((br * zr) + (bi * zi)) + ar;
      const double qi = ((br * zi) - (bi * zr)) - ai;
      const double den = (qr * qr) + (qi * qi);
      const double inv = 1.0 / den;
      const double inv2 = inv * inv;
      // u = w(z) = (alpha z + beta) * conj(q) / |q|^2
      const double nr = ((ar * zr) - (ai * zi)) + br;
      const double ni = ((ar * zi) + (ai * zr)) + bi;
      const double ur = ((nr * qr) + (ni * qi)) * inv;
      const double ui = ((ni * qr) - (nr * qi)) * inv;
      // w'(z) = 1/q^2 = conj(q)^2 / |q|^4
      const double dr = ((qr * qr) - (qi * qi)) * inv2;
      const double di = ((-2.0 * qr) * qi) * inv2;
      // t_0 = (w')^2, |t_0| = inv2 exactly
      const double t0r = (dr * dr) - (di * di);
      const double t0i = (2.0 * dr) * di;
      const double mu = std::sqrt((ur * ur) + (ui * ui));
      double tr = t0r, ti = t0i, m = inv2;
      for (int k = 0;; ++k) {
        accR[k] += tr;
        accI[k] += ti;
        accA[k] += m;
        if (k == degree) break;
        const double ntr = (tr * ur) - (ti * ui);
        const double nti = (tr * ui) + (ti * ur);
        tr = ntr;
        ti = nti;
        m = m * mu;
      }
    }
    for (int k = 0; k <= degree; ++k) {
      t_re[k][j] += accR[k];
      t_im[k][j] += accI[k];
      abs_acc[k][j] += accA[k];
    }
  }
}

void accumulate_phi_scalar(const Cells& cells, const Words& words,
                           const Poly* phis, int n_phi, double* const* acc_re,
                           double* const* acc_im, double* const* abs_acc,
                           std::size_t begin, std::size_t end) {
  if (n_phi < 1 || n_phi > kMaxPhi) {
    throw std::invalid_argument("accumulate_phi: n_phi out of range");
  }
  for (int f = 0; f < n_phi; ++f) {
    if (phis[f].degree < 0 || phis[f].degree > kMaxDegree) {
      throw std::invalid_argument("accumulate_phi: degree out of range");
    }
  }
  for (std::size_t j = begin; j < end; ++j) {
    const double zr = cells.zr[j];
    const double zi = cells.zi[j];
    double accR[kMaxPhi] = {};
    double accI[kMaxPhi] = {};
    double accA[kMaxPhi] = {};
    for (std::size_t w = 0; w < words.n; ++w) {
      const double ar = words.ar[w], ai = words.ai[w];
      const double br = words.br[w], bi = words.bi[w];
      const double qr = ((br * zr) + (bi * zi)) + ar;
      const double qi = ((br * zi) - (bi * zr)) - ai;
      const double den = (qr * qr) + (qi * qi);
      const double inv = 1.0 / den;
      const double inv2 = inv * inv;
      const double nr = ((ar * zr) - (ai * zi)) + br;
      const double ni = ((ar * zi) + (ai * zr)) + bi;
      const double ur = ((nr * qr) + (ni * qi)) * inv;
      const double ui = ((ni * qr) - (nr * qi)) * inv;
      const double dr = ((qr * qr) - (qi * qi)) * inv2;
      const double di = ((-2.0 * qr) * qi) * inv2;
      const double t0r = (dr * dr) - (di * di);
      const double t0i = (2.0 * dr) * di;
      for (int f = 0; f < n_phi; ++f) {
        const Poly& phi = phis[f];
        // Horner at u = w(z)
        double pr = phi.cr[phi.degree];
        double pi = phi.ci[phi.degree];
        for (int k = phi.degree - 1; k >= 0; --k) {
          const double npr = ((pr * ur) - (pi * ui)) + phi.cr[k];
          const double npi = ((pr * ui) + (pi * ur)) + phi.ci[k];
          pr = npr;
          pi = npi;
        }
        const double er = (pr * t0r) - (pi * t0i);
        const double ei = (pr * t0i) + (pi * t0r);
        accR[f] += er;
        accI[f] += ei;
        accA[f] += std::sqrt((er * er) + (ei * ei));
      }
    }
    for (int f = 0; f < n_phi; ++f) {
      acc_re[f][j] += accR[f];
      acc_im[f][j] += accI[f];
      abs_acc[f][j] += accA[f];
    }
  }
}

void weighted_abs_scalar(const double* const* t_re, const double* const* t_im,
                         int degree, const double* cr, const double* ci,
                         const double* weight, std::size_t begin,
                         std::size_t end, double* out) {
  if (degree < 0 || degree > kMaxDegree) {
    throw std::invalid_argument("weighted_abs: degree out of range");
  }
  for (std::size_t j = begin; j < end; ++j) {
    double sr = 0.0, si = 0.0;
    for (int k = 0; k <= degree; ++k) {
      sr += (cr[k] * t_re[k][j]) - (ci[k] * t_im[k][j]);
      si += (cr[k] * t_im[k][j]) + (ci[k] * t_re[k][j]);
    }
    out[j] = std::sqrt((sr * sr) + (si * si)) * weight[j];
  }
}

}  // namespace

const KernelSet scalar_kernels = {accumulate_basis_scalar, accumulate_phi_scalar,
                                  weighted_abs_scalar, "scalar"};

}  // namespace qclab::kernels
