// AVX2 variants of the pullback-accumulation kernels: four cells per
// instruction, words broadcast. Expressions and their order mirror
// kernels_scalar.cpp exactly (div and sqrt are correctly rounded in both
// paths, FMA contraction is disabled project-wide), so each lane computes
// bit-identical results to the scalar kernel. Ranges shorter than a vector
// fall through to the scalar code.

#if defined(__AVX2__)

#include <immintrin.h>

#include <stdexcept>

#include "qclab/kernels.hpp"

namespace qclab::kernels {

namespace {

constexpr int kMaxDegree = 16;
constexpr int kMaxPhi = 8;

inline __m256d mul(__m256d a, __m256d b) { return _mm256_mul_pd(a, b); }
inline __m256d add(__m256d a, __m256d b) { return _mm256_add_pd(a, b); }
inline __m256d sub(__m256d a, __m256d b) { return _mm256_sub_pd(a, b); }

void accumulate_basis_avx2(const Cells& cells, const Words& words, int degree,
                           double* const* t_re, double* const* t_im,
                           double* const* abs_acc, std::size_t begin,
                           std::size_t end) {
  if (degree < 0 || degree > kMaxDegree) {
    throw std::invalid_argument("accumulate_basis: degree out of range");
  }
  std::size_t j = begin;
  for (; j + 4 <= end; j += 4) {
    const __m256d zr = _mm256_loadu_pd(cells.zr + j);
    const __m256d zi = _mm256_loadu_pd(cells.zi + j);
    __m256d accR[kMaxDegree + 1], accI[kMaxDegree + 1], accA[kMaxDegree + 1];
    for (int k = 0; k <= degree; ++k) {
      accR[k] = _mm256_setzero_pd();
      accI[k] = _mm256_setzero_pd();
      accA[k] = _mm256_setzero_pd();
    }
    for (std::size_t w = 0; w < words.n; ++w) {
      const __m256d ar = _mm256_set1_pd(words.ar[w]);
      const __m256d ai = _mm256_set1_pd(words.ai[w]);
      const __m256d br = _mm256_set1_pd(words.br[w]);
      const __m256d bi = _mm256_set1_pd(words.bi[w]);
      const __m256d qr = add(add(mul(br, zr), mul(bi, zi)), ar);
      const __m256d qi = sub(sub(mul(br, zi), mul(bi, zr)), ai);
      const __m256d den = add(mul(qr, qr), mul(qi, qi));
      const __m256d inv = _mm256_div_pd(_mm256_set1_pd(1.0), den);
      const __m256d inv2 = mul(inv, inv);
      const __m256d nr = add(sub(mul(ar, zr), mul(ai, zi)), br);
      const __m256d ni = add(add(mul(ar, zi), mul(ai, zr)), bi);
      const __m256d ur = mul(add(mul(nr, qr), mul(ni, qi)), inv);
      const __m256d ui = mul(sub(mul(ni, qr), mul(nr, qi)), inv);
      const __m256d dr = mul(sub(mul(qr, qr), mul(qi, qi)), inv2);
      const __m256d di =
          mul(mul(mul(_mm256_set1_pd(-2.0), qr), qi), inv2);
      const __m256d t0r = sub(mul(dr, dr), mul(di, di));
      const __m256d t0i = mul(mul(_mm256_set1_pd(2.0), dr), di);
      const __m256d mu = _mm256_sqrt_pd(add(mul(ur, ur), mul(ui, ui)));
      __m256d tr = t0r, ti = t0i, m = inv2;
      for (int k = 0;; ++k) {
        accR[k] = add(accR[k], tr);
        accI[k] = add(accI[k], ti);
        accA[k] = add(accA[k], m);
        if (k == degree) break;
        const __m256d ntr = sub(mul(tr, ur), mul(ti, ui));
        const __m256d nti = add(mul(tr, ui), mul(ti, ur));
        tr = ntr;
        ti = nti;
        m = mul(m, mu);
      }
    }
    for (int k = 0; k <= degree; ++k) {
      _mm256_storeu_pd(t_re[k] + j,
                       add(_mm256_loadu_pd(t_re[k] + j), accR[k]));
      _mm256_storeu_pd(t_im[k] + j,
                       add(_mm256_loadu_pd(t_im[k] + j), accI[k]));
      _mm256_storeu_pd(abs_acc[k] + j,
                       add(_mm256_loadu_pd(abs_acc[k] + j), accA[k]));
    }
  }
  if (j < end) {
    scalar_kernels.accumulate_basis(cells, words, degree, t_re, t_im, abs_acc,
                                    j, end);
  }
}

void accumulate_phi_avx2(const Cells& cells, const Words& words,
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
  std::size_t j = begin;
  for (; j + 4 <= end; j += 4) {
    const __m256d zr = _mm256_loadu_pd(cells.zr + j);
    const __m256d zi = _mm256_loadu_pd(cells.zi + j);
    __m256d accR[kMaxPhi], accI[kMaxPhi], accA[kMaxPhi];
    for (int f = 0; f < n_phi; ++f) {
      accR[f] = _mm256_setzero_pd();
      accI[f] = _mm256_setzero_pd();
      accA[f] = _mm256_setzero_pd();
    }
    for (std::size_t w = 0; w < words.n; ++w) {
      const __m256d ar = _mm256_set1_pd(words.ar[w]);
      const __m256d ai = _mm256_set1_pd(words.ai[w]);
      const __m256d br = _mm256_set1_pd(words.br[w]);
      const __m256d bi = _mm256_set1_pd(words.bi[w]);
      const __m256d qr = add(add(mul(br, zr), mul(bi, zi)), ar);
      const __m256d qi = sub(sub(mul(br, zi), mul(bi, zr)), ai);
      const __m256d den = add(mul(qr, qr), mul(qi, qi));
      const __m256d inv = _mm256_div_pd(_mm256_set1_pd(1.0), den);
      const __m256d inv2 = mul(inv, inv);
      const __m256d nr = add(sub(mul(ar, zr), mul(ai, zi)), br);
      const __m256d ni = add(add(mul(ar, zi), mul(ai, zr)), bi);
      const __m256d ur = mul(add(mul(nr, qr), mul(ni, qi)), inv);
      const __m256d ui = mul(sub(mul(ni, qr), mul(nr, qi)), inv);
      const __m256d dr = mul(sub(mul(qr, qr), mul(qi, qi)), inv2);
      const __m256d di =
          mul(mul(mul(_mm256_set1_pd(-2.0), qr), qi), inv2);
      const __m256d t0r = sub(mul(dr, dr), mul(di, di));
      const __m256d t0i = mul(mul(_mm256_set1_pd(2.0), dr), di);
      for (int f = 0; f < n_phi; ++f) {
        const Poly& phi = phis[f];
        __m256d pr = _mm256_set1_pd(phi.cr[phi.degree]);
        __m256d pi = _mm256_set1_pd(phi.ci[phi.degree]);
        for (int k = phi.degree - 1; k >= 0; --k) {
          const __m256d npr =
              add(sub(mul(pr, ur), mul(pi, ui)), _mm256_set1_pd(phi.cr[k]));
          const __m256d npi =
              add(add(mul(pr, ui), mul(pi, ur)), _mm256_set1_pd(phi.ci[k]));
          pr = npr;
          pi = npi;
        }
        const __m256d er = sub(mul(pr, t0r), mul(pi, t0i));
        const __m256d ei = add(mul(pr, t0i), mul(pi, t0r));
        accR[f] = add(accR[f], er);
        accI[f] = add(accI[f], ei);
        accA[f] = add(accA[f], _mm256_sqrt_pd(add(mul(er, er), mul(ei, ei))));
      }
    }
    for (int f = 0; f < n_phi; ++f) {
      _mm256_storeu_pd(acc_re[f] + j,
                       add(_mm256_loadu_pd(acc_re[f] + j), accR[f]));
      _mm256_storeu_pd(acc_im[f] + j,
                       add(_mm256_loadu_pd(acc_im[f] + j), accI[f]));
      _mm256_storeu_pd(abs_acc[f] + j,
                       add(_mm256_loadu_pd(abs_acc[f] + j), accA[f]));
    }
  }
  if (j < end) {
    scalar_kernels.accumulate_phi(cells, words, phis, n_phi, acc_re, acc_im,
                                  abs_acc, j, end);
  }
}

void weighted_abs_avx2(const double* const* t_re, const double* const* t_im,
                       int degree, const double* cr, const double* ci,
                       const double* weight, std::size_t begin,
                       std::size_t end, double* out) {
  if (degree < 0 || degree > kMaxDegree) {
    throw std::invalid_argument("weighted_abs: degree out of range");
  }
  std::size_t j = begin;
  for (; j + 4 <= end; j += 4) {
    __m256d sr = _mm256_setzero_pd();
    __m256d si = _mm256_setzero_pd();
    for (int k = 0; k <= degree; ++k) {
      const __m256d tre = _mm256_loadu_pd(t_re[k] + j);
      const __m256d tim = _mm256_loadu_pd(t_im[k] + j);
      const __m256d ckr = _mm256_set1_pd(cr[k]);
      const __m256d cki = _mm256_set1_pd(ci[k]);
      sr = add(sr, sub(mul(ckr, tre), mul(cki, tim)));
      si = add(si, add(mul(ckr, tim), mul(cki, tre)));
    }
    const __m256d val = mul(_mm256_sqrt_pd(add(mul(sr, sr), mul(si, si))),
                            _mm256_loadu_pd(weight + j));
    _mm256_storeu_pd(out + j, val);
  }
  if (j < end) {
    scalar_kernels.weighted_abs(t_re, t_im, degree, cr, ci, weight, j, end,
                                out);
  }
}

}  // namespace

extern const KernelSet avx2_kernels;
const KernelSet avx2_kernels = {accumulate_basis_avx2, accumulate_phi_avx2,
                                weighted_abs_avx2, "avx2"};

}  // namespace qclab::kernels

#endif  // __AVX2__
