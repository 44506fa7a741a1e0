#include "qclab/moebius.hpp"

#include <cmath>

namespace qclab {

namespace {
constexpr double kSignTol = 1e-12;
constexpr double kPoleTol = 1e-12;
}  // namespace

const char* to_string(MoebiusClass c) {
  switch (c) {
    case MoebiusClass::Identity:
      return "identity";
    case MoebiusClass::Elliptic:
      return "elliptic";
    case MoebiusClass::Parabolic:
      return "parabolic";
    case MoebiusClass::Hyperbolic:
      return "hyperbolic";
  }
  return "?";
}

Moebius::Moebius(double a_, double b_, double c_, double d_)
    : a(a_), b(b_), c(c_), d(d_) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) ||
      !std::isfinite(d)) {
    throw std::invalid_argument("Moebius: entries must be finite");
  }
  double det = a * d - b * c;
  if (!(det > 0.0)) {
    throw std::invalid_argument("Moebius: determinant must be positive");
  }
  double s = 1.0 / std::sqrt(det);
  a *= s;
  b *= s;
  c *= s;
  d *= s;
  // Canonical sign: first entry with |.| > kSignTol becomes positive.
  const double entries[4] = {a, b, c, d};
  for (double e : entries) {
    if (std::abs(e) > kSignTol) {
      if (e < 0.0) {
        a = -a;
        b = -b;
        c = -c;
        d = -d;
      }
      break;
    }
  }
}

complexd Moebius::apply(complexd z) const {
  complexd den = c * z + d;
  if (std::abs(den) < kPoleTol) {
    throw std::domain_error("Moebius::apply: z at the pole -d/c");
  }
  return (a * z + b) / den;
}

complexd Moebius::derivative(complexd z) const {
  complexd den = c * z + d;
  if (std::abs(den) < kPoleTol) {
    throw std::domain_error("Moebius::derivative: z at the pole -d/c");
  }
  return 1.0 / (den * den);
}

Moebius Moebius::inverse() const { return Moebius(d, -b, -c, a); }

bool Moebius::is_identity(double tol) const {
  return std::abs(a - 1.0) <= tol && std::abs(b) <= tol &&
         std::abs(c) <= tol && std::abs(d - 1.0) <= tol;
}

MoebiusClass Moebius::classify(double parabolic_tol) const {
  if (is_identity()) return MoebiusClass::Identity;
  double t = std::abs(trace());
  if (std::abs(t - 2.0) <= parabolic_tol) return MoebiusClass::Parabolic;
  return t < 2.0 ? MoebiusClass::Elliptic : MoebiusClass::Hyperbolic;
}

double Moebius::translation_length() const {
  if (classify() != MoebiusClass::Hyperbolic) {
    throw std::domain_error(
        "translation_length: defined only for hyperbolic elements");
  }
  return 2.0 * std::acosh(std::abs(trace()) / 2.0);
}

Moebius operator*(const Moebius& m1, const Moebius& m2) {
  return Moebius(m1.a * m2.a + m1.b * m2.c, m1.a * m2.b + m1.b * m2.d,
                 m1.c * m2.a + m1.d * m2.c, m1.c * m2.b + m1.d * m2.d);
}

bool approx_equal(const Moebius& m1, const Moebius& m2, double tol) {
  return std::abs(m1.a - m2.a) <= tol && std::abs(m1.b - m2.b) <= tol &&
         std::abs(m1.c - m2.c) <= tol && std::abs(m1.d - m2.d) <= tol;
}

complexd DiskCoeffs::apply(complexd w) const {
  complexd den = std::conj(beta) * w + std::conj(alpha);
  if (std::abs(den) < kPoleTol) {
    throw std::domain_error("DiskCoeffs::apply: w at the pole");
  }
  return (alpha * w + beta) / den;
}

complexd DiskCoeffs::derivative(complexd w) const {
  complexd den = std::conj(beta) * w + std::conj(alpha);
  if (std::abs(den) < kPoleTol) {
    throw std::domain_error("DiskCoeffs::derivative: w at the pole");
  }
  return 1.0 / (den * den);
}

DiskCoeffs to_disk(const Moebius& m) {
  // Conjugation by the Cayley map z -> (z-i)/(z+i) sends the real matrix
  // [[a,b],[c,d]] to the SU(1,1) matrix [[alpha,beta],[conj beta,conj alpha]].
  DiskCoeffs g;
  g.alpha = complexd((m.a + m.d) / 2.0, (m.b - m.c) / 2.0);
  g.beta = complexd((m.a - m.d) / 2.0, -(m.b + m.c) / 2.0);
  return g;
}

Moebius from_disk(const DiskCoeffs& g) {
  return Moebius(g.alpha.real() + g.beta.real(), g.alpha.imag() - g.beta.imag(),
                 -(g.alpha.imag() + g.beta.imag()),
                 g.alpha.real() - g.beta.real());
}

complexd cayley(complexd z) { return (z - complexd(0.0, 1.0)) / (z + complexd(0.0, 1.0)); }

complexd cayley_inverse(complexd w) {
  return complexd(0.0, 1.0) * (1.0 + w) / (1.0 - w);
}

IsoCircle isometric_circle_halfplane(const Moebius& m) {
  if (std::abs(m.c) < kSignTol) {
    throw std::domain_error(
        "isometric_circle: map fixes infinity (c = 0), no isometric circle");
  }
  return IsoCircle{complexd(-m.d / m.c, 0.0), 1.0 / std::abs(m.c)};
}

IsoCircle isometric_circle_disk(const DiskCoeffs& g) {
  double bb = std::abs(g.beta);
  if (bb < kSignTol) {
    throw std::domain_error(
        "isometric_circle: map is a disk rotation (beta = 0), no isometric "
        "circle");
  }
  return IsoCircle{-std::conj(g.alpha) / std::conj(g.beta), 1.0 / bb};
}

double linear_dilatation(const LinearStretch& L) {
  double na = std::abs(L.a);
  double nb = std::abs(L.b);
  if (!(na > nb)) {
    throw std::domain_error(
        "linear_dilatation: requires |a| > |b| (orientation-preserving, "
        "nondegenerate)");
  }
  return (na + nb) / (na - nb);
}

}  // namespace qclab
