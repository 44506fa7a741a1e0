#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace qclab {

using complexd = std::complex<double>;

/// Thrown when an enumeration or search exceeds its configured budget.
/// `partial` carries how far the computation got before giving up.
class budget_error : public std::runtime_error {
 public:
  budget_error(const std::string& what, std::size_t partial)
      : std::runtime_error(what), partial_(partial) {}
  std::size_t partial() const { return partial_; }

 private:
  std::size_t partial_;
};

enum class MoebiusClass { Identity, Elliptic, Parabolic, Hyperbolic };

const char* to_string(MoebiusClass c);

/// Real 2x2 matrix acting on the upper half plane by z -> (az+b)/(cz+d),
/// normalized to det = 1 with a canonical sign (first entry of a,b,c,d
/// larger than 1e-12 in absolute value is made positive), so each matrix
/// represents a unique element of PSL(2,R).
struct Moebius {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  Moebius() = default;

  /// Normalizes det to 1 and fixes the canonical sign. Throws
  /// std::invalid_argument if det <= 0 or any entry is not finite.
  Moebius(double a, double b, double c, double d);

  static Moebius identity() { return Moebius(); }

  double trace() const { return a + d; }

  complexd apply(complexd z) const;
  complexd derivative(complexd z) const;

  Moebius inverse() const;

  bool is_identity(double tol = 1e-9) const;
  MoebiusClass classify(double parabolic_tol = 1e-9) const;

  /// Hyperbolic translation length 2*acosh(|tr|/2). Throws
  /// std::domain_error unless classify() == Hyperbolic.
  double translation_length() const;
};

Moebius operator*(const Moebius& m1, const Moebius& m2);

bool approx_equal(const Moebius& m1, const Moebius& m2, double tol = 1e-9);

/// Coefficients of the same map transported to the unit disk by the Cayley
/// map z -> (z-i)/(z+i): w -> (alpha w + beta) / (conj(beta) w + conj(alpha))
/// with |alpha|^2 - |beta|^2 = 1.
struct DiskCoeffs {
  complexd alpha{1.0, 0.0};
  complexd beta{0.0, 0.0};

  complexd apply(complexd w) const;
  complexd derivative(complexd w) const;
};

DiskCoeffs to_disk(const Moebius& m);
Moebius from_disk(const DiskCoeffs& g);

complexd cayley(complexd z);          // half plane -> disk
complexd cayley_inverse(complexd w);  // disk -> half plane

/// Isometric circle of the map in the chosen model: the locus where
/// |derivative| = 1. Throws std::domain_error if the map fixes infinity
/// (half plane: c = 0) resp. fixes the disk center metric scale (beta = 0).
struct IsoCircle {
  complexd center;
  double radius;
};

IsoCircle isometric_circle_halfplane(const Moebius& m);
IsoCircle isometric_circle_disk(const DiskCoeffs& g);

/// Orientation-preserving real-linear map L(z) = a z + b conj(z) with
/// |a| > |b|, the local model of a quasiconformal map.
struct LinearStretch {
  complexd a{1.0, 0.0};
  complexd b{0.0, 0.0};
};

/// Dilatation K = (|a|+|b|)/(|a|-|b|) >= 1: the ratio of major to minor
/// axis of the image of a round circle under L. Throws std::domain_error
/// if |a| <= |b| (degenerate or orientation-reversing).
double linear_dilatation(const LinearStretch& L);

}  // namespace qclab
