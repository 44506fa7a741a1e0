#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qclab/moebius.hpp"

namespace qclab {

/// Coefficients of the real-affine map L(z) = a z + b conj(z) taking the
/// lattice marked by (1, tau1) to the one marked by (1, tau2), with L(1) = 1.
LinearStretch affine_coeffs(complexd tau1, complexd tau2);

/// Dilatation K >= 1 of the affine map between the two marked tori.
double torus_dilatation(complexd tau1, complexd tau2);

/// Teichmueller distance log K between marked tori; a metric on the upper
/// half plane (half the hyperbolic metric's scale).
double teich_distance(complexd tau1, complexd tau2);

/// Point at parameter t in [0,1] on the distance-minimizing path from tau1
/// to tau2: d(tau1, gamma(t)) = t * d(tau1, tau2).
complexd geodesic_point(complexd tau1, complexd tau2, double t);

/// A self-map of the upper half plane, one of three stylized families.
class ModelMap {
 public:
  enum class Kind { Isometry, UniformContraction, Cylindrical };

  /// Acts by the Moebius map (an isometry of the model).
  static ModelMap isometry(const Moebius& m);

  /// Moves every point a fixed fraction of the way toward `target`:
  /// d(F(y), target) = factor * d(y, target), 0 < factor < 1.
  static ModelMap uniform_contraction(complexd target, double factor);

  /// Drifts toward y + i*drift, traveling the fraction
  /// 1 - epsilon/(1 + Im y) of the way; the contraction factor decays to
  /// zero as the point escapes upward, so no fixed point exists.
  static ModelMap cylindrical(double epsilon, double drift);

  complexd apply(complexd y) const;

  Kind kind() const { return kind_; }
  std::string kind_name() const;
  const Moebius& isometry_map() const;
  complexd target() const { return target_; }
  double factor() const { return factor_; }
  double epsilon() const { return epsilon_; }
  double drift() const { return drift_; }

 private:
  ModelMap() = default;
  Kind kind_ = Kind::Isometry;
  Moebius iso_;
  complexd target_{0.0, 1.0};
  double factor_ = 0.5;
  double epsilon_ = 0.5;
  double drift_ = 1.0;
};

struct IterateOptions {
  std::size_t max_steps = 100000;
  double tol = 1e-9;              // stop when a step moves less than this
  double pinch_threshold = 1e3;   // stop when Im y exceeds this
  std::size_t trace_cap = 256;    // keep at most this many leading trace rows
};

struct IterateResult {
  std::string outcome;  // "converged" | "pinching" | "budget-exceeded"
  std::size_t steps = 0;
  complexd final_point{0.0, 1.0};
  double final_step = 0.0;
  std::vector<complexd> trace;        // y_0, y_1, ... (capped)
  std::vector<double> step_distance;  // d(y_{n}, y_{n+1}) for every step
};

/// Iterates the composition of the given maps (applied left to right) from
/// y0. The escape check (Im above pinch_threshold) runs before the
/// convergence check so a drifting orbit is never mistaken for a converged
/// one.
IterateResult iterate_maps(const std::vector<ModelMap>& maps, complexd y0,
                           const IterateOptions& opt);

struct ContractionEstimate {
  double c_hat = 0.0;           // median of the tail step ratios
  std::size_t ratios_used = 0;  // tail length the median was taken over
  std::vector<double> ratios;   // all consecutive step ratios
};

/// Estimates the per-step contraction factor from successive step distances:
/// ratios d_{k+1}/d_k are formed where d_k > floor_tol, and c_hat is the
/// median of the last half of them. Throws if fewer than 4 usable ratios.
ContractionEstimate contraction_estimate(const std::vector<double>& step_distance,
                                         double floor_tol = 1e-14);

}  // namespace qclab
