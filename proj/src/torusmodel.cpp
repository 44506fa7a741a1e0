#include "qclab/torusmodel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qclab {

namespace {

void require_upper(complexd tau, const char* who) {
  if (!(tau.imag() > 0.0) || !std::isfinite(tau.real()) ||
      !std::isfinite(tau.imag()))
    throw std::domain_error(std::string(who) +
                            ": point must lie in the upper half plane");
}

}  // namespace

LinearStretch affine_coeffs(complexd tau1, complexd tau2) {
  require_upper(tau1, "affine_coeffs");
  require_upper(tau2, "affine_coeffs");
  complexd den = tau1 - std::conj(tau1);  // 2i Im tau1
  LinearStretch L;
  L.a = (tau2 - std::conj(tau1)) / den;
  L.b = (tau1 - tau2) / den;
  return L;
}

double torus_dilatation(complexd tau1, complexd tau2) {
  return linear_dilatation(affine_coeffs(tau1, tau2));
}

double teich_distance(complexd tau1, complexd tau2) {
  // log((|a|+|b|)/(|a|-|b|)) in atanh form: keeps full relative accuracy
  // when the points are a few ulps apart.
  LinearStretch L = affine_coeffs(tau1, tau2);
  return 2.0 * std::atanh(std::abs(L.b) / std::abs(L.a));
}

complexd geodesic_point(complexd tau1, complexd tau2, double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("geodesic parameter must be in [0,1]");
  LinearStretch L = affine_coeffs(tau1, tau2);
  double mu_abs = std::abs(L.b) / std::abs(L.a);
  if (mu_abs == 0.0) return tau1;
  complexd dir = (L.b / L.a) / mu_abs;
  double K = (1.0 + mu_abs) / (1.0 - mu_abs);
  double Kt = std::pow(K, t);
  complexd mu_t = dir * ((Kt - 1.0) / (Kt + 1.0));
  // The affine map with Beltrami coefficient mu_t and L(1) = 1.
  return (tau1 + mu_t * std::conj(tau1)) / (1.0 + mu_t);
}

ModelMap ModelMap::isometry(const Moebius& m) {
  ModelMap f;
  f.kind_ = Kind::Isometry;
  f.iso_ = m;
  return f;
}

ModelMap ModelMap::uniform_contraction(complexd target, double factor) {
  require_upper(target, "uniform_contraction");
  if (!(factor > 0.0 && factor < 1.0))
    throw std::invalid_argument("contraction factor must be in (0,1)");
  ModelMap f;
  f.kind_ = Kind::UniformContraction;
  f.target_ = target;
  f.factor_ = factor;
  return f;
}

ModelMap ModelMap::cylindrical(double epsilon, double drift) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("epsilon must be in (0,1]");
  if (!(drift > 0.0))
    throw std::invalid_argument("drift must be positive");
  ModelMap f;
  f.kind_ = Kind::Cylindrical;
  f.epsilon_ = epsilon;
  f.drift_ = drift;
  return f;
}

std::string ModelMap::kind_name() const {
  switch (kind_) {
    case Kind::Isometry: return "isometry";
    case Kind::UniformContraction: return "uniform-contraction";
    case Kind::Cylindrical: return "cylindrical";
  }
  return "?";
}

const Moebius& ModelMap::isometry_map() const {
  if (kind_ != Kind::Isometry)
    throw std::logic_error("not an isometry map");
  return iso_;
}

complexd ModelMap::apply(complexd y) const {
  require_upper(y, "ModelMap::apply");
  switch (kind_) {
    case Kind::Isometry:
      return iso_.apply(y);
    case Kind::UniformContraction: {
      if (std::abs(y - target_) == 0.0) return target_;
      // The candidate can land a few ulps outside factor * d by rounding;
      // nudging it toward the target keeps d(f(y), target) <= factor * d(y,
      // target) an exact statement, so iterates obey the c^n envelope.
      double budget = factor_ * teich_distance(y, target_);
      complexd z = geodesic_point(y, target_, 1.0 - factor_);
      while (z != target_ && teich_distance(z, target_) > budget) {
        double re = z.real() == target_.real()
                        ? z.real()
                        : std::nextafter(z.real(), target_.real());
        double im = z.imag() == target_.imag()
                        ? z.imag()
                        : std::nextafter(z.imag(), target_.imag());
        z = complexd(re, im);
      }
      return z;
    }
    case Kind::Cylindrical: {
      complexd ahead = y + complexd(0.0, drift_);
      double travel = 1.0 - epsilon_ / (1.0 + y.imag());
      return geodesic_point(y, ahead, travel);
    }
  }
  throw std::logic_error("unreachable");
}

IterateResult iterate_maps(const std::vector<ModelMap>& maps, complexd y0,
                           const IterateOptions& opt) {
  if (maps.empty()) throw std::invalid_argument("no maps to iterate");
  if (!(opt.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (!(opt.pinch_threshold > 0.0))
    throw std::invalid_argument("pinch threshold must be positive");
  require_upper(y0, "iterate_maps");

  IterateResult res;
  res.trace.push_back(y0);
  complexd y = y0;
  for (std::size_t n = 0; n < opt.max_steps; ++n) {
    complexd next = y;
    for (const auto& f : maps) next = f.apply(next);
    double step = teich_distance(y, next);
    res.step_distance.push_back(step);
    if (res.trace.size() < opt.trace_cap) res.trace.push_back(next);
    ++res.steps;
    res.final_point = next;
    res.final_step = step;
    y = next;
    if (y.imag() > opt.pinch_threshold) {
      res.outcome = "pinching";
      return res;
    }
    if (step < opt.tol) {
      res.outcome = "converged";
      return res;
    }
  }
  res.outcome = "budget-exceeded";
  return res;
}

ContractionEstimate contraction_estimate(const std::vector<double>& step_distance,
                                         double floor_tol) {
  ContractionEstimate est;
  for (std::size_t i = 0; i + 1 < step_distance.size(); ++i) {
    if (step_distance[i] > floor_tol && std::isfinite(step_distance[i + 1]))
      est.ratios.push_back(step_distance[i + 1] / step_distance[i]);
  }
  if (est.ratios.size() < 4)
    throw std::invalid_argument(
        "need at least 4 usable step ratios to estimate contraction");
  std::size_t tail = (est.ratios.size() + 1) / 2;
  std::vector<double> t(est.ratios.end() - static_cast<std::ptrdiff_t>(tail),
                        est.ratios.end());
  std::sort(t.begin(), t.end());
  est.ratios_used = tail;
  est.c_hat = (tail % 2 == 1)
                  ? t[tail / 2]
                  : 0.5 * (t[tail / 2 - 1] + t[tail / 2]);
  return est;
}

}  // namespace qclab
