#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "qclab/qdiff.hpp"

using namespace qclab;

namespace {

constexpr double kPi = std::numbers::pi;

QuadratureSpec small_grid(int n) { return QuadratureSpec{n, n, 1.0 - 1e-4}; }

}  // namespace

TEST_SUITE("qdiff") {

TEST_CASE("monomial shorthand parsing") {
  CHECK(QuadraticDifferential::parse("1").degree() == 0);
  CHECK(QuadraticDifferential::parse("z").degree() == 1);
  CHECK(QuadraticDifferential::parse("z7").degree() == 7);
  CHECK(QuadraticDifferential::parse("z2").coeff(2) == complexd(1.0, 0.0));
  CHECK(QuadraticDifferential::parse("z2").coeff(0) == complexd(0.0, 0.0));
  CHECK_THROWS_AS(QuadraticDifferential::parse("w"), std::invalid_argument);
  CHECK_THROWS_AS(QuadraticDifferential::parse("z10"), std::invalid_argument);
  CHECK_THROWS_AS(QuadraticDifferential::parse(""), std::invalid_argument);
}

TEST_CASE("coefficient handling trims trailing zeros") {
  QuadraticDifferential p({complexd(1.0, 0.0), complexd(0.0, 0.0)});
  CHECK(p.degree() == 0);
  CHECK_FALSE(p.is_zero());
  QuadraticDifferential zero({complexd(0.0, 0.0)});
  CHECK(zero.is_zero());
  QuadraticDifferential q({complexd(1.0, 0.0), complexd(2.0, -1.0)});
  complexd z(0.3, 0.4);
  CHECK(std::abs(q.eval(z) - (complexd(1.0, 0.0) + complexd(2.0, -1.0) * z)) <
        1e-15);
  QuadraticDifferential s = q.scaled(complexd(0.0, 2.0));
  CHECK(std::abs(s.eval(z) - complexd(0.0, 2.0) * q.eval(z)) < 1e-15);
}

TEST_CASE("disk mass of monomials approaches the closed form") {
  for (int k = 0; k <= 3; ++k) {
    QuadraticDifferential phi = QuadraticDifferential::monomial(k);
    L1Norm n = l1_norm_disk(phi, small_grid(256));
    double exact = monomial_l1_exact(k);
    CHECK(n.value() == doctest::Approx(exact).epsilon(1e-4));
    CHECK(n.annulus_bound > 0.0);
    CHECK(std::abs(n.refine_delta) < 1e-2 * exact);
  }
}

TEST_CASE("disk mass error shrinks as the grid refines") {
  QuadraticDifferential phi = QuadraticDifferential::parse("z2");
  double exact = monomial_l1_exact(2);
  double err64 = std::abs(l1_norm_disk(phi, small_grid(64)).value() - exact);
  double err256 = std::abs(l1_norm_disk(phi, small_grid(256)).value() - exact);
  CHECK(err256 < err64);
}

TEST_CASE("pullback composes functorially") {
  FuchsianGroup g = FuchsianGroup::preset("schottky-wide");
  QuadraticDifferential phi = QuadraticDifferential::parse("z2");
  Moebius m1 = g.letter_matrix(0);
  Moebius m2 = g.letter_matrix(2);
  DiskCoeffs d1 = g.letter_disk(0);
  DiskCoeffs d2 = g.letter_disk(2);
  DiskCoeffs comp = to_disk(m1 * m2);
  complexd z(0.31, -0.12);
  complexd w = d2.apply(z);
  complexd chain = phi.eval(d1.apply(w)) * d1.derivative(w) * d1.derivative(w) *
                   d2.derivative(z) * d2.derivative(z);
  complexd direct = pullback_eval(comp, phi, z);
  CHECK(std::abs(direct - chain) < 1e-12 * (1.0 + std::abs(chain)));
}

TEST_CASE("pointwise theta sum is linear in phi") {
  FuchsianGroup g = FuchsianGroup::preset("schottky-mid");
  complexd z(0.2, 0.1);
  QuadraticDifferential p1 = QuadraticDifferential::parse("z");
  QuadraticDifferential p2 = QuadraticDifferential::parse("z3");
  QuadraticDifferential sum(
      {complexd(0.0, 0.0), complexd(1.0, 0.0), complexd(0.0, 0.0),
       complexd(1.0, 0.0)});
  complexd t1 = theta_truncated_eval(g, p1, 4, z);
  complexd t2 = theta_truncated_eval(g, p2, 4, z);
  complexd ts = theta_truncated_eval(g, sum, 4, z);
  CHECK(std::abs(ts - (t1 + t2)) < 1e-12);

  complexd scale(0.0, -3.0);
  complexd tscaled = theta_truncated_eval(g, p1.scaled(scale), 4, z);
  CHECK(std::abs(tscaled - scale * t1) < 1e-12);
}

TEST_CASE("theta over the trivial group is the identity operator") {
  FuchsianGroup g = FuchsianGroup::trivial();
  QuadraticDifferential phi = QuadraticDifferential::parse("z2");
  complexd z(0.4, -0.2);
  CHECK(theta_truncated_eval(g, phi, 3, z) == phi.eval(z));

  ThetaOptions opt;
  opt.grid = small_grid(64);
  ThetaRatioResult r = theta_ratio(g, phi, opt);
  CHECK(r.ratio == 1.0);  // bitwise: same cells in numerator and denominator
  CHECK(r.ratio_half == 1.0);
  CHECK(r.err_truncation == 0.0);
  CHECK(r.straddle_mass == 0.0);
  CHECK(r.stop_reason == "rule");
}

TEST_CASE("theta ratio is invariant under scaling the input") {
  FuchsianGroup g = FuchsianGroup::preset("schottky-wide");
  ThetaOptions opt;
  opt.grid = small_grid(64);
  QuadraticDifferential phi = QuadraticDifferential::parse("z");
  ThetaRatioResult a = theta_ratio(g, phi, opt);
  ThetaRatioResult b = theta_ratio(g, phi.scaled(complexd(0.0, 5.0)), opt);
  CHECK(b.ratio == doctest::Approx(a.ratio).epsilon(1e-12));
}

TEST_CASE("shell masses decay and the partial sums stay ordered") {
  FuchsianGroup g = FuchsianGroup::preset("schottky-wide");
  std::vector<QuadraticDifferential> phis = {QuadraticDifferential::parse("1"),
                                             QuadraticDifferential::parse("z")};
  ThetaOptions opt;
  opt.grid = small_grid(128);
  opt.explicit_shells = 5;
  ThetaAccumulation acc = accumulate_theta(g, phis, opt);
  REQUIRE(acc.shells.size() == 6);
  CHECK(acc.stop_reason == "explicit");
  for (std::size_t f = 0; f < phis.size(); ++f) {
    for (std::size_t n = 1; n + 1 < acc.shells.size(); ++n) {
      CHECK(acc.shells[n + 1].mass[f] < acc.shells[n].mass[f]);
    }
    for (std::size_t n = 0; n + 1 < acc.shells.size(); ++n) {
      CHECK(acc.shells[n].unfolded[f] <= acc.shells[n + 1].unfolded[f]);
    }
    for (const ShellReport& row : acc.shells) {
      CHECK(row.quotient[f] <= row.unfolded[f] * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("unfolding stays below the disk mass on modest grids") {
  for (const char* preset : {"schottky-wide", "schottky-mid"}) {
    FuchsianGroup g = FuchsianGroup::preset(preset);
    QuadraticDifferential phi = QuadraticDifferential::parse("1");
    ThetaOptions opt;
    opt.grid = small_grid(128);
    ThetaRatioResult r = theta_ratio(g, phi, opt);
    double cap = kPi * (1.0 + 2e-3);
    CHECK(r.shells.back().unfolded[0] <= cap);
    CHECK(r.quotient <= r.shells.back().unfolded[0] * (1.0 + 1e-12));
  }
}

TEST_CASE("theta accumulation respects its word budget") {
  FuchsianGroup g = FuchsianGroup::preset("schottky-mid");
  ThetaOptions opt;
  opt.grid = small_grid(32);
  opt.explicit_shells = 8;
  opt.word_budget = 100;
  CHECK_THROWS_AS(
      accumulate_theta(g, {QuadraticDifferential::parse("1")}, opt),
      budget_error);

  opt.explicit_shells = -1;  // rule mode truncates instead of throwing
  ThetaAccumulation acc =
      accumulate_theta(g, {QuadraticDifferential::parse("1")}, opt);
  CHECK(acc.stop_reason == "word-budget");
  CHECK(acc.words_used <= 100);
}

TEST_CASE("norm estimate is deterministic and monotone in restarts") {
  FuchsianGroup g = FuchsianGroup::preset("schottky-wide");
  NormEstimateOptions opt;
  opt.grid = small_grid(64);
  opt.max_degree = 2;
  opt.restarts = 6;
  opt.sweeps = 2;
  NormEstimateResult a = estimate_theta_norm(g, opt);
  NormEstimateResult b = estimate_theta_norm(g, opt);
  CHECK(a.best_ratio == b.best_ratio);
  CHECK(a.evaluations == b.evaluations);
  REQUIRE(a.witness.size() == b.witness.size());
  for (std::size_t i = 0; i < a.witness.size(); ++i) {
    CHECK(a.witness[i] == b.witness[i]);
  }

  opt.restarts = 12;
  NormEstimateResult c = estimate_theta_norm(g, opt);
  CHECK(c.best_ratio >= a.best_ratio);
  CHECK(c.best_ratio < 1.0);
}

TEST_CASE("norm estimate reports a witness scaled to unit peak") {
  FuchsianGroup g = FuchsianGroup::preset("schottky-mid");
  NormEstimateOptions opt;
  opt.grid = small_grid(64);
  opt.max_degree = 3;
  opt.restarts = 8;
  opt.sweeps = 2;
  NormEstimateResult r = estimate_theta_norm(g, opt);
  double peak = 0.0;
  for (const complexd& c : r.witness) peak = std::max(peak, std::abs(c));
  CHECK(peak == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.best_ratio > 0.0);
  CHECK(r.err_total == doctest::Approx(r.err_truncation + r.err_quadrature)
                           .epsilon(1e-12));
}

}  // TEST_SUITE
