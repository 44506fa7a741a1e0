#include "qclab/qdiff.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "qclab/parallel.hpp"

namespace qclab {

namespace {

constexpr int kKernelMaxDegree = 16;
constexpr int kKernelMaxPhi = 8;

/// Kahan sum of x[i] (times w[i] for the dot variant) over i in index order,
/// skipping the sorted positions in `skip`: domain integrals count interior
/// cells only, so tiles of distinct words cannot double-count wall cells.
double kahan_sum_excluding(const double* x, std::size_t n,
                           const std::vector<std::uint32_t>& skip) {
  double sum = 0.0, comp = 0.0;
  std::size_t si = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (si < skip.size() && skip[si] == i) {
      ++si;
      continue;
    }
    double y = x[i] - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double kahan_dot_excluding(const std::vector<double>& x,
                           const std::vector<double>& w,
                           const std::vector<std::uint32_t>& skip) {
  double sum = 0.0, comp = 0.0;
  std::size_t si = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (si < skip.size() && skip[si] == i) {
      ++si;
      continue;
    }
    double y = x[i] * w[i] - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double kahan_dot(const std::vector<double>& x, const std::vector<double>& w) {
  double s = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double y = x[i] * w[i] - comp;
    double t = s + y;
    comp = (t - s) - y;
    s = t;
  }
  return s;
}

/// Coefficients in SoA form, zero-padded to a fixed degree.
struct PolySoA {
  std::vector<double> cr, ci;
  int degree;

  PolySoA(const std::vector<complexd>& c, int pad_degree)
      : cr(pad_degree + 1, 0.0), ci(pad_degree + 1, 0.0), degree(pad_degree) {
    for (std::size_t k = 0; k < c.size(); ++k) {
      cr[k] = c[k].real();
      ci[k] = c[k].imag();
    }
  }
  kernels::Poly view() const { return {cr.data(), ci.data(), degree}; }
};

/// One shell of words as disk-map coefficients.
struct WordSoA {
  std::vector<double> ar, ai, br, bi;

  WordSoA(const WordList& wl, std::size_t begin, std::size_t end) {
    ar.reserve(end - begin);
    ai.reserve(end - begin);
    br.reserve(end - begin);
    bi.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      DiskCoeffs g = to_disk(wl.words[i].matrix);
      ar.push_back(g.alpha.real());
      ai.push_back(g.alpha.imag());
      br.push_back(g.beta.real());
      bi.push_back(g.beta.imag());
    }
  }
  kernels::Words view() const {
    return {ar.data(), ai.data(), br.data(), bi.data(), ar.size()};
  }
};

/// Monomial tables t_k = z^k over a set of cells (identity-word pullback,
/// so the power chain matches the kernels' arithmetic exactly).
struct BasisTables {
  std::vector<std::vector<double>> re, im;
  std::vector<double*> re_p, im_p;

  BasisTables(int degree, std::size_t n)
      : re(degree + 1, std::vector<double>(n, 0.0)),
        im(degree + 1, std::vector<double>(n, 0.0)) {
    for (auto& v : re) re_p.push_back(v.data());
    for (auto& v : im) im_p.push_back(v.data());
  }
};

void build_monomial_tables(const kernels::KernelSet& kern,
                           const kernels::Cells& cells, int degree,
                           int threads, BasisTables& out) {
  std::vector<std::vector<double>> abs_scratch(
      degree + 1, std::vector<double>(cells.n, 0.0));
  std::vector<double*> abs_p;
  for (auto& v : abs_scratch) abs_p.push_back(v.data());
  const double one = 1.0, zero = 0.0;
  kernels::Words id{&one, &zero, &zero, &zero, 1};
  parallel_for(cells.n, threads, [&](std::size_t lo, std::size_t hi) {
    kern.accumulate_basis(cells, id, degree, out.re_p.data(), out.im_p.data(),
                          abs_p.data(), lo, hi);
  });
}

double l1_core(const kernels::KernelSet& kern, const BasisTables& mono,
               const PolySoA& phi, const std::vector<double>& weights,
               int threads, std::vector<double>& scratch) {
  std::size_t n = weights.size();
  parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
    kern.weighted_abs(mono.re_p.data(), mono.im_p.data(), phi.degree,
                      phi.cr.data(), phi.ci.data(), weights.data(), lo, hi,
                      scratch.data());
  });
  return kahan_sum(scratch.data(), n);
}

}  // namespace

QuadraticDifferential::QuadraticDifferential(std::vector<complexd> coeffs)
    : c_(std::move(coeffs)) {
  if (c_.empty()) c_.push_back(complexd(0.0, 0.0));
  for (const complexd& c : c_) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw std::invalid_argument(
          "QuadraticDifferential: coefficients must be finite");
    }
  }
  while (c_.size() > 1 && c_.back() == complexd(0.0, 0.0)) c_.pop_back();
}

QuadraticDifferential QuadraticDifferential::monomial(int k, complexd c) {
  if (k < 0) throw std::invalid_argument("monomial: k must be >= 0");
  std::vector<complexd> v(k + 1, complexd(0.0, 0.0));
  v[k] = c;
  return QuadraticDifferential(std::move(v));
}

QuadraticDifferential QuadraticDifferential::parse(const std::string& text) {
  if (text == "1") return monomial(0);
  if (text == "z") return monomial(1);
  if (text.size() == 2 && text[0] == 'z' && text[1] >= '0' && text[1] <= '9') {
    return monomial(text[1] - '0');
  }
  throw std::invalid_argument("QuadraticDifferential::parse: expected 1, z, "
                              "or z<digit>, got '" +
                              text + "'");
}

bool QuadraticDifferential::is_zero() const {
  for (const complexd& c : c_) {
    if (c != complexd(0.0, 0.0)) return false;
  }
  return true;
}

complexd QuadraticDifferential::coeff(int k) const {
  if (k < 0 || k >= static_cast<int>(c_.size())) return complexd(0.0, 0.0);
  return c_[k];
}

complexd QuadraticDifferential::eval(complexd z) const {
  complexd p = c_.back();
  for (int k = static_cast<int>(c_.size()) - 2; k >= 0; --k) {
    p = p * z + c_[k];
  }
  return p;
}

QuadraticDifferential QuadraticDifferential::scaled(complexd factor) const {
  std::vector<complexd> v = c_;
  for (complexd& c : v) c *= factor;
  return QuadraticDifferential(std::move(v));
}

complexd pullback_eval(const DiskCoeffs& map, const QuadraticDifferential& phi,
                       complexd z) {
  complexd d = map.derivative(z);
  return phi.eval(map.apply(z)) * d * d;
}

complexd theta_truncated_eval(const FuchsianGroup& g,
                              const QuadraticDifferential& phi, int max_len,
                              complexd z, std::size_t budget) {
  WordList wl = enumerate_words(g, max_len, budget);
  double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0;
  for (const GroupWord& w : wl.words) {
    complexd term = pullback_eval(to_disk(w.matrix), phi, z);
    double yr = term.real() - cr;
    double tr = sr + yr;
    cr = (tr - sr) - yr;
    sr = tr;
    double yi = term.imag() - ci;
    double ti = si + yi;
    ci = (ti - si) - yi;
    si = ti;
  }
  return complexd(sr, si);
}

L1Norm l1_norm_disk(const QuadraticDifferential& phi,
                    const QuadratureSpec& grid, kernels::Kind kernel,
                    int threads) {
  const kernels::KernelSet& kern = kernels::select(kernel);
  int deg = phi.degree();
  if (deg > kKernelMaxDegree) {
    throw std::invalid_argument("l1_norm_disk: degree too large");
  }
  PolySoA soa(phi.coeffs(), deg);
  L1Norm out;
  {
    DiskGrid fine = DiskGrid::build(grid);
    BasisTables mono(deg, fine.size());
    kernels::Cells cells{fine.zr.data(), fine.zi.data(), fine.size()};
    build_monomial_tables(kern, cells, deg, threads, mono);
    std::vector<double> scratch(fine.size());
    out.core = l1_core(kern, mono, soa, fine.w, threads, scratch);
  }
  {
    DiskGrid half = DiskGrid::build(grid.half());
    BasisTables mono(deg, half.size());
    kernels::Cells cells{half.zr.data(), half.zi.data(), half.size()};
    build_monomial_tables(kern, cells, deg, threads, mono);
    std::vector<double> scratch(half.size());
    double half_core = l1_core(kern, mono, soa, half.w, threads, scratch);
    out.refine_delta = std::abs(out.core - half_core);
  }
  out.annulus_bound = annulus_l1_bound(phi.coeffs(), grid.rho_cutoff);
  return out;
}

ThetaAccumulation accumulate_theta(const FuchsianGroup& g,
                                   const std::vector<QuadraticDifferential>& phis,
                                   const ThetaOptions& opt) {
  if (phis.empty()) {
    throw std::invalid_argument("accumulate_theta: need at least one phi");
  }
  if (static_cast<int>(phis.size()) > kKernelMaxPhi) {
    throw std::invalid_argument("accumulate_theta: too many phis");
  }
  int maxdeg = 0;
  for (const auto& phi : phis) {
    if (phi.is_zero()) {
      throw std::invalid_argument("accumulate_theta: phi must be nonzero");
    }
    if (phi.degree() > kKernelMaxDegree) {
      throw std::invalid_argument("accumulate_theta: degree too large");
    }
    maxdeg = std::max(maxdeg, phi.degree());
  }
  const kernels::KernelSet& kern = kernels::select(opt.kernel);
  int n_phi = static_cast<int>(phis.size());

  DiskGrid fine = DiskGrid::build(opt.grid);
  DomainGrid dom = DomainGrid::build(fine, g);
  kernels::Cells full_cells{fine.zr.data(), fine.zi.data(), fine.size()};
  kernels::Cells dom_cells{dom.zr.data(), dom.zi.data(), dom.size()};

  // ||phi|| over the disk: fine core + half-grid delta + annulus bound.
  BasisTables mono(maxdeg, fine.size());
  build_monomial_tables(kern, full_cells, maxdeg, opt.threads, mono);
  DiskGrid halfg = DiskGrid::build(opt.grid.half());
  BasisTables mono_half(maxdeg, halfg.size());
  kernels::Cells half_cells{halfg.zr.data(), halfg.zi.data(), halfg.size()};
  build_monomial_tables(kern, half_cells, maxdeg, opt.threads, mono_half);

  std::vector<PolySoA> soa;
  soa.reserve(phis.size());
  for (const auto& phi : phis) soa.emplace_back(phi.coeffs(), maxdeg);

  ThetaAccumulation out;
  out.kernel_name = kern.name;
  std::vector<double> scratch_full(fine.size());
  std::vector<double> scratch_half(halfg.size());
  for (int f = 0; f < n_phi; ++f) {
    L1Norm l1;
    l1.core = l1_core(kern, mono, soa[f], fine.w, opt.threads, scratch_full);
    double hc =
        l1_core(kern, mono_half, soa[f], halfg.w, opt.threads, scratch_half);
    l1.refine_delta = std::abs(l1.core - hc);
    l1.annulus_bound =
        annulus_l1_bound(phis[f].coeffs(), opt.grid.rho_cutoff);
    out.l1.push_back(l1);
  }

  int target = opt.explicit_shells >= 0 ? opt.explicit_shells : opt.max_shells;
  bool budget_hit = false;
  WordList wl = enumerate_complete_shells(g, target, opt.word_budget,
                                          budget_hit);
  if (opt.explicit_shells >= 0 && wl.max_length() < opt.explicit_shells) {
    throw budget_error(
        "accumulate_theta: word budget too small for requested shell count",
        wl.words.size());
  }

  std::size_t nd = dom.size();
  std::vector<std::vector<double>> acc_re(n_phi, std::vector<double>(nd, 0.0));
  std::vector<std::vector<double>> acc_im(n_phi, std::vector<double>(nd, 0.0));
  std::vector<std::vector<double>> abs_buf(n_phi, std::vector<double>(nd));
  std::vector<double*> acc_re_p, acc_im_p, abs_p;
  for (auto& v : acc_re) acc_re_p.push_back(v.data());
  for (auto& v : acc_im) acc_im_p.push_back(v.data());
  for (auto& v : abs_buf) abs_p.push_back(v.data());
  std::vector<kernels::Poly> polys;
  for (const auto& s : soa) polys.push_back(s.view());
  std::vector<double> scratch_dom(nd);

  const double one = 1.0, zero = 0.0;
  bool stopped_by_rule = false;
  for (int n = 0; n <= wl.max_length(); ++n) {
    WordSoA shell(wl, wl.shell_begin[n], wl.shell_begin[n + 1]);
    kernels::Words words = shell.view();
    for (auto& v : abs_buf) std::fill(v.begin(), v.end(), 0.0);
    if (words.n > 0) {
      parallel_for(nd, opt.threads, [&](std::size_t lo, std::size_t hi) {
        kern.accumulate_phi(dom_cells, words, polys.data(), n_phi,
                            acc_re_p.data(), acc_im_p.data(), abs_p.data(), lo,
                            hi);
      });
    }
    ShellReport rep;
    rep.n = n;
    rep.words = words.n;
    for (int f = 0; f < n_phi; ++f) {
      double mass = kahan_dot_excluding(abs_buf[f], dom.w, dom.straddle_in);
      rep.mass.push_back(mass);
      double prev = out.shells.empty() ? 0.0 : out.shells.back().unfolded[f];
      rep.unfolded.push_back(prev + mass);
      const double* t1[1] = {acc_re_p[f]};
      const double* t2[1] = {acc_im_p[f]};
      parallel_for(nd, opt.threads, [&](std::size_t lo, std::size_t hi) {
        kern.weighted_abs(t1, t2, 0, &one, &zero, dom.w.data(), lo, hi,
                          scratch_dom.data());
      });
      rep.quotient.push_back(
          kahan_sum_excluding(scratch_dom.data(), nd, dom.straddle_in));
    }
    out.words_used += words.n;
    out.shells_done = n;
    out.shells.push_back(std::move(rep));
    if (opt.explicit_shells < 0 && n >= 1) {
      bool settled = true;
      for (int f = 0; f < n_phi; ++f) {
        if (out.shells.back().mass[f] >
            opt.shell_rel_threshold * out.l1[f].value()) {
          settled = false;
          break;
        }
      }
      if (settled) {
        stopped_by_rule = true;
        break;
      }
    }
  }
  if (opt.explicit_shells >= 0) {
    out.stop_reason = "explicit";
  } else if (stopped_by_rule) {
    out.stop_reason = "rule";
  } else {
    out.stop_reason = budget_hit ? "word-budget" : "max-shells";
  }

  // Boundary exposure: |Theta phi| over included straddle cells plus |phi|
  // over excluded straddle cells.
  out.domain_cells = dom.size();
  out.straddle_in_cells = dom.straddle_in.size();
  out.straddle_out_cells = dom.straddle_out.size();
  for (int f = 0; f < n_phi; ++f) {
    const double* t1[1] = {acc_re_p[f]};
    const double* t2[1] = {acc_im_p[f]};
    parallel_for(nd, opt.threads, [&](std::size_t lo, std::size_t hi) {
      kern.weighted_abs(t1, t2, 0, &one, &zero, dom.w.data(), lo, hi,
                        scratch_dom.data());
    });
    double mass = kahan_sum_at(scratch_dom, dom.straddle_in);
    parallel_for(fine.size(), opt.threads, [&](std::size_t lo, std::size_t hi) {
      kern.weighted_abs(mono.re_p.data(), mono.im_p.data(), soa[f].degree,
                        soa[f].cr.data(), soa[f].ci.data(), fine.w.data(), lo,
                        hi, scratch_full.data());
    });
    mass += kahan_sum_at(scratch_full, dom.straddle_out);
    out.straddle_mass.push_back(mass);
  }
  return out;
}

ThetaRatioResult theta_ratio(const FuchsianGroup& g,
                             const QuadraticDifferential& phi,
                             const ThetaOptions& opt) {
  if (phi.is_zero()) {
    throw std::invalid_argument("theta_ratio: phi must be nonzero");
  }
  ThetaAccumulation fine = accumulate_theta(g, {phi}, opt);
  ThetaOptions half_opt = opt;
  half_opt.grid = opt.grid.half();
  half_opt.explicit_shells = fine.shells_done;
  ThetaAccumulation half = accumulate_theta(g, {phi}, half_opt);

  ThetaRatioResult r;
  r.quotient = fine.quotient(0);
  r.l1_core = fine.l1[0].core;
  r.l1_value = fine.l1[0].value();
  r.ratio = r.quotient / r.l1_core;
  r.ratio_half = half.quotient(0) / half.l1[0].core;
  r.shells_used = fine.shells_done;
  r.words_used = fine.words_used;
  r.stop_reason = fine.stop_reason;
  r.kernel_name = fine.kernel_name;
  r.straddle_mass = fine.straddle_mass[0];
  r.annulus_bound = fine.l1[0].annulus_bound;
  // Rank-0 groups are exhausted after shell 0; otherwise charge the last
  // shell's mass as the truncation error.
  r.err_truncation =
      (g.rank() == 0) ? 0.0 : fine.shells.back().mass[0] / r.l1_core;
  // Annulus tails afflict numerator (via unfolding) and denominator alike.
  r.err_quadrature = std::abs(r.ratio - r.ratio_half) +
                     r.straddle_mass / r.l1_core +
                     2.0 * r.annulus_bound / r.l1_core;
  r.err_total = r.err_truncation + r.err_quadrature;
  r.shells = fine.shells;
  return r;
}

namespace {

/// Basis pullback tables over the domain cells, accumulated shell by shell
/// with the same stopping logic as accumulate_theta, using the exact
/// monomial norms as the relative scale.
struct DomainBasis {
  BasisTables t;
  std::vector<std::vector<double>> shell_mass;  // [shell][k]
  int shells_done = 0;
  std::size_t words_used = 0;
  std::string stop_reason;

  DomainBasis(int degree, std::size_t n) : t(degree, n) {}
};

DomainBasis accumulate_basis_shells(const kernels::KernelSet& kern,
                                    const FuchsianGroup& g,
                                    const DomainGrid& dom, int degree,
                                    int explicit_shells, int max_shells,
                                    std::size_t word_budget,
                                    double shell_rel_threshold, int threads) {
  DomainBasis out(degree, dom.size());
  int target = explicit_shells >= 0 ? explicit_shells : max_shells;
  bool budget_hit = false;
  WordList wl = enumerate_complete_shells(g, target, word_budget, budget_hit);
  if (explicit_shells >= 0 && wl.max_length() < explicit_shells) {
    throw budget_error(
        "estimate_theta_norm: word budget too small for requested shells",
        wl.words.size());
  }
  kernels::Cells cells{dom.zr.data(), dom.zi.data(), dom.size()};
  std::vector<std::vector<double>> abs_buf(degree + 1,
                                           std::vector<double>(dom.size()));
  std::vector<double*> abs_p;
  for (auto& v : abs_buf) abs_p.push_back(v.data());
  bool stopped_by_rule = false;
  for (int n = 0; n <= wl.max_length(); ++n) {
    WordSoA shell(wl, wl.shell_begin[n], wl.shell_begin[n + 1]);
    kernels::Words words = shell.view();
    for (auto& v : abs_buf) std::fill(v.begin(), v.end(), 0.0);
    if (words.n > 0) {
      parallel_for(dom.size(), threads, [&](std::size_t lo, std::size_t hi) {
        kern.accumulate_basis(cells, words, degree, out.t.re_p.data(),
                              out.t.im_p.data(), abs_p.data(), lo, hi);
      });
    }
    std::vector<double> masses(degree + 1);
    for (int k = 0; k <= degree; ++k) {
      masses[k] = kahan_dot_excluding(abs_buf[k], dom.w, dom.straddle_in);
    }
    out.shell_mass.push_back(std::move(masses));
    out.words_used += words.n;
    out.shells_done = n;
    if (explicit_shells < 0 && n >= 1) {
      bool settled = true;
      for (int k = 0; k <= degree; ++k) {
        if (out.shell_mass.back()[k] >
            shell_rel_threshold * monomial_l1_exact(k)) {
          settled = false;
          break;
        }
      }
      if (settled) {
        stopped_by_rule = true;
        break;
      }
    }
  }
  if (explicit_shells >= 0) {
    out.stop_reason = "explicit";
  } else if (stopped_by_rule) {
    out.stop_reason = "rule";
  } else {
    out.stop_reason = budget_hit ? "word-budget" : "max-shells";
  }
  return out;
}

}  // namespace

NormEstimateResult estimate_theta_norm(const FuchsianGroup& g,
                                       const NormEstimateOptions& opt) {
  if (opt.max_degree < 0 || opt.max_degree > kKernelMaxDegree) {
    throw std::invalid_argument("estimate_theta_norm: bad max_degree");
  }
  if (opt.restarts < 1) {
    throw std::invalid_argument("estimate_theta_norm: restarts >= 1");
  }
  const kernels::KernelSet& kern = kernels::select(opt.kernel);
  int deg = opt.max_degree;

  DiskGrid fine = DiskGrid::build(opt.grid);
  DomainGrid dom = DomainGrid::build(fine, g);
  DiskGrid halfg = DiskGrid::build(opt.grid.half());
  DomainGrid dom_half = DomainGrid::build(halfg, g);

  DomainBasis basis = accumulate_basis_shells(
      kern, g, dom, deg, -1, opt.max_shells, opt.word_budget,
      opt.shell_rel_threshold, opt.threads);
  DomainBasis basis_half = accumulate_basis_shells(
      kern, g, dom_half, deg, basis.shells_done, opt.max_shells,
      opt.word_budget, opt.shell_rel_threshold, opt.threads);

  BasisTables mono(deg, fine.size());
  kernels::Cells full_cells{fine.zr.data(), fine.zi.data(), fine.size()};
  build_monomial_tables(kern, full_cells, deg, opt.threads, mono);
  BasisTables mono_half(deg, halfg.size());
  kernels::Cells half_cells{halfg.zr.data(), halfg.zi.data(), halfg.size()};
  build_monomial_tables(kern, half_cells, deg, opt.threads, mono_half);

  std::vector<double> num_buf(dom.size());
  std::vector<double> den_buf(fine.size());
  std::vector<double> num_half_buf(dom_half.size());
  std::vector<double> den_half_buf(halfg.size());
  std::size_t evals = 0;

  auto ratio_on = [&](const std::vector<complexd>& c, const BasisTables& tdom,
                      const DomainGrid& dg, const BasisTables& tmono,
                      const DiskGrid& grid, std::vector<double>& nbuf,
                      std::vector<double>& dbuf) -> double {
    PolySoA soa(c, deg);
    parallel_for(dg.size(), opt.threads, [&](std::size_t lo, std::size_t hi) {
      kern.weighted_abs(tdom.re_p.data(), tdom.im_p.data(), deg,
                        soa.cr.data(), soa.ci.data(), dg.w.data(), lo, hi,
                        nbuf.data());
    });
    double num = kahan_sum_excluding(nbuf.data(), dg.size(), dg.straddle_in);
    parallel_for(grid.size(), opt.threads,
                 [&](std::size_t lo, std::size_t hi) {
                   kern.weighted_abs(tmono.re_p.data(), tmono.im_p.data(), deg,
                                     soa.cr.data(), soa.ci.data(),
                                     grid.w.data(), lo, hi, dbuf.data());
                 });
    double den = kahan_sum(dbuf.data(), grid.size());
    if (!(den > 1e-300)) return -1.0;
    return num / den;
  };
  auto ratio_fine = [&](const std::vector<complexd>& c) -> double {
    ++evals;
    return ratio_on(c, basis.t, dom, mono, fine, num_buf, den_buf);
  };

  const double deltas[3] = {0.5, 0.2, 0.08};
  double best = -1.0;
  std::vector<complexd> best_c;
  int best_restart = -1;
  for (int r = 0; r < opt.restarts; ++r) {
    std::vector<complexd> c(deg + 1, complexd(0.0, 0.0));
    if (r <= deg) {
      c[r] = complexd(1.0, 0.0);
    } else {
      std::mt19937_64 eng(opt.seed * 1000003ULL +
                          static_cast<std::uint64_t>(r));
      std::normal_distribution<double> gauss(0.0, 1.0);
      for (int k = 0; k <= deg; ++k) {
        double re = gauss(eng);
        double im = gauss(eng);
        c[k] = complexd(re, im);
      }
    }
    double cur = ratio_fine(c);
    for (int s = 0; s < opt.sweeps; ++s) {
      double delta = deltas[std::min(s, 2)];
      for (int extra = 3; extra <= s; ++extra) delta *= 0.4;
      for (int k = 0; k <= deg; ++k) {
        const complexd dirs[4] = {complexd(delta, 0.0), complexd(-delta, 0.0),
                                  complexd(0.0, delta), complexd(0.0, -delta)};
        for (const complexd& dir : dirs) {
          std::vector<complexd> c2 = c;
          c2[k] += dir;
          double v = ratio_fine(c2);
          if (v > cur) {
            cur = v;
            c = std::move(c2);
          }
        }
      }
    }
    if (cur > best) {
      best = cur;
      best_c = c;
      best_restart = r;
    }
  }

  // Scale the witness so its largest coefficient is 1 (the ratio is
  // invariant under scaling), then report numbers for the scaled witness.
  int kmax = 0;
  for (int k = 0; k <= deg; ++k) {
    if (std::abs(best_c[k]) > std::abs(best_c[kmax])) kmax = k;
  }
  if (std::abs(best_c[kmax]) > 0.0) {
    complexd scale = best_c[kmax];
    for (auto& ck : best_c) ck /= scale;
  }

  NormEstimateResult res;
  res.best_ratio = ratio_fine(best_c);
  res.witness = best_c;
  res.best_restart = best_restart;
  res.shells_used = basis.shells_done;
  res.words_used = basis.words_used;
  res.stop_reason = basis.stop_reason;
  res.kernel_name = kern.name;

  double ratio_half = ratio_on(best_c, basis_half.t, dom_half, mono_half,
                               halfg, num_half_buf, den_half_buf);
  res.evaluations = evals;

  double den_core = kahan_sum(den_buf.data(), fine.size());
  double annulus = annulus_l1_bound(best_c, opt.grid.rho_cutoff);
  double trunc = 0.0;
  if (g.rank() > 0) {
    const std::vector<double>& last = basis.shell_mass.back();
    for (int k = 0; k <= deg; ++k) trunc += std::abs(best_c[k]) * last[k];
    trunc /= den_core;
  }
  double straddle = kahan_sum_at(num_buf, dom.straddle_in) +
                    kahan_sum_at(den_buf, dom.straddle_out);
  res.err_truncation = trunc;
  res.err_quadrature = std::abs(res.best_ratio - ratio_half) +
                       straddle / den_core + 2.0 * annulus / den_core;
  res.err_total = res.err_truncation + res.err_quadrature;
  return res;
}

}  // namespace qclab
