#include "qclab/covergraph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace qclab {

namespace {

std::string format_vector(const std::vector<long long>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  s += ")";
  return s;
}

std::vector<long long> parse_vector(const std::string& label, std::size_t dim) {
  if (label.size() < 2 || label.front() != '(' || label.back() != ')')
    throw std::invalid_argument("bad coset label: " + label);
  std::vector<long long> v;
  v.reserve(dim);
  std::stringstream ss(label.substr(1, label.size() - 2));
  std::string part;
  while (std::getline(ss, part, ',')) v.push_back(std::stoll(part));
  if (v.size() != dim)
    throw std::invalid_argument("bad coset label: " + label);
  return v;
}

long long mod_floor(long long x, long long n) {
  long long r = x % n;
  return r < 0 ? r + n : r;
}

}  // namespace

CoverGraph CoverGraph::line() {
  CoverGraph g;
  g.root_ = "0";
  g.family_ = "line";
  g.degree_ = 2;
  g.raw_ = [](const std::string& v) {
    long long n = std::stoll(v);
    return std::vector<std::string>{std::to_string(n - 1),
                                    std::to_string(n + 1)};
  };
  return g;
}

CoverGraph CoverGraph::regular_tree(int degree) {
  if (degree < 2 || degree > 10)
    throw std::invalid_argument("tree degree must be in [2,10]");
  CoverGraph g;
  g.root_ = "";
  g.family_ = "tree";
  g.degree_ = degree;
  g.raw_ = [degree](const std::string& v) {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(degree));
    for (int c = 0; c < degree; ++c) {
      char ch = static_cast<char>('0' + c);
      if (!v.empty() && v.back() == ch) {
        out.push_back(v.substr(0, v.size() - 1));
      } else {
        out.push_back(v + ch);
      }
    }
    return out;
  };
  return g;
}

CoverGraph CoverGraph::cayley_free(int rank) {
  if (rank < 1 || rank > 26)
    throw std::invalid_argument("free rank must be in [1,26]");
  CoverGraph g;
  g.root_ = "";
  g.family_ = "cayley";
  g.degree_ = 2 * rank;
  g.raw_ = [rank](const std::string& v) {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(2 * rank));
    for (int i = 0; i < 2 * rank; ++i) {
      char ch = (i % 2 == 0) ? static_cast<char>('a' + i / 2)
                             : static_cast<char>('A' + i / 2);
      char inv = (i % 2 == 0) ? static_cast<char>('A' + i / 2)
                              : static_cast<char>('a' + i / 2);
      if (!v.empty() && v.back() == inv) {
        out.push_back(v.substr(0, v.size() - 1));
      } else {
        out.push_back(v + ch);
      }
    }
    return out;
  };
  return g;
}

CoverGraph CoverGraph::schreier(int rank,
                                std::vector<std::vector<long long>> images,
                                std::optional<long long> mod) {
  if (rank < 1) throw std::invalid_argument("schreier rank must be >= 1");
  if (static_cast<int>(images.size()) != rank)
    throw std::invalid_argument("need one image vector per generator");
  if (images[0].empty()) throw std::invalid_argument("image dimension is 0");
  const std::size_t dim = images[0].size();
  for (const auto& im : images)
    if (im.size() != dim)
      throw std::invalid_argument("image vectors must share one dimension");
  if (mod && *mod < 1) throw std::invalid_argument("mod must be >= 1");

  CoverGraph g;
  g.family_ = "schreier";
  g.degree_ = 2 * rank;
  g.root_ = format_vector(std::vector<long long>(dim, 0));
  g.raw_ = [images = std::move(images), mod, dim](const std::string& v) {
    std::vector<long long> x = parse_vector(v, dim);
    std::vector<std::string> out;
    out.reserve(2 * images.size());
    for (const auto& im : images) {
      for (int sign : {+1, -1}) {
        std::vector<long long> y(dim);
        for (std::size_t j = 0; j < dim; ++j) {
          y[j] = x[j] + sign * im[j];
          if (mod) y[j] = mod_floor(y[j], *mod);
        }
        out.push_back(format_vector(y));
      }
    }
    return out;
  };
  return g;
}

std::vector<std::string> CoverGraph::neighbors(const std::string& v,
                                               EdgeStats* stats) const {
  std::vector<std::string> raw = raw_(v);
  std::vector<std::string> out;
  out.reserve(raw.size());
  std::size_t loops = 0;
  for (auto& w : raw) {
    if (w == v) {
      ++loops;
    } else {
      out.push_back(std::move(w));
    }
  }
  std::sort(out.begin(), out.end());
  auto last = std::unique(out.begin(), out.end());
  std::size_t collapsed = static_cast<std::size_t>(out.end() - last);
  out.erase(last, out.end());
  if (stats) {
    stats->loops_dropped += loops;
    stats->multi_collapsed += collapsed;
  }
  return out;
}

BallResult ball(const CoverGraph& g, int radius, std::size_t node_budget) {
  if (radius < 0) throw std::invalid_argument("ball radius must be >= 0");
  BallResult b;
  b.order.push_back(g.root());
  b.dist[g.root()] = 0;
  b.layer_begin = {0, 1};
  if (b.order.size() > node_budget)
    throw budget_error("node budget exhausted at radius 0", b.order.size());

  for (int n = 1; n <= radius; ++n) {
    std::size_t lo = b.layer_begin[n - 1];
    std::size_t hi = b.layer_begin[n];
    std::vector<std::string> next;
    for (std::size_t i = lo; i < hi; ++i) {
      for (auto& w : g.neighbors(b.order[i], &b.stats)) {
        if (!b.dist.count(w)) next.push_back(std::move(w));
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    if (b.order.size() + next.size() > node_budget)
      throw budget_error("node budget exhausted at radius " +
                             std::to_string(n),
                         b.order.size());
    for (auto& w : next) {
      b.dist[w] = n;
      b.order.push_back(std::move(w));
    }
    b.layer_begin.push_back(b.order.size());
    if (b.layer_size(n) == 0) {
      // Finite graph exhausted: remaining layers are empty.
      while (static_cast<int>(b.layer_begin.size()) <= radius + 1)
        b.layer_begin.push_back(b.order.size());
      break;
    }
  }
  return b;
}

std::vector<std::string> vertex_boundary(const CoverGraph& g,
                                         const std::vector<std::string>& subset) {
  std::unordered_set<std::string> in(subset.begin(), subset.end());
  std::vector<std::string> out;
  for (const auto& v : in) {
    for (auto& w : g.neighbors(v)) {
      if (!in.count(w)) out.push_back(std::move(w));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<FolnerRow> folner_profile(const CoverGraph& g, int radius,
                                      std::size_t node_budget) {
  if (radius < 0) throw std::invalid_argument("profile radius must be >= 0");
  BallResult b = ball(g, radius + 1, node_budget);
  std::vector<FolnerRow> rows;
  rows.reserve(static_cast<std::size_t>(radius) + 1);
  for (int n = 0; n <= radius; ++n) {
    FolnerRow r;
    r.n = n;
    r.ball_size = b.layer_begin[n + 1];
    r.boundary_size = b.layer_size(n + 1);
    r.ratio = static_cast<double>(r.boundary_size) /
              static_cast<double>(r.ball_size);
    rows.push_back(r);
  }
  return rows;
}

namespace {

struct ExpansionSearch {
  std::vector<std::uint64_t> adj;            // in-ball adjacency, index > vmin masked later
  std::vector<std::vector<int>> nbr_ids;     // global ids, ball ids < ball size
  std::vector<int> stamp;
  int clock = 0;
  int max_size = 0;
  std::size_t cap = 0;
  std::size_t enumerated = 0;
  bool cap_hit = false;
  long long best_boundary = 0;
  long long best_size = 0;
  std::uint64_t best_mask = 0;
  int ball_count = 0;

  long long boundary_of(std::uint64_t mask) {
    ++clock;
    long long count = 0;
    for (std::uint64_t m = mask; m;) {
      int v = std::countr_zero(m);
      m &= m - 1;
      for (int id : nbr_ids[static_cast<std::size_t>(v)]) {
        if (id < ball_count && (mask >> id & 1)) continue;
        if (stamp[static_cast<std::size_t>(id)] == clock) continue;
        stamp[static_cast<std::size_t>(id)] = clock;
        ++count;
      }
    }
    return count;
  }

  void report(std::uint64_t mask) {
    ++enumerated;
    long long b = boundary_of(mask);
    long long s = std::popcount(mask);
    if (best_size == 0 || b * best_size < best_boundary * s) {
      best_boundary = b;
      best_size = s;
      best_mask = mask;
    }
  }

  // Each connected subset with minimum element vmin is visited exactly once:
  // ext holds candidate extensions, forb the candidates already branched on.
  bool extend(std::uint64_t mask, std::uint64_t ext, std::uint64_t forb,
              std::uint64_t allowed) {
    if (enumerated >= cap) {
      cap_hit = true;
      return false;
    }
    report(mask);
    if (std::popcount(mask) >= max_size) return true;
    while (ext) {
      int u = std::countr_zero(ext);
      std::uint64_t ubit = 1ull << u;
      ext &= ext - 1;
      std::uint64_t grown =
          ext | (adj[static_cast<std::size_t>(u)] & allowed & ~mask & ~forb &
                 ~ext & ~ubit);
      if (!extend(mask | ubit, grown, forb, allowed)) return false;
      forb |= ubit;
    }
    return true;
  }
};

}  // namespace

ExpansionResult expansion_exact(const CoverGraph& g, int ball_radius,
                                int max_subset_size, std::size_t enum_cap) {
  if (max_subset_size < 1)
    throw std::invalid_argument("max subset size must be >= 1");
  if (enum_cap < 1) throw std::invalid_argument("enum cap must be >= 1");
  BallResult b = ball(g, ball_radius);
  const int m = static_cast<int>(b.order.size());
  if (m > 64)
    throw std::invalid_argument(
        "search ball has " + std::to_string(m) +
        " vertices; exact expansion supports at most 64");

  std::unordered_map<std::string, int> id;
  for (int i = 0; i < m; ++i) id[b.order[i]] = i;
  int next_id = m;

  ExpansionSearch search;
  search.ball_count = m;
  search.max_size = std::min(max_subset_size, m);
  search.cap = enum_cap;
  search.adj.assign(static_cast<std::size_t>(m), 0);
  search.nbr_ids.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    for (const auto& w : g.neighbors(b.order[i])) {
      auto it = id.find(w);
      int wid;
      if (it != id.end()) {
        wid = it->second;
      } else {
        wid = next_id++;
        id[w] = wid;
      }
      search.nbr_ids[static_cast<std::size_t>(i)].push_back(wid);
      if (wid < m) search.adj[static_cast<std::size_t>(i)] |= 1ull << wid;
    }
  }
  search.stamp.assign(static_cast<std::size_t>(next_id), 0);

  for (int v = 0; v < m && !search.cap_hit; ++v) {
    std::uint64_t allowed = (v + 1 >= 64) ? 0 : (~0ull << (v + 1));
    std::uint64_t vbit = 1ull << v;
    if (!search.extend(vbit, search.adj[static_cast<std::size_t>(v)] & allowed,
                       0, allowed))
      break;
  }

  ExpansionResult r;
  r.boundary = search.best_boundary;
  r.size = search.best_size;
  r.value = static_cast<double>(r.boundary) / static_cast<double>(r.size);
  for (int i = 0; i < m; ++i)
    if (search.best_mask >> i & 1) r.witness.push_back(b.order[i]);
  std::sort(r.witness.begin(), r.witness.end());
  r.subsets_enumerated = search.enumerated;
  r.cap_hit = search.cap_hit;
  return r;
}

AmenabilityReport classify_amenability(const std::vector<FolnerRow>& profile,
                                       int window) {
  if (window < 3) throw std::invalid_argument("fit window must be >= 3");
  std::vector<const FolnerRow*> rows;
  for (const auto& r : profile)
    if (r.n >= 1) rows.push_back(&r);
  if (static_cast<int>(rows.size()) < 3)
    throw std::invalid_argument("need at least 3 profile rows with n >= 1");
  if (static_cast<int>(rows.size()) > window)
    rows.erase(rows.begin(), rows.end() - window);

  // Normal equations for ratio ~ a + b/n + c/n^2.
  long double s[5] = {0, 0, 0, 0, 0};  // sums of n^{-k}, k = 0..4
  long double t[3] = {0, 0, 0};        // sums of ratio * n^{-k}
  for (const auto* r : rows) {
    long double inv = 1.0L / static_cast<long double>(r->n);
    long double p = 1.0L;
    for (int k = 0; k <= 4; ++k, p *= inv) s[k] += p;
    long double y = static_cast<long double>(r->ratio);
    t[0] += y;
    t[1] += y * inv;
    t[2] += y * inv * inv;
  }
  long double M[3][3] = {{s[0], s[1], s[2]}, {s[1], s[2], s[3]},
                         {s[2], s[3], s[4]}};
  auto det3 = [](long double a[3][3]) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
           a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  };
  long double det = det3(M);
  if (std::abs(static_cast<double>(det)) < 1e-30)
    throw std::invalid_argument("degenerate fit window");
  long double coef[3];
  for (int j = 0; j < 3; ++j) {
    long double N[3][3];
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) N[r][c] = (c == j) ? t[r] : M[r][c];
    coef[j] = det3(N) / det;
  }

  AmenabilityReport rep;
  rep.window = static_cast<int>(rows.size());
  rep.fit_a = static_cast<double>(coef[0]);
  rep.fit_b = static_cast<double>(coef[1]);
  rep.fit_c = static_cast<double>(coef[2]);
  rep.gamma_hat = std::max(0.0, rep.fit_a);

  long double rss = 0.0L;
  for (const auto* r : rows) {
    long double inv = 1.0L / static_cast<long double>(r->n);
    long double fit = coef[0] + coef[1] * inv + coef[2] * inv * inv;
    long double e = static_cast<long double>(r->ratio) - fit;
    rss += e * e;
  }
  rep.residual_rms =
      std::sqrt(static_cast<double>(rss) / static_cast<double>(rows.size()));

  rep.decreasing = true;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    if (!(rows[i + 1]->ratio < rows[i]->ratio)) rep.decreasing = false;
  double first = rows.front()->ratio;
  double last = rows.back()->ratio;
  rep.flat = (first - last) < 0.05 * std::max(last, 1e-300);

  if (rep.gamma_hat < 0.05 && rep.decreasing) {
    rep.verdict = "amenable-evidence";
  } else if (rep.gamma_hat > 0.1 && rep.flat) {
    rep.verdict = "nonamenable-evidence";
  } else {
    rep.verdict = "inconclusive";
  }
  return rep;
}

}  // namespace qclab
