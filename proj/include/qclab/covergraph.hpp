#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qclab/moebius.hpp"  // budget_error

namespace qclab {

/// Infinite (or finite) graph given by a lazy neighbor oracle over canonical
/// string labels. The raw oracle may report loops and parallel edges; the
/// public neighbor view drops loops and collapses duplicates, keeping counts.
class CoverGraph {
 public:
  struct EdgeStats {
    std::size_t loops_dropped = 0;
    std::size_t multi_collapsed = 0;
  };

  /// The integers with edges n ~ n+1. Root "0".
  static CoverGraph line();

  /// The d-regular tree (d >= 2) as the free product of d involutions:
  /// labels are words over digits 0..d-1 with no repeated adjacent digit.
  static CoverGraph regular_tree(int degree);

  /// Cayley graph of the free group of the given rank (2k-regular tree):
  /// labels are reduced words, letters 'a'.. for generators, 'A'.. for
  /// inverses.
  static CoverGraph cayley_free(int rank);

  /// Schreier coset graph of the kernel-style subgroup cut out by a
  /// homomorphism from the rank-k free group to Z^m (optionally reduced
  /// mod n): vertices are image vectors "(x1,...,xm)", generator i moves
  /// by +/- images[i]. images of zero produce loops.
  static CoverGraph schreier(int rank,
                             std::vector<std::vector<long long>> images,
                             std::optional<long long> mod = std::nullopt);

  const std::string& root() const { return root_; }
  const std::string& family() const { return family_; }
  int ambient_degree() const { return degree_; }

  /// Sorted distinct neighbors of v, loops removed; stats (if given)
  /// accumulate what was dropped.
  std::vector<std::string> neighbors(const std::string& v,
                                     EdgeStats* stats = nullptr) const;

 private:
  std::string root_;
  std::string family_;
  int degree_ = 0;
  std::function<std::vector<std::string>(const std::string&)> raw_;
};

/// Breadth-first ball around the root. order lists vertices by discovery
/// (layer by layer, lexicographic within a layer); layer_begin[k] is the
/// first index of distance-k vertices (one past the last layer at the end).
struct BallResult {
  std::vector<std::string> order;
  std::vector<std::size_t> layer_begin;
  std::unordered_map<std::string, int> dist;
  CoverGraph::EdgeStats stats;

  std::size_t layer_size(int k) const {
    return layer_begin[k + 1] - layer_begin[k];
  }
};

BallResult ball(const CoverGraph& g, int radius,
                std::size_t node_budget = 1000000);

/// Vertices at distance exactly 1 from the subset, in the ambient graph
/// (not restricted to any ball). Input labels are deduplicated.
std::vector<std::string> vertex_boundary(const CoverGraph& g,
                                         const std::vector<std::string>& subset);

struct FolnerRow {
  int n = 0;
  std::size_t ball_size = 0;
  std::size_t boundary_size = 0;
  double ratio = 0.0;  // boundary/ball, exact integers alongside
};

/// Rows n = 0..radius with |B_n|, |boundary of B_n| and their ratio. The
/// boundary of B_n is exactly the (n+1)-st BFS layer.
std::vector<FolnerRow> folner_profile(const CoverGraph& g, int radius,
                                      std::size_t node_budget = 1000000);

struct ExpansionResult {
  long long boundary = 0;     // |dV| of the minimizer
  long long size = 0;         // |V| of the minimizer
  double value = 0.0;         // boundary/size
  std::vector<std::string> witness;  // sorted labels of the minimizer
  std::size_t subsets_enumerated = 0;
  bool cap_hit = false;  // enumeration stopped at enum_cap (partial result)
};

/// Exact minimum of |dV|/|V| over connected subsets V of the ball of the
/// given radius with 1 <= |V| <= max_subset_size; boundaries are taken in
/// the ambient graph. Ratios are compared as exact rationals. The search
/// ball may have at most 64 vertices.
ExpansionResult expansion_exact(const CoverGraph& g, int ball_radius,
                                int max_subset_size,
                                std::size_t enum_cap = 5000000);

struct AmenabilityReport {
  std::string verdict;  // "amenable-evidence" | "nonamenable-evidence" |
                        // "inconclusive"
  double gamma_hat = 0.0;
  double fit_a = 0.0, fit_b = 0.0, fit_c = 0.0;
  double residual_rms = 0.0;
  bool decreasing = false;
  bool flat = false;
  int window = 0;
};

/// Least-squares fit of ratio(n) ~ a + b/n + c/n^2 over the last `window`
/// rows (n >= 1); gamma_hat = max(a, 0) estimates the limiting expansion.
/// Verdicts: gamma_hat < 0.05 and strictly decreasing tail => amenable
/// evidence; gamma_hat > 0.1 and a flat tail (relative drop < 0.05) =>
/// nonamenable evidence; anything else is inconclusive.
AmenabilityReport classify_amenability(const std::vector<FolnerRow>& profile,
                                       int window = 5);

}  // namespace qclab
