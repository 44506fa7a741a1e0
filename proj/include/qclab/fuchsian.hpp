#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qclab/moebius.hpp"

namespace qclab {

enum class Model { Disk, HalfPlane };

/// Circle with center on the real axis, used by half-plane fundamental
/// domain descriptions.
struct FordCircle {
  double center_x;
  double radius;
};

/// Fundamental domain of the punctured-torus preset: a vertical strip
/// |Re z| <= strip_halfwidth minus the interiors of the listed circles.
struct StripDomain {
  double strip_halfwidth;
  std::vector<FordCircle> circles;
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
};

/// Finitely generated group of half-plane/disk isometries. Generators are
/// stored as normalized real matrices; the model records which coordinates
/// the group (and its fundamental domain) is described in.
///
/// For Schottky-like groups the fundamental domain is the common exterior,
/// inside the unit disk, of the isometric circles of all generators and
/// inverses (the Ford domain seen from the disk center). The punctured-torus
/// preset carries an explicit strip-and-circles domain in the half plane.
class FuchsianGroup {
 public:
  /// Rank-0 group; every point is in the fundamental domain.
  static FuchsianGroup trivial();

  /// Rank-2 group pairing four disk-orthogonal circles of Euclidean radius
  /// `circle_radius` < 1 centered (in the disk) along directions 0, 90, 180,
  /// 270 degrees. Generator translation length is 2*acosh(sqrt(1+r^2)/r);
  /// the commutator has trace 2 - 4/r^4.
  static FuchsianGroup schottky_symmetric(double circle_radius);

  /// Named presets: "trivial", "schottky-wide", "schottky-mid",
  /// "schottky-narrow", "punctured-torus", or "schottky:<L>" for the
  /// symmetric family with generator translation length L (needs
  /// L > 2*asinh(1) so the circles stay disjoint).
  static FuchsianGroup preset(const std::string& name);

  /// Generic constructor from explicit generators. Runs no validation;
  /// call validate_schottky to check the ping-pong configuration.
  static FuchsianGroup from_generators(Model model,
                                       std::vector<Moebius> generators,
                                       std::vector<std::string> names = {});

  Model model() const { return model_; }
  int rank() const { return static_cast<int>(gens_.size()); }
  const std::vector<Moebius>& generators() const { return gens_; }
  const std::vector<std::string>& generator_names() const { return names_; }
  const std::optional<StripDomain>& strip_domain() const { return strip_; }
  const std::string& preset_name() const { return preset_name_; }

  /// Generator or inverse for a letter index: letter 2i is generator i,
  /// letter 2i+1 its inverse. The inverse of letter L is L^1.
  const Moebius& letter_matrix(int letter) const;
  const DiskCoeffs& letter_disk(int letter) const;
  std::string letter_name(int letter) const;

  /// Membership of z (in the group's own model coordinates) in the closed
  /// fundamental domain, up to a small boundary tolerance.
  bool in_fundamental_domain(complexd z) const;

  /// Same test with z in unit-disk coordinates regardless of model.
  bool in_fundamental_domain_disk(complexd w) const;

  /// Signed distance (in the domain's native coordinates) from z to the
  /// nearest domain wall; positive inside. Rank 0 returns +infinity.
  double domain_margin_disk(complexd w) const;

 private:
  FuchsianGroup() = default;

  Model model_ = Model::Disk;
  std::vector<Moebius> gens_;
  std::vector<std::string> names_;
  std::vector<Moebius> letter_mat_;       // 2*rank entries: gen, inverse, ...
  std::vector<DiskCoeffs> letter_disk_;
  std::vector<IsoCircle> letter_circle_;  // disk isometric circles, if defined
  std::vector<bool> letter_circle_ok_;
  std::optional<StripDomain> strip_;
  std::string preset_name_;

  void finish_setup();
};

/// Checks the Schottky ping-pong configuration: hyperbolic, non-identity,
/// pairwise distinct generators whose 2k disk isometric circles are pairwise
/// disjoint. Collects every violation instead of stopping at the first.
ValidationReport validate_schottky(const FuchsianGroup& g);

/// One reduced word in the generators. Letters are indices as in
/// FuchsianGroup::letter_matrix; `parent` points at the word with the last
/// letter removed (words[0] is the identity, its parent is itself).
struct GroupWord {
  std::uint32_t parent = 0;
  std::int16_t letter = -1;
  std::uint16_t length = 0;
  Moebius matrix;
};

/// All reduced words of length <= max_len, shell-major (length 0, then 1,
/// ...), lexicographic in the letter order within each shell.
struct WordList {
  std::vector<GroupWord> words;
  std::vector<std::size_t> shell_begin;  // shell_begin[n] .. shell_begin[n+1]

  int max_length() const { return static_cast<int>(shell_begin.size()) - 2; }
  std::size_t shell_size(int n) const {
    return shell_begin[n + 1] - shell_begin[n];
  }
  std::vector<int> letters(std::size_t index) const;
  std::string spell(std::size_t index, const FuchsianGroup& g) const;
};

/// Breadth-first reduced-word enumeration. Count of words of length n is
/// 2k(2k-1)^(n-1) for rank k >= 1. Throws budget_error once more than
/// `budget` words would be produced.
WordList enumerate_words(const FuchsianGroup& g, int max_len,
                         std::size_t budget = 1000000);

/// Like enumerate_words, but truncates to the last complete shell that fits
/// the budget instead of throwing; budget_hit reports whether truncation
/// happened. Shell sizes are known in advance, so no partial shell is built.
WordList enumerate_complete_shells(const FuchsianGroup& g, int max_len,
                                   std::size_t budget, bool& budget_hit);

struct SystoleBound {
  double upper_bound;
  std::size_t word_index;
  std::string word;
};

/// Minimum translation length over all hyperbolic words of length <= max_len:
/// an upper bound for the shortest closed geodesic. Throws std::domain_error
/// if no word in range is hyperbolic.
SystoleBound systole_upper_bound(const FuchsianGroup& g, int max_len,
                                 std::size_t budget = 1000000);

}  // namespace qclab
