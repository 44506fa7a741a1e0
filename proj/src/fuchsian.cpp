#include "qclab/fuchsian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qclab {

namespace {

constexpr double kMemberTol = 1e-12;  // on |q|^2 = 1/|derivative|

// Minimum generator translation length of the symmetric family: circles
// of radius r pair up only while r < 1 (adjacent centers sqrt(2(1+r^2))
// apart), i.e. 2*acosh(sqrt(1+r^2)/r) > 2*asinh(1).
const double kMinSymmetricLength = 2.0 * std::asinh(1.0);

}  // namespace

void FuchsianGroup::finish_setup() {
  if (names_.empty()) {
    for (std::size_t i = 0; i < gens_.size(); ++i) {
      names_.push_back("g" + std::to_string(i + 1));
    }
  }
  letter_mat_.clear();
  letter_disk_.clear();
  letter_circle_.clear();
  letter_circle_ok_.clear();
  for (const Moebius& m : gens_) {
    for (const Moebius& v : {m, m.inverse()}) {
      letter_mat_.push_back(v);
      DiskCoeffs g = to_disk(v);
      letter_disk_.push_back(g);
      try {
        letter_circle_.push_back(isometric_circle_disk(g));
        letter_circle_ok_.push_back(true);
      } catch (const std::domain_error&) {
        letter_circle_.push_back(IsoCircle{complexd(0.0, 0.0), 0.0});
        letter_circle_ok_.push_back(false);
      }
    }
  }
}

FuchsianGroup FuchsianGroup::trivial() {
  FuchsianGroup g;
  g.model_ = Model::Disk;
  g.preset_name_ = "trivial";
  g.finish_setup();
  return g;
}

FuchsianGroup FuchsianGroup::schottky_symmetric(double circle_radius) {
  if (!(circle_radius > 0.0) || !(circle_radius < 1.0)) {
    throw std::invalid_argument(
        "schottky_symmetric: circle radius must be in (0,1)");
  }
  double r = circle_radius;
  double s = std::sqrt(1.0 + r * r);  // circle centers sit at distance s
  // Pairing map for the circle pair at +/- p, p = s*e^{i theta}:
  // alpha = -s/r, beta = e^{i theta}/r in SU(1,1) coordinates.
  FuchsianGroup g;
  g.model_ = Model::Disk;
  DiskCoeffs g1{complexd(-s / r, 0.0), complexd(1.0 / r, 0.0)};
  DiskCoeffs g2{complexd(-s / r, 0.0), complexd(0.0, 1.0 / r)};
  g.gens_ = {from_disk(g1), from_disk(g2)};
  g.finish_setup();
  return g;
}

FuchsianGroup FuchsianGroup::from_generators(Model model,
                                             std::vector<Moebius> generators,
                                             std::vector<std::string> names) {
  if (!names.empty() && names.size() != generators.size()) {
    throw std::invalid_argument(
        "from_generators: names must match generator count");
  }
  FuchsianGroup g;
  g.model_ = model;
  g.gens_ = std::move(generators);
  g.names_ = std::move(names);
  g.finish_setup();
  return g;
}

FuchsianGroup FuchsianGroup::preset(const std::string& name) {
  auto named_symmetric = [&](double radius) {
    FuchsianGroup g = schottky_symmetric(radius);
    g.preset_name_ = name;
    ValidationReport rep = validate_schottky(g);
    if (!rep.ok) {
      std::string msg = "preset " + name + " failed validation:";
      for (const auto& v : rep.violations) msg += " " + v + ";";
      throw std::invalid_argument(msg);
    }
    return g;
  };

  if (name == "trivial") return trivial();
  if (name == "schottky-wide") {
    // Generator translation length exactly 4.
    return named_symmetric(1.0 / std::sinh(2.0));
  }
  if (name == "schottky-mid") {
    // Generator translation length exactly 2; the commutator is longer
    // (trace 2 - 4 sinh^4(1), length ~3.37), so the systole is 2.
    return named_symmetric(1.0 / std::sinh(1.0));
  }
  if (name == "schottky-narrow") {
    // Radius chosen so the commutator trace 2 - 4/r^4 gives translation
    // length exactly 1; the generators themselves have length ~1.78.
    return named_symmetric(std::pow(2.0 / (1.0 + std::cosh(0.5)), 0.25));
  }
  if (name.rfind("schottky:", 0) == 0) {
    double len = 0.0;
    try {
      len = std::stod(name.substr(9));
    } catch (const std::exception&) {
      throw std::invalid_argument("preset: cannot parse length in " + name);
    }
    if (!(len > kMinSymmetricLength)) {
      std::ostringstream os;
      os << "preset " << name << ": generator length must exceed "
         << kMinSymmetricLength << " for disjoint circles";
      throw std::invalid_argument(os.str());
    }
    return named_symmetric(1.0 / std::sinh(len / 2.0));
  }
  if (name == "punctured-torus") {
    // Hexagonal once-punctured torus: traces (3,3,3). The commutator
    // [a^-1, b^-1] is the translation z -> z+6, so the quotient of the
    // strip |Re z| <= 3 minus the unit circles at integer centers tiles
    // the half plane under the group.
    FuchsianGroup g;
    g.model_ = Model::HalfPlane;
    g.gens_ = {Moebius(1.0, 1.0, 1.0, 2.0), Moebius(1.0, -1.0, -1.0, 2.0)};
    g.names_ = {"a", "b"};
    StripDomain dom;
    dom.strip_halfwidth = 3.0;
    for (int k = -3; k <= 3; ++k) {
      dom.circles.push_back(FordCircle{static_cast<double>(k), 1.0});
    }
    g.strip_ = std::move(dom);
    g.preset_name_ = name;
    g.finish_setup();
    return g;
  }
  throw std::invalid_argument("unknown preset: " + name);
}

const Moebius& FuchsianGroup::letter_matrix(int letter) const {
  if (letter < 0 || letter >= 2 * rank()) {
    throw std::out_of_range("letter_matrix: letter out of range");
  }
  return letter_mat_[letter];
}

const DiskCoeffs& FuchsianGroup::letter_disk(int letter) const {
  if (letter < 0 || letter >= 2 * rank()) {
    throw std::out_of_range("letter_disk: letter out of range");
  }
  return letter_disk_[letter];
}

std::string FuchsianGroup::letter_name(int letter) const {
  if (letter < 0 || letter >= 2 * rank()) {
    throw std::out_of_range("letter_name: letter out of range");
  }
  std::string base = names_[letter / 2];
  return (letter % 2 == 0) ? base : base + "^-1";
}

bool FuchsianGroup::in_fundamental_domain(complexd z) const {
  if (strip_) {
    if (std::abs(z.real()) > strip_->strip_halfwidth + kMemberTol) return false;
    for (const FordCircle& c : strip_->circles) {
      double dx = z.real() - c.center_x;
      double dy = z.imag();
      if (dx * dx + dy * dy < c.radius * c.radius - kMemberTol) return false;
    }
    return true;
  }
  complexd w = (model_ == Model::Disk) ? z : cayley(z);
  return in_fundamental_domain_disk(w);
}

bool FuchsianGroup::in_fundamental_domain_disk(complexd w) const {
  if (strip_) return in_fundamental_domain(cayley_inverse(w));
  // Common exterior of the isometric circles: |derivative| <= 1 for every
  // generator and inverse, i.e. |conj(beta) w + conj(alpha)|^2 >= 1.
  for (const DiskCoeffs& g : letter_disk_) {
    double qr = g.beta.real() * w.real() + g.beta.imag() * w.imag() +
                g.alpha.real();
    double qi = g.beta.real() * w.imag() - g.beta.imag() * w.real() -
                g.alpha.imag();
    if (qr * qr + qi * qi < 1.0 - kMemberTol) return false;
  }
  return true;
}

double FuchsianGroup::domain_margin_disk(complexd w) const {
  double margin = std::numeric_limits<double>::infinity();
  if (strip_) {
    complexd zeta = cayley_inverse(w);
    margin = strip_->strip_halfwidth - std::abs(zeta.real());
    for (const FordCircle& c : strip_->circles) {
      double d = std::abs(zeta - complexd(c.center_x, 0.0)) - c.radius;
      margin = std::min(margin, d);
    }
    return margin;
  }
  for (std::size_t i = 0; i < letter_disk_.size(); ++i) {
    double d;
    if (letter_circle_ok_[i]) {
      d = std::abs(w - letter_circle_[i].center) - letter_circle_[i].radius;
    } else {
      const DiskCoeffs& g = letter_disk_[i];
      d = std::abs(std::conj(g.beta) * w + std::conj(g.alpha)) - 1.0;
    }
    margin = std::min(margin, d);
  }
  return margin;
}

ValidationReport validate_schottky(const FuchsianGroup& g) {
  ValidationReport rep;
  auto flag = [&rep](const std::string& msg) {
    rep.ok = false;
    rep.violations.push_back(msg);
  };
  const auto& gens = g.generators();
  for (std::size_t i = 0; i < gens.size(); ++i) {
    std::string who = "generator " + g.generator_names()[i];
    if (gens[i].is_identity()) {
      flag(who + " is the identity");
      continue;
    }
    MoebiusClass cls = gens[i].classify();
    if (cls != MoebiusClass::Hyperbolic) {
      std::ostringstream os;
      os << who << " is " << to_string(cls) << " (trace " << gens[i].trace()
         << "), not hyperbolic";
      flag(os.str());
    }
    for (std::size_t j = i + 1; j < gens.size(); ++j) {
      if (approx_equal(gens[i], gens[j])) {
        flag(who + " duplicates generator " + g.generator_names()[j]);
      }
      if (approx_equal(gens[i], gens[j].inverse())) {
        flag(who + " is the inverse of generator " + g.generator_names()[j]);
      }
    }
  }
  // Pairwise disjoint isometric circles (generators and inverses).
  int n = 2 * g.rank();
  for (int i = 0; i < n; ++i) {
    IsoCircle ci;
    try {
      ci = isometric_circle_disk(g.letter_disk(i));
    } catch (const std::domain_error&) {
      flag(g.letter_name(i) + " has no isometric circle (disk rotation)");
      continue;
    }
    for (int j = i + 1; j < n; ++j) {
      IsoCircle cj;
      try {
        cj = isometric_circle_disk(g.letter_disk(j));
      } catch (const std::domain_error&) {
        continue;  // flagged when j comes up in the outer loop
      }
      double gap = std::abs(ci.center - cj.center) - (ci.radius + cj.radius);
      if (gap <= 1e-12) {
        std::ostringstream os;
        os << "isometric circles of " << g.letter_name(i) << " and "
           << g.letter_name(j) << " are not disjoint (gap " << gap << ")";
        flag(os.str());
      }
    }
  }
  return rep;
}

std::vector<int> WordList::letters(std::size_t index) const {
  std::vector<int> out;
  while (index != 0) {
    out.push_back(words[index].letter);
    index = words[index].parent;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string WordList::spell(std::size_t index, const FuchsianGroup& g) const {
  if (index == 0) return "e";
  std::string out;
  for (int letter : letters(index)) {
    if (!out.empty()) out += " ";
    out += g.letter_name(letter);
  }
  return out;
}

WordList enumerate_words(const FuchsianGroup& g, int max_len,
                         std::size_t budget) {
  if (max_len < 0) {
    throw std::invalid_argument("enumerate_words: max_len must be >= 0");
  }
  if (budget > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("enumerate_words: budget too large");
  }
  WordList wl;
  if (budget < 1) throw budget_error("enumerate_words: budget exhausted", 0);
  GroupWord id;
  id.matrix = Moebius::identity();
  wl.words.push_back(id);
  wl.shell_begin = {0, 1};
  int letters = 2 * g.rank();
  for (int n = 1; n <= max_len; ++n) {
    std::size_t prev_begin = wl.shell_begin[n - 1];
    std::size_t prev_end = wl.shell_begin[n];
    for (std::size_t p = prev_begin; p < prev_end; ++p) {
      for (int letter = 0; letter < letters; ++letter) {
        if (wl.words[p].length > 0 && (wl.words[p].letter ^ 1) == letter) {
          continue;  // would cancel the last letter
        }
        if (wl.words.size() + 1 > budget) {
          throw budget_error("enumerate_words: budget exceeded at length " +
                                 std::to_string(n),
                             wl.words.size());
        }
        GroupWord w;
        w.parent = static_cast<std::uint32_t>(p);
        w.letter = static_cast<std::int16_t>(letter);
        w.length = static_cast<std::uint16_t>(n);
        w.matrix = wl.words[p].matrix * g.letter_matrix(letter);
        wl.words.push_back(w);
      }
    }
    wl.shell_begin.push_back(wl.words.size());
  }
  return wl;
}

WordList enumerate_complete_shells(const FuchsianGroup& g, int max_len,
                                   std::size_t budget, bool& budget_hit) {
  if (max_len < 0) {
    throw std::invalid_argument("enumerate_complete_shells: max_len >= 0");
  }
  if (budget < 1) {
    throw std::invalid_argument("enumerate_complete_shells: budget >= 1");
  }
  budget_hit = false;
  WordList wl;
  GroupWord id;
  id.matrix = Moebius::identity();
  wl.words.push_back(id);
  wl.shell_begin = {0, 1};
  std::size_t letters = 2 * static_cast<std::size_t>(g.rank());
  for (int n = 1; n <= max_len; ++n) {
    std::size_t prev = wl.shell_size(n - 1);
    std::size_t next = (letters == 0) ? 0
                       : (n == 1)     ? letters
                                      : prev * (letters - 1);
    if (wl.words.size() + next > budget) {
      budget_hit = true;
      break;
    }
    std::size_t prev_begin = wl.shell_begin[n - 1];
    std::size_t prev_end = wl.shell_begin[n];
    for (std::size_t p = prev_begin; p < prev_end; ++p) {
      for (std::size_t letter = 0; letter < letters; ++letter) {
        if (wl.words[p].length > 0 &&
            static_cast<std::size_t>(wl.words[p].letter ^ 1) == letter) {
          continue;
        }
        GroupWord w;
        w.parent = static_cast<std::uint32_t>(p);
        w.letter = static_cast<std::int16_t>(letter);
        w.length = static_cast<std::uint16_t>(n);
        w.matrix =
            wl.words[p].matrix * g.letter_matrix(static_cast<int>(letter));
        wl.words.push_back(w);
      }
    }
    wl.shell_begin.push_back(wl.words.size());
  }
  return wl;
}

SystoleBound systole_upper_bound(const FuchsianGroup& g, int max_len,
                                 std::size_t budget) {
  WordList wl = enumerate_words(g, max_len, budget);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_idx = 0;
  for (std::size_t i = 1; i < wl.words.size(); ++i) {
    if (wl.words[i].matrix.classify() != MoebiusClass::Hyperbolic) continue;
    double len = wl.words[i].matrix.translation_length();
    if (len < best) {
      best = len;
      best_idx = i;
    }
  }
  if (best_idx == 0) {
    throw std::domain_error(
        "systole_upper_bound: no hyperbolic word up to length " +
        std::to_string(max_len));
  }
  return SystoleBound{best, best_idx, wl.spell(best_idx, g)};
}

}  // namespace qclab
