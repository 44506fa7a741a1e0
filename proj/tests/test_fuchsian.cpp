#include <cmath>
#include <complex>

#include "doctest.h"
#include "qclab/fuchsian.hpp"

using namespace qclab;

TEST_SUITE("fuchsian") {

TEST_CASE("trivial group accepts the whole disk") {
  FuchsianGroup g = FuchsianGroup::trivial();
  CHECK(g.rank() == 0);
  CHECK(g.in_fundamental_domain_disk(complexd(0.0, 0.0)));
  CHECK(g.in_fundamental_domain_disk(complexd(0.9, -0.3)));
  CHECK(std::isinf(g.domain_margin_disk(complexd(0.5, 0.0))));
}

TEST_CASE("symmetric schottky generator length matches the closed form") {
  double r = 0.3;
  FuchsianGroup g = FuchsianGroup::schottky_symmetric(r);
  CHECK(g.rank() == 2);
  double expected = 2.0 * std::acosh(std::sqrt(1.0 + r * r) / r);
  for (int i = 0; i < 2; ++i) {
    CHECK(g.generators()[i].translation_length() ==
          doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(validate_schottky(g).ok);
  CHECK_THROWS_AS(FuchsianGroup::schottky_symmetric(0.0), std::invalid_argument);
  CHECK_THROWS_AS(FuchsianGroup::schottky_symmetric(1.0), std::invalid_argument);
}

TEST_CASE("preset systole bounds") {
  auto systole = [](const std::string& name, int len) {
    return systole_upper_bound(FuchsianGroup::preset(name), len).upper_bound;
  };
  CHECK(systole("schottky-wide", 4) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(systole("schottky-mid", 4) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(systole("schottky-narrow", 4) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(systole("punctured-torus", 4) ==
        doctest::Approx(1.9248473002384139).epsilon(1e-12));
}

TEST_CASE("parametrized schottky preset hits the requested length") {
  FuchsianGroup g = FuchsianGroup::preset("schottky:3.5");
  CHECK(g.generators()[0].translation_length() ==
        doctest::Approx(3.5).epsilon(1e-12));
  CHECK_THROWS_AS(FuchsianGroup::preset("schottky:1.0"), std::invalid_argument);
  CHECK_THROWS_AS(FuchsianGroup::preset("schottky:nope"), std::invalid_argument);
  CHECK_THROWS_AS(FuchsianGroup::preset("no-such-preset"), std::invalid_argument);
}

TEST_CASE("punctured torus preset keeps integer matrices and a parabolic commutator") {
  FuchsianGroup g = FuchsianGroup::preset("punctured-torus");
  REQUIRE(g.rank() == 2);
  const Moebius& A = g.generators()[0];
  const Moebius& B = g.generators()[1];
  CHECK(A.a == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(A.b == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(A.c == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(A.d == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(B.a == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(B.b == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(B.c == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(B.d == doctest::Approx(2.0).epsilon(1e-15));

  Moebius commutator = A * B * A.inverse() * B.inverse();
  CHECK(commutator.classify() == MoebiusClass::Parabolic);
  CHECK(std::abs(commutator.trace()) == doctest::Approx(2.0).epsilon(1e-12));

  CHECK(g.model() == Model::HalfPlane);
  REQUIRE(g.strip_domain().has_value());
  CHECK(g.in_fundamental_domain(complexd(0.0, 5.0)));
  CHECK_FALSE(g.in_fundamental_domain(A.apply(complexd(0.0, 5.0))));
}

TEST_CASE("word enumeration counts reduced words") {
  FuchsianGroup g = FuchsianGroup::preset("schottky-mid");
  WordList wl = enumerate_words(g, 3);
  CHECK(wl.max_length() == 3);
  CHECK(wl.shell_size(0) == 1);
  CHECK(wl.shell_size(1) == 4);
  CHECK(wl.shell_size(2) == 12);
  CHECK(wl.shell_size(3) == 36);
  CHECK(wl.words.size() == 53);

  CHECK(wl.spell(0, g) == "e");
  for (std::size_t i = 1; i < wl.words.size(); ++i) {
    std::vector<int> ls = wl.letters(i);
    CHECK(ls.size() == wl.words[i].length);
    for (std::size_t k = 0; k + 1 < ls.size(); ++k) {
      CHECK(ls[k + 1] != (ls[k] ^ 1));  // reduced: no immediate backtrack
    }
    Moebius prod;
    for (int letter : ls) prod = prod * g.letter_matrix(letter);
    CHECK(approx_equal(prod, wl.words[i].matrix, 1e-9));
  }
}

TEST_CASE("letter accessors pair generators with inverses") {
  FuchsianGroup g = FuchsianGroup::preset("schottky-wide");
  for (int i = 0; i < g.rank(); ++i) {
    CHECK(approx_equal(g.letter_matrix(2 * i), g.generators()[i]));
    CHECK(approx_equal(g.letter_matrix(2 * i + 1), g.generators()[i].inverse()));
    CHECK((g.letter_matrix(2 * i) * g.letter_matrix(2 * i + 1)).is_identity());
  }
  CHECK_THROWS_AS(g.letter_matrix(4), std::out_of_range);
}

TEST_CASE("enumeration budgets") {
  FuchsianGroup g = FuchsianGroup::preset("schottky-mid");
  CHECK_THROWS_AS(enumerate_words(g, 5, 100), budget_error);
  try {
    enumerate_words(g, 5, 100);
  } catch (const budget_error& e) {
    CHECK(e.partial() > 0);
    CHECK(e.partial() <= 100);
  }

  bool hit = false;
  WordList wl = enumerate_complete_shells(g, 5, 16, hit);
  CHECK(hit);
  CHECK(wl.max_length() == 1);  // 5 words fit, 17 would not
  CHECK(wl.words.size() == 5);

  hit = true;
  WordList all = enumerate_complete_shells(g, 2, 1000, hit);
  CHECK_FALSE(hit);
  CHECK(all.words.size() == 17);
}

TEST_CASE("systole is invariant under conjugation of the generators") {
  FuchsianGroup g = FuchsianGroup::preset("schottky-mid");
  Moebius conj(1.5, 0.5, 0.25, 0.75);  // det 1.125 - 0.125 = 1
  std::vector<Moebius> moved;
  for (const Moebius& m : g.generators()) {
    moved.push_back(conj * m * conj.inverse());
  }
  FuchsianGroup h = FuchsianGroup::from_generators(Model::Disk, moved);
  SystoleBound sg = systole_upper_bound(g, 4);
  SystoleBound sh = systole_upper_bound(h, 4);
  CHECK(sh.upper_bound == doctest::Approx(sg.upper_bound).epsilon(1e-10));
}

TEST_CASE("narrow preset systole comes from the commutator") {
  FuchsianGroup g = FuchsianGroup::preset("schottky-narrow");
  SystoleBound s = systole_upper_bound(g, 4);
  CHECK(s.word.size() > 1);  // a multi-letter word, not a generator
  double gen_len = g.generators()[0].translation_length();
  CHECK(gen_len > s.upper_bound);
}

TEST_CASE("validation collects every violation") {
  Moebius rot(std::cos(0.4), std::sin(0.4), -std::sin(0.4), std::cos(0.4));
  Moebius hyp(2.0, 1.0, 0.5, 0.75);
  FuchsianGroup bad = FuchsianGroup::from_generators(
      Model::HalfPlane, {rot, hyp, hyp}, {"p", "q", "r"});
  ValidationReport rep = validate_schottky(bad);
  CHECK_FALSE(rep.ok);
  bool saw_elliptic = false, saw_duplicate = false;
  for (const std::string& v : rep.violations) {
    if (v.find("not hyperbolic") != std::string::npos) saw_elliptic = true;
    if (v.find("duplicates") != std::string::npos) saw_duplicate = true;
  }
  CHECK(saw_elliptic);
  CHECK(saw_duplicate);

  FuchsianGroup inv_pair = FuchsianGroup::from_generators(
      Model::HalfPlane, {hyp, hyp.inverse()});
  ValidationReport rep2 = validate_schottky(inv_pair);
  CHECK_FALSE(rep2.ok);
  bool saw_inverse = false;
  for (const std::string& v : rep2.violations) {
    if (v.find("inverse") != std::string::npos) saw_inverse = true;
  }
  CHECK(saw_inverse);
}

TEST_CASE("fundamental domain membership for the schottky presets") {
  FuchsianGroup g = FuchsianGroup::preset("schottky-wide");
  CHECK(g.in_fundamental_domain_disk(complexd(0.0, 0.0)));
  CHECK(g.domain_margin_disk(complexd(0.0, 0.0)) > 0.0);

  // The image of the center under any letter leaves the domain.
  for (int letter = 0; letter < 4; ++letter) {
    complexd moved = g.letter_disk(letter).apply(complexd(0.0, 0.0));
    CHECK_FALSE(g.in_fundamental_domain_disk(moved));
    CHECK(g.domain_margin_disk(moved) < 0.0);
  }
}

}  // TEST_SUITE
