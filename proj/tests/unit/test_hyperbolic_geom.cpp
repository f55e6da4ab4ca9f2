#include <cmath>
#include <random>

#include "doctest.h"

#include "geodesics/error.hpp"
#include "geodesics/hyperbolic_geom.hpp"

using namespace geodesics;

namespace {

const double kOctagonLength = 2.0 * std::acosh(1.0 + std::sqrt(2.0));

Word random_word(std::mt19937& rng, const std::string& alphabet, int n) {
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string s;
  for (int i = 0; i < n; ++i) s += alphabet[pick(rng)];
  return Word::parse(s);
}

MoebiusMatrix power(const MoebiusMatrix& m, int k) {
  MoebiusMatrix out;
  for (int i = 0; i < k; ++i) out = out * m;
  return out;
}

}  // namespace

TEST_CASE("MoebiusMatrix checks the determinant") {
  CHECK_NOTHROW(MoebiusMatrix(2.0, 1.0, 1.0, 1.0));
  CHECK_THROWS_AS(MoebiusMatrix(2.0, 0.0, 0.0, 1.0), std::invalid_argument);
  const MoebiusMatrix m(2.0, 1.0, 1.0, 1.0);
  CHECK((m * m.inverse()).distance_to_identity() < 1e-15);
}

TEST_CASE("octagon representation") {
  const auto rep = octagon_representation();
  const auto relator = evaluate_word(rep, Word::parse("abcdABCD"));
  CHECK(relator.distance_to_identity() < 1e-9);
  for (const auto& g : rep.generators()) {
    CHECK(std::abs(translation_length(g) - kOctagonLength) < 1e-9);
  }
  CHECK(kOctagonLength == doctest::Approx(3.0571).epsilon(1e-4));
  CHECK(std::abs(evaluate_word(rep, Word::parse("ab")).trace()) > 2.0);
}

TEST_CASE("generator k is a rotated copy of generator 0") {
  const auto rep = octagon_representation();
  const auto& g = rep.generators();
  for (int k = 0; k < 4; ++k) {
    const auto r = elliptic_rotation(k * std::numbers::pi / 4.0);
    const auto base = (k % 2 == 0) ? g[0] : g[0].inverse();
    const auto expected = r * base * r.inverse();
    CHECK(std::abs(expected.a() - g[k].a()) < 1e-12);
    CHECK(std::abs(expected.b() - g[k].b()) < 1e-12);
    CHECK(std::abs(expected.c() - g[k].c()) < 1e-12);
    CHECK(std::abs(expected.d() - g[k].d()) < 1e-12);
  }
}

TEST_CASE("schottky representation") {
  const auto rep = schottky_representation(3.0);
  CHECK(translation_length(rep.generators()[0]) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(translation_length(evaluate_word(rep, Word::parse("abAB"))) > 0.0);
  CHECK_THROWS(schottky_representation(0.5));
  CHECK_THROWS_AS(translation_length(evaluate_word(rep, Word())), NonHyperbolicError);
}

TEST_CASE("evaluate_word basics") {
  const auto rep = octagon_representation();
  CHECK(evaluate_word(rep, Word()).distance_to_identity() == 0.0);
  const auto a = evaluate_word(rep, Word::parse("a"));
  CHECK(a.a() == rep.generators()[0].a());
  CHECK(a.d() == rep.generators()[0].d());
  Letters aa{Letter{0, false}, Letter{0, true}};
  CHECK(evaluate_word(rep, std::span<const Letter>(aa)).distance_to_identity() < 1e-12);
}

TEST_CASE("translation_length examples") {
  CHECK_THROWS_AS(translation_length(MoebiusMatrix(1.0, 1.0, 0.0, 1.0)), NonHyperbolicError);
  const double t = std::cosh(1.0);
  CHECK(translation_length(axial_translation(2.0)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(2.0 * t == doctest::Approx(3.0862).epsilon(1e-4));
  const auto m3 = MoebiusMatrix::unchecked(1.5, 0.0, 0.0, 1.5);
  CHECK(translation_length(m3) == doctest::Approx(2.0 * std::acosh(1.5)).epsilon(1e-14));
  CHECK(translation_length(m3) == doctest::Approx(1.9248).epsilon(1e-4));
}

TEST_CASE("verify_representation") {
  const auto rep = octagon_representation();
  const auto report = verify_representation(rep, 3);
  CHECK(report.pass);
  CHECK(report.classes_hyperbolic);
  CHECK(report.relator_deviation < 1e-9);

  std::vector<MoebiusMatrix> ids(4);
  const auto bad = FuchsianRep::unchecked(SurfacePresentation::surface(2), ids, "identity");
  const auto r2 = verify_representation(bad, 2);
  CHECK(r2.relator_deviation < 1e-12);
  CHECK_FALSE(r2.generators_hyperbolic);
  CHECK_FALSE(r2.pass);
  CHECK_THROWS(FuchsianRep::create(SurfacePresentation::surface(2), ids, "identity"));
}

TEST_CASE("length invariances") {
  std::mt19937 rng(3);
  const auto rep = octagon_representation();
  for (int trial = 0; trial < 100; ++trial) {
    const auto w = random_word(rng, "abcdABCD", 5);
    const auto cw = cyclic_reduce(w);
    if (!cw) continue;
    const auto m = evaluate_word(rep, *cw);
    if (std::abs(m.trace()) < 2.0 + 1e-6) continue;
    const double ell = translation_length(m);
    const auto g = evaluate_word(rep, random_word(rng, "abcdABCD", 4));
    CHECK(std::abs(translation_length(g * m * g.inverse()) - ell) < 1e-9 * std::max(1.0, ell));
    CHECK(std::abs(translation_length(m.inverse()) - ell) < 1e-12 * std::max(1.0, ell));
    for (int k = 2; k <= 3; ++k) {
      CHECK(std::abs(translation_length(power(m, k)) - k * ell) < 1e-9 * k * ell);
    }
  }
}

TEST_CASE("entries stay bounded and traces accurate up to length 14") {
  std::mt19937 rng(5);
  const auto rep = octagon_representation();
  const auto p = SurfacePresentation::surface(2);
  int checked = 0;
  while (checked < 300) {
    const auto cw = cyclic_reduce(random_word(rng, "abcdABCD", 20));
    if (!cw) continue;
    const auto reduced = dehn_reduce_cyclic(*cw, p);
    if (!reduced || reduced->size() != 14) continue;
    std::vector<std::uint8_t> codes;
    for (auto x : reduced->letters()) codes.push_back(letter_code(x, 4));
    const auto fwd = evaluate_codes(rep, codes);
    const auto rev = evaluate_codes_reverse(rep, codes);
    CHECK(fwd.max_abs_entry() < 1e9);
    CHECK(std::abs(fwd.trace() - rev.trace()) / std::abs(fwd.trace()) < 1e-7);
    ++checked;
  }
}

TEST_CASE("representation names round-trip") {
  CHECK(representation_from_name(octagon_representation().name()).name() == "octagon");
  const auto s = schottky_representation(3.5);
  CHECK(representation_from_name(s.name()).name() == s.name());
}
