#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "naive_classes.hpp"
#include "octagon_classes.hpp"

#include "geodesics/error.hpp"
#include "geodesics/group_core.hpp"
#include "geodesics/hyperbolic_geom.hpp"
#include "geodesics/markov_system.hpp"
#include "geodesics/symbolic_thermo.hpp"

using namespace geodesics;

namespace {

Letters raw(const std::string& s) {
  Letters out;
  for (char ch : s) out.push_back(Letter::from_ascii(ch));
  return out;
}

const SurfacePresentation genus2 = SurfacePresentation::surface(2);
const SurfacePresentation free2 = SurfacePresentation::free_group(2);

std::string random_reduced(std::mt19937& rng, const std::string& alphabet, int n) {
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string w;
  while (static_cast<int>(w.size()) < n) {
    const char x = alphabet[pick(rng)];
    if (!w.empty() && x == oracle::inv(w.back())) continue;
    w += x;
  }
  return w;
}

}  // namespace

TEST_CASE("free_reduce examples") {
  CHECK(free_reduce(raw("aA")).empty());
  CHECK(free_reduce(raw("abBa")).str() == "aa");
  CHECK(free_reduce(raw("abBAc")).str() == "c");
}

TEST_CASE("free_reduce is idempotent") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> pick(0, 7);
  for (int trial = 0; trial < 200; ++trial) {
    std::string s;
    for (int i = 0; i < 12; ++i) s += "abcdABCD"[pick(rng)];
    const Word once = free_reduce(raw(s));
    CHECK(free_reduce(once.letters()) == once);
  }
}

TEST_CASE("cyclic_reduce examples") {
  CHECK(cyclic_reduce(Word::parse("abA"))->str() == "b");
  CHECK(cyclic_reduce(Word::parse("ab"))->str() == "ab");
  CHECK(cyclic_reduce(Word::parse("abcBA"))->str() == "c");
  CHECK_FALSE(cyclic_reduce(Word()).has_value());
}

TEST_CASE("cyclic_reduce keeps the trace") {
  const auto rep = octagon_representation();
  const auto w = Word::parse("abcBA");
  const auto cw = *cyclic_reduce(w);
  CHECK(evaluate_word(rep, w).trace() == doctest::Approx(evaluate_word(rep, cw).trace()).epsilon(1e-12));
}

TEST_CASE("dehn_reduce_cyclic examples") {
  CHECK_FALSE(dehn_reduce_cyclic(CyclicWord::parse("abcdABCD"), genus2).has_value());

  // Five relator letters collapse to the inverse of the other three.
  const auto five = Word::parse("abcdA");
  const auto reduced = dehn_reduce(five, genus2);
  CHECK(reduced.str() == "dcb");
  const auto rep = octagon_representation();
  CHECK(std::abs(evaluate_word(rep, five).trace() - evaluate_word(rep, reduced).trace()) < 1e-9);

  const auto cyclic = dehn_reduce_cyclic(CyclicWord::parse("abcdAb"), genus2);
  REQUIRE(cyclic.has_value());
  CHECK(cyclic->size() == 4);
  CHECK(std::abs(evaluate_word(rep, CyclicWord::parse("abcdAb")).trace() - evaluate_word(rep, *cyclic).trace()) <
        1e-9 * std::abs(evaluate_word(rep, *cyclic).trace()));

  CHECK(dehn_reduce_cyclic(CyclicWord::parse("ab"), genus2)->str() == "ab");
  // free mode: identity operation
  const auto long_word = CyclicWord::parse("abcdAb");
  CHECK(dehn_reduce_cyclic(long_word, SurfacePresentation::free_group(4))->str() == "abcdAb");
}

TEST_CASE("Dehn-reduced words need not be shortest") {
  const auto rep = octagon_representation();
  const auto w = CyclicWord::parse("abcdbcdAb");
  REQUIRE(dehn_reduce_cyclic(w, genus2)->size() == 9);
  const auto g = geodesic_reduce_cyclic(w, genus2);
  CHECK(g.size() == 7);
  CHECK(canonical_form(g, genus2) == canonical_form(CyclicWord::parse("dcbdcbb"), genus2));
  CHECK(std::abs(evaluate_word(rep, w).trace() - evaluate_word(rep, g).trace()) < 1e-9 * 131.0);

  // a bcd a^-1 = dcb: two shortest words of one class that no half swap links.
  CHECK(canonical_form(CyclicWord::parse("bcd"), genus2) == canonical_form(CyclicWord::parse("dcb"), genus2));
  CHECK(canonical_form(CyclicWord::parse("bcd"), genus2).str() == "bcd");
}

TEST_CASE("dehn_reduce_cyclic is a fixed point on its output") {
  std::mt19937 rng(11);
  const auto rep = octagon_representation();
  for (int trial = 0; trial < 300; ++trial) {
    const auto w = Word::parse(random_reduced(rng, "abcdABCD", 9));
    const auto cw = cyclic_reduce(w);
    if (!cw) continue;
    const auto once = dehn_reduce_cyclic(*cw, genus2);
    if (!once) continue;
    const auto twice = dehn_reduce_cyclic(*once, genus2);
    REQUIRE(twice.has_value());
    CHECK(*twice == *once);
    const double t1 = std::abs(evaluate_word(rep, *cw).trace());
    const double t2 = std::abs(evaluate_word(rep, *once).trace());
    CHECK(std::abs(t1 - t2) <= 1e-9 * std::max(1.0, t1));
  }
}

TEST_CASE("linear dehn_reduce detects the identity") {
  CHECK(dehn_reduce(Word::parse("abcdABCD"), genus2).empty());
  CHECK(dehn_reduce(Word::parse("abcdABCDabcdABCD"), genus2).empty());
  CHECK_FALSE(dehn_reduce(Word::parse("abcd"), genus2).empty());
}

TEST_CASE("canonical_form examples") {
  CHECK(canonical_form(CyclicWord::parse("ba"), free2).str() == "ab");
  CHECK(canonical_form(CyclicWord::parse("aa"), free2).str() == "aa");
}

TEST_CASE("half-relator swap orbits share a canonical form and a trace") {
  const oracle::SurfaceOracle o;
  const auto rep = octagon_representation();
  int checked = 0;
  for (int n = 4; n <= 6; ++n) {
    for (const auto& w : oracle::reduced_words("abcdABCD", n)) {
      if (o.dehn_reducible(w)) continue;
      const auto swaps = o.half_swaps(w);
      if (swaps.empty()) continue;
      const auto base = canonical_form(CyclicWord::parse(w), genus2);
      const double tr = std::abs(evaluate_word(rep, base).trace());
      for (const auto& s : swaps) {
        const auto other = CyclicWord::parse(s);
        CHECK(canonical_form(other, genus2) == base);
        CHECK(std::abs(std::abs(evaluate_word(rep, other).trace()) - tr) < 1e-9 * tr);
      }
      if (++checked > 400) return;
    }
  }
}

TEST_CASE("is_primitive examples") {
  auto ab = is_primitive(CyclicWord::parse("ab"));
  CHECK(ab.primitive);
  CHECK(ab.power == 1);
  auto ab2 = is_primitive(CyclicWord::parse("abab"));
  CHECK_FALSE(ab2.primitive);
  CHECK(ab2.root.str() == "ab");
  CHECK(ab2.power == 2);
  auto ab3 = is_primitive(CyclicWord::parse("ababab"));
  CHECK(ab3.root.str() == "ab");
  CHECK(ab3.power == 3);
}

TEST_CASE("enumerate_classes examples") {
  auto c1 = enumerate_classes(free2, 1);
  REQUIRE(c1.size() == 4);
  std::set<std::string> gens;
  for (const auto& c : c1) gens.insert(c.representative.str());
  CHECK(gens == std::set<std::string>{"a", "b", "A", "B"});

  auto c2 = enumerate_classes(free2, 2);
  CHECK(c2.size() == 12);
  int squares = 0, primitive = 0;
  for (const auto& c : c2) {
    if (c.n != 2) continue;
    (c.primitive ? primitive : squares)++;
  }
  CHECK(squares == 4);
  CHECK(primitive == 4);

  auto g = enumerate_classes(genus2, 2);
  std::map<int, int> by_n;
  for (const auto& c : g) ++by_n[c.n];
  CHECK(by_n[1] == 8);
  CHECK(by_n[2] == 32);
}

TEST_CASE("classes match the matrix-conjugacy oracle for n <= 6") {
  std::map<int, std::size_t> free_counts;
  for (const auto& c : enumerate_classes(free2, 6)) ++free_counts[c.n];
  for (int n = 1; n <= 6; ++n) CHECK(free_counts[n] == oracle::free_class_count(2, n));

  auto truth = oracle::octagon_classes(6, 2);
  const auto counts = truth.counts();
  std::map<std::string, int> listed;
  for (const auto& c : enumerate_classes(genus2, 6)) listed[c.representative.str()] = c.n;
  std::map<int, std::size_t> by_n;
  for (const auto& [rep, n] : listed) ++by_n[n];
  for (int n = 1; n <= 6; ++n) {
    CAPTURE(n);
    CHECK(by_n[n] == static_cast<std::size_t>(counts[n]));
  }
  // Every shortest word of an oracle class has the same canonical form, and
  // that form is the enumerated representative.
  std::set<std::string> seen;
  for (const auto& members : truth.minimal_words()) {
    const auto canon = canonical_form(CyclicWord::parse(oracle::ascii(members.front())), genus2).str();
    CHECK(listed.count(canon) == 1);
    CHECK(seen.insert(canon).second);
    for (const auto& m : members) CHECK(canonical_form(CyclicWord::parse(oracle::ascii(m)), genus2).str() == canon);
  }
}

TEST_CASE("enumeration order and conjugacy soundness") {
  const auto rep = octagon_representation();
  const auto classes = enumerate_classes(genus2, 5);
  for (std::size_t i = 1; i < classes.size(); ++i) {
    const auto& x = classes[i - 1];
    const auto& y = classes[i];
    CHECK((x.n < y.n || (x.n == y.n && x.representative < y.representative)));
  }
  for (std::size_t i = 0; i < classes.size(); i += 7) {
    const auto& w = classes[i].representative;
    const double t = evaluate_word(rep, w).trace();
    for (std::size_t k = 1; k < w.size(); ++k) {
      CHECK(std::abs(evaluate_word(rep, w.rotated(k)).trace() - t) < 1e-9 * std::max(1.0, std::abs(t)));
    }
  }
}

TEST_CASE("directedness: inverse classes are emitted separately") {
  const auto classes = enumerate_classes(genus2, 4);
  std::set<std::string> reps;
  for (const auto& c : classes) reps.insert(c.representative.str());
  for (const auto& c : classes) {
    const auto inv = canonical_form(c.representative.inverse(), genus2).str();
    CHECK(reps.count(inv) == 1);
  }
  CHECK(reps.count("a") == 1);
  CHECK(reps.count("A") == 1);
}

TEST_CASE("free-mode count law: trace of M^n") {
  const auto words = oracle::reduced_words("abAB", 3);
  CHECK(words.size() == 28);
  const auto sys = MarkovChainSystem::free_group_no_backtrack(2);
  CHECK(std::exp(periodic_point_sum(sys, 3, 0.0)) == doctest::Approx(28.0).epsilon(1e-12));
  int necklaces = 0, primitive = 0;
  for (const auto& c : enumerate_classes(free2, 3)) {
    if (c.n != 3) continue;
    ++necklaces;
    primitive += c.primitive;
  }
  CHECK(necklaces == 12);
  CHECK(primitive == 8);
  for (int n = 1; n <= 8; ++n) {
    CHECK(static_cast<double>(oracle::reduced_words("abAB", n).size()) ==
          doctest::Approx(std::exp(periodic_point_sum(sys, n, 0.0))).epsilon(1e-12));
  }
}

TEST_CASE("memory budget fails fast") {
  EnumerationOptions opts;
  opts.memory_budget_bytes = 1 << 10;
  CHECK_THROWS_AS(check_memory_budget(genus2, 12, opts), MemoryBudgetExceeded);
}

TEST_CASE("parsing rejects bad input") {
  CHECK_THROWS(CyclicWord::parse("aA"));
  CHECK_THROWS(CyclicWord::parse(""));
  CHECK_THROWS(Word::parse("a?"));
  CHECK(SurfacePresentation::from_description(genus2.describe()) == genus2);
  CHECK(SurfacePresentation::from_description(free2.describe()) == free2);
}
