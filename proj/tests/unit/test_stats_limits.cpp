#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "li_series.hpp"

#include "geodesics/census.hpp"
#include "geodesics/error.hpp"
#include "geodesics/stats_limits.hpp"
#include "geodesics/symbolic_thermo.hpp"

using namespace geodesics;

namespace {

const double kOctagonLength = 2.0 * std::acosh(1.0 + std::sqrt(2.0));

const Census& octagon8() {
  static const Census c = [] {
    CensusOptions o;
    o.workers = 1;
    return build_census(SurfacePresentation::surface(2), octagon_representation(), 8, o);
  }();
  return c;
}

const MarkovChainSystem& roof12() {
  static const auto sys = MarkovChainSystem::full_shift({1.0, 2.0});
  return sys;
}

const Census& golden16() {
  static const Census c = build_census_from_system(roof12(), 16);
  return c;
}

const ThermoConstants& golden_constants() {
  static const auto t = thermo_constants(PressureEvaluator::exact(roof12()));
  return t;
}

Census single_class() {
  Census c("free:rank=2", "schottky:separation=3", "abAB", 1);
  const std::vector<std::uint8_t> a{0};
  c.add(a, 0, 1, true, 3.0, 2.0 * std::cosh(1.5));
  c.finalize();
  return c;
}

}  // namespace

TEST_CASE("li against the series oracle") {
  CHECK(li(2.0) == 0.0);
  CHECK(li(10.0) == doctest::Approx(5.12043572).epsilon(1e-9));
  for (double x : {2.5, 10.0, 100.0, 1e4, 1e6, 1e9}) {
    CAPTURE(x);
    CHECK(std::abs(li(x) - oracle::li_offset(x)) <= 1e-10 * std::abs(oracle::li_offset(x)) + 1e-14);
  }
  CHECK(std::abs(li(1e6) * std::log(1e6) / 1e6 - 1.0) < 0.1);
  CHECK_THROWS_AS(li(1.5), std::domain_error);
}

TEST_CASE("count_pi") {
  const auto& c = octagon8();
  CHECK(count_pi(c, 1.0) == 0);
  CHECK(count_pi(c, 3.1) == 24);
  CHECK(count_pi(c, kOctagonLength - 1e-9) == 0);
  std::size_t prev = 0;
  for (double T = 1.0; T <= c.T_cert(); T += 0.25) {
    const auto p = count_pi(c, T);
    CHECK(p >= prev);
    prev = p;
  }
  CHECK_THROWS_AS(count_pi(c, c.T_cert() + 0.1), CutoffExceeded);
}

TEST_CASE("average_word_length and ratio_average on a single class") {
  const auto c = single_class();
  ThermoConstants k;
  k.h = 1.0;
  k.A = 0.5;
  const auto r = average_word_length(c, 3.5, k);
  CHECK(r.pi == 1);
  CHECK(r.mean == 1.0);
  CHECK(ratio_average(c, 3.5) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(average_word_length(c, 2.0, k), EmptyWindow);
  CHECK_THROWS_AS(ratio_average(c, 2.0), EmptyWindow);
}

TEST_CASE("ratio_average on the shortest octagon classes") {
  // Eight classes each of word length 1, 2 and 3 (a, ab, abc, ...) share
  // the shortest length.
  CHECK(count_pi(octagon8(), 3.06) == 24);
  CHECK(ratio_average(octagon8(), 3.06) == doctest::Approx(2.0 / kOctagonLength).epsilon(1e-12));
  CHECK(1.0 / kOctagonLength == doctest::Approx(0.3271).epsilon(1e-3));
}

TEST_CASE("average word length model") {
  const auto& k = golden_constants();
  const auto r = average_word_length(golden16(), golden16().T_cert(), k);
  const double eh = std::exp(k.h * r.T);
  CHECK(r.model == doctest::Approx(k.A / k.h * eh / li(eh)).epsilon(1e-14));
  CHECK(r.ratio == doctest::Approx(r.mean / r.model).epsilon(1e-14));
  CHECK(r.expansion_stated == doctest::Approx(k.A * r.T + k.A / k.h));
  CHECK(r.expansion_derived == doctest::Approx(k.A * r.T - k.A / k.h));
}

TEST_CASE("octagon mean word length grows along a T grid") {
  const auto& c = octagon8();
  ThermoConstants k;
  k.h = 1.0;
  k.A = 0.6;
  const double first = average_word_length(c, 6.0, k).mean;
  double prev = first;
  for (double T = 6.6; T <= c.T_cert(); T += 0.6) {
    const double m = average_word_length(c, T, k).mean;
    CHECK(m >= prev);
    prev = m;
  }
  CHECK(prev > first + 1.0);
}

TEST_CASE("variance is zero for a constant roof") {
  const auto flat = build_census_from_system(MarkovChainSystem::full_shift({1.0, 1.0}), 12);
  std::vector<double> grid;
  for (double T = 8.5; T <= 12.5; T += 1.0) grid.push_back(T);
  const auto v = variance_word_length(flat, grid);
  for (const auto& p : v.points) CHECK(p.variance < 4.0);
  CHECK(std::abs(v.sigma2_hat) < 0.05);
  CHECK_THROWS_AS(clt_empirical(flat, 12.5, 1.0, 0.0), DegenerateVariance);
  CHECK_THROWS_AS(llt_profile(flat, 12.5, 1.0, 0.0, {0.0}), DegenerateVariance);
}

TEST_CASE("variance fit needs enough classes") {
  CHECK_THROWS_AS(variance_word_length(octagon8(), {3.1, 4.0, 5.0}), InsufficientData);
}

TEST_CASE("clt table is a CDF") {
  const auto& k = golden_constants();
  const auto r = clt_empirical(golden16(), golden16().T_cert(), k.A, k.sigma2);
  REQUIRE_FALSE(r.table.empty());
  double prev = 0.0;
  std::size_t total = 0;
  for (const auto& row : r.table) {
    CHECK(row.empirical >= prev);
    prev = row.empirical;
    total += row.count;
  }
  CHECK(r.table.back().empirical == 1.0);
  CHECK(total == r.pi);
  CHECK(r.ks >= 0.0);
  CHECK(r.ks <= 1.0);
  CHECK_THROWS_AS(clt_empirical(octagon8(), 3.5, 0.6, 0.05), InsufficientData);
}

TEST_CASE("ks distance against a brute-force sup") {
  const auto& k = golden_constants();
  const double T = golden16().T_cert();
  const auto r = clt_empirical(golden16(), T, k.A, k.sigma2);
  std::vector<double> xs;
  for (const auto& g : golden16().records()) {
    if (g.primitive && g.ell < T) xs.push_back((g.n - k.A * T) / std::sqrt(T));
  }
  std::sort(xs.begin(), xs.end());
  // Both sides of every jump of the empirical CDF, one jump per distinct value.
  const double sd = std::sqrt(k.sigma2);
  const double N = static_cast<double>(xs.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < xs.size();) {
    std::size_t j = i;
    while (j < xs.size() && xs[j] == xs[i]) ++j;
    const double f = normal_cdf(xs[i] / sd);
    sup = std::max({sup, std::abs(j / N - f), std::abs(i / N - f)});
    i = j;
  }
  CHECK(r.ks == doctest::Approx(sup).epsilon(1e-12));
}

TEST_CASE("llt profile") {
  const auto& k = golden_constants();
  const double T = golden16().T_cert();
  std::vector<double> grid;
  for (int x = -40; x <= 40; ++x) grid.push_back(x);
  const auto r = llt_profile(golden16(), T, k.A, k.sigma2, grid);
  CHECK(r.window_sum == 1.0);
  double sum = 0.0;
  for (const auto& row : r.rows) sum += row.frequency;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  const auto tail = llt_profile(golden16(), T, k.A, k.sigma2, {1000.0});
  CHECK(tail.rows[0].count == 0);
  CHECK(tail.rows[0].frequency == 0.0);
  CHECK(r.peak_model == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi * k.sigma2)));
  for (const auto& row : r.rows) {
    CHECK(row.scaled == doctest::Approx(std::sqrt(T) * row.frequency));
    CHECK(row.model == doctest::Approx(std::exp(-row.x * row.x / (2 * k.sigma2 * T)) /
                                       std::sqrt(2 * std::numbers::pi * k.sigma2 * T)));
  }
}

TEST_CASE("moment generating functions") {
  const auto& c = octagon8();
  const double T = c.T_cert();
  CHECK(log_C(c, T, 0.0) == doctest::Approx(std::log(static_cast<double>(count_pi(c, T)))).epsilon(1e-14));
  std::size_t primes6 = 0;
  for (const auto& r : c.records()) primes6 += (r.n == 6 && r.primitive);
  CHECK(log_E(c, 6, 0.0) == doctest::Approx(std::log(static_cast<double>(primes6))).epsilon(1e-14));
  CHECK_THROWS_AS(log_E(c, 9, 0.0), UsageError);

  const auto pe = PressureEvaluator::exact(roof12());
  const auto& k = golden_constants();
  for (double z : {-0.02, 0.02}) {
    const auto m = moment_generating(golden16(), golden16().T_cert(), z, pe, k.h);
    CHECK(m.log_ratio == doctest::Approx(m.log_C - m.log_C0));
    CHECK(m.sigma_z == doctest::Approx(solve_sigma(pe, z)));
    CHECK(m.model_gap < 0.2);
  }
}

TEST_CASE("word-ordered statistics") {
  const auto s = build_census(SurfacePresentation::free_group(2), schottky_representation(3.0), 3);
  const auto one = word_ordered_stats(s, 1, ThermoConstants{}, 1);
  CHECK(one.mean_ell == doctest::Approx(3.0).epsilon(1e-12));

  const auto& k = golden_constants();
  const auto r = word_ordered_stats(golden16(), 16, k);
  CHECK(r.mean_over_n == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(r.a[0] == doctest::Approx(k.A_tilde).epsilon(1e-6));
  CHECK(r.grid.front().n == 8);
  CHECK(r.grid.back().n == 16);
  CHECK_THROWS_AS(word_ordered_stats(golden16(), 17, k), UsageError);
  CHECK_THROWS_AS(word_ordered_stats(golden16(), 2, k), InsufficientData);
}

TEST_CASE("every prime class below T sits in one word-length bucket") {
  const auto& c = octagon8();
  const double T = c.T_cert();
  std::vector<std::size_t> buckets(c.n_max() + 1, 0);
  for (const auto& r : c.records()) {
    if (r.primitive && r.ell < T) ++buckets[r.n];
  }
  std::size_t total = 0;
  for (auto b : buckets) total += b;
  CHECK(total == count_pi(c, T));
}

TEST_CASE("estimator triangle: slope of mean word length against A") {
  const auto& c = octagon8();
  std::vector<double> grid;
  for (double T = c.T_cert() / 2; T <= c.T_cert(); T += c.T_cert() / 20) grid.push_back(T);
  const auto fit = average_slope(c, grid);
  const auto t = thermo_constants(PressureEvaluator::from_census(c));
  CHECK(std::abs(fit.slope - t.A) / t.A < 0.1);
}

TEST_CASE("scale equivariance of census statistics") {
  const double scale = 2.0;
  const auto big = build_census_from_system(roof12().scaled(scale), 16);
  const auto base = thermo_constants(PressureEvaluator::from_census(golden16()));
  const auto scaled = thermo_constants(PressureEvaluator::from_census(big));
  CHECK(scaled.h == doctest::Approx(base.h / scale).epsilon(1e-6));
  CHECK(scaled.A == doctest::Approx(base.A / scale).epsilon(1e-6));
  CHECK(scaled.A_tilde == doctest::Approx(base.A_tilde * scale).epsilon(1e-6));
  CHECK(count_pi(big, 2 * 10.0) == count_pi(golden16(), 10.0));
}

TEST_CASE("parse_grid") {
  const auto g = parse_grid("-1:1:0.5");
  REQUIRE(g.size() == 5);
  CHECK(g.front() == -1.0);
  CHECK(g.back() == 1.0);
  CHECK(parse_grid("2:2:1").size() == 1);
  CHECK_THROWS_AS(parse_grid("1:0:1"), UsageError);
  CHECK_THROWS_AS(parse_grid("a:b"), UsageError);
  CHECK_THROWS_AS(parse_grid("0:1:0"), UsageError);
}

TEST_CASE("cutoff is enforced everywhere") {
  const auto& c = octagon8();
  const double T = c.T_cert() + 1.0;
  ThermoConstants k;
  k.h = 1.0;
  k.A = 0.6;
  k.sigma2 = 0.05;
  CHECK_THROWS_AS(average_word_length(c, T, k), CutoffExceeded);
  CHECK_THROWS_AS(ratio_average(c, T), CutoffExceeded);
  CHECK_THROWS_AS(variance_word_length(c, {T}), CutoffExceeded);
  CHECK_THROWS_AS(clt_empirical(c, T, 0.6, 0.05), CutoffExceeded);
  CHECK_THROWS_AS(llt_profile(c, T, 0.6, 0.05, {0.0}), CutoffExceeded);
  CHECK_THROWS_AS(log_C(c, T, 0.0), CutoffExceeded);
}
