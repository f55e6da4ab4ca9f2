#include "geodesics/stats_limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "geodesics/error.hpp"

namespace geodesics {

namespace {

void require_certified(const Census& c, double T) {
  if (!(T > 0.0)) throw UsageError("T must be positive");
  if (T > c.T_cert()) {
    throw CutoffExceeded("T = " + std::to_string(T) + " exceeds the certified cutoff T_cert = " +
                         std::to_string(c.T_cert()));
  }
}

// Prime records with ell < T, in ell order.
template <class Fn>
void for_each_prime_below(const Census& c, double T, Fn&& fn) {
  for (const auto& r : c.records()) {
    if (!(r.ell < T)) break;
    if (r.primitive) fn(r);
  }
}

struct LinearFit {
  double slope = 0.0, intercept = 0.0, slope_se = 0.0, r2 = 0.0;
};

LinearFit weighted_fit(const std::vector<double>& x, const std::vector<double>& y,
                       const std::vector<double>& w) {
  const std::size_t m = x.size();
  double sw = 0.0, mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sw += w[i];
    mx += w[i] * x[i];
    my += w[i] * y[i];
  }
  mx /= sw;
  my /= sw;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
    syy += w[i] * (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    rss += w[i] * r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - rss / syy : 1.0;
  // Weights are treated as relative precisions.
  f.slope_se = m > 2 ? std::sqrt(rss / static_cast<double>(m - 2) / sxx) : 0.0;
  return f;
}

// Least squares by normal equations on a small basis.
std::vector<double> least_squares(const std::vector<std::vector<double>>& rows,
                                  const std::vector<double>& y) {
  const std::size_t p = rows.front().size();
  std::vector<std::vector<long double>> a(p, std::vector<long double>(p + 1, 0.0L));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t k = 0; k < p; ++k) a[j][k] += static_cast<long double>(rows[i][j]) * rows[i][k];
      a[j][p] += static_cast<long double>(rows[i][j]) * y[i];
    }
  }
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < p; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    std::swap(a[col], a[piv]);
    if (a[col][col] == 0.0L) throw ConvergenceFailure("singular least-squares system");
    for (std::size_t r = 0; r < p; ++r) {
      if (r == col) continue;
      const long double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k <= p; ++k) a[r][k] -= f * a[col][k];
    }
  }
  std::vector<double> beta(p);
  for (std::size_t j = 0; j < p; ++j) beta[j] = static_cast<double>(a[j][p] / a[j][j]);
  return beta;
}

// KS distance of a sorted sample to N(0, sigma2), plus the CDF table.
double ks_distance(std::vector<double> xs, double sigma2, std::vector<CdfRow>& table) {
  std::sort(xs.begin(), xs.end());
  const double total = static_cast<double>(xs.size());
  const double sd = std::sqrt(sigma2);
  double ks = 0.0;
  std::size_t i = 0;
  table.clear();
  while (i < xs.size()) {
    std::size_t j = i;
    while (j < xs.size() && xs[j] == xs[i]) ++j;
    const double below = static_cast<double>(i) / total;
    const double upto = static_cast<double>(j) / total;
    const double phi = normal_cdf(xs[i] / sd);
    ks = std::max({ks, std::abs(below - phi), std::abs(upto - phi)});
    table.push_back(CdfRow{xs[i], j - i, upto, phi});
    i = j;
  }
  return ks;
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double li(double x) {
  if (!(x >= 2.0)) throw std::domain_error("li(x) requires x >= 2");
  if (x == 2.0) return 0.0;
  // u = e^t turns the integrand into e^t / t on [log 2, log x].
  auto f = [](long double t) { return std::exp(t) / t; };
  long double error = 0.0L;
  const long double value = boost::math::quadrature::gauss_kronrod<long double, 61>::integrate(
      f, std::log(2.0L), std::log(static_cast<long double>(x)), 30, 1e-14L, &error);
  return static_cast<double>(value);
}

std::size_t count_pi(const Census& c, double T) {
  require_certified(c, T);
  std::size_t count = 0;
  for_each_prime_below(c, T, [&](const GeodesicRecord&) { ++count; });
  return count;
}

AverageReport average_word_length(const Census& c, double T, const ThermoConstants& k) {
  require_certified(c, T);
  AverageReport rep;
  rep.T = T;
  double total = 0.0;
  for_each_prime_below(c, T, [&](const GeodesicRecord& r) {
    ++rep.pi;
    total += r.n;
  });
  if (rep.pi == 0) throw EmptyWindow("no prime classes with length below T");
  rep.mean = total / static_cast<double>(rep.pi);
  const double x = std::exp(k.h * T);
  rep.model = x >= 2.0 ? (k.A / k.h) * x / li(x) : std::numeric_limits<double>::quiet_NaN();
  rep.ratio = rep.mean / rep.model;
  rep.expansion_stated = k.A * T + k.A / k.h;
  rep.expansion_derived = k.A * T - k.A / k.h;
  return rep;
}

double ratio_average(const Census& c, double T) {
  require_certified(c, T);
  std::size_t count = 0;
  double total = 0.0;
  for_each_prime_below(c, T, [&](const GeodesicRecord& r) {
    ++count;
    total += r.n / r.ell;
  });
  if (count == 0) throw EmptyWindow("no prime classes with length below T");
  return total / static_cast<double>(count);
}

TrendFit average_slope(const Census& c, const std::vector<double>& T_grid) {
  std::vector<double> xs, ys, ws;
  for (double T : T_grid) {
    require_certified(c, T);
    std::size_t count = 0;
    double total = 0.0;
    for_each_prime_below(c, T, [&](const GeodesicRecord& r) {
      ++count;
      total += r.n;
    });
    if (count == 0) continue;
    xs.push_back(T);
    ys.push_back(total / static_cast<double>(count));
    ws.push_back(1.0);
  }
  if (xs.size() < 3) throw InsufficientData("need at least 3 nonempty grid points");
  const LinearFit f = weighted_fit(xs, ys, ws);
  return TrendFit{f.slope, f.intercept, f.slope_se, f.r2};
}

VarianceReport variance_word_length(const Census& c, const std::vector<double>& T_grid,
                                    std::size_t min_count) {
  VarianceReport rep;
  rep.min_count = min_count;
  std::vector<double> xs, ys, ws;
  for (double T : T_grid) {
    require_certified(c, T);
    VariancePoint pt;
    pt.T = T;
    double sum = 0.0;
    for_each_prime_below(c, T, [&](const GeodesicRecord& r) {
      ++pt.pi;
      sum += r.n;
    });
    if (pt.pi < min_count) {
      throw InsufficientData("pi(" + std::to_string(T) + ") = " + std::to_string(pt.pi) + " < " +
                             std::to_string(min_count));
    }
    pt.mean = sum / static_cast<double>(pt.pi);
    double ss = 0.0;
    for_each_prime_below(c, T, [&](const GeodesicRecord& r) { ss += (r.n - pt.mean) * (r.n - pt.mean); });
    pt.variance = ss / static_cast<double>(pt.pi);
    rep.points.push_back(pt);
    xs.push_back(T);
    ys.push_back(pt.variance);
    ws.push_back(static_cast<double>(pt.pi));
  }
  if (rep.points.size() < 3) throw InsufficientData("variance fit needs at least 3 grid points");
  const LinearFit f = weighted_fit(xs, ys, ws);
  rep.sigma2_hat = f.slope;
  rep.D_hat = f.intercept;
  rep.slope_std_error = f.slope_se;
  rep.r_squared = f.r2;
  for (auto& pt : rep.points) pt.fitted = f.intercept + f.slope * pt.T;
  return rep;
}

CltReport clt_empirical(const Census& c, double T, double A, double sigma2, Centering centering,
                        std::size_t min_count) {
  require_certified(c, T);
  if (!(sigma2 > kDegenerateSigma2)) {
    throw DegenerateVariance("sigma^2 = " + std::to_string(sigma2) + " is degenerate");
  }
  CltReport rep;
  rep.T = T;
  rep.A = A;
  rep.sigma2 = sigma2;
  rep.centering = centering;
  rep.min_count = min_count;
  std::vector<double> xs;
  const double root = std::sqrt(T);
  for_each_prime_below(c, T, [&](const GeodesicRecord& r) {
    const double centre = centering == Centering::stated ? A * T : A * r.ell;
    xs.push_back((r.n - centre) / root);
  });
  rep.pi = xs.size();
  if (rep.pi < min_count) {
    throw InsufficientData("pi(T) = " + std::to_string(rep.pi) + " < " + std::to_string(min_count));
  }
  rep.ks = ks_distance(std::move(xs), sigma2, rep.table);
  return rep;
}

LltReport llt_profile(const Census& c, double T, double A, double sigma2,
                      const std::vector<double>& x_grid, std::size_t min_count) {
  require_certified(c, T);
  if (!(sigma2 > kDegenerateSigma2)) {
    throw DegenerateVariance("sigma^2 = " + std::to_string(sigma2) + " is degenerate");
  }
  if (x_grid.empty()) throw UsageError("empty x grid");
  LltReport rep;
  rep.T = T;
  rep.A = A;
  rep.sigma2 = sigma2;
  std::map<int, std::size_t> hist;
  for_each_prime_below(c, T, [&](const GeodesicRecord& r) {
    ++hist[r.n];
    ++rep.pi;
  });
  if (rep.pi < min_count) {
    throw InsufficientData("pi(T) = " + std::to_string(rep.pi) + " < " + std::to_string(min_count));
  }
  const double centre = A * T;
  const double pi = static_cast<double>(rep.pi);
  // Classes with x - 1/2 < n - A T <= x + 1/2.
  auto window = [&](double x) {
    std::size_t count = 0;
    for (const auto& [n, k] : hist) {
      const double d = n - centre;
      if (d > x - 0.5 && d <= x + 0.5) count += k;
    }
    return count;
  };
  const double var = sigma2 * T;
  rep.peak_model = 1.0 / std::sqrt(2.0 * std::numbers::pi * sigma2);
  for (double x : x_grid) {
    LltRow row;
    row.x = x;
    row.count = window(x);
    row.frequency = static_cast<double>(row.count) / pi;
    row.model = std::exp(-x * x / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
    row.scaled = std::sqrt(T) * row.frequency;
    row.scaled_model = std::sqrt(T) * row.model;
    rep.rows.push_back(row);
  }
  // Unit lattice through the first grid point covering every class.
  const double x0 = x_grid.front();
  const int k_lo = static_cast<int>(std::floor(hist.begin()->first - centre - x0)) - 1;
  const int k_hi = static_cast<int>(std::ceil(hist.rbegin()->first - centre - x0)) + 1;
  std::size_t covered = 0;
  for (int k = k_lo; k <= k_hi; ++k) covered += window(x0 + k);
  rep.window_sum = static_cast<double>(covered) / pi;
  return rep;
}

double log_C(const Census& c, double T, double z) {
  require_certified(c, T);
  std::vector<double> e;
  for_each_prime_below(c, T, [&](const GeodesicRecord& r) { e.push_back(z * r.n); });
  if (e.empty()) throw EmptyWindow("no prime classes with length below T");
  const double top = *std::max_element(e.begin(), e.end());
  long double total = 0.0L;
  for (double v : e) total += std::exp(static_cast<long double>(v - top));
  return top + static_cast<double>(std::log(total));
}

double log_E(const Census& c, int n, double z) {
  if (n < 1 || n > c.n_max()) throw UsageError("n must lie in [1, n_max]");
  std::vector<double> e;
  for (const auto& r : c.records()) {
    if (r.n == n && r.primitive) e.push_back(z * r.ell);
  }
  if (e.empty()) throw EmptyWindow("no prime classes of word length " + std::to_string(n));
  const double top = *std::max_element(e.begin(), e.end());
  long double total = 0.0L;
  for (double v : e) total += std::exp(static_cast<long double>(v - top));
  return top + static_cast<double>(std::log(total));
}

MgfReport moment_generating(const Census& c, double T, double z, const PressureEvaluator& pe,
                            double h) {
  MgfReport rep;
  rep.T = T;
  rep.z = z;
  rep.log_C = log_C(c, T, z);
  rep.log_C0 = log_C(c, T, 0.0);
  rep.log_ratio = rep.log_C - rep.log_C0;
  rep.sigma_z = solve_sigma(pe, z);
  rep.log_ratio_model = std::log(h / rep.sigma_z) + (rep.sigma_z - h) * T;
  rep.model_gap = std::abs(rep.log_ratio - rep.log_ratio_model);
  return rep;
}

WordStatsReport word_ordered_stats(const Census& c, int n, const ThermoConstants& k,
                                   std::size_t min_count) {
  if (n < 1 || n > c.n_max()) throw UsageError("n must lie in [1, n_max]");
  WordStatsReport rep;
  rep.n = n;
  rep.A_tilde = k.A_tilde;
  rep.min_count = min_count;
  std::vector<std::vector<double>> ells(static_cast<std::size_t>(n) + 1);
  for (const auto& r : c.records()) {
    if (r.primitive && r.n <= n) ells[r.n].push_back(r.ell);
  }
  const auto& top = ells[static_cast<std::size_t>(n)];
  rep.count = top.size();
  if (rep.count < min_count) {
    throw InsufficientData(std::to_string(rep.count) + " prime classes of word length " +
                           std::to_string(n) + " < " + std::to_string(min_count));
  }
  for (int m = (n + 1) / 2; m <= n; ++m) {
    const auto& v = ells[static_cast<std::size_t>(m)];
    if (v.size() < min_count) continue;
    WordLengthRow row;
    row.n = m;
    row.count = v.size();
    double sum = 0.0;
    for (double x : v) sum += x;
    row.mean_ell = sum / static_cast<double>(v.size());
    row.mean_ratio = row.mean_ell / m;
    double ss = 0.0;
    for (double x : v) ss += (x - row.mean_ell) * (x - row.mean_ell);
    row.var_ell = ss / static_cast<double>(v.size());
    rep.grid.push_back(row);
  }
  const WordLengthRow& last = rep.grid.back();
  rep.mean_ell = last.mean_ell;
  rep.mean_over_n = last.mean_ratio;

  const std::size_t points = rep.grid.size();
  for (double& a : rep.a) a = std::numeric_limits<double>::quiet_NaN();
  if (points >= 2) {
    std::vector<double> xs, ys, ws;
    for (const auto& row : rep.grid) {
      xs.push_back(row.n);
      ys.push_back(row.var_ell);
      ws.push_back(1.0);
    }
    rep.sigma_tilde2 = weighted_fit(xs, ys, ws).slope;
    const std::size_t terms = std::min<std::size_t>(4, points);
    std::vector<std::vector<double>> basis;
    std::vector<double> y;
    for (const auto& row : rep.grid) {
      std::vector<double> b(terms);
      for (std::size_t j = 0; j < terms; ++j) b[j] = std::pow(1.0 / row.n, static_cast<double>(j));
      basis.push_back(std::move(b));
      y.push_back(row.mean_ratio);
    }
    const auto beta = least_squares(basis, y);
    for (std::size_t j = 0; j < terms; ++j) rep.a[j] = beta[j];
  } else {
    rep.sigma_tilde2 = last.var_ell / n;
    rep.a[0] = last.mean_ratio;
  }
  if (rep.sigma_tilde2 > kDegenerateSigma2) {
    std::vector<double> xs;
    xs.reserve(top.size());
    const double root = std::sqrt(static_cast<double>(n));
    for (double ell : top) xs.push_back((ell - k.A_tilde * n) / root);
    rep.ks = ks_distance(std::move(xs), rep.sigma_tilde2, rep.table);
  } else {
    rep.ks = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

std::vector<double> parse_grid(const std::string& spec) {
  const auto a = spec.find(':');
  const auto b = a == std::string::npos ? std::string::npos : spec.find(':', a + 1);
  if (b == std::string::npos) throw UsageError("grid must look like lo:hi:step, got " + spec);
  double lo = 0.0, hi = 0.0, step = 0.0;
  try {
    lo = std::stod(spec.substr(0, a));
    hi = std::stod(spec.substr(a + 1, b - a - 1));
    step = std::stod(spec.substr(b + 1));
  } catch (const std::exception&) {
    throw UsageError("unparsable grid " + spec);
  }
  if (!(step > 0.0) || hi < lo) throw UsageError("grid needs step > 0 and hi >= lo: " + spec);
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 1000000) throw UsageError("grid too large: " + spec);
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

}  // namespace geodesics
