#include "geodesics/symbolic_thermo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "geodesics/error.hpp"

namespace geodesics {

namespace {

using Matrix = std::vector<long double>;  // row-major k x k

Matrix weighted_matrix(const MarkovChainSystem& sys, long double s) {
  const int k = sys.k();
  Matrix m(static_cast<std::size_t>(k * k), 0.0L);
  for (int i = 0; i < k; ++i) {
    const long double w = std::exp(-s * static_cast<long double>(sys.roof()[static_cast<std::size_t>(i)]));
    for (int j = 0; j < k; ++j) {
      if (sys.allowed(i, j)) m[static_cast<std::size_t>(i * k + j)] = w;
    }
  }
  return m;
}

// Leading eigenvector of m (or of its transpose) by power iteration.
std::vector<long double> power_iterate(const Matrix& m, int k, bool transpose, long double& lambda,
                                       int& iterations) {
  std::vector<long double> v(static_cast<std::size_t>(k), 1.0L / k), w(static_cast<std::size_t>(k));
  constexpr long double kTight = 2e-17L;
  constexpr long double kLoose = 1e-13L;
  constexpr int kMaxIterations = 1000000;
  long double best_gap = std::numeric_limits<long double>::infinity();
  int stalled = 0;
  for (int it = 1; it <= kMaxIterations; ++it) {
    for (int i = 0; i < k; ++i) {
      long double acc = 0.0L;
      for (int j = 0; j < k; ++j) {
        acc += transpose ? m[static_cast<std::size_t>(j * k + i)] * v[static_cast<std::size_t>(j)]
                         : m[static_cast<std::size_t>(i * k + j)] * v[static_cast<std::size_t>(j)];
      }
      w[static_cast<std::size_t>(i)] = acc;
    }
    long double lo = std::numeric_limits<long double>::infinity(), hi = 0.0L, total = 0.0L;
    for (int i = 0; i < k; ++i) {
      const long double ratio = w[static_cast<std::size_t>(i)] / v[static_cast<std::size_t>(i)];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      total += w[static_cast<std::size_t>(i)];
    }
    if (!(total > 0.0L) || !std::isfinite(static_cast<double>(total))) {
      throw ConvergenceFailure("power iteration lost positivity");
    }
    for (int i = 0; i < k; ++i) v[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] / total;
    const long double gap = (hi - lo) / hi;
    lambda = (lo + hi) / 2.0L;
    iterations = it;
    if (gap <= kTight) return v;
    // Rounding noise can keep the bracket from closing completely; accept
    // once it stops shrinking below the loose tolerance.
    if (gap < best_gap * 0.999L) {
      best_gap = gap;
      stalled = 0;
    } else if (++stalled > 50 && best_gap <= kLoose) {
      return v;
    }
  }
  throw ConvergenceFailure("power iteration did not converge");
}

long double log_trace_power(const MarkovChainSystem& sys, int n, long double s) {
  const int k = sys.k();
  const Matrix m = weighted_matrix(sys, s);
  Matrix p = m, q(m.size());
  long double log_scale = 0.0L;
  auto rescale = [&](Matrix& x) {
    long double mx = 0.0L;
    for (auto e : x) mx = std::max(mx, e);
    if (mx > 0.0L) {
      for (auto& e : x) e /= mx;
      log_scale += std::log(mx);
    }
  };
  rescale(p);
  for (int step = 1; step < n; ++step) {
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        long double acc = 0.0L;
        for (int l = 0; l < k; ++l) {
          acc += p[static_cast<std::size_t>(i * k + l)] * m[static_cast<std::size_t>(l * k + j)];
        }
        q[static_cast<std::size_t>(i * k + j)] = acc;
      }
    }
    p.swap(q);
    rescale(p);
  }
  long double tr = 0.0L;
  for (int i = 0; i < k; ++i) tr += p[static_cast<std::size_t>(i * k + i)];
  if (!(tr > 0.0L)) return -std::numeric_limits<long double>::infinity();
  return log_scale + std::log(tr);
}

int moebius(int n) {
  int result = 1;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    result = -result;
  }
  if (n > 1) result = -result;
  return result;
}

// Sum over primitive orbits of length p of exp(-t l).
long double primitive_sum(const MarkovChainSystem& sys, int p, long double t) {
  long double acc = 0.0L;
  for (int d = 1; d <= p; ++d) {
    if (p % d) continue;
    const int mu = moebius(p / d);
    if (mu == 0) continue;
    acc += mu * std::exp(log_trace_power(sys, d, t * p / d));
  }
  return acc / p;
}

std::string real17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

PerronData perron(const MarkovChainSystem& sys, long double s, bool with_left) {
  const Matrix m = weighted_matrix(sys, s);
  PerronData out;
  out.right = power_iterate(m, sys.k(), false, out.lambda, out.iterations);
  if (with_left) {
    long double lambda_left = 0.0L;
    int it = 0;
    out.left = power_iterate(m, sys.k(), true, lambda_left, it);
    out.iterations = std::max(out.iterations, it);
  }
  return out;
}

double periodic_point_sum(const MarkovChainSystem& sys, int n, double s, double z) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const long double lt = log_trace_power(sys, n, s);
  if (!std::isfinite(static_cast<double>(lt))) {
    throw std::invalid_argument("no periodic points of period " + std::to_string(n));
  }
  return static_cast<double>(static_cast<long double>(z) * n + lt);
}

double class_sum(const MarkovChainSystem& sys, int n, double s) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  long double acc = 0.0L;
  for (int p = 1; p <= n; ++p) {
    if (n % p == 0) acc += primitive_sum(sys, p, static_cast<long double>(s) * n / p);
  }
  return static_cast<double>(acc);
}

// ---------------------------------------------------------------------------

PressureEvaluator PressureEvaluator::exact(MarkovChainSystem sys) {
  PressureEvaluator pe;
  pe.source_ = sys.describe() + ";" + sys.describe_roof();
  pe.system_ = std::move(sys);
  return pe;
}

PressureEvaluator PressureEvaluator::from_census(const Census& c, int window) {
  if (window < 3) throw std::invalid_argument("census fit window needs at least 3 word lengths");
  return from_census(c, std::max(1, c.n_max() - window + 1), c.n_max());
}

PressureEvaluator PressureEvaluator::from_census(const Census& c, int n_lo, int n_hi) {
  if (n_lo < 1 || n_hi > c.n_max() || n_hi - n_lo + 1 < 3) {
    throw UsageError("census fit window [" + std::to_string(n_lo) + ", " + std::to_string(n_hi) +
                     "] must lie in [1, " + std::to_string(c.n_max()) + "] and span at least 3 lengths");
  }
  PressureEvaluator pe;
  pe.n_lo_ = n_lo;
  pe.n_hi_ = n_hi;
  pe.source_ = c.presentation() + ";" + c.representation();
  std::vector<std::vector<std::pair<double, double>>> acc(static_cast<std::size_t>(n_hi - n_lo + 1));
  for (const auto& r : c.records()) {
    if (r.n < n_lo || r.n > n_hi) continue;
    acc[static_cast<std::size_t>(r.n - n_lo)].emplace_back(r.ell, static_cast<double>(r.n) / r.power);
  }
  for (auto& v : acc) {
    if (v.empty()) throw InsufficientData("census has no classes in the fit window");
    std::sort(v.begin(), v.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& e : v) {
      if (!merged.empty() && merged.back().first == e.first) {
        merged.back().second += e.second;
      } else {
        merged.push_back(e);
      }
    }
    pe.spectrum_.push_back(std::move(merged));
    std::vector<std::pair<double, double>>().swap(v);
  }
  return pe;
}

const MarkovChainSystem& PressureEvaluator::system() const {
  if (!system_) throw UsageError("census-mode evaluator has no symbolic system");
  return *system_;
}

std::string PressureEvaluator::describe() const {
  if (is_exact()) return "exact:leading-eigenvalue:" + source_;
  return "census:fit-window=" + std::to_string(n_lo_) + ".." + std::to_string(n_hi_) + ":" + source_;
}

PressureEvaluator::Fit PressureEvaluator::census_fit(long double s, bool with_derivative) const {
  const int m = static_cast<int>(spectrum_.size());
  std::vector<long double> y(static_cast<std::size_t>(m)), dy(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const auto& spec = spectrum_[static_cast<std::size_t>(i)];
    // log-sum-exp with the exponent maximum taken over -s * ell.
    long double top = -std::numeric_limits<long double>::infinity();
    for (const auto& [ell, w] : spec) top = std::max(top, -s * static_cast<long double>(ell));
    long double total = 0.0L, moment = 0.0L;
    for (const auto& [ell, w] : spec) {
      const long double e = static_cast<long double>(w) * std::exp(-s * static_cast<long double>(ell) - top);
      total += e;
      moment += e * static_cast<long double>(ell);
    }
    y[static_cast<std::size_t>(i)] = top + std::log(total);
    dy[static_cast<std::size_t>(i)] = -moment / total;
  }
  long double nbar = 0.0L;
  for (int i = 0; i < m; ++i) nbar += n_lo_ + i;
  nbar /= m;
  long double sxx = 0.0L, sxy = 0.0L, sxd = 0.0L, ybar = 0.0L;
  for (int i = 0; i < m; ++i) ybar += y[static_cast<std::size_t>(i)];
  ybar /= m;
  for (int i = 0; i < m; ++i) {
    const long double dx = n_lo_ + i - nbar;
    sxx += dx * dx;
    sxy += dx * (y[static_cast<std::size_t>(i)] - ybar);
    sxd += dx * dy[static_cast<std::size_t>(i)];
  }
  Fit fit;
  fit.slope = sxy / sxx;
  if (with_derivative) fit.slope_derivative = sxd / sxx;
  long double rss = 0.0L;
  for (int i = 0; i < m; ++i) {
    const long double r = y[static_cast<std::size_t>(i)] - ybar - fit.slope * (n_lo_ + i - nbar);
    rss += r * r;
  }
  fit.std_error = m > 2 ? static_cast<double>(std::sqrt(rss / (m - 2) / sxx)) : 0.0;
  return fit;
}

long double PressureEvaluator::pressure_ld(long double s) const {
  if (is_exact()) return std::log(perron(*system_, s).lambda);
  return census_fit(s, false).slope;
}

long double PressureEvaluator::derivative_ld(long double s) const {
  if (is_exact()) {
    const PerronData pd = perron(*system_, s, true);
    long double num = 0.0L, den = 0.0L;
    for (int i = 0; i < system_->k(); ++i) {
      const long double p = pd.left[static_cast<std::size_t>(i)] * pd.right[static_cast<std::size_t>(i)];
      num += p * static_cast<long double>(system_->roof()[static_cast<std::size_t>(i)]);
      den += p;
    }
    return -num / den;
  }
  return census_fit(s, true).slope_derivative;
}

PressureValue PressureEvaluator::pressure(double s, double z) const {
  if (is_exact()) return {static_cast<double>(z + pressure_ld(s)), 0.0};
  const Fit fit = census_fit(s, false);
  return {static_cast<double>(z + fit.slope), fit.std_error};
}

double PressureEvaluator::derivative(double s) const { return static_cast<double>(derivative_ld(s)); }

// ---------------------------------------------------------------------------

namespace {

long double solve_sigma_ld(const PressureEvaluator& pe, long double z) {
  auto f = [&](long double s) { return z + pe.pressure_ld(s); };
  long double lo = 0.0L, hi = 1.0L;
  long double flo = f(lo), fhi = f(hi);
  for (int k = 0; flo < 0.0L; ++k) {
    if (k > 60) throw BracketFailure("no lower bracket for sigma(z)");
    hi = lo;
    fhi = flo;
    lo -= std::ldexp(1.0L, k);
    flo = f(lo);
  }
  for (int k = 0; fhi > 0.0L; ++k) {
    if (k > 60) throw BracketFailure("no upper bracket for sigma(z)");
    lo = hi;
    flo = fhi;
    hi += std::ldexp(1.0L, k);
    fhi = f(hi);
  }
  if (!(flo > fhi)) throw ConvergenceFailure("pressure is not decreasing across the bracket");
  while (hi - lo > 1e-6L * std::max(1.0L, std::abs(hi))) {
    const long double mid = (lo + hi) / 2.0L;
    const long double fm = f(mid);
    if (fm > 0.0L) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  long double s = (lo + hi) / 2.0L;
  for (int it = 0; it < 60; ++it) {
    const long double d = pe.derivative_ld(s);
    if (!(d < 0.0L)) throw ConvergenceFailure("pressure is not decreasing at the root");
    const long double step = f(s) / d;
    long double next = s - step;
    if (next < lo || next > hi) next = (lo + hi) / 2.0L;
    if (f(next) > 0.0L) {
      lo = std::max(lo, next);
    } else {
      hi = std::min(hi, next);
    }
    const long double change = std::abs(next - s);
    s = next;
    if (change <= 1e-18L * std::max(1.0L, std::abs(s))) break;
  }
  return s;
}

}  // namespace

double solve_sigma(const PressureEvaluator& pe, double z, double delta_num) {
  if (!(std::abs(z) <= delta_num)) {
    throw OutOfRange("|z| = " + real17(std::abs(z)) + " exceeds delta_num = " + real17(delta_num));
  }
  return static_cast<double>(solve_sigma_ld(pe, z));
}

double solve_entropy(const PressureEvaluator& pe) { return solve_sigma(pe, 0.0); }

double equilibrium_mean_roof(const MarkovChainSystem& sys, double s) {
  const PerronData pd = perron(sys, s, true);
  long double num = 0.0L, den = 0.0L;
  for (int i = 0; i < sys.k(); ++i) {
    const long double p = pd.left[static_cast<std::size_t>(i)] * pd.right[static_cast<std::size_t>(i)];
    num += p * static_cast<long double>(sys.roof()[static_cast<std::size_t>(i)]);
    den += p;
  }
  return static_cast<double>(num / den);
}

ThermoConstants thermo_constants(const PressureEvaluator& pe) {
  ThermoConstants t;
  const long double h = solve_sigma_ld(pe, 0.0L);
  t.h = static_cast<double>(h);

  // sigma at +-delta for the two steps.
  const long double steps[2] = {1e-3L, 5e-4L};
  long double d1[2], d2[2], v2[2];
  for (int i = 0; i < 2; ++i) {
    const long double d = steps[i];
    const long double sp = solve_sigma_ld(pe, d), sm = solve_sigma_ld(pe, -d);
    d1[i] = (sp - sm) / (2.0L * d);
    d2[i] = (sp - 2.0L * h + sm) / (d * d);
    // v(z) = log h - log sigma(z), so v(0) = 0.
    v2[i] = (-std::log(sp / h) - std::log(sm / h)) / (d * d);
  }
  const long double A = (4.0L * d1[1] - d1[0]) / 3.0L;
  const long double sigma2 = (4.0L * d2[1] - d2[0]) / 3.0L;
  const long double D = (4.0L * v2[1] - v2[0]) / 3.0L;
  t.A = static_cast<double>(A);
  t.sigma2 = static_cast<double>(sigma2);
  t.D = static_cast<double>(D);

  // Pressure derivatives at h: the first analytically, the second by
  // Richardson-extrapolated second differences.
  const long double p1 = pe.derivative_ld(h);
  long double p2s[2];
  for (int i = 0; i < 2; ++i) {
    const long double d = steps[i];
    p2s[i] = (pe.pressure_ld(h + d) - 2.0L * pe.pressure_ld(h) + pe.pressure_ld(h - d)) / (d * d);
  }
  const long double p2 = (4.0L * p2s[1] - p2s[0]) / 3.0L;
  t.P_first = static_cast<double>(p1);
  t.P_second = static_cast<double>(p2);
  t.A_independent = static_cast<double>(-1.0L / p1);
  t.sigma2_residual = static_cast<double>(std::abs(sigma2 - p2 * A * A * A));
  t.D_residual = static_cast<double>(std::abs(D - ((A / h) * (A / h) - sigma2 / h)));
  t.derivative_residual = static_cast<double>(std::abs(-p1 * A - 1.0L));
  t.A_residual = static_cast<double>(std::abs(A - (-1.0L / p1)));

  if (pe.is_exact()) {
    t.A_tilde = equilibrium_mean_roof(pe.system(), 0.0);
  } else {
    t.A_tilde = static_cast<double>(-pe.derivative_ld(0.0L));
    const long double dh = pe.pressure(t.h).std_error;
    t.h_std_error = static_cast<double>(dh / std::abs(p1));
  }
  t.degenerate = t.sigma2 < kDegenerateSigma2;
  t.quasi_power.U1 = t.A;
  t.quasi_power.U2 = t.sigma2;
  t.quasi_power.V1 = -t.A / t.h;
  t.quasi_power.V2 = t.D;
  t.method = pe.describe() +
             ";derivatives=central-differences(1e-3,5e-4)+richardson;A_tilde=" +
             (pe.is_exact() ? "equilibrium-mean-roof(s=0)" : "-dP/ds(s=0)");

  const double a_tol = 10.0 * (pe.is_exact() ? 1e-8 : 1e-4) * std::max(1.0, std::abs(t.A));
  if (t.A_residual > a_tol) {
    throw ConvergenceFailure("A = sigma'(0) = " + real17(t.A) + " disagrees with 1/int r dmu = " +
                             real17(t.A_independent));
  }
  return t;
}

// ---------------------------------------------------------------------------

EtaPartial eta_partial(const PressureEvaluator& pe, double s, int N) {
  if (N < 0) throw std::invalid_argument("N must be >= 0");
  const MarkovChainSystem& sys = pe.system();
  EtaPartial out;
  const double h = solve_entropy(pe);
  out.divergent_region = s <= h;
  out.note = "exceptional-set correction not applied; directed classes";
  if (out.divergent_region) out.note += "; warning: s <= h, partial sums diverge as N grows";
  for (int n = 1; n <= N; ++n) {
    const double plain = std::exp(periodic_point_sum(sys, n, s));
    const double weighted = n * class_sum(sys, n, s);
    out.plain += plain;
    out.n_weighted += weighted;
    out.last_plain = plain;
    out.last_weighted = weighted;
  }
  return out;
}

EtaPartial eta_partial(const Census& c, double s, int N) {
  if (N < 0) throw std::invalid_argument("N must be >= 0");
  if (N > c.n_max()) throw UsageError("N exceeds the census n_max");
  EtaPartial out;
  std::vector<long double> plain(static_cast<std::size_t>(N) + 1, 0.0L), weighted(plain);
  for (const auto& r : c.records()) {
    if (r.n > N) continue;
    const long double e = std::exp(-static_cast<long double>(s) * r.ell);
    plain[r.n] += e * r.n / r.power;
    weighted[r.n] += e * r.n;
  }
  for (int n = 1; n <= N; ++n) {
    out.plain += static_cast<double>(plain[static_cast<std::size_t>(n)]);
    out.n_weighted += static_cast<double>(weighted[static_cast<std::size_t>(n)]);
    out.last_plain = static_cast<double>(plain[static_cast<std::size_t>(n)]);
    out.last_weighted = static_cast<double>(weighted[static_cast<std::size_t>(n)]);
  }
  out.note = "exceptional-set correction not applied; directed classes";
  if (c.n_max() >= 3) {
    const double h = solve_entropy(PressureEvaluator::from_census(c, std::min(5, c.n_max())));
    out.divergent_region = s <= h;
    if (out.divergent_region) out.note += "; warning: s <= h, partial sums diverge as N grows";
  }
  return out;
}

std::string to_json(const ThermoConstants& t) {
  nlohmann::ordered_json j;
  j["h"] = t.h;
  j["h_std_error"] = t.h_std_error;
  j["A"] = t.A;
  j["sigma2"] = t.sigma2;
  j["D"] = t.D;
  j["A_tilde"] = t.A_tilde;
  j["degenerate"] = t.degenerate;
  j["quasi_power"] = {{"U1", t.quasi_power.U1},
                      {"U2", t.quasi_power.U2},
                      {"V1", t.quasi_power.V1},
                      {"V2", t.quasi_power.V2},
                      {"beta_T", t.quasi_power.beta_T},
                      {"kappa_T", t.quasi_power.kappa_T}};
  j["residuals"] = {{"sigma2_minus_P2_A3", t.sigma2_residual},
                    {"D_minus_closed_form", t.D_residual},
                    {"minus_P1_A_minus_1", t.derivative_residual},
                    {"A_minus_A_independent", t.A_residual}};
  j["cross_checks"] = {{"A_independent", t.A_independent},
                       {"P_first", t.P_first},
                       {"P_second", t.P_second}};
  j["method"] = t.method;
  j["degenerate_threshold"] = kDegenerateSigma2;
  return j.dump(2);
}

}  // namespace geodesics
