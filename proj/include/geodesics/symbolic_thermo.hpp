#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geodesics/census.hpp"
#include "geodesics/markov_system.hpp"

namespace geodesics {

/// Leading eigenvalue and eigenvectors of M(s)_ij = A_ij exp(-s r(i)).
struct PerronData {
  long double lambda = 0.0L;
  std::vector<long double> right;  // M v = lambda v, sum 1
  std::vector<long double> left;   // u M = lambda u, sum 1 (empty unless requested)
  int iterations = 0;
};

/// Power iteration stopped by the Collatz-Wielandt bracket. Throws
/// ConvergenceFailure if the bracket does not close.
PerronData perron(const MarkovChainSystem& sys, long double s, bool with_left = false);

/// log sum over x with sigma^n x = x of exp(z n - s r^n(x)), through the
/// trace of M(s)^n with rescaling at every step.
double periodic_point_sum(const MarkovChainSystem& sys, int n, double s, double z = 0.0);

struct PressureValue {
  double value = 0.0;
  double std_error = 0.0;  // zero in exact mode
};

/// s -> P(z - s r), computed exactly from a system or estimated from the
/// growth of census sums.
class PressureEvaluator {
 public:
  static PressureEvaluator exact(MarkovChainSystem sys);
  /// Fit window: the top `window` word lengths of the census.
  static PressureEvaluator from_census(const Census& c, int window = 5);
  /// Fit window [n_lo, n_hi].
  static PressureEvaluator from_census(const Census& c, int n_lo, int n_hi);

  bool is_exact() const noexcept { return system_.has_value(); }
  const MarkovChainSystem& system() const;
  int window_lo() const noexcept { return n_lo_; }
  int window_hi() const noexcept { return n_hi_; }
  /// Root tolerance used by the solvers.
  double tolerance() const noexcept { return is_exact() ? 1e-12 : 1e-4; }
  std::string describe() const;

  PressureValue pressure(double s, double z = 0.0) const;
  /// d/ds P(-s r).
  double derivative(double s) const;

  long double pressure_ld(long double s) const;
  long double derivative_ld(long double s) const;

 private:
  PressureEvaluator() = default;
  struct Fit {
    long double slope = 0.0L;
    long double slope_derivative = 0.0L;
    double std_error = 0.0;
  };
  Fit census_fit(long double s, bool with_derivative) const;

  std::optional<MarkovChainSystem> system_;
  int n_lo_ = 0;
  int n_hi_ = 0;
  // Census mode: per word length in the window, distinct (ell, weight)
  // pairs with weight = n / power summed over equal lengths.
  std::vector<std::vector<std::pair<double, double>>> spectrum_;
  std::string source_;
};

/// Default bound on |z| for solve_sigma.
inline constexpr double kDeltaNum = 0.1;

/// The s with z + P(-s r) = 0. Throws OutOfRange if |z| > delta_num,
/// BracketFailure if no sign change is found, ConvergenceFailure if the
/// pressure is not decreasing at the root.
double solve_sigma(const PressureEvaluator& pe, double z, double delta_num = kDeltaNum);
/// sigma(0).
double solve_entropy(const PressureEvaluator& pe);

struct QuasiPower {
  double U1 = 0.0;  // U'(0) = A
  double U2 = 0.0;  // U''(0) = sigma^2
  double V1 = 0.0;  // v'(0) = -A / h
  double V2 = 0.0;  // v''(0) = D
  std::string beta_T = "T";
  std::string kappa_T = "T";
};

struct ThermoConstants {
  double h = 0.0;
  double h_std_error = 0.0;
  double A = 0.0;
  double sigma2 = 0.0;
  double D = 0.0;
  double A_tilde = 0.0;
  QuasiPower quasi_power;
  bool degenerate = false;

  // Cross-checks.
  double A_independent = 0.0;       // 1 / int r dmu at s = h
  double P_first = 0.0;             // d/ds P(-s r) at h
  double P_second = 0.0;            // d2/ds2 P(-s r) at h
  double sigma2_residual = 0.0;     // |sigma^2 - P'' A^3|
  double D_residual = 0.0;          // |D - ((A/h)^2 - sigma^2/h)|
  double derivative_residual = 0.0; // |-P' A - 1|
  double A_residual = 0.0;          // |A - A_independent|
  std::string method;
};

inline constexpr double kDegenerateSigma2 = 1e-9;

/// h, A = sigma'(0), sigma^2 = sigma''(0), D = v''(0) with v = log(h / sigma),
/// and A_tilde. Derivatives of sigma come from central differences with
/// steps 1e-3 and 5e-4 combined by Richardson extrapolation. Throws
/// ConvergenceFailure when the two estimates of A disagree.
ThermoConstants thermo_constants(const PressureEvaluator& pe);

/// Mean roof under the equilibrium state of -s r.
double equilibrium_mean_roof(const MarkovChainSystem& sys, double s);

struct EtaPartial {
  double plain = 0.0;       // sum over n <= N of the periodic-point sums
  double n_weighted = 0.0;  // sum over n <= N of n * sum_{|gamma| = n} exp(-s l)
  double last_plain = 0.0;
  double last_weighted = 0.0;
  bool divergent_region = false;  // s <= h
  std::string note;
};

EtaPartial eta_partial(const PressureEvaluator& pe, double s, int N);
EtaPartial eta_partial(const Census& c, double s, int N);

/// Sum over classes with |gamma| = n (primitive or not) of exp(-s l),
/// from periodic-point sums by Moebius inversion.
double class_sum(const MarkovChainSystem& sys, int n, double s);

std::string to_json(const ThermoConstants& t);

}  // namespace geodesics
