#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "geodesics/census.hpp"
#include "geodesics/symbolic_thermo.hpp"

namespace geodesics {

/// Offset logarithmic integral, integral from 2 to x of du / log u.
/// Throws std::domain_error for x < 2.
double li(double x);

/// Directed prime classes with l(gamma) < T. Throws CutoffExceeded if
/// T > T_cert.
std::size_t count_pi(const Census& c, double T);

struct AverageReport {
  double T = 0.0;
  std::size_t pi = 0;
  double mean = 0.0;   // (1/pi) sum |gamma|
  double model = 0.0;  // (A/h) e^{hT} / li(e^{hT})
  double ratio = 0.0;  // mean / model
  double expansion_stated = 0.0;   // A T + A/h
  double expansion_derived = 0.0;  // A T - A/h, from the expansion of li
};

/// Throws CutoffExceeded, EmptyWindow.
AverageReport average_word_length(const Census& c, double T, const ThermoConstants& k);

/// (1/pi) sum |gamma| / l(gamma). Throws CutoffExceeded, EmptyWindow.
double ratio_average(const Census& c, double T);

struct TrendFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_std_error = 0.0;
  double r_squared = 0.0;
};

/// Least-squares slope of the mean word length against T; estimates A.
TrendFit average_slope(const Census& c, const std::vector<double>& T_grid);

struct VariancePoint {
  double T = 0.0;
  std::size_t pi = 0;
  double mean = 0.0;
  double variance = 0.0;
  double fitted = 0.0;
};

struct VarianceReport {
  std::vector<VariancePoint> points;
  double sigma2_hat = 0.0;  // slope
  double D_hat = 0.0;       // intercept
  double slope_std_error = 0.0;
  double r_squared = 0.0;   // weighted, weights pi(T)
  std::size_t min_count = 30;
};

/// Population variance of |gamma| at each T, weighted least squares against
/// T with weights pi(T). Throws CutoffExceeded, InsufficientData.
VarianceReport variance_word_length(const Census& c, const std::vector<double>& T_grid,
                                    std::size_t min_count = 30);

enum class Centering {
  stated,  // (|gamma| - A T) / sqrt T
  length,  // (|gamma| - A l(gamma)) / sqrt T, diagnostic only
};

struct CdfRow {
  double x = 0.0;
  std::size_t count = 0;  // classes at this value
  double empirical = 0.0;
  double normal = 0.0;
};

struct CltReport {
  double T = 0.0;
  std::size_t pi = 0;
  double A = 0.0;
  double sigma2 = 0.0;
  Centering centering = Centering::stated;
  double ks = 0.0;
  std::vector<CdfRow> table;
  std::size_t min_count = 100;
};

/// KS distance of the centred, sqrt T-scaled word lengths to N(0, sigma2).
/// Throws CutoffExceeded, InsufficientData, DegenerateVariance.
CltReport clt_empirical(const Census& c, double T, double A, double sigma2,
                        Centering centering = Centering::stated, std::size_t min_count = 100);

struct LltRow {
  double x = 0.0;
  std::size_t count = 0;
  double frequency = 0.0;  // count / pi
  double model = 0.0;      // exp(-x^2 / (2 sigma2 T)) / sqrt(2 pi sigma2 T)
  double scaled = 0.0;     // sqrt T * frequency
  double scaled_model = 0.0;
};

struct LltReport {
  double T = 0.0;
  std::size_t pi = 0;
  double A = 0.0;
  double sigma2 = 0.0;
  std::vector<LltRow> rows;
  double peak_model = 0.0;  // 1 / sqrt(2 pi sigma2)
  double window_sum = 0.0;  // frequencies over the unit lattice through x_grid[0]
};

/// Unit-window frequencies of |gamma| - A T at each grid point.
/// Throws CutoffExceeded, InsufficientData, DegenerateVariance.
LltReport llt_profile(const Census& c, double T, double A, double sigma2,
                      const std::vector<double>& x_grid, std::size_t min_count = 100);

struct MgfReport {
  double T = 0.0;
  double z = 0.0;
  double log_C = 0.0;
  double log_C0 = 0.0;
  double log_ratio = 0.0;        // log C_z(T) - log C_0(T)
  double sigma_z = 0.0;          // sigma(z) from the pressure evaluator
  double log_ratio_model = 0.0;  // log(h / sigma(z)) + (sigma(z) - h) T
  double model_gap = 0.0;        // |log_ratio - log_ratio_model|
};

/// log C_z(T), the sum over prime classes with l < T of exp(z |gamma|).
double log_C(const Census& c, double T, double z);
/// log E_z(n), the sum over prime classes with |gamma| = n of exp(z l).
double log_E(const Census& c, int n, double z);
/// C-mode with the quasi-power comparison.
MgfReport moment_generating(const Census& c, double T, double z, const PressureEvaluator& pe,
                            double h);

struct WordLengthRow {
  int n = 0;
  std::size_t count = 0;
  double mean_ell = 0.0;
  double mean_ratio = 0.0;  // mean of l / n
  double var_ell = 0.0;
};

struct WordStatsReport {
  int n = 0;
  std::size_t count = 0;
  double mean_ell = 0.0;
  double A_tilde = 0.0;
  double mean_over_n = 0.0;
  std::vector<WordLengthRow> grid;  // word lengths used by the fits
  double sigma_tilde2 = 0.0;        // slope of var_ell against n
  double a[4] = {0.0, 0.0, 0.0, 0.0};
  double ks = 0.0;
  std::vector<CdfRow> table;
  std::size_t min_count = 30;
};

/// Statistics over prime classes of word length n, with fits over the word
/// lengths from ceil(n/2) to n that have at least min_count classes.
/// Throws UsageError for n > n_max, InsufficientData.
WordStatsReport word_ordered_stats(const Census& c, int n, const ThermoConstants& k,
                                   std::size_t min_count = 30);

/// Standard normal CDF.
double normal_cdf(double x);

std::vector<double> parse_grid(const std::string& spec);  // "lo:hi:step"

}  // namespace geodesics
