#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "geodesics/census.hpp"
#include "geodesics/error.hpp"
#include "geodesics/group_core.hpp"
#include "geodesics/hyperbolic_geom.hpp"
#include "geodesics/markov_system.hpp"
#include "geodesics/stats_limits.hpp"
#include "geodesics/symbolic_thermo.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace geodesics;

namespace {

struct RunConfig {
  std::string system;
  double separation = 3.0;
  int n_max = 0;
  std::optional<double> T;
  std::string T_grid;
  double z = 0.0;
  std::string z_grid;
  std::string x_grid = "-4:4:1";
  std::string s_grid;
  int n = 0;
  int window = 5;
  std::string census_path;
  std::string out_dir;
  std::string format = "json";
  int workers = 0;
  std::size_t memory_mb = 4096;
  bool length_centering = false;
  bool fitted_sigma2 = false;
};

// A synthetic system is named by `file:PATH`, or by any path ending in .json.
std::optional<std::string> system_file(const std::string& spec) {
  if (spec.starts_with("file:")) return spec.substr(5);
  if (spec.ends_with(".json")) return spec;
  return std::nullopt;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

std::string output_root(const RunConfig& cfg) {
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  if (const char* env = std::getenv("GEODESIC_CENSUS_DIR"); env && *env) return env;
  return ".";
}

int worker_count(const RunConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

CensusOptions census_options(const RunConfig& cfg) {
  CensusOptions o;
  o.workers = worker_count(cfg);
  o.memory_budget_bytes = cfg.memory_mb << 20;
  return o;
}

void validate(const RunConfig& cfg, bool need_system_or_census) {
  if (need_system_or_census && cfg.system.empty() == cfg.census_path.empty()) {
    throw UsageError("give exactly one of --system or --census");
  }
  if (cfg.T && !(*cfg.T > 0.0)) throw UsageError("--T must be positive");
}

MarkovChainSystem load_system(const std::string& spec) {
  try {
    return MarkovChainSystem::load(spec);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

Census build_from_config(const RunConfig& cfg, std::string& stem) {
  if (cfg.n_max < 1) throw UsageError("--n-max must be >= 1");
  const auto opts = census_options(cfg);
  if (cfg.system == "octagon") {
    stem = "octagon_n" + std::to_string(cfg.n_max);
    return build_census(SurfacePresentation::surface(2), octagon_representation(), cfg.n_max, opts);
  }
  if (cfg.system == "schottky") {
    FuchsianRep rep = [&] {
      try {
        return schottky_representation(cfg.separation);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }();
    char buf[64];
    std::snprintf(buf, sizeof buf, "schottky_s%g_n%d", cfg.separation, cfg.n_max);
    stem = buf;
    return build_census(SurfacePresentation::free_group(2), rep, cfg.n_max, opts);
  }
  if (auto path = system_file(cfg.system)) {
    stem = fs::path(*path).stem().string() + "_n" + std::to_string(cfg.n_max);
    return build_census_from_system(load_system(*path), cfg.n_max, opts);
  }
  throw UsageError("unknown system `" + cfg.system + "`; use octagon, schottky or file:PATH");
}

std::uint64_t checksum_of(const Census& c) {
  if (c.build_info().checksum != 0) return c.build_info().checksum;
  return census_checksum(c);
}

json census_provenance(const Census& c) {
  json j;
  j["checksum"] = hex64(checksum_of(c));
  j["presentation"] = c.presentation();
  j["representation"] = c.representation();
  j["n_max"] = c.n_max();
  j["alpha_hat"] = c.alpha_hat();
  j["T_cert"] = c.T_cert();
  j["record_count"] = c.size();
  j["counting"] = "directed; undirected prime counts are half of these";
  if (c.presentation().starts_with("free:")) j["mode"] = "testbed";
  else if (c.is_group()) j["mode"] = "surface";
  else j["mode"] = "synthetic";
  return j;
}

json census_summary(const Census& c) {
  json j = census_provenance(c);
  const auto counts = c.count_by_n();
  std::vector<std::size_t> primes(counts.size(), 0);
  for (const auto& r : c.records()) {
    if (r.primitive) ++primes[r.n];
  }
  json rows = json::array();
  for (int n = 1; n <= c.n_max(); ++n) {
    json row;
    row["n"] = n;
    row["classes"] = counts[static_cast<std::size_t>(n)];
    row["primitive"] = primes[static_cast<std::size_t>(n)];
    row["m"] = c.cutoff().min_ell[static_cast<std::size_t>(n)];
    row["m_over_n"] = c.cutoff().min_ell[static_cast<std::size_t>(n)] / n;
    rows.push_back(row);
  }
  j["histogram"] = rows;
  return j;
}

// Constants: exact when a synthetic system file is named, census-estimated otherwise.
struct ConstantsSource {
  std::optional<PressureEvaluator> pe;
  ThermoConstants k;
};

ConstantsSource constants_for(const RunConfig& cfg, const Census* census) {
  ConstantsSource src;
  if (auto path = system_file(cfg.system)) {
    src.pe = PressureEvaluator::exact(load_system(*path));
  } else if (census) {
    src.pe = PressureEvaluator::from_census(*census, cfg.window);
  } else {
    throw UsageError("constants need --census or a synthetic --system file:PATH");
  }
  src.k = thermo_constants(*src.pe);
  return src;
}

json constants_json(const ThermoConstants& k) { return json::parse(to_json(k)); }

// Eleven points from the top half of the certified range, starting no lower
// than the first T with 30 prime classes, unless a grid is given.
std::vector<double> variance_grid(const RunConfig& cfg, const Census& c) {
  if (!cfg.T_grid.empty()) return parse_grid(cfg.T_grid);
  double lo = 0.5 * c.T_cert();
  std::size_t primes = 0;
  for (const auto& r : c.records()) {
    if (r.primitive && ++primes == 30) {
      lo = std::max(lo, std::nextafter(r.ell, HUGE_VAL));
      break;
    }
  }
  if (lo >= c.T_cert()) lo = 0.5 * c.T_cert();
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(lo + (c.T_cert() - lo) * 0.1 * i);
  return grid;
}

std::vector<double> T_values(const RunConfig& cfg, const Census& c) {
  if (!cfg.T_grid.empty()) return parse_grid(cfg.T_grid);
  if (cfg.T) return {*cfg.T};
  return {c.T_cert()};
}

// ---------------------------------------------------------------------------
// Output

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

void emit(const RunConfig& cfg, const std::string& name, const json& report, const Table* table) {
  std::string text;
  if (cfg.format == "csv") {
    std::ostringstream os;
    for (const auto& [key, value] : report.items()) {
      if (value.is_array()) continue;
      os << "# " << key << '=' << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
    }
    if (table) {
      for (std::size_t i = 0; i < table->columns.size(); ++i) os << (i ? "," : "") << table->columns[i];
      os << '\n';
      for (const auto& row : table->rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << '\n';
      }
    }
    text = os.str();
  } else {
    text = report.dump(2) + "\n";
  }
  std::cout << text;
  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    const auto path = fs::path(cfg.out_dir) / (name + "." + cfg.format);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
  }
}

Table histogram_table(const json& summary) {
  Table t{{"n", "classes", "primitive", "m", "m_over_n"}, {}};
  for (const auto& r : summary["histogram"]) {
    t.rows.push_back({std::to_string(r["n"].get<int>()), std::to_string(r["classes"].get<std::size_t>()),
                      std::to_string(r["primitive"].get<std::size_t>()), real(r["m"].get<double>()),
                      real(r["m_over_n"].get<double>())});
  }
  return t;
}

Table cdf_table(const std::vector<CdfRow>& rows) {
  Table t{{"x", "count", "empirical", "normal"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({real(r.x), std::to_string(r.count), real(r.empirical), real(r.normal)});
  }
  return t;
}

json cdf_json(const std::vector<CdfRow>& rows) {
  json a = json::array();
  for (const auto& r : rows) a.push_back({{"x", r.x}, {"count", r.count}, {"empirical", r.empirical}, {"normal", r.normal}});
  return a;
}

// ---------------------------------------------------------------------------
// Commands

void cmd_census_build(const RunConfig& cfg) {
  if (cfg.system.empty()) throw UsageError("census build needs --system");
  std::string stem;
  Census c = build_from_config(cfg, stem);
  const auto root = fs::path(output_root(cfg));
  fs::create_directories(root);
  const auto path = root / (stem + ".csv");
  c.build_info().checksum = save_census(c, path.string());
  json j;
  j["census"] = path.filename().string();
  const json summary = census_summary(c);
  for (const auto& [key, value] : summary.items()) j[key] = value;
  j["flagged_records"] = c.build_info().flagged_records;
  const Table t = histogram_table(j);
  RunConfig quiet = cfg;
  quiet.out_dir.clear();
  emit(quiet, stem + "_summary", j, &t);
}

void cmd_census_info(const RunConfig& cfg) {
  if (cfg.census_path.empty()) throw UsageError("census info needs --census");
  const Census c = load_census(cfg.census_path);
  const json j = census_summary(c);
  const Table t = histogram_table(j);
  emit(cfg, "census_info", j, &t);
}

void cmd_constants(const RunConfig& cfg) {
  std::optional<Census> census;
  if (!cfg.census_path.empty()) {
    census = load_census(cfg.census_path);
  } else if (!cfg.system.empty() && !system_file(cfg.system)) {
    std::string stem;
    census = build_from_config(cfg, stem);
  }
  const auto src = constants_for(cfg, census ? &*census : nullptr);
  json j;
  if (census) j["census"] = census_provenance(*census);
  j["constants"] = constants_json(src.k);
  emit(cfg, "constants", j, nullptr);
}

void cmd_pressure(const RunConfig& cfg) {
  std::optional<Census> census;
  if (!cfg.census_path.empty()) census = load_census(cfg.census_path);
  const auto src = constants_for(cfg, census ? &*census : nullptr);
  const auto grid = parse_grid(cfg.s_grid.empty() ? "0:2:0.1" : cfg.s_grid);
  json j;
  if (census) j["census"] = census_provenance(*census);
  j["evaluator"] = src.pe->describe();
  j["z"] = cfg.z;
  json rows = json::array();
  Table t{{"s", "pressure", "std_error", "derivative"}, {}};
  for (double s : grid) {
    const auto p = src.pe->pressure(s, cfg.z);
    const double d = src.pe->derivative(s);
    rows.push_back({{"s", s}, {"pressure", p.value}, {"std_error", p.std_error}, {"derivative", d}});
    t.rows.push_back({real(s), real(p.value), real(p.std_error), real(d)});
  }
  j["grid"] = rows;
  emit(cfg, "pressure", j, &t);
}

void llt_report(const RunConfig& cfg, const Census& c, const ThermoConstants& k, double sigma2, json& j) {
  Table t;
  const double T = cfg.T.value_or(c.T_cert());
  const auto r = llt_profile(c, T, k.A, sigma2, parse_grid(cfg.x_grid));
  j["T"] = r.T;
  j["pi"] = r.pi;
  j["peak_model"] = r.peak_model;
  j["window_sum"] = r.window_sum;
  json rows = json::array();
  t.columns = {"x", "count", "frequency", "model", "scaled", "scaled_model"};
  for (const auto& p : r.rows) {
    rows.push_back({{"x", p.x}, {"count", p.count}, {"frequency", p.frequency}, {"model", p.model},
                    {"scaled", p.scaled}, {"scaled_model", p.scaled_model}});
    t.rows.push_back({real(p.x), std::to_string(p.count), real(p.frequency), real(p.model), real(p.scaled),
                      real(p.scaled_model)});
  }
  j["rows"] = rows;
  emit(cfg, "stats_llt", j, &t);
}

void cmd_stats(const std::string& which, const RunConfig& cfg) {
  if (cfg.census_path.empty()) throw UsageError("stats needs --census");
  const Census c = load_census(cfg.census_path);
  std::vector<double> requested;
  if (cfg.T) requested.push_back(*cfg.T);
  if (!cfg.T_grid.empty()) {
    const auto grid = parse_grid(cfg.T_grid);
    requested.insert(requested.end(), grid.begin(), grid.end());
  }
  for (double T : requested) {
    if (T > c.T_cert()) {
      throw CutoffExceeded("T = " + std::to_string(T) + " exceeds the certified cutoff T_cert = " +
                           std::to_string(c.T_cert()));
    }
  }
  const auto src = constants_for(cfg, &c);
  const ThermoConstants& k = src.k;
  json j;
  j["census"] = census_provenance(c);
  j["constants"] = constants_json(k);
  Table t;

  if (which == "avg") {
    json rows = json::array();
    t.columns = {"T", "pi", "mean", "model", "ratio", "expansion_stated", "expansion_derived"};
    for (double T : T_values(cfg, c)) {
      const auto r = average_word_length(c, T, k);
      rows.push_back({{"T", r.T}, {"pi", r.pi}, {"mean", r.mean}, {"model", r.model}, {"ratio", r.ratio},
                      {"expansion_stated", r.expansion_stated}, {"expansion_derived", r.expansion_derived}});
      t.rows.push_back({real(r.T), std::to_string(r.pi), real(r.mean), real(r.model), real(r.ratio),
                        real(r.expansion_stated), real(r.expansion_derived)});
    }
    j["rows"] = rows;
  } else if (which == "var") {
    const auto r = variance_word_length(c, variance_grid(cfg, c));
    j["sigma2_hat"] = r.sigma2_hat;
    j["D_hat"] = r.D_hat;
    j["slope_std_error"] = r.slope_std_error;
    j["r_squared"] = r.r_squared;
    j["min_count"] = r.min_count;
    json rows = json::array();
    t.columns = {"T", "pi", "mean", "variance", "fitted"};
    for (const auto& p : r.points) {
      rows.push_back({{"T", p.T}, {"pi", p.pi}, {"mean", p.mean}, {"variance", p.variance}, {"fitted", p.fitted}});
      t.rows.push_back({real(p.T), std::to_string(p.pi), real(p.mean), real(p.variance), real(p.fitted)});
    }
    j["points"] = rows;
  } else if (which == "clt" || which == "llt") {
    double sigma2 = k.sigma2;
    if (cfg.fitted_sigma2) {
      sigma2 = variance_word_length(c, variance_grid(cfg, c)).sigma2_hat;
      j["sigma2_source"] = "variance fit";
    } else {
      j["sigma2_source"] = "pressure";
    }
    j["sigma2"] = sigma2;
    if (which == "llt") return llt_report(cfg, c, k, sigma2, j);
    const double T = cfg.T.value_or(c.T_cert());
    const auto centering = cfg.length_centering ? Centering::length : Centering::stated;
    const auto r = clt_empirical(c, T, k.A, sigma2, centering);
    j["T"] = r.T;
    j["pi"] = r.pi;
    j["centering"] = centering == Centering::stated ? "word-length minus A T" : "word-length minus A l (diagnostic)";
    j["ks"] = r.ks;
    j["table"] = cdf_json(r.table);
    t = cdf_table(r.table);
  } else if (which == "wordstats") {
    const int n = cfg.n > 0 ? cfg.n : c.n_max();
    const auto r = word_ordered_stats(c, n, k);
    j["n"] = r.n;
    j["count"] = r.count;
    j["mean_ell"] = r.mean_ell;
    j["mean_over_n"] = r.mean_over_n;
    j["A_tilde"] = r.A_tilde;
    j["a"] = {r.a[0], r.a[1], r.a[2], r.a[3]};
    j["sigma_tilde2"] = r.sigma_tilde2;
    j["ks"] = r.ks;
    json rows = json::array();
    t.columns = {"n", "count", "mean_ell", "mean_ratio", "var_ell"};
    for (const auto& w : r.grid) {
      rows.push_back({{"n", w.n}, {"count", w.count}, {"mean_ell", w.mean_ell}, {"mean_ratio", w.mean_ratio},
                      {"var_ell", w.var_ell}});
      t.rows.push_back({std::to_string(w.n), std::to_string(w.count), real(w.mean_ell), real(w.mean_ratio),
                        real(w.var_ell)});
    }
    j["grid"] = rows;
    j["table"] = cdf_json(r.table);
  } else if (which == "mgf") {
    const double T = cfg.T.value_or(c.T_cert());
    std::vector<double> zs = cfg.z_grid.empty() ? std::vector<double>{cfg.z} : parse_grid(cfg.z_grid);
    json rows = json::array();
    t.columns = {"T", "z", "log_C", "log_C0", "log_ratio", "sigma_z", "log_ratio_model", "model_gap"};
    for (double z : zs) {
      const auto r = moment_generating(c, T, z, *src.pe, k.h);
      rows.push_back({{"T", r.T}, {"z", r.z}, {"log_C", r.log_C}, {"log_C0", r.log_C0}, {"log_ratio", r.log_ratio},
                      {"sigma_z", r.sigma_z}, {"log_ratio_model", r.log_ratio_model}, {"model_gap", r.model_gap}});
      t.rows.push_back({real(r.T), real(r.z), real(r.log_C), real(r.log_C0), real(r.log_ratio), real(r.sigma_z),
                        real(r.log_ratio_model), real(r.model_gap)});
    }
    j["rows"] = rows;
  } else {
    throw UsageError("unknown stats report `" + which + "`");
  }
  emit(cfg, "stats_" + which, j, &t);
}

int report_error(const std::string& code, const std::string& kind, const std::string& message, int status) {
  json e;
  e["error"] = code;
  e["kind"] = kind;
  e["message"] = message;
  e["exit_code"] = status;
  std::cerr << e.dump() << '\n';
  return status;
}

void add_common(CLI::App* app, RunConfig& cfg) {
  app->add_option("--system", cfg.system, "octagon | schottky | file:PATH (synthetic subshift JSON)");
  app->add_option("--separation", cfg.separation, "Schottky translation length");
  app->add_option("--n-max", cfg.n_max, "largest word length");
  app->add_option("--census", cfg.census_path, "census CSV");
  app->add_option("--out", cfg.out_dir, "output directory (default $GEODESIC_CENSUS_DIR or .)");
  app->add_option("--format", cfg.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--workers", cfg.workers, "worker threads (default: all cores)");
  app->add_option("--window", cfg.window, "census pressure fit window (top word lengths)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed geodesics: census, pressure constants and counting statistics"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* census = app.add_subcommand("census", "build or inspect a census");
  census->require_subcommand(1);
  auto* build = census->add_subcommand("build", "enumerate classes and write a census CSV");
  add_common(build, cfg);
  build->add_option("--memory-mb", cfg.memory_mb, "memory budget for the build");
  auto* info = census->add_subcommand("info", "verify a census and print its summary");
  add_common(info, cfg);

  auto* constants = app.add_subcommand("constants", "h, A, sigma^2, D and A_tilde with residuals");
  add_common(constants, cfg);

  auto* pressure = app.add_subcommand("pressure", "pressure P(z - s r) on an s grid");
  add_common(pressure, cfg);
  pressure->add_option("--s-grid", cfg.s_grid, "lo:hi:step");
  pressure->add_option("--z", cfg.z, "shift in P(z - s r)");

  auto* stats = app.add_subcommand("stats", "counting statistics over a census");
  stats->require_subcommand(1);
  std::vector<std::pair<std::string, CLI::App*>> reports;
  const std::pair<const char*, const char*> report_names[] = {
      {"avg", "mean word length against the model, per T"},
      {"var", "variance of word length, weighted fit against T"},
      {"clt", "KS distance of scaled word lengths to the normal"},
      {"llt", "unit-window frequencies around A T"},
      {"wordstats", "length statistics at fixed word length n"},
      {"mgf", "log moment generating ratios against the pressure model"},
  };
  for (const auto& [name, help] : report_names) {
    auto* sub = stats->add_subcommand(name, help);
    add_common(sub, cfg);
    sub->add_option("--T", cfg.T, "length cutoff (default T_cert)");
    sub->add_option("--T-grid", cfg.T_grid, "lo:hi:step");
    sub->add_option("--z", cfg.z, "exponent for mgf");
    sub->add_option("--z-grid", cfg.z_grid, "lo:hi:step");
    sub->add_option("--x-grid", cfg.x_grid, "lo:hi:step");
    sub->add_option("--n", cfg.n, "word length (default n_max)");
    sub->add_flag("--length-centering", cfg.length_centering, "centre by A l(gamma) instead of A T");
    sub->add_flag("--fitted-sigma2", cfg.fitted_sigma2, "use the variance-fit slope in Gaussian comparisons");
    reports.emplace_back(name, sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", "usage", e.what(), 1);
  }

  try {
    if (build->parsed()) {
      validate(cfg, false);
      cmd_census_build(cfg);
    } else if (info->parsed()) {
      cmd_census_info(cfg);
    } else if (constants->parsed()) {
      validate(cfg, true);
      cmd_constants(cfg);
    } else if (pressure->parsed()) {
      validate(cfg, true);
      cmd_pressure(cfg);
    } else {
      for (const auto& [name, sub] : reports) {
        if (sub->parsed()) {
          validate(cfg, false);
          cmd_stats(name, cfg);
        }
      }
    }
  } catch (const Error& e) {
    return report_error(e.code(), kind_name(e.kind()), e.what(), exit_code(e.kind()));
  } catch (const std::invalid_argument& e) {
    return report_error("usage", "usage", e.what(), 1);
  } catch (const std::exception& e) {
    return report_error("internal", "internal", e.what(), 4);
  }
  return 0;
}
