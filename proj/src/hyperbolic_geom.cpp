#include "geodesics/hyperbolic_geom.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "geodesics/error.hpp"

namespace geodesics {

MoebiusMatrix::MoebiusMatrix(double a, double b, double c, double d) : e_{a, b, c, d} {
  const double scale = std::max(1.0, max_abs_entry() * max_abs_entry());
  if (std::abs(determinant() - 1.0) > 1e-12 * scale) {
    throw std::invalid_argument("Moebius matrix must have determinant 1");
  }
}

double MoebiusMatrix::max_abs_entry() const noexcept {
  double m = 0.0;
  for (double x : e_) m = std::max(m, std::abs(x));
  return m;
}

double MoebiusMatrix::distance_to_identity() const noexcept {
  auto dist = [&](double s) {
    return std::max({std::abs(e_[0] - s), std::abs(e_[1]), std::abs(e_[2]), std::abs(e_[3] - s)});
  };
  return std::min(dist(1.0), dist(-1.0));
}

MoebiusMatrix elliptic_rotation(double angle) {
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  return MoebiusMatrix::unchecked(c, s, -s, c);
}

MoebiusMatrix axial_translation(double length) {
  return MoebiusMatrix::unchecked(std::exp(length / 2), 0.0, 0.0, std::exp(-length / 2));
}

namespace {

bool is_hyperbolic(const MoebiusMatrix& m, double tol) { return std::abs(m.trace()) > 2.0 + tol; }

std::vector<MoebiusMatrix> letter_table(const SurfacePresentation& p,
                                        const std::vector<MoebiusMatrix>& gens) {
  const int r = p.generator_count();
  std::vector<MoebiusMatrix> t(static_cast<std::size_t>(2 * r));
  for (int k = 0; k < r; ++k) {
    t[static_cast<std::size_t>(k)] = gens[static_cast<std::size_t>(k)];
    t[static_cast<std::size_t>(r + k)] = gens[static_cast<std::size_t>(k)].inverse();
  }
  return t;
}

// Isometric circle of a Moebius map after moving it to the disk model by the
// Cayley transform z -> (z - i)/(z + i).
struct Circle {
  std::complex<double> centre;
  double radius = 0.0;
};

bool disk_isometric_circle(const MoebiusMatrix& m, Circle& out) {
  using C = std::complex<double>;
  const C i(0.0, 1.0);
  // C g C^-1 with C = [[1, -i], [1, i]], C^-1 = [[i, i], [-1, 1]] / (2i).
  const C a = m.a(), b = m.b(), c = m.c(), d = m.d();
  const C p10 = a + i * c, p11 = b + i * d;  // bottom row of C g
  const C inv_det = 1.0 / (2.0 * i);
  const C gamma = (p10 * i - p11) * inv_det;
  const C delta = (p10 * i + p11) * inv_det;
  if (std::abs(gamma) < 1e-14) return false;
  out.centre = -delta / gamma;
  out.radius = 1.0 / std::abs(gamma);
  return true;
}

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

FuchsianRep FuchsianRep::unchecked(SurfacePresentation presentation,
                                   std::vector<MoebiusMatrix> generators, std::string name,
                                   double tolerance) {
  if (generators.size() != static_cast<std::size_t>(presentation.generator_count())) {
    throw std::invalid_argument("one matrix per generator required");
  }
  FuchsianRep rep;
  rep.letter_mats_ = letter_table(presentation, generators);
  rep.presentation_ = std::move(presentation);
  rep.generators_ = std::move(generators);
  rep.name_ = std::move(name);
  rep.tolerance_ = tolerance;
  return rep;
}

FuchsianRep FuchsianRep::create(SurfacePresentation presentation,
                                std::vector<MoebiusMatrix> generators, std::string name,
                                double tolerance) {
  FuchsianRep rep = unchecked(std::move(presentation), std::move(generators), std::move(name), tolerance);
  for (const auto& g : rep.generators_) {
    if (!is_hyperbolic(g, tolerance)) throw std::invalid_argument("generator is not hyperbolic");
  }
  if (rep.presentation_.is_surface()) {
    const double dev = evaluate_word(rep, *rep.presentation_.relator()).distance_to_identity();
    if (dev > tolerance) {
      throw std::invalid_argument("relator evaluates to " + format_real(dev) + " away from identity");
    }
  }
  return rep;
}

FuchsianRep octagon_representation() {
  const double side_length = 2.0 * std::acosh(1.0 + std::numbers::sqrt2);
  const MoebiusMatrix t = axial_translation(side_length);
  std::vector<MoebiusMatrix> gens;
  for (int k = 0; k < 4; ++k) {
    const MoebiusMatrix r = elliptic_rotation(k * std::numbers::pi / 4);
    gens.push_back(r * (k % 2 == 0 ? t : t.inverse()) * r.inverse());
  }
  return FuchsianRep::create(SurfacePresentation::surface(2), std::move(gens), "octagon");
}

FuchsianRep schottky_representation(double separation) {
  if (!(separation > 0.0) || !std::isfinite(separation)) {
    throw std::invalid_argument("Schottky separation must be positive");
  }
  const MoebiusMatrix a = axial_translation(separation);
  const MoebiusMatrix r = elliptic_rotation(std::numbers::pi / 2);
  const MoebiusMatrix b = r * a * r.inverse();
  const std::vector<MoebiusMatrix> maps{a, a.inverse(), b, b.inverse()};
  std::vector<Circle> circles(maps.size());
  for (std::size_t k = 0; k < maps.size(); ++k) {
    if (!disk_isometric_circle(maps[k], circles[k])) {
      throw std::invalid_argument("Schottky generator has no isometric circle");
    }
  }
  for (std::size_t i = 0; i < circles.size(); ++i) {
    for (std::size_t j = i + 1; j < circles.size(); ++j) {
      const double gap = std::abs(circles[i].centre - circles[j].centre) - circles[i].radius -
                         circles[j].radius;
      if (gap <= 1e-9) {
        throw std::invalid_argument("Schottky disks overlap for separation " + format_real(separation));
      }
    }
  }
  return FuchsianRep::create(SurfacePresentation::free_group(2), {a, b},
                             "schottky:separation=" + format_real(separation));
}

FuchsianRep representation_from_name(const std::string& name) {
  if (name == "octagon") return octagon_representation();
  const std::string prefix = "schottky:separation=";
  if (name.starts_with(prefix)) return schottky_representation(std::stod(name.substr(prefix.size())));
  throw std::invalid_argument("unknown representation: " + name);
}

MoebiusMatrix evaluate_word(const FuchsianRep& rep, std::span<const Letter> letters) {
  rep.presentation().validate(letters);
  MoebiusMatrix m;
  for (Letter x : letters) m = m * rep.letter_matrix(x);
  return m;
}

MoebiusMatrix evaluate_codes(const FuchsianRep& rep, std::span<const std::uint8_t> codes) {
  MoebiusMatrix m;
  for (auto c : codes) m = m * rep.code_matrix(c);
  return m;
}

MoebiusMatrix evaluate_codes_reverse(const FuchsianRep& rep, std::span<const std::uint8_t> codes) {
  MoebiusMatrix m;
  for (auto it = codes.rbegin(); it != codes.rend(); ++it) m = rep.code_matrix(*it) * m;
  return m;
}

double translation_length(const MoebiusMatrix& m, double tolerance) {
  const double tr = std::abs(m.trace());
  if (!(tr > 2.0 + tolerance)) {
    throw NonHyperbolicError("|trace| = " + format_real(tr) + " is not hyperbolic");
  }
  return 2.0 * std::acosh(tr / 2.0);
}

RepresentationReport verify_representation(const FuchsianRep& rep, int n_check) {
  if (n_check < 1) throw std::invalid_argument("n_check must be >= 1");
  RepresentationReport report;
  const double tol = rep.tolerance();
  const auto& p = rep.presentation();
  if (p.is_surface()) {
    report.relator_deviation = evaluate_word(rep, *p.relator()).distance_to_identity();
  }
  for (const auto& g : rep.generators()) {
    if (!is_hyperbolic(g, tol)) report.generators_hyperbolic = false;
  }
  report.min_trace_margin = std::numeric_limits<double>::infinity();
  for_each_class(p, n_check, [&](const ConjugacyClass& cls) {
    const MoebiusMatrix m = evaluate_word(rep, cls.representative);
    const double tr = m.trace();
    report.min_trace_margin = std::min(report.min_trace_margin, std::abs(tr) - 2.0);
    if (!is_hyperbolic(m, tol)) report.classes_hyperbolic = false;
    for (std::size_t k = 1; k < cls.representative.size(); ++k) {
      const double rt = evaluate_word(rep, cls.representative.rotated(k)).trace();
      report.max_rotation_trace_error =
          std::max(report.max_rotation_trace_error, std::abs(rt - tr) / std::max(1.0, std::abs(tr)));
    }
    ++report.classes_checked;
  });
  report.pass = report.relator_deviation <= tol && report.generators_hyperbolic &&
                report.classes_hyperbolic && report.max_rotation_trace_error <= tol;
  return report;
}

}  // namespace geodesics
