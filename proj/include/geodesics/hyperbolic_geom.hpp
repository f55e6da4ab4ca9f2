#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "geodesics/group_core.hpp"

namespace geodesics {

/// Element of SL(2, R) acting on the upper half-plane.
class MoebiusMatrix {
 public:
  /// Identity.
  constexpr MoebiusMatrix() = default;
  /// Throws std::invalid_argument unless det = 1 (relative tolerance 1e-12).
  MoebiusMatrix(double a, double b, double c, double d);

  /// No determinant check; used for products whose det drifts by rounding.
  static constexpr MoebiusMatrix unchecked(double a, double b, double c, double d) {
    MoebiusMatrix m;
    m.e_ = {a, b, c, d};
    return m;
  }

  double a() const noexcept { return e_[0]; }
  double b() const noexcept { return e_[1]; }
  double c() const noexcept { return e_[2]; }
  double d() const noexcept { return e_[3]; }
  double trace() const noexcept { return e_[0] + e_[3]; }
  double determinant() const noexcept { return e_[0] * e_[3] - e_[1] * e_[2]; }
  double max_abs_entry() const noexcept;

  /// Exact adjugate.
  MoebiusMatrix inverse() const noexcept {
    return unchecked(e_[3], -e_[1], -e_[2], e_[0]);
  }

  friend MoebiusMatrix operator*(const MoebiusMatrix& x, const MoebiusMatrix& y) noexcept {
    return unchecked(x.e_[0] * y.e_[0] + x.e_[1] * y.e_[2], x.e_[0] * y.e_[1] + x.e_[1] * y.e_[3],
                     x.e_[2] * y.e_[0] + x.e_[3] * y.e_[2], x.e_[2] * y.e_[1] + x.e_[3] * y.e_[3]);
  }

  /// Largest entrywise distance to +I or -I, whichever is closer.
  double distance_to_identity() const noexcept;

 private:
  std::array<double, 4> e_{1.0, 0.0, 0.0, 1.0};
};

/// Rotation by `angle` about i in the upper half-plane.
MoebiusMatrix elliptic_rotation(double angle);
/// Translation by `length` along the imaginary axis.
MoebiusMatrix axial_translation(double length);

class FuchsianRep {
 public:
  /// Validates the invariants: relator = +-I within tolerance (surface mode),
  /// every generator hyperbolic. Throws std::invalid_argument otherwise.
  static FuchsianRep create(SurfacePresentation presentation, std::vector<MoebiusMatrix> generators,
                            std::string name, double tolerance = 1e-9);
  /// Skips validation; verify_representation reports what fails.
  static FuchsianRep unchecked(SurfacePresentation presentation,
                               std::vector<MoebiusMatrix> generators, std::string name,
                               double tolerance = 1e-9);

  const SurfacePresentation& presentation() const noexcept { return presentation_; }
  const std::vector<MoebiusMatrix>& generators() const noexcept { return generators_; }
  /// Matrix for a letter; inverse letters use the adjugate.
  const MoebiusMatrix& letter_matrix(Letter x) const noexcept {
    return letter_mats_[static_cast<std::size_t>(letter_code(x, presentation_.generator_count()))];
  }
  /// Matrix for a letter code, see letter_code.
  const MoebiusMatrix& code_matrix(std::uint8_t code) const noexcept { return letter_mats_[code]; }
  double tolerance() const noexcept { return tolerance_; }
  /// Stable identifier written into census headers and reports.
  const std::string& name() const noexcept { return name_; }

 private:
  SurfacePresentation presentation_;
  std::vector<MoebiusMatrix> generators_;
  std::vector<MoebiusMatrix> letter_mats_;
  std::string name_;
  double tolerance_ = 1e-9;
};

/// Genus-2 surface from the regular hyperbolic octagon with interior angles
/// pi/4. Generator k translates by 2 arccosh(1 + sqrt 2) along the axis at
/// angle k pi/4 through the centre; directions alternate so that
/// a b c d a^-1 b^-1 c^-1 d^-1 closes up.
FuchsianRep octagon_representation();

/// Rank-2 classical Schottky group: a translates by `separation` along the
/// imaginary axis and b is a rotated by pi/2 about i. Rejects values for
/// which the four isometric disks (disk model) are not pairwise disjoint.
FuchsianRep schottky_representation(double separation);

/// Builds the representation named by FuchsianRep::name().
FuchsianRep representation_from_name(const std::string& name);

MoebiusMatrix evaluate_word(const FuchsianRep& rep, std::span<const Letter> letters);
inline MoebiusMatrix evaluate_word(const FuchsianRep& rep, const Word& w) {
  return evaluate_word(rep, w.letters());
}
inline MoebiusMatrix evaluate_word(const FuchsianRep& rep, const CyclicWord& w) {
  return evaluate_word(rep, w.letters());
}

/// Product of letter codes, left to right, and the same product associated
/// right to left.
MoebiusMatrix evaluate_codes(const FuchsianRep& rep, std::span<const std::uint8_t> codes);
MoebiusMatrix evaluate_codes_reverse(const FuchsianRep& rep, std::span<const std::uint8_t> codes);

/// 2 arccosh(|tr| / 2). Throws NonHyperbolicError if |tr| <= 2 + tolerance.
double translation_length(const MoebiusMatrix& m, double tolerance = 1e-9);

struct RepresentationReport {
  double relator_deviation = 0.0;  // 0 in free mode
  bool generators_hyperbolic = true;
  bool classes_hyperbolic = true;
  double min_trace_margin = 0.0;           // min |tr| - 2 over checked classes
  double max_rotation_trace_error = 0.0;   // relative, over all rotations
  std::size_t classes_checked = 0;
  bool pass = false;
};

RepresentationReport verify_representation(const FuchsianRep& rep, int n_check);

}  // namespace geodesics
