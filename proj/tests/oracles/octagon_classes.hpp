#pragma once

#include "matrix_classes.hpp"

#include "geodesics/hyperbolic_geom.hpp"

namespace oracle {

// Matrix-conjugacy classes of the octagon group; codes follow a..d, A..D.
inline MatrixClasses octagon_classes(int n_max, int conjugator_length) {
  const auto rep = geodesics::octagon_representation();
  std::vector<Mat> gens;
  for (int k = 0; k < 8; ++k) {
    const geodesics::Letter x{static_cast<std::uint8_t>(k % 4), k >= 4};
    const auto m = geodesics::evaluate_word(rep, std::span<const geodesics::Letter>(&x, 1));
    gens.push_back({m.a(), m.b(), m.c(), m.d()});
  }
  return MatrixClasses(std::move(gens), n_max, conjugator_length);
}

inline std::string ascii(const std::vector<int>& w) {
  std::string s;
  for (int c : w) s += static_cast<char>(c < 4 ? 'a' + c : 'A' + c - 4);
  return s;
}

}  // namespace oracle
