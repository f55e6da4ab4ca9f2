#pragma once

#include <cmath>

namespace oracle {

// Ramanujan's series for the logarithmic integral from 0, minus li(2).
inline double li_offset(double x) {
  constexpr double euler_gamma = 0.57721566490153286061;
  constexpr double li2 = 1.04516378011749278484;
  const long double lx = std::log(static_cast<long double>(x));
  long double sum = 0.0L, term = 1.0L, inner = 0.0L;
  for (int n = 1; n < 400; ++n) {
    term *= lx / n;
    if (n > 1) term /= 2.0L;
    if ((n - 1) % 2 == 0) inner += 1.0L / n;
    const long double add = ((n % 2) ? 1.0L : -1.0L) * term * inner;
    sum += add;
    if (n > 10 && std::fabs(add) < 1e-22L * std::fabs(sum)) break;
  }
  return static_cast<double>(euler_gamma + std::log(lx) + std::sqrt(static_cast<long double>(x)) * sum - li2);
}

}  // namespace oracle
