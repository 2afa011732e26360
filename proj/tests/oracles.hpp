#pragma once

#include <cmath>
#include <functional>

namespace oracle {

inline double bisect(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a);
  for (int it = 0; it < 200; ++it) {
    const double c = 0.5 * (a + b);
    const double fc = f(c);
    if ((fc > 0) == (fa > 0)) {
      a = c;
      fa = fc;
    } else {
      b = c;
    }
  }
  return 0.5 * (a + b);
}

// l-th positive root of cos x cosh x = 1 (clamped-clamped beam).
inline double beam_root(int l) {
  const double guess = (l + 1.5) * M_PI;
  return bisect([](double x) { return std::cos(x) * std::cosh(x) - 1.0; }, guess - 0.5, guess + 0.5);
}

// Eigenvalue of D^4 on (-R, R) with clamped ends.
inline double beam_eigenvalue(int l, double R) { return std::pow(beam_root(l) / (2 * R), 4); }

}  // namespace oracle
