#pragma once

#include <optional>
#include <string>

namespace sturmcont {

enum class Family {
  RegularizedNonLipschitz,
  Cubic,
  AnalyticFastDiffusion,
  LinearizedHomotopy,
  Nonlocal,
  QuadraticForced,
};

enum class ZerothSign { plus, minus };

std::string to_string(Family f);
Family family_from_string(const std::string& s);
std::string to_string(ZerothSign s);
ZerothSign zeroth_sign_from_string(const std::string& s);

// Stationary problem (-1)^{m+1} F^{(2m)} + g_eps(F) = 0 on (-R, R) with
// clamped conditions, or the evolution problem built from the same data.
struct Problem {
  Family family = Family::RegularizedNonLipschitz;
  int m = 2;
  double n = 1.0;
  double eps = 0.0;
  double R = 10.0;
  ZerothSign zeroth_sign = ZerothSign::minus;
  std::optional<double> forcing;
  // Floor inside eps^2 + delta_reg^2 + F^2; keeps the eps = 0 Jacobian finite.
  double delta_reg = 1e-12;

  // Throws InvalidArgument when the invariants do not hold.
  void validate() const;
  double beta() const { return (n + 2.0) / (n + 1.0); }
  // True when g(-F) = -g(F).
  bool odd_symmetric() const { return family != Family::QuadraticForced; }
  // True when eps may be negative (the pitchfork families born at eps = -lambda).
  bool allows_negative_eps() const {
    return family == Family::AnalyticFastDiffusion || family == Family::Nonlocal;
  }
  double forcing_or_default() const { return forcing.value_or(1.0); }
};

struct GValue {
  long double g;
  long double dg;
};

// g_eps(F) and dg/dF for every local family. Nonlocal is rejected.
GValue g_eval(const Problem& p, long double F);
// dg/d(eps) at fixed F.
long double g_deps(const Problem& p, long double F);

}  // namespace sturmcont
