#include "sturmcont/model.hpp"

#include <cmath>

#include "sturmcont/errors.hpp"

namespace sturmcont {

namespace {

struct FamilyName {
  Family f;
  const char* name;
};

constexpr FamilyName kFamilies[] = {
    {Family::RegularizedNonLipschitz, "RegularizedNonLipschitz"},
    {Family::Cubic, "Cubic"},
    {Family::AnalyticFastDiffusion, "AnalyticFastDiffusion"},
    {Family::LinearizedHomotopy, "LinearizedHomotopy"},
    {Family::Nonlocal, "Nonlocal"},
    {Family::QuadraticForced, "QuadraticForced"},
};

void check_eval_domain(const Problem& p) {
  if (p.n <= -1.0) throw InvalidArgument("exponent n must exceed -1");
  if (p.eps < 0.0 && !p.allows_negative_eps())
    throw InvalidArgument("eps must be nonnegative for family " + to_string(p.family));
  if (p.family == Family::Nonlocal)
    throw InvalidArgument("the nonlocal family has no pointwise nonlinearity");
}

}  // namespace

std::string to_string(Family f) {
  for (const auto& e : kFamilies)
    if (e.f == f) return e.name;
  return "unknown";
}

Family family_from_string(const std::string& s) {
  for (const auto& e : kFamilies)
    if (s == e.name) return e.f;
  throw ConfigError("unknown family '" + s + "'");
}

std::string to_string(ZerothSign s) { return s == ZerothSign::plus ? "plus" : "minus"; }

ZerothSign zeroth_sign_from_string(const std::string& s) {
  if (s == "plus") return ZerothSign::plus;
  if (s == "minus") return ZerothSign::minus;
  throw ConfigError("zeroth_sign must be 'plus' or 'minus', got '" + s + "'");
}

void Problem::validate() const {
  if (m < 1) throw InvalidArgument("m must be at least 1");
  if (!(R > 0.0) || !std::isfinite(R)) throw InvalidArgument("R must be positive");
  if (n == 0.0 || !std::isfinite(n)) throw InvalidArgument("n must be nonzero and finite");
  if (n <= -1.0) throw InvalidArgument("n must exceed -1");
  if (!std::isfinite(eps)) throw InvalidArgument("eps must be finite");
  if (eps < 0.0 && !allows_negative_eps())
    throw InvalidArgument("eps must be nonnegative for family " + to_string(family));
  if (!(delta_reg > 0.0)) throw InvalidArgument("delta_reg must be positive");
  if (forcing && !std::isfinite(*forcing)) throw InvalidArgument("forcing must be finite");
}

GValue g_eval(const Problem& p, long double F) {
  check_eval_domain(p);
  const long double e = p.eps;
  switch (p.family) {
    case Family::RegularizedNonLipschitz: {
      const long double a = p.n / (2.0L * (p.n + 1.0L));
      const long double d = p.delta_reg;
      const long double q = e * e + d * d + F * F;
      const long double pw = std::pow(q, -a);
      const long double g = (1 - e) * (F - pw * F) + e * F * F * F;
      const long double dg = (1 - e) * (1 - pw + 2 * a * F * F * pw / q) + 3 * e * F * F;
      return {g, dg};
    }
    case Family::Cubic:
      return {F * F * F, 3 * F * F};
    case Family::AnalyticFastDiffusion:
      return {F * F * F - e * F, 3 * F * F - e};
    case Family::LinearizedHomotopy: {
      const long double a = p.n / (2.0L * (p.n + 1.0L));
      const long double d = p.delta_reg;
      const long double q = e * e + d * d + F * F;
      const long double s = d * d + F * F;
      const long double P = std::pow(q, -a) * std::pow(s, e / 2);
      const long double g = (1 - e) * (F - P * F);
      const long double dg = (1 - e) * (1 - P - P * F * F * (e / s - 2 * a / q));
      return {g, dg};
    }
    case Family::QuadraticForced: {
      const long double k = p.forcing_or_default();
      return {k * e * (1 + F * F), 2 * k * e * F};
    }
    case Family::Nonlocal:
      break;
  }
  throw InvalidArgument("unsupported family");
}

long double g_deps(const Problem& p, long double F) {
  check_eval_domain(p);
  const long double e = p.eps;
  switch (p.family) {
    case Family::RegularizedNonLipschitz: {
      const long double a = p.n / (2.0L * (p.n + 1.0L));
      const long double d = p.delta_reg;
      const long double q = e * e + d * d + F * F;
      const long double pw = std::pow(q, -a);
      return -(F - pw * F) + (1 - e) * (2 * a * e * pw / q) * F + F * F * F;
    }
    case Family::Cubic:
      return 0;
    case Family::AnalyticFastDiffusion:
      return -F;
    case Family::LinearizedHomotopy: {
      const long double a = p.n / (2.0L * (p.n + 1.0L));
      const long double d = p.delta_reg;
      const long double q = e * e + d * d + F * F;
      const long double s = d * d + F * F;
      const long double P = std::pow(q, -a) * std::pow(s, e / 2);
      return -(F - P * F) - (1 - e) * F * P * (std::log(s) / 2 - 2 * a * e / q);
    }
    case Family::QuadraticForced:
      return p.forcing_or_default() * (1 + F * F);
    case Family::Nonlocal:
      break;
  }
  throw InvalidArgument("unsupported family");
}

}  // namespace sturmcont
