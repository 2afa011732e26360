#include "sturmcont/solver.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

namespace sturmcont {

namespace {

double smooth_step(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

long double max_abs(const Vec& v) { return sup_norm(v); }

Vec scaled(const Vec& v, long double s) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = s * v[i];
  return out;
}

}  // namespace

double Profile::sup_norm() const { return static_cast<double>(sturmcont::sup_norm(values)); }

Profile template_profile(const TemplateSpec& spec, const Grid& grid) {
  const double w = spec.smoothing_width;
  if (!(w > 0)) throw InvalidArgument("template: smoothing_width must be positive");
  for (std::size_t k = 0; k < spec.plateaus.size(); ++k) {
    const auto& p = spec.plateaus[k];
    if (p.level != 1.0 && p.level != -1.0 && p.level != 0.0)
      throw InvalidArgument("template: plateau level must be +1, -1 or 0");
    if (!(p.start < p.end)) throw InvalidArgument("template: plateau start must precede end");
    if (p.start - 2 * w < -grid.R || p.end + 2 * w > grid.R)
      throw InvalidArgument("template: plateau and its transition band must stay inside (-R, R)");
    if (k > 0) {
      const auto& q = spec.plateaus[k - 1];
      if (p.start < q.end) throw InvalidArgument("template: overlapping plateaus");
      if (p.start - q.end < 2 * w) throw InvalidArgument("template: transition bands wider than gaps");
    }
  }
  Profile out;
  out.grid = grid;
  out.R = grid.R;
  out.values.assign(grid.N, 0.0L);
  for (int i = 0; i < grid.N; ++i) {
    const double y = static_cast<double>(grid.node(i));
    double f = 0;
    for (const auto& p : spec.plateaus)
      f += p.level * smooth_step((y - (p.start - w)) / w) * smooth_step(((p.end + w) - y) / w);
    out.values[i] = f;
  }
  return out;
}

Parity detect_parity(const Vec& F) {
  const long double s = max_abs(F);
  if (s == 0) return Parity::even;
  const std::size_t N = F.size();
  long double de = 0, dodd = 0;
  for (std::size_t i = 0; i < N; ++i) {
    de = std::max(de, std::fabs(F[i] - F[N - 1 - i]));
    dodd = std::max(dodd, std::fabs(F[i] + F[N - 1 - i]));
  }
  if (de <= 1e-8L * s) return Parity::even;
  if (dodd <= 1e-8L * s) return Parity::odd;
  return Parity::none;
}

void project_parity(Vec& x, Parity p) {
  if (p == Parity::none) return;
  const std::size_t N = x.size();
  const long double sg = p == Parity::even ? 1 : -1;
  for (std::size_t i = 0; i < N / 2; ++i) {
    const std::size_t j = N - 1 - i;
    const long double a = 0.5L * (x[i] + sg * x[j]);
    x[i] = a;
    x[j] = sg * a;
  }
  if (N % 2 == 1 && p == Parity::odd) x[N / 2] = 0;
}

StationarySystem::StationarySystem(const Problem& p, const Grid& g) : problem_(p), op_(g) {
  problem_.validate();
  if (g.m != p.m) throw InvalidArgument("grid order does not match problem.m");
  if (std::fabs(g.R - p.R) > 1e-12 * std::max(1.0, p.R))
    throw InvalidArgument("grid half-length does not match problem.R");
}

Vec StationarySystem::residual(const Vec& F) const {
  Vec r = op_.apply(F);
  const std::size_t N = F.size();
  if (problem_.family == Family::Nonlocal) {
    long double mass = 0;
    for (auto v : F) mass += v * v;
    mass *= op_.h();
    const long double c = mass - problem_.eps;
    for (std::size_t i = 0; i < N; ++i) r[i] = -r[i] + c * F[i];
    return r;
  }
  for (std::size_t i = 0; i < N; ++i) r[i] = -r[i] + g_eval(problem_, F[i]).g;
  return r;
}

Vec StationarySystem::dparam(const Vec& F, ParamKind kind) const {
  const std::size_t N = F.size();
  Vec d(N);
  if (kind == ParamKind::R) {
    Vec a = op_.apply(F);
    const long double s = 2.0L * problem_.m / problem_.R;
    for (std::size_t i = 0; i < N; ++i) d[i] = s * a[i];
    return d;
  }
  if (problem_.family == Family::Nonlocal) {
    for (std::size_t i = 0; i < N; ++i) d[i] = -F[i];
    return d;
  }
  for (std::size_t i = 0; i < N; ++i) d[i] = g_deps(problem_, F[i]);
  return d;
}

long double StationarySystem::roundoff_floor(const Vec& F) const {
  long double gs = 0;
  if (problem_.family == Family::Nonlocal) {
    long double mass = 0;
    for (auto v : F) mass += v * v;
    gs = (op_.h() * mass + std::fabs(problem_.eps)) * max_abs(F);
  } else {
    for (auto v : F) gs = std::max(gs, std::fabs(g_eval(problem_, v).g));
  }
  return LDBL_EPSILON * (op_.row_abs_sum() * max_abs(F) + gs);
}

StationarySystem::Linearization StationarySystem::linearize(const Vec& F) const {
  const int N = op_.size();
  std::vector<double> d(N);
  Linearization lin;
  if (problem_.family == Family::Nonlocal) {
    long double mass = 0;
    for (auto v : F) mass += v * v;
    mass *= op_.h();
    for (int i = 0; i < N; ++i) d[i] = static_cast<double>(mass - problem_.eps);
    lin.u_ = F;
    lin.w_ = scaled(F, 2 * op_.h());
  } else {
    for (int i = 0; i < N; ++i) d[i] = static_cast<double>(g_eval(problem_, F[i]).dg);
  }
  if (!lin.lu_.factor(op_.band(-1.0, d))) {
    double big = 0;
    for (int i = 0; i < N; ++i) big = std::max(big, std::fabs(d[i]));
    big = std::max(big, static_cast<double>(op_.coeff(0)));
    for (auto& v : d) v += 1e-10 * big;
    if (!lin.lu_.factor(op_.band(-1.0, d)))
      throw SingularJacobian("Jacobian is singular after diagonal shift");
  }
  if (!lin.u_.empty()) {
    lin.z_ = lin.lu_.solve(lin.u_);
    long double wz = 0;
    for (int i = 0; i < N; ++i) wz += lin.w_[i] * lin.z_[i];
    lin.denom_ = 1 + wz;
    if (lin.denom_ == 0) throw SingularJacobian("rank-one update makes the Jacobian singular");
  }
  return lin;
}

Vec StationarySystem::Linearization::solve(const Vec& rhs) const {
  Vec x = lu_.solve(rhs);
  if (!u_.empty()) {
    long double wx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) wx += w_[i] * x[i];
    const long double c = wx / denom_;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= c * z_[i];
  }
  return x;
}

double effective_tolerance(const StationarySystem& sys, const Vec& F, const NewtonOptions& opt) {
  if (!opt.accept_roundoff_floor) return opt.tol;
  return std::max(opt.tol, static_cast<double>(sys.roundoff_floor(F)));
}

Profile newton_solve(const Problem& problem, const Profile& init, const NewtonOptions& opt) {
  if (!(opt.tol > 0)) throw InvalidArgument("newton_solve: tol must be positive");
  if (static_cast<int>(init.values.size()) != init.grid.N)
    throw InvalidArgument("newton_solve: profile size does not match its grid");
  StationarySystem sys(problem, init.grid);

  Parity parity = Parity::none;
  if (opt.symmetry == SymmetryMode::automatic) {
    parity = detect_parity(init.values);
    if (parity == Parity::odd && !problem.odd_symmetric()) parity = Parity::none;
  }

  Vec F = init.values;
  project_parity(F, parity);
  Vec r = sys.residual(F);
  long double rn = max_abs(r);

  auto make_profile = [&](const Vec& values, long double res, int it) {
    Profile p;
    p.grid = init.grid;
    p.values = values;
    p.residual_norm = static_cast<double>(res);
    p.eps = problem.eps;
    p.R = problem.R;
    p.iterations = it;
    return p;
  };

  Vec best = F;
  long double best_rn = rn;
  for (int it = 0; it <= opt.max_iter; ++it) {
    if (!std::isfinite(static_cast<double>(rn))) break;
    if (rn <= effective_tolerance(sys, F, opt)) return make_profile(F, rn, it);
    if (it == opt.max_iter) break;

    auto lin = sys.linearize(F);
    Vec rhs = scaled(r, -1);
    Vec dx = lin.solve(rhs);
    project_parity(dx, parity);

    long double lam = 1;
    Vec Fn(F.size()), rr;
    long double rnn = 0;
    while (true) {
      for (std::size_t i = 0; i < F.size(); ++i) Fn[i] = F[i] + lam * dx[i];
      rr = sys.residual(Fn);
      rnn = max_abs(rr);
      if (std::isfinite(static_cast<double>(rnn)) && rnn <= (1 - opt.armijo_c * lam) * rn) break;
      if (lam <= opt.min_step) break;
      lam /= 2;
    }
    F.swap(Fn);
    r.swap(rr);
    rn = rnn;
    if (rn < best_rn) {
      best_rn = rn;
      best = F;
    }
  }
  throw NoConvergence("newton_solve: no convergence within " + std::to_string(opt.max_iter) +
                          " iterations (best residual " +
                          std::to_string(static_cast<double>(best_rn)) + ")",
                      make_profile(best, best_rn, opt.max_iter));
}

Profile newton_solve(const Problem& problem, const Profile& init, double tol, int max_iter) {
  NewtonOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  return newton_solve(problem, init, opt);
}

FiberingRoots fibering_roots(const Profile& h, const Profile& v, const Problem& problem) {
  problem.validate();
  if (!(problem.n > 0)) throw InvalidArgument("fibering_roots: requires n > 0");
  if (h.values.size() != v.values.size() || h.grid.N != v.grid.N)
    throw InvalidArgument("fibering_roots: h and v live on different grids");
  const DiffOperator op(v.grid);
  const Grid& g = v.grid;
  const long double beta = problem.beta();

  Vec v2(v.values.size());
  for (std::size_t i = 0; i < v2.size(); ++i) v2[i] = v.values[i] * v.values[i];
  const long double H0 = op.quadratic_form(v.values) + trapezoid(g, v2);
  if (std::fabs(H0 - 1) > 1e-8L) throw InvalidArgument("fibering_roots: v is not normalized");

  Vec hv(v.values.size());
  for (std::size_t i = 0; i < hv.size(); ++i) hv[i] = h.values[i] * v.values[i];
  const long double L0 = -op.bilinear_form(h.values, v.values) + trapezoid(g, hv);

  auto Hr = [&](long double r) {
    long double s = 0;
    for (std::size_t i = 0; i < v.values.size(); ++i) {
      const long double u = h.values[i] + r * v.values[i];
      if (u != 0) s += std::pow(std::fabs(u), beta - 1) * (u > 0 ? 1 : -1) * v.values[i];
    }
    return r - g.h() * s + L0;
  };

  Vec vb(v.values.size());
  for (std::size_t i = 0; i < vb.size(); ++i) vb[i] = std::pow(std::fabs(v.values[i]), beta);
  const long double r0 = std::pow(trapezoid(g, vb), 1 / (2 - beta));
  long double span = 2 * std::max<long double>({1.0L, r0, std::fabs(L0), max_abs(h.values)});
  int guard = 0;
  while (!(Hr(span) > 0 && Hr(-span) < 0)) {
    span *= 2;
    if (++guard > 60) throw ConvergenceError("fibering_roots: root scan range exhausted");
  }

  const int samples = 4001;
  std::vector<double> roots;
  long double ra = -span, fa = Hr(ra);
  for (int k = 1; k < samples; ++k) {
    const long double rb = -span + 2 * span * k / (samples - 1);
    const long double fb = Hr(rb);
    if (fb == 0) {
      roots.push_back(static_cast<double>(rb));
    } else if (fa != 0 && (fa < 0) != (fb < 0)) {
      long double lo = ra, hi = rb, flo = fa;
      for (int it = 0; it < 200 && hi - lo > 4 * LDBL_EPSILON * std::max(1.0L, std::fabs(lo)); ++it) {
        const long double mid = 0.5L * (lo + hi);
        const long double fm = Hr(mid);
        if (fm == 0) {
          lo = hi = mid;
          break;
        }
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(static_cast<double>(0.5L * (lo + hi)));
    }
    ra = rb;
    fa = fb;
  }

  FiberingRoots out;
  out.all = roots;
  if (roots.size() >= 3) {
    out.r_minus = roots.front();
    out.r_plus = roots.back();
    // Middle root: the one closest to the origin among the interior ones.
    double best = roots[1];
    for (std::size_t k = 1; k + 1 < roots.size(); ++k)
      if (std::fabs(roots[k]) < std::fabs(best)) best = roots[k];
    out.r_zero = best;
  } else if (roots.size() == 2) {
    if (roots[1] < 0) {
      out.r_minus = roots[0];
      out.r_zero = roots[1];
    } else if (roots[0] > 0) {
      out.r_zero = roots[0];
      out.r_plus = roots[1];
    } else {
      out.r_minus = roots[0];
      out.r_plus = roots[1];
    }
  } else if (roots.size() == 1) {
    if (roots[0] < 0) out.r_minus = roots[0];
    else if (roots[0] > 0) out.r_plus = roots[0];
    else out.r_zero = roots[0];
  }
  return out;
}

}  // namespace sturmcont
