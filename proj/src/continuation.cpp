#include "sturmcont/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sturmcont/classify.hpp"

namespace sturmcont {

std::string to_string(BranchStatus s) {
  switch (s) {
    case BranchStatus::reached_target: return "reached_target";
    case BranchStatus::step_floor: return "step_floor";
    case BranchStatus::left_domain: return "left_domain";
    case BranchStatus::fold_limit: return "fold_limit";
    case BranchStatus::diverged: return "diverged";
    case BranchStatus::max_steps: return "max_steps";
  }
  return "unknown";
}

std::string to_string(FoldDirection d) { return d == FoldDirection::min ? "min" : "max"; }

std::string to_string(ParamKind k) { return k == ParamKind::eps ? "eps" : "R"; }

namespace {

struct State {
  Vec F;
  double p = 0;
  Vec t;  // F part of the unit tangent
  double tp = 0;
};

class Tracer {
 public:
  Tracer(const Problem& base, const Grid& grid0, ParamKind kind, const StepControl& ctrl,
         Parity parity)
      : base_(base), grid0_(grid0), kind_(kind), ctrl_(ctrl), parity_(parity) {
    weight_ = static_cast<double>(grid0.h()) / (2.0 * grid0.R);
    pmin_ = ctrl.param_min;
    pmax_ = ctrl.param_max;
    if (kind == ParamKind::R) pmin_ = std::max(pmin_, 0.0);
    if (kind == ParamKind::eps && !base.allows_negative_eps()) pmin_ = std::max(pmin_, 0.0);
  }

  double param_min() const { return pmin_; }
  double param_max() const { return pmax_; }

  Problem problem_at(double p) const {
    Problem q = base_;
    if (kind_ == ParamKind::eps) q.eps = p;
    else q.R = p;
    return q;
  }

  Grid grid_at(double p) const { return kind_ == ParamKind::eps ? grid0_ : grid0_.rescaled(p); }

  StationarySystem system_at(double p) const { return StationarySystem(problem_at(p), grid_at(p)); }

  double tolerance(const StationarySystem& sys, const Vec& F) const {
    NewtonOptions o;
    o.tol = ctrl_.tol;
    o.accept_roundoff_floor = ctrl_.accept_roundoff_floor;
    return effective_tolerance(sys, F, o);
  }

  long double wdot(const Vec& a, const Vec& b) const {
    long double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return weight_ * s;
  }

  // Unit tangent at (F, p) oriented along prev (or along +param if none).
  void tangent(State& s, const State* prev) const {
    auto sys = system_at(s.p);
    auto lin = sys.linearize(s.F);
    Vec rhs = sys.dparam(s.F, kind_);
    for (auto& v : rhs) v = -v;
    Vec x = lin.solve(rhs);
    project_parity(x, parity_);
    const long double nrm = std::sqrt(wdot(x, x) + 1.0L);
    for (auto& v : x) v /= nrm;
    s.t = std::move(x);
    s.tp = static_cast<double>(1.0L / nrm);
    if (prev && wdot(s.t, prev->t) + s.tp * prev->tp < 0) flip(s);
  }

  static void flip(State& s) {
    for (auto& v : s.t) v = -v;
    s.tp = -s.tp;
  }

  enum class Outcome { ok, failed, outside };

  // Predictor from `from` along its tangent by ds, then bordered Newton.
  Outcome correct(const State& from, double ds, State& out, double& res) const {
    Vec Fp(from.F.size());
    for (std::size_t i = 0; i < Fp.size(); ++i) Fp[i] = from.F[i] + ds * from.t[i];
    const double pp = from.p + ds * from.tp;
    Vec Fc = Fp;
    double pc = pp;
    try {
      for (int it = 0; it <= ctrl_.max_corrector; ++it) {
        if (!std::isfinite(pc)) return Outcome::failed;
        if (pc < pmin_ || pc > pmax_) return it == 0 ? Outcome::outside : Outcome::failed;
        auto sys = system_at(pc);
        Vec r = sys.residual(Fc);
        const long double rn = sup_norm(r);
        if (!std::isfinite(static_cast<double>(rn))) return Outcome::failed;
        Vec dF(Fc.size());
        for (std::size_t i = 0; i < Fc.size(); ++i) dF[i] = Fc[i] - Fp[i];
        const long double ar = wdot(from.t, dF) + from.tp * (pc - pp);
        if (rn <= tolerance(sys, Fc) && std::fabs(ar) <= 1e-9L) {
          out.F = std::move(Fc);
          out.p = pc;
          res = static_cast<double>(rn);
          return Outcome::ok;
        }
        if (it == ctrl_.max_corrector) break;
        auto lin = sys.linearize(Fc);
        for (auto& v : r) v = -v;
        Vec x1 = lin.solve(r);
        Vec rp = sys.dparam(Fc, kind_);
        for (auto& v : rp) v = -v;
        Vec x2 = lin.solve(rp);
        project_parity(x1, parity_);
        project_parity(x2, parity_);
        const long double dp =
            (-ar - wdot(from.t, x1)) / (wdot(from.t, x2) + static_cast<long double>(from.tp));
        for (std::size_t i = 0; i < Fc.size(); ++i) Fc[i] += x1[i] + dp * x2[i];
        pc += static_cast<double>(dp);
      }
    } catch (const Error&) {
      return Outcome::failed;
    }
    return Outcome::failed;
  }

  double weight() const { return weight_; }

 private:
  Problem base_;
  Grid grid0_;
  ParamKind kind_;
  StepControl ctrl_;
  Parity parity_;
  double weight_;
  double pmin_, pmax_;
};

double safe_cF(const Profile& prof, const Problem& pr) {
  try {
    return critical_value(prof, pr);
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

Branch continue_branch(const Problem& problem, const Profile& start, ParamKind kind,
                       double param_target, const StepControl& ctrl) {
  problem.validate();
  if (!(ctrl.ds_min > 0 && ctrl.ds_min <= ctrl.ds_init && ctrl.ds_init <= ctrl.ds_max))
    throw InvalidArgument("continue_branch: need 0 < ds_min <= ds_init <= ds_max");
  if (static_cast<int>(start.values.size()) != start.grid.N)
    throw InvalidArgument("continue_branch: start profile size does not match its grid");

  Parity parity = Parity::none;
  if (ctrl.symmetry == SymmetryMode::automatic) {
    parity = detect_parity(start.values);
    if (parity == Parity::odd && !problem.odd_symmetric()) parity = Parity::none;
  }

  const double p0 = kind == ParamKind::eps ? problem.eps : problem.R;
  Tracer tr(problem, start.grid, kind, ctrl, parity);

  State cur;
  cur.F = start.values;
  cur.p = p0;
  {
    auto sys = tr.system_at(p0);
    const long double rn = sup_norm(sys.residual(cur.F));
    if (!(rn <= 10 * tr.tolerance(sys, cur.F)))
      throw StartNotConverged("continue_branch: start residual " +
                              std::to_string(static_cast<double>(rn)) + " exceeds tolerance");
  }
  const double direction = param_target >= p0 ? 1.0 : -1.0;
  if (kind == ParamKind::R) {
    // Pure scaling: the same nodal values on the rescaled grid.
    cur.t.assign(cur.F.size(), 0.0L);
    cur.tp = direction;
  } else {
    tr.tangent(cur, nullptr);
    if (cur.tp * direction < 0) Tracer::flip(cur);
  }

  Branch br;
  br.param_kind = kind;
  br.problem = problem;

  auto profile_of = [&](const State& s, double res) {
    Profile pr;
    pr.grid = tr.grid_at(s.p);
    pr.values = s.F;
    pr.residual_norm = res;
    pr.R = pr.grid.R;
    pr.eps = kind == ParamKind::eps ? s.p : problem.eps;
    return pr;
  };
  auto push = [&](const State& s, double res, bool fold, bool keep) {
    Profile pr = profile_of(s, res);
    BranchRecord rec;
    rec.param = s.p;
    rec.sup_norm = pr.sup_norm();
    rec.c_F = safe_cF(pr, tr.problem_at(s.p));
    rec.dparam_ds = s.tp;
    rec.residual_norm = res;
    rec.fold = fold;
    if (keep || ctrl.store_profiles) {
      rec.profile_ref = static_cast<int>(br.profiles.size());
      br.profiles.push_back(pr);
    }
    br.records.push_back(rec);
    br.endpoint = std::move(pr);
  };

  push(cur, start.residual_norm, false, true);
  const double sup0 = start.sup_norm();

  double ds = ctrl.ds_init;
  int successes = 0;
  int folds = 0;
  br.status = BranchStatus::max_steps;
  bool done = false;
  for (int step = 0; step < ctrl.max_steps && !done; ++step) {
    State next;
    double res = 0;
    const auto outcome = tr.correct(cur, ds, next, res);
    if (outcome == Tracer::Outcome::outside && ds <= 2 * ctrl.ds_min) {
      br.status = BranchStatus::left_domain;
      break;
    }
    if (outcome != Tracer::Outcome::ok) {
      ds *= ctrl.shrink;
      successes = 0;
      if (ds < ctrl.ds_min) {
        br.status = BranchStatus::step_floor;
        break;
      }
      continue;
    }
    if (next.p < tr.param_min() || next.p > tr.param_max()) {
      br.status = BranchStatus::left_domain;
      break;
    }
    try {
      tr.tangent(next, &cur);
    } catch (const Error&) {
      ds *= ctrl.shrink;
      successes = 0;
      if (ds < ctrl.ds_min) {
        br.status = BranchStatus::step_floor;
        break;
      }
      continue;
    }

    if (next.tp * cur.tp < 0) {
      State a = cur, b = next;
      double sa = 0, sb = ds;
      State best = next;
      double best_res = res;
      if (ctrl.refine_folds) {
        double plast = std::numeric_limits<double>::quiet_NaN();
        best = a;
        best_res = br.records.back().residual_norm;
        for (int it = 0; it < 40; ++it) {
          const double s = sa - a.tp * (sb - sa) / (b.tp - a.tp);
          State c;
          double rc = 0;
          if (tr.correct(cur, s, c, rc) != Tracer::Outcome::ok) break;
          try {
            tr.tangent(c, &cur);
          } catch (const Error&) {
            break;
          }
          if (std::fabs(c.tp) < std::fabs(best.tp)) {
            best = c;
            best_res = rc;
          }
          const bool converged = std::isfinite(plast) && std::fabs(c.p - plast) < ctrl.fold_tol;
          plast = c.p;
          if ((c.tp > 0) == (a.tp > 0)) {
            a = c;
            sa = s;
          } else {
            b = c;
            sb = s;
          }
          if (converged || std::fabs(b.p - a.p) < 0.1 * ctrl.fold_tol) break;
        }
      }
      push(best, best_res, true, true);
      FoldRecord fr{best.p, br.records.back().sup_norm,
                    cur.tp > 0 ? FoldDirection::max : FoldDirection::min};
      br.folds.push_back(fr);
      ++folds;
    }

    const double crossing = (next.p - param_target) * (cur.p - param_target);
    push(next, res, false, false);
    if (kind == ParamKind::R && br.records.back().sup_norm > ctrl.divergence_factor * sup0) {
      br.status = BranchStatus::diverged;
      done = true;
    } else if (crossing <= 0 && next.p != cur.p) {
      // Land exactly on the target with a natural-parameter solve.
      Profile guess = profile_of(next, res);
      const double w = (param_target - cur.p) / (next.p - cur.p);
      for (std::size_t i = 0; i < guess.values.size(); ++i)
        guess.values[i] = cur.F[i] + w * (next.F[i] - cur.F[i]);
      guess.grid = tr.grid_at(param_target);
      guess.R = guess.grid.R;
      try {
        NewtonOptions o;
        o.tol = ctrl.tol;
        o.accept_roundoff_floor = ctrl.accept_roundoff_floor;
        o.symmetry = ctrl.symmetry;
        o.max_iter = 30;
        Profile fin = newton_solve(tr.problem_at(param_target), guess, o);
        State s;
        s.F = fin.values;
        s.p = param_target;
        s.t = next.t;
        s.tp = next.tp;
        push(s, fin.residual_norm, false, true);
      } catch (const Error&) {
        if (!br.profiles.empty() && br.records.back().profile_ref < 0) {
          br.records.back().profile_ref = static_cast<int>(br.profiles.size());
          br.profiles.push_back(br.endpoint);
        }
      }
      br.status = BranchStatus::reached_target;
      done = true;
    } else if (ctrl.stop_after_folds > 0 && folds >= ctrl.stop_after_folds) {
      br.status = BranchStatus::fold_limit;
      done = true;
    }
    cur = std::move(next);
    if (++successes >= ctrl.grow_after) {
      ds = std::min(ds * ctrl.grow, ctrl.ds_max);
      successes = 0;
    }
  }
  if (br.records.back().profile_ref < 0) {
    br.records.back().profile_ref = static_cast<int>(br.profiles.size());
    br.profiles.push_back(br.endpoint);
  }
  return br;
}

std::vector<FoldRecord> detect_folds(const Branch& branch) {
  std::vector<FoldRecord> out;
  const auto& rs = branch.records;
  if (rs.size() < 3) return out;
  int last = -1;
  for (int j = 0; j < static_cast<int>(rs.size()); ++j) {
    if (rs[j].fold || rs[j].dparam_ds == 0) continue;
    if (last >= 0 && (rs[j].dparam_ds > 0) != (rs[last].dparam_ds > 0)) {
      const bool is_max = rs[last].dparam_ds > 0;
      int pick = -1;
      for (int k = last + 1; k < j; ++k)
        if (rs[k].fold) pick = k;
      if (pick < 0) {
        pick = last;
        for (int k = last; k <= j; ++k)
          if (is_max ? rs[k].param > rs[pick].param : rs[k].param < rs[pick].param) pick = k;
      }
      out.push_back({rs[pick].param, rs[pick].sup_norm, is_max ? FoldDirection::max : FoldDirection::min});
    }
    last = j;
  }
  return out;
}

std::vector<double> bifurcation_points(const Problem& problem, int k, int N) {
  problem.validate();
  const bool linearized = problem.family == Family::LinearizedHomotopy;
  if (!linearized && problem.family != Family::AnalyticFastDiffusion &&
      problem.family != Family::Nonlocal)
    throw InvalidArgument("bifurcation_points: unsupported family " + to_string(problem.family));
  const DiffOperator op(make_grid(problem.R, N, problem.m));
  auto eig = eigen_smallest(op, k);
  std::vector<double> out;
  for (const auto& e : eig) out.push_back(linearized ? 1.0 - e.lambda : -e.lambda);
  std::sort(out.begin(), out.end());
  return out;
}

Profile nonlocal_branch(const Problem& problem, int l, double eps, int N, int sign) {
  if (problem.family != Family::Nonlocal)
    throw InvalidArgument("nonlocal_branch: family must be Nonlocal");
  if (l < 0) throw InvalidArgument("nonlocal_branch: l must be nonnegative");
  const Grid g = make_grid(problem.R, N, problem.m);
  const DiffOperator op(g);
  auto eig = eigen_smallest(op, l + 1);
  const double lam = eig[l].lambda;
  const double a = lam + eps;
  if (a < -1e-12 * lam) throw InvalidArgument("nonlocal_branch: branch not born yet (eps + lambda_l <= 0)");
  Problem q = problem;
  q.eps = eps;
  Profile p;
  p.grid = g;
  p.R = g.R;
  p.eps = eps;
  const long double amp = a > 0 ? (sign < 0 ? -1 : 1) * std::sqrt(static_cast<long double>(a)) : 0;
  p.values.resize(N);
  for (int i = 0; i < N; ++i) p.values[i] = amp * eig[l].psi[i];
  StationarySystem sys(q, g);
  p.residual_norm = static_cast<double>(sup_norm(sys.residual(p.values)));
  return p;
}

}  // namespace sturmcont
