#include "sturmcont/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sturmcont {

namespace {

double zeroth(const Problem& p) { return p.zeroth_sign == ZerothSign::plus ? 1.0 : -1.0; }

// One linearized implicit Euler step of psi_delta(v)_t = -A v + s v.
Vec euler_step(const DiffOperator& op, const Vec& v, double dt, double n, double delta, double s) {
  const int N = op.size();
  const double inv = 1.0 / (n + 1.0);
  const double expo = -n / (2.0 * (n + 1.0));
  std::vector<double> d(N), rhs(N);
  for (int i = 0; i < N; ++i) {
    const double vi = static_cast<double>(v[i]);
    const double mass = inv * std::pow(delta * delta + vi * vi, expo);
    d[i] = mass / dt - s;
    rhs[i] = mass / dt * vi;
  }
  BandLU lu;
  if (!lu.factor(op.band(1.0, d))) throw SingularJacobian("evolution step matrix is singular");
  lu.solve(rhs);
  return Vec(rhs.begin(), rhs.end());
}

}  // namespace

void EvolutionConfig::validate() const {
  if (!(dt_min > 0 && dt_min <= dt_init && dt_init <= dt_max))
    throw InvalidArgument("evolution: need 0 < dt_min <= dt_init <= dt_max");
  if (!(rtol > 0) || atol < 0) throw InvalidArgument("evolution: bad tolerances");
  if (!(blowup_cap > 1)) throw InvalidArgument("evolution: blowup_cap must exceed 1");
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::reached_t_end: return "reached_t_end";
    case StopReason::extinct: return "extinct";
    case StopReason::blowup_cap: return "blowup_cap";
    case StopReason::trivial: return "trivial";
  }
  return "unknown";
}

EnergyPair energy_pair(const Profile& v, const Problem& problem) {
  const DiffOperator op(v.grid);
  const long double beta = problem.beta();
  long double a = 0, b = 0;
  for (auto x : v.values) {
    a += std::pow(std::fabs(x), beta);
    b += x * x;
  }
  const long double h = v.grid.h();
  const double phi = static_cast<double>(0.5L * h * a);
  const double e = static_cast<double>(-op.quadratic_form(v.values) + zeroth(problem) * h * b);
  return {phi, e};
}

Evolution integrate(const Problem& problem, const Profile& v0, double t_end,
                    const EvolutionConfig& cfg) {
  problem.validate();
  cfg.validate();
  if (!(t_end > 0)) throw InvalidArgument("integrate: t_end must be positive");
  if (static_cast<int>(v0.values.size()) != v0.grid.N)
    throw InvalidArgument("integrate: profile size does not match its grid");
  const DiffOperator op(v0.grid);
  const double n = problem.n;
  const double s = zeroth(problem);
  const double sup0 = v0.sup_norm();
  const BoundMode mode = n < 0 ? BoundMode::extinction : BoundMode::blowup;

  Evolution out;
  auto& traj = out.trajectory;
  auto& tr = out.trace;
  auto snapshot = [&](double t, const Vec& v) {
    traj.times.push_back(t);
    traj.states.push_back(v);
  };
  auto record = [&](double t, const Vec& v) {
    Profile p;
    p.grid = v0.grid;
    p.values = v;
    p.R = v0.R;
    auto ep = energy_pair(p, problem);
    tr.times.push_back(t);
    tr.phi.push_back(ep.phi);
    tr.energy.push_back(ep.energy);
  };

  Vec v = v0.values;
  double t = 0;
  record(t, v);
  snapshot(t, v);
  if (sup0 == 0) {
    // The trivial equilibrium stays put.
    record(t_end, v);
    snapshot(t_end, v);
    traj.reason = StopReason::trivial;
    traj.stop_time = t_end;
    traj.final_state = v0;
    finalize_trace(tr, n, mode);
    return out;
  }
  const double delta = cfg.delta > 0 ? cfg.delta : 1e-8 * sup0;
  const double phi0 = tr.phi.front();
  const double atol = cfg.atol * sup0;

  double dt = cfg.dt_init;
  traj.reason = StopReason::reached_t_end;
  for (int step = 0; step < cfg.max_steps && t < t_end; ++step) {
    const double h = std::min(dt, t_end - t);
    Vec full = euler_step(op, v, h, n, delta, s);
    Vec half = euler_step(op, euler_step(op, v, 0.5 * h, n, delta, s), 0.5 * h, n, delta, s);
    double err = 0;
    const double scale = atol + cfg.rtol * std::max(static_cast<double>(sup_norm(v)),
                                                     static_cast<double>(sup_norm(half)));
    for (std::size_t i = 0; i < v.size(); ++i)
      err = std::max(err, static_cast<double>(std::fabs(half[i] - full[i])) / scale);
    if (!std::isfinite(err)) err = 1e10;
    if (err > 1.0) {
      ++traj.rejected;
      dt = h * std::max(0.2, 0.9 / std::sqrt(err));
      if (dt < cfg.dt_min) throw StepSizeCollapse("integrate: step size fell below dt_min");
      continue;
    }
    ++traj.accepted;
    if (cfg.extrapolate)
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = 2 * half[i] - full[i];
    else
      v.swap(half);
    t += h;
    record(t, v);
    if (cfg.snapshot_every > 0 && traj.accepted % cfg.snapshot_every == 0) snapshot(t, v);
    dt = std::clamp(h * std::min(2.0, 0.9 / std::sqrt(std::max(err, 1e-12))), cfg.dt_min, cfg.dt_max);
    if (mode == BoundMode::blowup && sup_norm(v) > cfg.blowup_cap * sup0) {
      traj.reason = StopReason::blowup_cap;
      break;
    }
    if (tr.phi.back() < cfg.extinction_fraction * phi0) {
      traj.reason = StopReason::extinct;
      break;
    }
  }
  if (traj.times.back() != t) snapshot(t, v);
  traj.stop_time = t;
  traj.final_state = v0;
  traj.final_state.values = v;
  finalize_trace(tr, n, mode);
  return out;
}

void finalize_trace(EnergyTrace& tr, double n, BoundMode mode) {
  const std::size_t K = tr.times.size();
  tr.phi_rate.assign(K, 0.0);
  tr.bound.assign(K, std::numeric_limits<double>::quiet_NaN());
  tr.violation.assign(K, std::numeric_limits<double>::quiet_NaN());
  if (K == 0) return;
  const auto& t = tr.times;
  const auto& f = tr.phi;
  if (K >= 3) {
    for (std::size_t i = 0; i < K; ++i) {
      std::size_t a = i == 0 ? 0 : (i == K - 1 ? K - 3 : i - 1);
      const double t0 = t[a], t1 = t[a + 1], t2 = t[a + 2];
      const double x = t[i];
      // Derivative of the quadratic through three neighbouring samples.
      const double l0 = ((x - t1) + (x - t2)) / ((t0 - t1) * (t0 - t2));
      const double l1 = ((x - t0) + (x - t2)) / ((t1 - t0) * (t1 - t2));
      const double l2 = ((x - t0) + (x - t1)) / ((t2 - t0) * (t2 - t1));
      tr.phi_rate[i] = l0 * f[a] + l1 * f[a + 1] + l2 * f[a + 2];
    }
  } else if (K == 2) {
    const double r = (f[1] - f[0]) / (t[1] - t[0]);
    tr.phi_rate = {r, r};
  }
  const double phi0 = f.front(), e0 = tr.energy.front();
  tr.T = e0 != 0 ? (2.0 / n) * phi0 / e0 : std::numeric_limits<double>::infinity();
  if (!(tr.T > 0) || !std::isfinite(tr.T)) return;
  const double expo = -(n + 2.0) / n;
  for (std::size_t i = 0; i < K; ++i) {
    if (t[i] >= tr.T) continue;
    tr.bound[i] = phi0 * std::pow(1.0 - t[i] / tr.T, expo);
    tr.violation[i] = mode == BoundMode::extinction ? f[i] - tr.bound[i] : tr.bound[i] - f[i];
  }
}

BoundReport bound_check(const EnergyTrace& trace, double n, BoundMode mode) {
  BoundReport rep;
  if (trace.times.empty()) throw InvalidArgument("bound_check: empty trace");
  EnergyTrace tr = trace;
  finalize_trace(tr, n, mode);
  rep.T = tr.T;
  if (mode == BoundMode::extinction && !(n < 0 && n > -1)) {
    rep.hypotheses_met = false;
    rep.note = "extinction bound needs n in (-1, 0)";
  }
  if (mode == BoundMode::blowup && !(n > 0)) {
    rep.hypotheses_met = false;
    rep.note = "blow-up bound needs n > 0";
  }
  if (!(tr.T > 0) || !std::isfinite(tr.T)) {
    rep.hypotheses_met = false;
    rep.note = "T = (2/n) Phi(0) / E(0) is not positive: hypotheses unmet";
  }
  const double tmax = std::isfinite(tr.T) && tr.T > 0 ? std::min(tr.times.back(), 0.99 * tr.T)
                                                      : tr.times.back();
  rep.checked_until = tmax;
  const double kn = 2.0 * (n + 1.0) / (n + 2.0);
  const double phi0 = tr.phi.front();
  const double c1 = phi0 > 0 ? 0.5 * (n + 2.0) * tr.energy.front() / std::pow(phi0, kn) : 0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    if (tr.times[i] > tmax) break;
    const double target = 0.5 * (n + 2.0) * tr.energy[i];
    rep.max_identity_error = std::max(rep.max_identity_error, std::fabs(tr.phi_rate[i] - target));
    rep.max_abs_energy = std::max(rep.max_abs_energy, std::fabs(tr.energy[i]));
    if (rep.hypotheses_met && std::isfinite(tr.violation[i]))
      rep.max_violation = std::max(rep.max_violation, tr.violation[i]);
    if (mode == BoundMode::extinction && phi0 > 0)
      rep.max_concavity_violation =
          std::max(rep.max_concavity_violation, target - c1 * std::pow(tr.phi[i], kn));
  }
  if (rep.hypotheses_met) {
    double worst = -std::numeric_limits<double>::infinity();
    double reverse = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tr.times.size() && tr.times[i] <= tmax; ++i)
      if (std::isfinite(tr.violation[i])) {
        worst = std::max(worst, tr.violation[i]);
        reverse = std::max(reverse, -tr.violation[i]);
      }
    rep.max_violation = worst;
    rep.max_reverse_violation = reverse;
  }
  return rep;
}

}  // namespace sturmcont
