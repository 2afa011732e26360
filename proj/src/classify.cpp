#include "sturmcont/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace sturmcont {

namespace {

struct Segment {
  int begin, end;  // inclusive sample range
  int sign;
  long double extreme;
};

// Sign runs of f - level; interior runs whose excursion stays below thr are
// merged into their neighbours so that near-tangencies leave no crossings.
std::vector<Segment> runs(const std::vector<long double>& f, long double level, long double thr,
                          int lo, int hi) {
  std::vector<Segment> seg;
  int prev_sign = 0;
  for (int i = lo; i <= hi; ++i) {
    const long double d = f[i] - level;
    int s = d > 0 ? 1 : (d < 0 ? -1 : prev_sign);
    if (s == 0) s = 1;
    if (seg.empty() || s != seg.back().sign) seg.push_back({i, i, s, std::fabs(d)});
    else {
      seg.back().end = i;
      seg.back().extreme = std::max(seg.back().extreme, std::fabs(d));
    }
    prev_sign = s;
  }
  bool merged = true;
  while (merged && seg.size() >= 3) {
    merged = false;
    std::size_t weakest = 0;
    long double wv = std::numeric_limits<long double>::infinity();
    for (std::size_t k = 1; k + 1 < seg.size(); ++k)
      if (seg[k].extreme < wv) {
        wv = seg[k].extreme;
        weakest = k;
      }
    if (weakest > 0 && wv < thr) {
      Segment m{seg[weakest - 1].begin, seg[weakest + 1].end, seg[weakest - 1].sign,
                std::max(seg[weakest - 1].extreme, seg[weakest + 1].extreme)};
      seg.erase(seg.begin() + weakest - 1, seg.begin() + weakest + 2);
      seg.insert(seg.begin() + weakest - 1, m);
      merged = true;
    }
  }
  // Edge runs too small to matter are absorbed as well.
  while (seg.size() >= 2 && seg.front().extreme < thr) {
    seg[1].begin = seg.front().begin;
    seg.erase(seg.begin());
  }
  while (seg.size() >= 2 && seg.back().extreme < thr) {
    seg[seg.size() - 2].end = seg.back().end;
    seg.pop_back();
  }
  return seg;
}

// Crossing positions (fractional sample index) between consecutive runs.
std::vector<double> crossings(const std::vector<long double>& f, long double level,
                              long double thr, int lo, int hi) {
  auto seg = runs(f, level, thr, lo, hi);
  std::vector<double> out;
  for (std::size_t k = 1; k < seg.size(); ++k) {
    // Last sign change between the two runs.
    int j = seg[k].begin;
    const long double a = f[j - 1] - level, b = f[j] - level;
    const double frac = (a != b) ? static_cast<double>(a / (a - b)) : 0.5;
    out.push_back(j - 1 + frac);
  }
  return out;
}

std::vector<long double> derivative(const Vec& f, long double h) {
  const int N = static_cast<int>(f.size());
  std::vector<long double> d(N);
  for (int i = 0; i < N; ++i) {
    const long double a = i > 0 ? f[i - 1] : 0.0L;
    const long double b = i + 1 < N ? f[i + 1] : 0.0L;
    d[i] = (b - a) / (2 * h);
  }
  return d;
}

// Range of samples where |F| exceeds frac * sup.
std::pair<int, int> core_range(const Vec& f, long double frac) {
  const long double s = sup_norm(f);
  int lo = -1, hi = -1;
  for (int i = 0; i < static_cast<int>(f.size()); ++i)
    if (std::fabs(f[i]) > frac * s) {
      if (lo < 0) lo = i;
      hi = i;
    }
  return {lo, hi};
}

struct Extremum {
  double y;
  double log_amp;
};

// Local maxima of |F| right of index start, refined by a parabola in log|F|.
std::vector<Extremum> tail_extrema(const Profile& p, int start) {
  std::vector<Extremum> out;
  const auto& f = p.values;
  const double h = static_cast<double>(p.grid.h());
  for (int i = std::max(start, 1); i + 1 < static_cast<int>(f.size()); ++i) {
    const long double a0 = std::fabs(f[i - 1]), b0 = std::fabs(f[i]), c0 = std::fabs(f[i + 1]);
    if (!(b0 > a0 && b0 >= c0) || a0 == 0 || c0 == 0) continue;
    const double a = std::log(static_cast<double>(a0)), b = std::log(static_cast<double>(b0)),
                 c = std::log(static_cast<double>(c0));
    const double den = a - 2 * b + c;
    const double d = den != 0 ? 0.5 * (a - c) / den : 0.0;
    out.push_back({static_cast<double>(p.grid.node(i)) + d * h, b - 0.25 * (a - c) * d});
  }
  return out;
}

struct LineFit {
  double slope, intercept, rms;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  LineFit f{0, 0, 0};
  if (det == 0) return f;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

}  // namespace

bool MultiIndex::operator==(const MultiIndex& o) const {
  if (entries.size() != o.entries.size()) return false;
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].value != o.entries[i].value || entries[i].is_signed != o.entries[i].is_signed)
      return false;
  return true;
}

MultiIndex MultiIndex::negated() const {
  MultiIndex m = *this;
  for (auto& e : m.entries)
    if (e.is_signed) e.value = -e.value;
  return m;
}

std::string to_string(const MultiIndex& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    if (i) out += ",";
    const auto& e = s.entries[i];
    if (e.is_signed && e.value > 0) out += "+";
    out += std::to_string(e.value);
  }
  return out + "}";
}

MultiIndex multiindex(const Profile& profile, double amp_threshold) {
  const auto& f = profile.values;
  const long double sup = sup_norm(f);
  if (!(sup > 10 * amp_threshold)) throw InvalidArgument("multiindex: trivial profile");
  const long double thr = amp_threshold * sup;
  const int lo = 0, hi = static_cast<int>(f.size()) - 1;

  enum Kind { plus, minus, zero };
  struct Event {
    double pos;
    Kind kind;
  };
  std::vector<Event> ev;
  for (double x : crossings(f, 1.0L, thr, lo, hi)) ev.push_back({x, plus});
  for (double x : crossings(f, -1.0L, thr, lo, hi)) ev.push_back({x, minus});
  MultiIndex out;
  if (ev.empty()) return out;
  double first = ev.front().pos, last = ev.front().pos;
  for (const auto& e : ev) {
    first = std::min(first, e.pos);
    last = std::max(last, e.pos);
  }
  for (double x : crossings(f, 0.0L, thr, lo, hi))
    if (x > first && x < last) ev.push_back({x, zero});
  std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.pos < b.pos; });

  int run_sign = 0, run_count = 0, zeros = 0;
  for (const auto& e : ev) {
    if (e.kind == zero) {
      ++zeros;
      continue;
    }
    const int s = e.kind == plus ? 1 : -1;
    if (run_count > 0 && s == run_sign && zeros == 0) {
      ++run_count;
      continue;
    }
    if (run_count > 0) {
      out.entries.push_back({run_sign * run_count, true});
      out.entries.push_back({zeros, false});
    }
    run_sign = s;
    run_count = 1;
    zeros = 0;
  }
  if (run_count > 0) out.entries.push_back({run_sign * run_count, true});
  return out;
}

int sign_changes(const Profile& profile, double amp_threshold) {
  const auto& f = profile.values;
  const long double thr = amp_threshold * sup_norm(f);
  return static_cast<int>(crossings(f, 0.0L, thr, 0, static_cast<int>(f.size()) - 1).size());
}

int local_extrema(const Profile& profile, double amp_threshold) {
  auto [lo, hi] = core_range(profile.values, amp_threshold);
  if (lo < 0 || hi - lo < 2) return 0;
  auto d = derivative(profile.values, profile.grid.h());
  long double s = 0;
  for (int i = lo; i <= hi; ++i) s = std::max(s, std::fabs(d[i]));
  return static_cast<int>(crossings(d, 0.0L, amp_threshold * s, lo, hi).size());
}

int derivative_extrema(const Profile& profile, double amp_threshold) {
  auto [lo, hi] = core_range(profile.values, amp_threshold);
  if (lo < 0 || hi - lo < 2) return 0;
  const long double h = profile.grid.h();
  auto d1 = derivative(profile.values, h);
  Vec d1v(d1.begin(), d1.end());
  auto d2 = derivative(d1v, h);
  long double s = 0;
  for (int i = lo; i <= hi; ++i) s = std::max(s, std::fabs(d2[i]));
  return static_cast<int>(crossings(d2, 0.0L, amp_threshold * s, lo, hi).size());
}

double critical_value(const Profile& profile, const Problem& problem) {
  const auto& F = profile.values;
  const Grid& g = profile.grid;
  const DiffOperator op(g);
  const long double aff = op.quadratic_form(F);
  long double f2 = 0, f4 = 0;
  for (auto v : F) {
    f2 += v * v;
    f4 += v * v * v * v;
  }
  f2 *= g.h();
  f4 *= g.h();
  long double num = 0, den = 0, power = 2;
  switch (problem.family) {
    case Family::RegularizedNonLipschitz:
    case Family::LinearizedHomotopy: {
      const long double beta = problem.beta();
      for (auto v : F) num += std::pow(std::fabs(v), beta);
      num *= g.h();
      den = -aff + f2;
      power = beta / 2;
      if (!(den > 0)) throw InvalidArgument("critical_value: nonpositive denominator");
      break;
    }
    case Family::AnalyticFastDiffusion:
      num = f4;
      den = aff + problem.eps * f2;
      break;
    case Family::Cubic:
      num = f4;
      den = aff;
      break;
    case Family::Nonlocal:
      num = f2 * f2;
      den = aff + problem.eps * f2;
      break;
    case Family::QuadraticForced:
      throw InvalidArgument("critical_value: no variational quotient for QuadraticForced");
  }
  if (den == 0) throw InvalidArgument("critical_value: vanishing denominator");
  return static_cast<double>(num / std::pow(std::fabs(den), power));
}

std::string to_string(TailKind k) {
  return k == TailKind::algebraic_oscillatory ? "algebraic_oscillatory" : "exponential_oscillatory";
}

TailReport tail_fit(const Profile& profile, const Problem& problem, const TailOptions& opt) {
  const auto& f = profile.values;
  const int N = static_cast<int>(f.size());
  const long double sup = sup_norm(f);
  if (!(sup > 0)) throw InsufficientTail("tail_fit: zero profile");
  TailReport rep;
  const bool finite_interface =
      (problem.family == Family::RegularizedNonLipschitz ||
       problem.family == Family::LinearizedHomotopy) &&
      problem.eps == 0 && problem.n > 0;
  rep.kind = finite_interface ? TailKind::algebraic_oscillatory : TailKind::exponential_oscillatory;

  int j = N;
  while (j > 0 && std::fabs(f[j - 1]) < 1e-10L * sup) --j;
  rep.threshold_interface = j < N ? static_cast<double>(profile.grid.node(j)) : profile.grid.R;

  int start = 0;
  for (int i = 0; i < N; ++i)
    if (std::fabs(f[i]) >= opt.band_high * sup) start = i;
  auto ext = tail_extrema(profile, start + 1);
  const double lo = std::log(opt.band_low * static_cast<double>(sup));
  const double hi = std::log(opt.band_high * static_cast<double>(sup));
  std::vector<Extremum> use;
  for (const auto& e : ext) {
    if (e.log_amp < lo || e.log_amp > hi) continue;
    if (!finite_interface && e.y > profile.grid.R * (1 - opt.boundary_margin)) continue;
    use.push_back(e);
  }
  if (use.size() < 3) throw InsufficientTail("tail_fit: fewer than 3 resolved tail extrema");
  rep.extrema_used = static_cast<int>(use.size());

  std::vector<double> ye, Y;
  for (const auto& e : use) {
    ye.push_back(e.y);
    Y.push_back(e.log_amp);
  }

  if (finite_interface) {
    const double ymax = ye.back(), ymin = ye.front();
    const double span = std::max(ymax - ymin, 1e-3);
    auto fit_at = [&](double y0) {
      std::vector<double> X;
      for (double y : ye) X.push_back(std::log(y0 - y));
      return fit_line(X, Y);
    };
    const int samples = 4000;
    double best_y0 = ymax + span, best_rms = std::numeric_limits<double>::infinity();
    double step = span / samples;
    for (int k = 1; k <= samples; ++k) {
      const double y0 = ymax + k * step;
      const double r = fit_at(y0).rms;
      if (r < best_rms) {
        best_rms = r;
        best_y0 = y0;
      }
    }
    // Golden-section polish inside the best cell.
    double a = std::max(ymax + 1e-12, best_y0 - step), b = best_y0 + step;
    const double gr = 0.5 * (std::sqrt(5.0) - 1);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int it = 0; it < 100; ++it) {
      if (fit_at(c).rms < fit_at(d).rms) b = d;
      else a = c;
      c = b - gr * (b - a);
      d = a + gr * (b - a);
    }
    const double y0 = 0.5 * (a + b);
    const LineFit lf = fit_at(y0);
    rep.interface_location = y0;
    rep.gamma = lf.slope;
    rep.fit_residual = lf.rms;
  } else {
    const LineFit lf = fit_line(ye, Y);
    rep.decay_rate = -lf.slope;
    rep.fit_residual = lf.rms;
    std::vector<double> idx;
    for (std::size_t k = 0; k < ye.size(); ++k) idx.push_back(static_cast<double>(k));
    const LineFit sp = fit_line(idx, ye);
    rep.frequency = sp.slope > 0 ? std::numbers::pi / sp.slope : 0;
    rep.interface_location = std::numeric_limits<double>::infinity();
  }
  return rep;
}

GeneralizedIndex generalized_index(const Problem& problem, const Profile& profile,
                                   const CompressionOptions& opt) {
  double target = std::max({opt.R_floor, 2 * opt.R_star, 1e-6 * problem.R});
  GeneralizedIndex gi;
  gi.branch = continue_branch(problem, profile, ParamKind::R, target, opt.ctrl);
  // A fold in R is the smallest admissible half-length of the branch.
  const Branch& b = gi.branch;
  const Profile* pick = &b.endpoint;
  for (const auto& r : b.records)
    if (r.fold && r.profile_ref >= 0) {
      pick = &b.profiles[r.profile_ref];
      break;
    }
  const Profile& end = *pick;
  gi.R_min = end.R;
  gi.status = gi.branch.status;
  gi.diverged = gi.branch.status == BranchStatus::diverged;
  gi.sigma_min = multiindex(end, opt.amp_threshold);
  gi.extrema = local_extrema(end, opt.amp_threshold);
  return gi;
}

bool ordering_check(std::vector<std::pair<int, double>> values) {
  std::sort(values.begin(), values.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i].second < values[i - 1].second)) return false;
  return true;
}

}  // namespace sturmcont
