#include "runner.hpp"

#include <sturmcont/classify.hpp>
#include <sturmcont/io.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <numbers>
#include <optional>
#include <thread>

namespace sturmcont::cli {

namespace fs = std::filesystem;

namespace {

std::mutex log_mutex;

void log(bool verbose, const std::string& name, const std::string& msg) {
  if (!verbose) return;
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << "[" << name << "] " << msg << "\n";
}

json num(double x) { return std::isfinite(x) ? json(x) : json(format_real(x)); }

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& ctx) {
  if (!j.is_object()) throw ConfigError(ctx + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; }))
      throw ConfigError(ctx + ": unknown key '" + it.key() + "'");
  }
}

double real_at(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_number()) throw ConfigError(ctx + "." + key + " must be a number");
  return j[key].get<double>();
}

int int_at(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw ConfigError(ctx + "." + key + " must be an integer");
  return j[key].get<int>();
}

enum class InitKind { from_template, pitchfork, nonlocal, bump, eigen, zero };

struct InitSpec {
  InitKind kind = InitKind::from_template;
  int l = 0;
  double offset = 1e-3;
  int sign = 1;
  double perturb = 0;
  std::optional<double> amplitude;
};

struct TableRow {
  std::string label;
  std::optional<int> index;
  std::optional<double> reference;
  TemplateSpec tmpl;
};

struct Experiment {
  std::string name;
  std::string command;
  Problem problem;
  int N = 0;
  std::optional<TemplateSpec> tmpl;
  InitSpec init;
  NewtonOptions newton;
  StepControl ctrl;
  ParamKind param = ParamKind::eps;
  std::optional<double> target;
  CompressionOptions compression;
  double amp_threshold = 1e-3;
  bool tail = false;
  TailOptions tail_opt;
  EvolutionConfig evo;
  double t_end = 0;
  std::vector<TableRow> rows;
  int k = 3;
  std::string output_dir;
};

const std::vector<std::string> commands = {"solve",    "continue", "compress", "classify",
                                           "table",    "evolve",   "bifpoints"};

InitSpec parse_init(const json& j) {
  const std::string ctx = "init";
  check_keys(j, {"kind", "l", "offset", "sign", "perturb", "amplitude"}, ctx);
  InitSpec s;
  if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError("init.kind must be a string");
  const std::string k = j["kind"];
  if (k == "template") s.kind = InitKind::from_template;
  else if (k == "pitchfork") s.kind = InitKind::pitchfork;
  else if (k == "nonlocal") s.kind = InitKind::nonlocal;
  else if (k == "bump") s.kind = InitKind::bump;
  else if (k == "eigen") s.kind = InitKind::eigen;
  else if (k == "zero") s.kind = InitKind::zero;
  else throw ConfigError("init.kind '" + k + "' is not one of template, pitchfork, nonlocal, bump, eigen, zero");
  if (j.contains("l")) s.l = int_at(j, "l", ctx);
  if (j.contains("offset")) s.offset = real_at(j, "offset", ctx);
  if (j.contains("sign")) s.sign = int_at(j, "sign", ctx);
  if (j.contains("perturb")) s.perturb = real_at(j, "perturb", ctx);
  if (j.contains("amplitude")) s.amplitude = real_at(j, "amplitude", ctx);
  if (s.l < 0) throw ConfigError("init.l must be nonnegative");
  if (s.sign != 1 && s.sign != -1) throw ConfigError("init.sign must be 1 or -1");
  if (s.kind == InitKind::pitchfork && !(s.offset > 0)) throw ConfigError("init.offset must be positive");
  return s;
}

Experiment parse_experiment(const json& j) {
  check_keys(j,
             {"name", "description", "command", "problem", "grid", "template", "init", "newton",
              "continuation", "classify", "evolution", "table", "bifpoints", "output_dir"},
             "config");
  Experiment e;
  if (!j.contains("command") || !j["command"].is_string()) throw ConfigError("config.command must be a string");
  e.command = j["command"];
  if (std::find(commands.begin(), commands.end(), e.command) == commands.end())
    throw ConfigError("config.command '" + e.command + "' is unknown");
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw ConfigError("config.name must be a string");
    e.name = j["name"];
  }
  if (j.contains("description") && !j["description"].is_string())
    throw ConfigError("config.description must be a string");
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) throw ConfigError("config.output_dir must be a string");
    e.output_dir = j["output_dir"];
  }
  if (!j.contains("problem")) throw ConfigError("config.problem is required");
  e.problem = problem_from_json(j["problem"]);
  if (!j.contains("grid")) throw ConfigError("config.grid is required");
  check_keys(j["grid"], {"N"}, "grid");
  e.N = int_at(j["grid"], "N", "grid");
  try {
    make_grid(e.problem.R, e.N, e.problem.m);
  } catch (const InvalidArgument& ex) {
    throw ConfigError(std::string("grid: ") + ex.what());
  }
  if (j.contains("template")) e.tmpl = template_from_json(j["template"]);
  if (j.contains("init")) e.init = parse_init(j["init"]);
  else if (e.command == "evolve") e.init.kind = InitKind::bump;
  if (j.contains("newton")) e.newton = newton_options_from_json(j["newton"]);

  const bool needs_start = e.command != "bifpoints" && e.command != "table";
  if (needs_start && e.init.kind == InitKind::from_template && !e.tmpl)
    throw ConfigError("config.template is required when init.kind is template");
  if (e.init.kind == InitKind::pitchfork && e.problem.family != Family::AnalyticFastDiffusion &&
      e.problem.family != Family::Nonlocal)
    throw ConfigError("init.kind pitchfork needs the AnalyticFastDiffusion or Nonlocal family");
  if (e.init.kind == InitKind::nonlocal && e.problem.family != Family::Nonlocal)
    throw ConfigError("init.kind nonlocal needs the Nonlocal family");

  if (e.command == "continue" || e.command == "compress") {
    const json c = j.value("continuation", json::object());
    if (!c.is_object()) throw ConfigError("continuation: expected a JSON object");
    StepControl base = e.command == "compress" ? CompressionOptions{}.ctrl : StepControl{};
    e.ctrl = step_control_from_json(c, base);
    if (c.contains("param")) {
      if (c["param"] == "eps") e.param = ParamKind::eps;
      else if (c["param"] == "R") e.param = ParamKind::R;
      else throw ConfigError("continuation.param must be 'eps' or 'R'");
    }
    if (c.contains("target")) e.target = real_at(c, "target", "continuation");
    if (e.command == "continue" && !e.target) throw ConfigError("continuation.target is required");
    if (e.command == "compress") {
      if (e.param != ParamKind::R && c.contains("param"))
        throw ConfigError("compress always continues in R");
      e.compression.ctrl = e.ctrl;
      if (c.contains("R_floor")) e.compression.R_floor = real_at(c, "R_floor", "continuation");
      if (c.contains("R_star")) e.compression.R_star = real_at(c, "R_star", "continuation");
      if (c.contains("amp_threshold"))
        e.compression.amp_threshold = real_at(c, "amp_threshold", "continuation");
    }
  } else if (j.contains("continuation")) {
    throw ConfigError("config.continuation is only used by continue and compress");
  }

  if (j.contains("classify")) {
    const json& c = j["classify"];
    check_keys(c, {"amp_threshold", "tail", "band_low", "band_high", "boundary_margin"}, "classify");
    if (c.contains("amp_threshold")) e.amp_threshold = real_at(c, "amp_threshold", "classify");
    if (c.contains("tail")) {
      if (!c["tail"].is_boolean()) throw ConfigError("classify.tail must be a boolean");
      e.tail = c["tail"];
    }
    if (c.contains("band_low")) e.tail_opt.band_low = real_at(c, "band_low", "classify");
    if (c.contains("band_high")) e.tail_opt.band_high = real_at(c, "band_high", "classify");
    if (c.contains("boundary_margin"))
      e.tail_opt.boundary_margin = real_at(c, "boundary_margin", "classify");
    if (!(e.amp_threshold > 0 && e.amp_threshold < 1))
      throw ConfigError("classify.amp_threshold must lie in (0, 1)");
    if (!(e.tail_opt.band_low > 0 && e.tail_opt.band_low < e.tail_opt.band_high && e.tail_opt.band_high < 1))
      throw ConfigError("classify: need 0 < band_low < band_high < 1");
  }

  if (e.command == "evolve") {
    if (!j.contains("evolution")) throw ConfigError("config.evolution is required for evolve");
    e.evo = evolution_config_from_json(j["evolution"]);
    e.t_end = real_at(j["evolution"], "t_end", "evolution");
    if (!(e.t_end > 0)) throw ConfigError("evolution.t_end must be positive");
    if (e.problem.family != Family::RegularizedNonLipschitz)
      throw ConfigError("evolve uses the RegularizedNonLipschitz family (psi(v) = |v|^{-n/(n+1)} v)");
    if (!(e.problem.n > -1 && e.problem.n != 0)) throw ConfigError("evolve needs n in (-1, 0) or n > 0");
  } else if (j.contains("evolution")) {
    throw ConfigError("config.evolution is only used by evolve");
  }

  if (e.command == "table") {
    if (!j.contains("table")) throw ConfigError("config.table is required for table");
    const json& t = j["table"];
    check_keys(t, {"rows"}, "table");
    if (!t.contains("rows") || !t["rows"].is_array() || t["rows"].empty())
      throw ConfigError("table.rows must be a non-empty array");
    for (const auto& r : t["rows"]) {
      check_keys(r, {"label", "index", "reference", "template"}, "table.rows[]");
      TableRow row;
      if (!r.contains("label") || !r["label"].is_string()) throw ConfigError("table.rows[].label must be a string");
      row.label = r["label"];
      if (r.contains("index")) row.index = int_at(r, "index", "table.rows[]");
      if (r.contains("reference")) row.reference = real_at(r, "reference", "table.rows[]");
      if (!r.contains("template")) throw ConfigError("table.rows[].template is required");
      row.tmpl = template_from_json(r["template"]);
      e.rows.push_back(std::move(row));
    }
  } else if (j.contains("table")) {
    throw ConfigError("config.table is only used by table");
  }

  if (e.command == "bifpoints") {
    if (j.contains("bifpoints")) {
      check_keys(j["bifpoints"], {"k"}, "bifpoints");
      e.k = int_at(j["bifpoints"], "k", "bifpoints");
    }
    if (e.k < 1 || e.k > e.N) throw ConfigError("bifpoints.k must lie in [1, N]");
    const auto f = e.problem.family;
    if (f != Family::AnalyticFastDiffusion && f != Family::LinearizedHomotopy && f != Family::Nonlocal)
      throw ConfigError("bifpoints needs the AnalyticFastDiffusion, LinearizedHomotopy or Nonlocal family");
  } else if (j.contains("bifpoints")) {
    throw ConfigError("config.bifpoints is only used by bifpoints");
  }
  return e;
}

Profile build_start(Experiment& e) {
  const Grid g = make_grid(e.problem.R, e.N, e.problem.m);
  Profile p;
  p.grid = g;
  p.R = g.R;
  switch (e.init.kind) {
    case InitKind::from_template:
      p = template_profile(*e.tmpl, g);
      break;
    case InitKind::zero:
      p.values.assign(g.N, 0.0L);
      break;
    case InitKind::bump: {
      const long double a = e.init.amplitude.value_or(1.0);
      p.values.resize(g.N);
      for (int i = 0; i < g.N; ++i) {
        const long double c = std::cos(std::numbers::pi_v<long double> * g.node(i) / (2 * g.R));
        p.values[i] = a * std::pow(c, 2 * g.m);
      }
      break;
    }
    case InitKind::eigen:
    case InitKind::pitchfork: {
      const auto ev = eigen_smallest(DiffOperator(g), e.init.l + 1);
      const auto& psi = ev[e.init.l].psi;
      long double a = e.init.amplitude.value_or(1.0);
      if (e.init.kind == InitKind::pitchfork) {
        const double lam = ev[e.init.l].lambda;
        e.problem.eps = -lam + e.init.offset;
        if (!e.init.amplitude) {
          if (e.problem.family == Family::Nonlocal) {
            a = std::sqrt(static_cast<long double>(e.init.offset));
          } else {
            Vec p4(psi.size());
            for (std::size_t i = 0; i < psi.size(); ++i) p4[i] = std::pow(psi[i], 4);
            a = std::sqrt(e.init.offset / trapezoid(g, p4));
          }
        }
      }
      p.values.resize(g.N);
      for (int i = 0; i < g.N; ++i) p.values[i] = e.init.sign * a * psi[i];
      break;
    }
    case InitKind::nonlocal:
      p = nonlocal_branch(e.problem, e.init.l, e.problem.eps, e.N, e.init.sign);
      break;
  }
  if (e.init.perturb != 0)
    for (std::size_t i = 0; i < p.values.size(); ++i)
      p.values[i] *= 1 + e.init.perturb * std::sin(3.0L * i + 1);
  p.eps = e.problem.eps;
  return p;
}

json maybe_sigma(const Profile& p, double thr) {
  try {
    return to_string(multiindex(p, thr));
  } catch (const Error&) {
    return nullptr;
  }
}

json maybe_cF(const Profile& p, const Problem& pr) {
  try {
    return num(critical_value(p, pr));
  } catch (const Error&) {
    return nullptr;
  }
}

json profile_json(const Profile& p, const Problem& pr, double thr) {
  return {{"eps", p.eps},
          {"R", p.R},
          {"N", p.grid.N},
          {"sup_norm", p.sup_norm()},
          {"residual_norm", num(p.residual_norm)},
          {"iterations", p.iterations},
          {"c_F", maybe_cF(p, pr)},
          {"sigma", maybe_sigma(p, thr)},
          {"sign_changes", p.sup_norm() > 0 ? json(sign_changes(p, thr)) : json(0)}};
}

Problem at_param(Problem p, const Profile& prof) {
  p.eps = prof.eps;
  p.R = prof.R;
  return p;
}

struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;
  void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }
};

json branch_json(const Branch& b) {
  json folds = json::array();
  for (const auto& f : b.folds) folds.push_back(to_json(f));
  return {{"param", to_string(b.param_kind)},
          {"status", to_string(b.status)},
          {"records", b.records.size()},
          {"folds", folds}};
}

void add_branch_profiles(const Branch& b, Artifacts& art) {
  for (std::size_t i = 0; i < b.records.size(); ++i) {
    const auto& r = b.records[i];
    if (r.profile_ref < 0) continue;
    char name[64];
    std::snprintf(name, sizeof name, "profiles/record_%05zu.csv", i);
    art.add(name, profile_csv(b.profiles[r.profile_ref]));
  }
}

int branch_exit(const Branch& b, std::string& status) {
  switch (b.status) {
    case BranchStatus::fold_limit:
      status = "folded";
      return exit_ok;
    case BranchStatus::step_floor:
    case BranchStatus::max_steps:
      if (b.folded()) {
        status = "folded";
        return exit_ok;
      }
      status = to_string(b.status);
      return exit_no_convergence;
    default:
      status = to_string(b.status);
      return exit_ok;
  }
}

RunResult execute(Experiment& e, Artifacts& art, bool verbose) {
  RunResult res;
  json& s = res.summary;
  s["name"] = e.name;
  s["command"] = e.command;
  const double thr = e.amp_threshold;

  if (e.command == "bifpoints") {
    const auto pts = bifurcation_points(e.problem, e.k, e.N);
    std::string csv = "l,param\n";
    json arr = json::array();
    for (std::size_t l = 0; l < pts.size(); ++l) {
      csv += std::to_string(l) + ',' + format_real(pts[l]) + '\n';
      arr.push_back(pts[l]);
    }
    art.add("bifpoints.csv", csv);
    s["problem"] = to_json(e.problem);
    s["bifurcation_points"] = arr;
    res.status = "ok";
    return res;
  }

  if (e.command == "table") {
    const Grid g = make_grid(e.problem.R, e.N, e.problem.m);
    std::string csv = "label,c_F,sigma,sup_norm,residual_norm\n";
    json rows = json::array();
    std::vector<std::pair<int, double>> ordered;
    for (const auto& row : e.rows) {
      log(verbose, e.name, "solving row " + row.label);
      Profile sol = newton_solve(e.problem, template_profile(row.tmpl, g), e.newton);
      const double cF = critical_value(sol, e.problem);
      const json sig = maybe_sigma(sol, thr);
      csv += row.label + ',' + format_real(cF) + ',' + (sig.is_null() ? "" : sig.get<std::string>()) + ',' +
             format_real(sol.sup_norm()) + ',' + format_real(sol.residual_norm) + '\n';
      json r = profile_json(sol, e.problem, thr);
      r["label"] = row.label;
      if (row.index) {
        r["index"] = *row.index;
        ordered.emplace_back(*row.index, cF);
      }
      if (row.reference) {
        r["reference"] = *row.reference;
        r["relative_error"] = num(std::fabs(cF - *row.reference) / std::fabs(*row.reference));
      }
      rows.push_back(r);
      art.add("profiles/" + row.label + ".csv", profile_csv(sol));
    }
    art.add("table.csv", csv);
    s["problem"] = to_json(e.problem);
    s["rows"] = rows;
    if (!ordered.empty()) s["ordering_check"] = ordering_check(ordered);
    res.status = "ok";
    return res;
  }

  log(verbose, e.name, "building initial profile");
  Profile init = build_start(e);
  s["problem"] = to_json(e.problem);

  if (e.command == "evolve") {
    log(verbose, e.name, "integrating to t = " + format_real(e.t_end));
    const auto ep = energy_pair(init, e.problem);
    Evolution ev = integrate(e.problem, init, e.t_end, e.evo);
    const BoundMode mode = e.problem.n < 0 ? BoundMode::extinction : BoundMode::blowup;
    const BoundReport br = bound_check(ev.trace, e.problem.n, mode);
    art.add("trace.csv", trace_csv(ev.trace));
    art.add("initial.csv", profile_csv(init));
    art.add("final.csv", profile_csv(ev.trajectory.final_state));
    for (std::size_t i = 0; i < ev.trajectory.states.size(); ++i) {
      Profile snap = init;
      snap.values = ev.trajectory.states[i];
      char name[64];
      std::snprintf(name, sizeof name, "snapshots/state_%05zu.csv", i);
      art.add(name, profile_csv(snap));
    }
    s["mode"] = mode == BoundMode::extinction ? "extinction" : "blowup";
    s["phi0"] = ep.phi;
    s["energy0"] = ep.energy;
    s["stop_reason"] = to_string(ev.trajectory.reason);
    s["stop_time"] = ev.trajectory.stop_time;
    s["accepted_steps"] = ev.trajectory.accepted;
    s["rejected_steps"] = ev.trajectory.rejected;
    s["bound"] = to_json(br);
    res.status = to_string(ev.trajectory.reason);
    return res;
  }

  if (e.init.kind == InitKind::nonlocal && e.init.perturb == 0) {
    s["exact"] = {{"residual_norm", init.residual_norm},
                  {"tolerance", 1e-8 * (1 + init.sup_norm())}};
  }
  log(verbose, e.name, "Newton solve from the initial profile");
  Profile sol = newton_solve(e.problem, init, e.newton);
  s["solution"] = profile_json(sol, e.problem, thr);
  if (e.init.kind == InitKind::nonlocal) {
    Experiment ex = e;
    ex.init.perturb = 0;
    const Profile exact = build_start(ex);
    long double err = 0;
    for (std::size_t i = 0; i < exact.values.size(); ++i)
      err = std::max(err, std::fabs(sol.values[i] - exact.values[i]));
    s["exact"] = {{"residual_norm", exact.residual_norm},
                  {"tolerance", 1e-8 * (1 + exact.sup_norm())},
                  {"max_error", static_cast<double>(err)}};
  }

  if (e.command == "solve") {
    art.add("profile.csv", profile_csv(sol));
    res.status = "converged";
    return res;
  }

  if (e.command == "classify") {
    art.add("profile.csv", profile_csv(sol));
    json c;
    c["sigma"] = sol.sup_norm() > 10 * thr ? to_json(multiindex(sol, thr)) : json(nullptr);
    c["c_F"] = maybe_cF(sol, e.problem);
    c["sign_changes"] = sign_changes(sol, thr);
    c["local_extrema"] = local_extrema(sol, thr);
    c["derivative_extrema"] = derivative_extrema(sol, thr);
    if (e.tail) {
      try {
        c["tail"] = to_json(tail_fit(sol, e.problem, e.tail_opt));
      } catch (const InsufficientTail& ex) {
        c["tail"] = {{"kind", "unresolved"}, {"error", ex.what()}};
      }
    }
    s["classification"] = c;
    res.status = "classified";
    return res;
  }

  if (e.command == "compress") {
    log(verbose, e.name, "R-compression");
    GeneralizedIndex gi = generalized_index(e.problem, sol, e.compression);
    art.add("branch.csv", branch_csv(gi.branch));
    art.add("start.csv", profile_csv(sol));
    if (e.compression.ctrl.store_profiles) add_branch_profiles(gi.branch, art);
    Profile pmin = gi.branch.endpoint;
    for (const auto& r : gi.branch.records)
      if (r.fold && r.profile_ref >= 0) {
        pmin = gi.branch.profiles[r.profile_ref];
        break;
      }
    art.add("profile_min.csv", profile_csv(pmin));
    s["branch"] = branch_json(gi.branch);
    s["sigma_min"] = to_string(gi.sigma_min);
    s["R_min"] = gi.R_min;
    s["diverged"] = gi.diverged;
    s["extrema"] = gi.extrema;
    s["status"] = to_string(gi.status);
    res.status = gi.diverged ? "diverged" : "compressed";
    return res;
  }

  // continue
  log(verbose, e.name, "continuation in " + to_string(e.param) + " to " + format_real(*e.target));
  Problem start_problem = at_param(e.problem, sol);
  Branch b = continue_branch(start_problem, sol, e.param, *e.target, e.ctrl);
  art.add("branch.csv", branch_csv(b));
  json folds = json::array();
  for (const auto& f : b.folds) folds.push_back(to_json(f));
  art.add("folds.json", folds.dump(2) + "\n");
  art.add("start.csv", profile_csv(sol));
  art.add("endpoint.csv", profile_csv(b.endpoint));
  if (e.ctrl.store_profiles) add_branch_profiles(b, art);
  s["branch"] = branch_json(b);
  const Problem end_problem = at_param(e.problem, b.endpoint);
  s["endpoint"] = profile_json(b.endpoint, end_problem, thr);
  s["endpoint"]["param"] = b.records.back().param;
  res.exit_code = branch_exit(b, res.status);
  s["folded"] = b.folded();
  return res;
}

std::string timestamp() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_manifest(const std::string& out_dir, const Experiment& e, const json& config,
                    RunResult& res, const Artifacts& art) {
  json files = json::array();
  for (const auto& [name, content] : art.files) {
    const fs::path p = fs::path(out_dir) / name;
    fs::create_directories(p.parent_path());
    write_text(p.string(), content);
    files.push_back({{"path", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
    res.files.push_back(name);
  }
  const std::string summary = res.summary.dump(2) + "\n";
  if (!res.summary.is_null()) {
    write_text((fs::path(out_dir) / "summary.json").string(), summary);
    files.push_back({{"path", "summary.json"}, {"sha256", sha256_hex(summary)}, {"bytes", summary.size()}});
    res.files.push_back("summary.json");
  }
  json m = {{"name", e.name},
            {"command", e.command},
            {"status", res.status},
            {"exit_code", res.exit_code},
            {"config_sha256", sha256_hex(config.dump())},
            {"generated_at", timestamp()},
            {"files", files}};
  if (!res.error.empty()) m["error"] = res.error;
  write_text((fs::path(out_dir) / "manifest.json").string(), m.dump(2) + "\n");
}

}  // namespace

json load_config(const std::string& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& ex) {
    throw ConfigError(path + ": malformed JSON: " + ex.what());
  }
}

RunResult run_config(const json& config, const std::string& out_dir, bool verbose) {
  RunResult res;
  Experiment e;
  try {
    e = parse_experiment(config);
  } catch (const ConfigError& ex) {
    res.exit_code = exit_config;
    res.status = "config_error";
    res.error = ex.what();
    return res;
  } catch (const json::exception& ex) {
    res.exit_code = exit_config;
    res.status = "config_error";
    res.error = ex.what();
    return res;
  }
  if (e.name.empty()) e.name = fs::path(out_dir).filename().string();

  Artifacts art;
  try {
    res = execute(e, art, verbose);
  } catch (const InvalidArgument& ex) {
    res = RunResult{};
    res.exit_code = exit_config;
    res.status = "invalid_argument";
    res.error = ex.what();
    return res;
  } catch (const NoConvergence& ex) {
    res = RunResult{};
    res.exit_code = exit_no_convergence;
    res.status = "not_converged";
    res.error = ex.what();
  } catch (const StartNotConverged& ex) {
    res = RunResult{};
    res.exit_code = exit_no_convergence;
    res.status = "not_converged";
    res.error = ex.what();
  } catch (const ConvergenceError& ex) {
    res = RunResult{};
    res.exit_code = exit_no_convergence;
    res.status = "not_converged";
    res.error = ex.what();
  } catch (const SingularJacobian& ex) {
    res = RunResult{};
    res.exit_code = exit_no_convergence;
    res.status = "singular_jacobian";
    res.error = ex.what();
  } catch (const StepSizeCollapse& ex) {
    res = RunResult{};
    res.exit_code = exit_no_convergence;
    res.status = "step_size_collapse";
    res.error = ex.what();
  } catch (const Error& ex) {
    res = RunResult{};
    res.exit_code = exit_failure;
    res.status = "error";
    res.error = ex.what();
  }
  if (res.exit_code != exit_ok) log(verbose, e.name, "status " + res.status + (res.error.empty() ? "" : ": " + res.error));
  try {
    fs::create_directories(out_dir);
    if (!res.error.empty()) art.files.clear();
    write_manifest(out_dir, e, config, res, art);
  } catch (const std::exception& ex) {
    res.exit_code = exit_failure;
    res.status = "io_error";
    res.error = ex.what();
  }
  return res;
}

std::vector<BatchEntry> run_path(const std::string& path, const std::string& out_dir, int jobs,
                                 bool verbose) {
  std::vector<std::string> configs;
  const bool is_dir = fs::is_directory(path);
  if (is_dir) {
    for (const auto& de : fs::directory_iterator(path))
      if (de.is_regular_file() && de.path().extension() == ".json") configs.push_back(de.path().string());
    std::sort(configs.begin(), configs.end());
  } else {
    configs.push_back(path);
  }
  std::vector<BatchEntry> entries(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) entries[i].config_path = configs[i];

  auto work = [&](BatchEntry& be) {
    const std::string stem = fs::path(be.config_path).stem().string();
    json cfg;
    try {
      cfg = load_config(be.config_path);
    } catch (const ConfigError& ex) {
      be.result.exit_code = exit_config;
      be.result.status = "config_error";
      be.result.error = ex.what();
      return;
    }
    if (!out_dir.empty()) be.out_dir = is_dir ? (fs::path(out_dir) / stem).string() : out_dir;
    else if (cfg.is_object() && cfg.contains("output_dir") && cfg["output_dir"].is_string())
      be.out_dir = cfg["output_dir"].get<std::string>();
    else be.out_dir = (fs::path("results") / stem).string();
    log(verbose, stem, "running " + be.config_path + " -> " + be.out_dir);
    be.result = run_config(cfg, be.out_dir, verbose);
  };

  std::atomic<std::size_t> next{0};
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(entries.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < entries.size(); i = next++) work(entries[i]);
    });
  for (auto& t : pool) t.join();
  return entries;
}

int batch_exit_code(const std::vector<BatchEntry>& entries) {
  int code = exit_ok;
  for (const auto& e : entries) {
    const int c = e.result.exit_code;
    if (c == exit_config) return exit_config;
    if (c == exit_no_convergence || (c == exit_failure && code == exit_ok)) code = std::max(code, c);
  }
  return code;
}

}  // namespace sturmcont::cli
