#include "sturmcont/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <sstream>

namespace sturmcont {

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& ctx) {
  if (!j.is_object()) throw ConfigError(ctx + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) ok = true;
    if (!ok) throw ConfigError(ctx + ": unknown key '" + it.key() + "'");
  }
}

double get_real(const json& j, const char* key, const std::string& ctx) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError(ctx + "." + key + " must be a number");
  return v.get<double>();
}

int get_int(const json& j, const char* key, const std::string& ctx) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(ctx + "." + key + " must be an integer");
  return v.get<int>();
}

bool get_bool(const json& j, const char* key, const std::string& ctx) {
  const auto& v = j.at(key);
  if (!v.is_boolean()) throw ConfigError(ctx + "." + key + " must be a boolean");
  return v.get<bool>();
}

template <class T, class F>
void opt(const json& j, const char* key, T& dst, F get) {
  if (j.contains(key)) dst = get(key);
}

}  // namespace

Problem problem_from_json(const json& j) {
  const std::string ctx = "problem";
  check_keys(j, {"family", "m", "n", "eps", "R", "zeroth_sign", "forcing", "delta_reg"}, ctx);
  Problem p;
  if (!j.contains("family") || !j["family"].is_string())
    throw ConfigError("problem.family must be a string");
  p.family = family_from_string(j["family"].get<std::string>());
  auto real = [&](const char* k) { return get_real(j, k, ctx); };
  opt(j, "m", p.m, [&](const char* k) { return get_int(j, k, ctx); });
  opt(j, "n", p.n, real);
  opt(j, "eps", p.eps, real);
  opt(j, "R", p.R, real);
  opt(j, "delta_reg", p.delta_reg, real);
  if (j.contains("zeroth_sign")) {
    if (!j["zeroth_sign"].is_string()) throw ConfigError("problem.zeroth_sign must be a string");
    p.zeroth_sign = zeroth_sign_from_string(j["zeroth_sign"].get<std::string>());
  }
  if (j.contains("forcing") && !j["forcing"].is_null()) p.forcing = real("forcing");
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
  return p;
}

json to_json(const Problem& p) {
  json j = {{"family", to_string(p.family)}, {"m", p.m},      {"n", p.n},
            {"eps", p.eps},                   {"R", p.R},      {"zeroth_sign", to_string(p.zeroth_sign)},
            {"delta_reg", p.delta_reg}};
  if (p.forcing) j["forcing"] = *p.forcing;
  return j;
}

TemplateSpec template_from_json(const json& j) {
  const std::string ctx = "template";
  check_keys(j, {"plateaus", "smoothing_width"}, ctx);
  TemplateSpec t;
  if (j.contains("smoothing_width")) t.smoothing_width = get_real(j, "smoothing_width", ctx);
  if (j.contains("plateaus")) {
    if (!j["plateaus"].is_array()) throw ConfigError("template.plateaus must be an array");
    for (const auto& e : j["plateaus"]) {
      if (!e.is_array() || e.size() != 3 || !e[0].is_number() || !e[1].is_number() ||
          !e[2].is_number())
        throw ConfigError("template.plateaus entries must be [level, start, end]");
      t.plateaus.push_back({e[0].get<double>(), e[1].get<double>(), e[2].get<double>()});
    }
  }
  return t;
}

json to_json(const TemplateSpec& t) {
  json pl = json::array();
  for (const auto& p : t.plateaus) pl.push_back({p.level, p.start, p.end});
  return {{"plateaus", pl}, {"smoothing_width", t.smoothing_width}};
}

StepControl step_control_from_json(const json& j, StepControl c) {
  const std::string ctx = "continuation";
  check_keys(j,
             {"param", "target", "ds_init", "ds_min", "ds_max", "max_corrector", "max_steps", "tol",
              "accept_roundoff_floor", "param_min", "param_max", "fold_tol", "refine_folds",
              "stop_after_folds", "divergence_factor", "store_profiles", "R_floor", "R_star",
              "amp_threshold"},
             ctx);
  auto real = [&](const char* k) { return get_real(j, k, ctx); };
  auto integer = [&](const char* k) { return get_int(j, k, ctx); };
  auto boolean = [&](const char* k) { return get_bool(j, k, ctx); };
  opt(j, "ds_init", c.ds_init, real);
  opt(j, "ds_min", c.ds_min, real);
  opt(j, "ds_max", c.ds_max, real);
  opt(j, "max_corrector", c.max_corrector, integer);
  opt(j, "max_steps", c.max_steps, integer);
  opt(j, "tol", c.tol, real);
  opt(j, "accept_roundoff_floor", c.accept_roundoff_floor, boolean);
  opt(j, "param_min", c.param_min, real);
  opt(j, "param_max", c.param_max, real);
  opt(j, "fold_tol", c.fold_tol, real);
  opt(j, "refine_folds", c.refine_folds, boolean);
  opt(j, "stop_after_folds", c.stop_after_folds, integer);
  opt(j, "divergence_factor", c.divergence_factor, real);
  opt(j, "store_profiles", c.store_profiles, boolean);
  if (!(c.ds_min > 0 && c.ds_min <= c.ds_init && c.ds_init <= c.ds_max))
    throw ConfigError("continuation: need 0 < ds_min <= ds_init <= ds_max");
  return c;
}

NewtonOptions newton_options_from_json(const json& j, NewtonOptions o) {
  const std::string ctx = "newton";
  check_keys(j, {"tol", "max_iter", "accept_roundoff_floor", "symmetry"}, ctx);
  opt(j, "tol", o.tol, [&](const char* k) { return get_real(j, k, ctx); });
  opt(j, "max_iter", o.max_iter, [&](const char* k) { return get_int(j, k, ctx); });
  opt(j, "accept_roundoff_floor", o.accept_roundoff_floor,
      [&](const char* k) { return get_bool(j, k, ctx); });
  if (j.contains("symmetry")) {
    const auto s = j["symmetry"];
    if (s == "auto") o.symmetry = SymmetryMode::automatic;
    else if (s == "none") o.symmetry = SymmetryMode::none;
    else throw ConfigError("newton.symmetry must be 'auto' or 'none'");
  }
  if (!(o.tol > 0) || o.max_iter < 1) throw ConfigError("newton: tol > 0 and max_iter >= 1 required");
  return o;
}

EvolutionConfig evolution_config_from_json(const json& j, EvolutionConfig c) {
  const std::string ctx = "evolution";
  check_keys(j,
             {"dt_init", "dt_min", "dt_max", "delta", "scheme", "rtol", "atol", "extrapolate",
              "blowup_cap", "extinction_fraction", "snapshot_every", "max_steps", "t_end"},
             ctx);
  auto real = [&](const char* k) { return get_real(j, k, ctx); };
  auto integer = [&](const char* k) { return get_int(j, k, ctx); };
  opt(j, "dt_init", c.dt_init, real);
  opt(j, "dt_min", c.dt_min, real);
  opt(j, "dt_max", c.dt_max, real);
  opt(j, "delta", c.delta, real);
  opt(j, "rtol", c.rtol, real);
  opt(j, "atol", c.atol, real);
  opt(j, "extrapolate", c.extrapolate, [&](const char* k) { return get_bool(j, k, ctx); });
  opt(j, "blowup_cap", c.blowup_cap, real);
  opt(j, "extinction_fraction", c.extinction_fraction, real);
  opt(j, "snapshot_every", c.snapshot_every, integer);
  opt(j, "max_steps", c.max_steps, integer);
  if (j.contains("scheme") && j["scheme"] != "implicit_euler_linearized")
    throw ConfigError("evolution.scheme must be 'implicit_euler_linearized'");
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

json to_json(const MultiIndex& s) {
  json e = json::array();
  for (const auto& x : s.entries) e.push_back({{"value", x.value}, {"signed", x.is_signed}});
  return {{"sigma", to_string(s)}, {"entries", e}};
}

json to_json(const TailReport& t) {
  json j = {{"kind", to_string(t.kind)},
            {"fit_residual", t.fit_residual},
            {"extrema_used", t.extrema_used},
            {"threshold_interface", t.threshold_interface}};
  if (t.kind == TailKind::algebraic_oscillatory) {
    j["interface_location"] = t.interface_location;
    j["gamma"] = t.gamma;
  } else {
    j["interface_location"] = "+inf";
    j["decay_rate"] = t.decay_rate;
    j["frequency"] = t.frequency;
  }
  return j;
}

json to_json(const FoldRecord& f) {
  return {{"param_star", f.param_star},
          {"sup_norm_star", f.sup_norm_star},
          {"direction_change", to_string(f.direction_change)}};
}

json to_json(const BoundReport& b) {
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json(format_real(x)); };
  return {{"hypotheses_met", b.hypotheses_met},
          {"T", num(b.T)},
          {"max_violation", num(b.max_violation)},
          {"max_reverse_violation", num(b.max_reverse_violation)},
          {"max_identity_error", num(b.max_identity_error)},
          {"max_abs_energy", num(b.max_abs_energy)},
          {"max_concavity_violation", num(b.max_concavity_violation)},
          {"checked_until", num(b.checked_until)},
          {"note", b.note}};
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string profile_csv(const Profile& p) {
  std::string s = "y,F\n";
  for (int i = 0; i < p.grid.N; ++i) {
    s += format_real(static_cast<double>(p.grid.node(i)));
    s += ',';
    s += format_real(static_cast<double>(p.values[i]));
    s += '\n';
  }
  return s;
}

std::string branch_csv(const Branch& b) {
  std::string s = "param,sup_norm,c_F,fold_flag\n";
  for (const auto& r : b.records) {
    s += format_real(r.param) + ',' + format_real(r.sup_norm) + ',' + format_real(r.c_F) + ',' +
         (r.fold ? "1" : "0") + '\n';
  }
  return s;
}

std::string trace_csv(const EnergyTrace& t) {
  std::string s = "t,phi,energy,phi_rate,bound,violation\n";
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    s += format_real(t.times[i]) + ',' + format_real(t.phi[i]) + ',' + format_real(t.energy[i]) +
         ',' + format_real(t.phi_rate[i]) + ',' + format_real(t.bound[i]) + ',' +
         format_real(t.violation[i]) + '\n';
  }
  return s;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path + " for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw Error("write failed for " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path);
  return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, md, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("sha256 failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace sturmcont
