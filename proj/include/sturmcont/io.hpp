#pragma once

#include <json.hpp>
#include <string>

#include "sturmcont/classify.hpp"
#include "sturmcont/continuation.hpp"
#include "sturmcont/evolve.hpp"
#include "sturmcont/model.hpp"
#include "sturmcont/solver.hpp"

namespace sturmcont {

using nlohmann::json;

// JSON <-> value types. Unknown keys raise ConfigError.
Problem problem_from_json(const json& j);
json to_json(const Problem& p);
TemplateSpec template_from_json(const json& j);
json to_json(const TemplateSpec& t);
StepControl step_control_from_json(const json& j, StepControl base = {});
NewtonOptions newton_options_from_json(const json& j, NewtonOptions base = {});
EvolutionConfig evolution_config_from_json(const json& j, EvolutionConfig base = {});
json to_json(const MultiIndex& s);
json to_json(const TailReport& t);
json to_json(const FoldRecord& f);
json to_json(const BoundReport& b);

// Shortest decimal that round-trips the double.
std::string format_real(double x);

std::string profile_csv(const Profile& p);
std::string branch_csv(const Branch& b);
std::string trace_csv(const EnergyTrace& t);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);
std::string sha256_hex(const std::string& data);

}  // namespace sturmcont
