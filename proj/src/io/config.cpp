#include "tada/io/config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "tada/errors.hpp"
#include "tada/io/csv.hpp"

namespace tada {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json parse_json(std::string_view text, const char* what) {
  try {
    json j = json::parse(text);
    if (!j.is_object()) throw ValidationError(std::string(what) + ": expected a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string(what) + ": " + e.what());
  }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.count(key)) throw ValidationError(what + ": unknown key '" + key + "'");
}

template <class T>
T get(const json& j, const char* key, const std::string& what) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(what + ": key '" + key + "' is missing or has the wrong type");
  }
}

template <class T>
void get_optional(const json& j, const char* key, T& out, const std::string& what) {
  if (j.contains(key)) out = get<T>(j, key, what);
}

std::optional<double> parse_truncation(const json& j, const std::string& what) {
  const json& v = j.at("truncation");
  if (v.is_string() && v.get<std::string>() == "none") return std::nullopt;
  if (v.is_number()) return v.get<double>();
  throw ValidationError(what + ": truncation must be a quantile in (0, 1] or \"none\"");
}

template <class F>
auto with_file(const std::filesystem::path& path, F&& parse) {
  const std::string text = read_text(path);
  try {
    return parse(text);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace

TargetAggregate parse_target_aggregate(std::string_view json_text) {
  const std::string what = "target aggregate";
  const json j = parse_json(json_text, what.c_str());
  check_keys(j, {"target_n", "covariates"}, what);
  TargetAggregate t;
  const auto n = get<std::int64_t>(j, "target_n", what);
  if (n <= 0) throw ValidationError(what + ": target_n must be positive");
  t.target_n = static_cast<std::size_t>(n);
  const json& entries = j.contains("covariates") ? j.at("covariates") : json::array();
  if (!entries.is_array()) throw ValidationError(what + ": covariates must be an array");
  for (const auto& e : entries) {
    if (!e.is_object()) throw ValidationError(what + ": each covariate must be an object");
    check_keys(e, {"name", "kind", "mean", "sd"}, what);
    TargetEntry entry;
    entry.name = get<std::string>(e, "name", what);
    entry.kind = parse_covariate_kind(get<std::string>(e, "kind", what));
    entry.mean = get<double>(e, "mean", what);
    if (e.contains("sd") && !e.at("sd").is_null()) entry.sd = get<double>(e, "sd", what);
    t.entries.push_back(std::move(entry));
  }
  t.validate();
  return t;
}

TargetAggregate read_target_aggregate(const std::filesystem::path& path) {
  return with_file(path, [](const std::string& s) { return parse_target_aggregate(s); });
}

std::string render_target_aggregate(const TargetAggregate& target) {
  ordered_json j;
  j["target_n"] = target.target_n;
  j["covariates"] = ordered_json::array();
  for (const auto& e : target.entries) {
    ordered_json o;
    o["name"] = e.name;
    o["kind"] = std::string(to_string(e.kind));
    o["mean"] = e.mean;
    if (e.sd) o["sd"] = *e.sd;
    j["covariates"].push_back(std::move(o));
  }
  return j.dump(2) + "\n";
}

AnalysisConfig parse_analysis_config(std::string_view json_text) {
  const std::string what = "analysis config";
  const json j = parse_json(json_text, what.c_str());
  check_keys(j,
             {"balance_covariates", "censoring_covariates", "include_second_moments", "truncation", "strategy",
              "bootstrap", "seed", "max_failure_fraction"},
             what);
  AnalysisConfig c;
  get_optional(j, "balance_covariates", c.balance_covariates, what);
  get_optional(j, "censoring_covariates", c.censoring_covariates, what);
  get_optional(j, "include_second_moments", c.include_second_moments, what);
  if (j.contains("truncation")) c.truncation_cutoff = parse_truncation(j, what);
  if (j.contains("strategy")) c.strategy = parse_censoring_strategy(get<std::string>(j, "strategy", what));
  get_optional(j, "bootstrap", c.bootstrap_B, what);
  get_optional(j, "seed", c.seed, what);
  get_optional(j, "max_failure_fraction", c.max_failure_fraction, what);
  c.validate();
  return c;
}

AnalysisConfig read_analysis_config(const std::filesystem::path& path) {
  return with_file(path, [](const std::string& s) { return parse_analysis_config(s); });
}

std::string render_analysis_config(const AnalysisConfig& config) {
  ordered_json j;
  j["balance_covariates"] = config.balance_covariates;
  j["censoring_covariates"] = config.censoring_covariates;
  j["include_second_moments"] = config.include_second_moments;
  if (config.truncation_cutoff) {
    j["truncation"] = *config.truncation_cutoff;
  } else {
    j["truncation"] = "none";
  }
  j["strategy"] = std::string(to_string(config.strategy));
  j["bootstrap"] = config.bootstrap_B;
  j["seed"] = config.seed;
  j["max_failure_fraction"] = config.max_failure_fraction;
  return j.dump(2) + "\n";
}

SimulationPlan parse_simulation_plan(std::string_view json_text) {
  const std::string what = "simulation plan";
  const json j = parse_json(json_text, what.c_str());
  check_keys(j,
             {"scenarios", "censoring_levels", "replicates", "bootstrap", "seed", "truncation",
              "include_second_moments", "source_n", "max_failure_fraction"},
             what);
  std::vector<int> ids{1};
  std::vector<int> levels{20};
  get_optional(j, "scenarios", ids, what);
  get_optional(j, "censoring_levels", levels, what);
  SimulationPlan plan;
  get_optional(j, "replicates", plan.options.replicates, what);
  get_optional(j, "bootstrap", plan.options.bootstrap_B, what);
  get_optional(j, "seed", plan.options.seed, what);
  if (j.contains("truncation")) plan.options.truncation_cutoff = parse_truncation(j, what);
  get_optional(j, "include_second_moments", plan.options.include_second_moments, what);
  get_optional(j, "max_failure_fraction", plan.options.max_failure_fraction, what);
  std::size_t source_n = 0;
  get_optional(j, "source_n", source_n, what);
  for (int level : levels) {
    for (int id : ids) {
      ScenarioConfig c = ScenarioConfig::preset(id, censor_intercept_for_level(level));
      if (source_n > 0) c.source.sample = source_n;
      c.validate();
      plan.scenarios.push_back(c);
    }
  }
  plan.options.validate();
  return plan;
}

SimulationPlan read_simulation_plan(const std::filesystem::path& path) {
  return with_file(path, [](const std::string& s) { return parse_simulation_plan(s); });
}

}  // namespace tada
