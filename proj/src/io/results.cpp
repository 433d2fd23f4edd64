#include "tada/io/results.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "tada/errors.hpp"
#include "tada/io/csv.hpp"

namespace tada {

using nlohmann::ordered_json;

OutputFormat parse_output_format(std::string_view text) {
  if (text == "csv") return OutputFormat::Tabular;
  if (text == "json") return OutputFormat::Structured;
  throw ValidationError("unknown output format '" + std::string(text) + "' (expected csv|json)");
}

namespace {

ordered_json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_real(v));
}

ordered_json num(const std::optional<double>& v) { return v ? num(*v) : ordered_json(nullptr); }

std::string cell(const std::optional<double>& v, const char* absent = "NR") { return v ? format_real(*v) : absent; }

std::string cutoff_label(const std::optional<double>& cutoff) { return cutoff ? format_real(*cutoff) : "none"; }

// Rows of cells; the first row is the header.
using Rows = std::vector<std::vector<std::string>>;

std::string to_csv(const Rows& rows) {
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
    out += "\n";
  }
  return out;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

const std::vector<std::string> kSummaryHeader{
    "scenario",          "censor_intercept",    "censor_fraction",     "replicates",
    "failed_replicates", "hr_adjusted",         "hr_adjusted_low",     "hr_adjusted_high",
    "hr_ignored",        "hr_ignored_low",      "hr_ignored_high",     "hr_true",
    "hr_true_low",       "hr_true_high",        "bias_adjusted",       "bias_adjusted_low",
    "bias_adjusted_high", "bias_ignored",       "bias_ignored_low",    "bias_ignored_high",
    "coverage_adjusted", "coverage_ignored",    "mc_sd_adjusted",      "boot_se_adjusted",
    "mc_sd_ignored",     "boot_se_ignored",     "failures_adjusted",   "failures_ignored"};

std::vector<std::string> summary_cells(const ScenarioSummary& s) {
  const auto& a = s.adjusted;
  const auto& g = s.ignored;
  return {std::to_string(s.scenario_id),
          format_real(s.censor_intercept),
          format_real(s.mean_censor_fraction),
          std::to_string(s.replicates),
          std::to_string(s.failed_replicates),
          format_real(a.mean_hr),
          format_real(a.mean_ci_low),
          format_real(a.mean_ci_high),
          format_real(g.mean_hr),
          format_real(g.mean_ci_low),
          format_real(g.mean_ci_high),
          format_real(s.pseudo_true_hr),
          format_real(s.pseudo_true_low),
          format_real(s.pseudo_true_high),
          format_real(a.bias),
          format_real(a.bias_low),
          format_real(a.bias_high),
          format_real(g.bias),
          format_real(g.bias_low),
          format_real(g.bias_high),
          format_real(a.coverage),
          format_real(g.coverage),
          format_real(a.monte_carlo_sd),
          format_real(a.mean_bootstrap_se),
          format_real(g.monte_carlo_sd),
          format_real(g.mean_bootstrap_se),
          std::to_string(a.failures),
          std::to_string(g.failures)};
}

ordered_json strategy_json(const StrategySummary& s) {
  ordered_json j;
  j["hr"] = num(s.mean_hr);
  j["hr_low"] = num(s.mean_ci_low);
  j["hr_high"] = num(s.mean_ci_high);
  j["bias"] = num(s.bias);
  j["bias_low"] = num(s.bias_low);
  j["bias_high"] = num(s.bias_high);
  j["coverage"] = num(s.coverage);
  j["monte_carlo_sd"] = num(s.monte_carlo_sd);
  j["mean_bootstrap_se"] = num(s.mean_bootstrap_se);
  j["successes"] = s.successes;
  j["failures"] = s.failures;
  return j;
}

ordered_json summary_json(const ScenarioSummary& s) {
  ordered_json j;
  j["scenario"] = s.scenario_id;
  j["censor_intercept"] = num(s.censor_intercept);
  j["censor_fraction"] = num(s.mean_censor_fraction);
  j["replicates"] = s.replicates;
  j["failed_replicates"] = s.failed_replicates;
  j["hr_true"] = num(s.pseudo_true_hr);
  j["hr_true_low"] = num(s.pseudo_true_low);
  j["hr_true_high"] = num(s.pseudo_true_high);
  j["adjusted"] = strategy_json(s.adjusted);
  j["ignored"] = strategy_json(s.ignored);
  return j;
}

// A sensitivity table: leading key columns followed by the summary columns.
template <class Row, class Keys>
std::string render_sensitivity(std::span<const Row> rows, OutputFormat format, const std::vector<std::string>& names,
                               Keys&& keys) {
  if (format == OutputFormat::Tabular) {
    Rows out{names};
    out[0].insert(out[0].end(), kSummaryHeader.begin(), kSummaryHeader.end());
    for (const auto& r : rows) {
      auto line = keys(r).first;
      auto cells = summary_cells(r.summary);
      line.insert(line.end(), cells.begin(), cells.end());
      out.push_back(std::move(line));
    }
    return to_csv(out);
  }
  ordered_json j = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json o = keys(r).second;
    o["summary"] = summary_json(r.summary);
    j.push_back(std::move(o));
  }
  return dump(j);
}

ordered_json distribution_json(const Distribution& d) {
  ordered_json j;
  j["min"] = num(d.min);
  j["q1"] = num(d.q1);
  j["median"] = num(d.median);
  j["mean"] = num(d.mean);
  j["q3"] = num(d.q3);
  j["max"] = num(d.max);
  return j;
}

// Time-zero row: survival one, risk mass of the first risk set (subject count for an empty curve).
double initial_risk(const KMCurve& curve, std::size_t fallback) {
  return curve.n_risk_weighted.empty() ? static_cast<double>(fallback) : curve.n_risk_weighted.front();
}

}  // namespace

std::string render_estimate(const TransportEstimate& e, CensoringStrategy strategy, OutputFormat format) {
  const auto& d = e.diagnostics;
  if (format == OutputFormat::Tabular) {
    return to_csv({{"strategy", "hr", "ci_low", "ci_high", "log_hr", "bootstrap_se", "bootstrap_draws", "failed_draws",
                    "effective_sample_size", "truncation_threshold", "weight_max_raw", "weight_max_final"},
                   {std::string(to_string(strategy)), format_real(e.hr), format_real(e.ci_low), format_real(e.ci_high),
                    format_real(e.log_hr), format_real(e.bootstrap_se), std::to_string(e.bootstrap_draws.size()),
                    std::to_string(e.failed_draws.size()), format_real(d.effective_sample_size),
                    format_real(d.truncation_threshold), format_real(d.raw.max), format_real(d.final.max)}});
  }
  ordered_json j;
  j["strategy"] = std::string(to_string(strategy));
  j["hr"] = num(e.hr);
  j["ci_low"] = num(e.ci_low);
  j["ci_high"] = num(e.ci_high);
  j["log_hr"] = num(e.log_hr);
  j["bootstrap_se"] = num(e.bootstrap_se);
  j["bootstrap_draws"] = e.bootstrap_draws.size();
  j["failed_draws"] = e.failed_draws;
  j["effective_sample_size"] = num(d.effective_sample_size);
  j["truncation_threshold"] = num(d.truncation_threshold);
  j["censoring_adjusted"] = d.censoring_adjusted;
  j["no_censoring"] = d.no_censoring;
  ordered_json zeta = ordered_json::array();
  for (double z : d.zeta) zeta.push_back(num(z));
  j["zeta"] = std::move(zeta);
  return dump(j);
}

std::string render_scenario_summaries(std::span<const ScenarioSummary> summaries, OutputFormat format) {
  if (format == OutputFormat::Tabular) {
    Rows rows{kSummaryHeader};
    for (const auto& s : summaries) rows.push_back(summary_cells(s));
    return to_csv(rows);
  }
  ordered_json j = ordered_json::array();
  for (const auto& s : summaries) j.push_back(summary_json(s));
  return dump(j);
}

std::string render_replicates(const ScenarioSummary& summary) {
  Rows rows{{"replicate", "hr_true", "hr_adjusted", "ci_adjusted_low", "ci_adjusted_high", "se_adjusted",
             "hr_ignored", "ci_ignored_low", "ci_ignored_high", "se_ignored", "censor_fraction",
             "censor_fraction_treated", "censor_fraction_control", "error_adjusted", "error_ignored"}};
  for (const auto& o : summary.outcomes) {
    auto strategy = [](const std::optional<StrategyOutcome>& s) -> std::vector<std::string> {
      if (!s) return {"NA", "NA", "NA", "NA"};
      return {format_real(s->hr), format_real(s->ci_low), format_real(s->ci_high), format_real(s->bootstrap_se)};
    };
    std::vector<std::string> row{std::to_string(o.replicate), cell(o.pseudo_true_hr, "NA")};
    for (auto& c : strategy(o.adjusted)) row.push_back(c);
    for (auto& c : strategy(o.ignored)) row.push_back(c);
    row.push_back(format_real(o.censor_fraction_overall));
    row.push_back(format_real(o.censor_fraction_treated));
    row.push_back(format_real(o.censor_fraction_control));
    row.push_back(o.adjusted_error);
    row.push_back(o.ignored_error);
    rows.push_back(std::move(row));
  }
  return to_csv(rows);
}

std::string render_truncation(std::span<const TruncationRow> rows, OutputFormat format) {
  return render_sensitivity(rows, format, {"cutoff"}, [](const TruncationRow& r) {
    ordered_json k;
    k["cutoff"] = r.cutoff ? num(*r.cutoff) : ordered_json("none");
    return std::pair{std::vector<std::string>{cutoff_label(r.cutoff)}, k};
  });
}

std::string render_sample_size(std::span<const SampleSizeRow> rows, OutputFormat format) {
  return render_sensitivity(rows, format, {"source_n"}, [](const SampleSizeRow& r) {
    ordered_json k;
    k["source_n"] = r.source_n;
    return std::pair{std::vector<std::string>{std::to_string(r.source_n)}, k};
  });
}

std::string render_abnormal(std::span<const AbnormalRow> rows, OutputFormat format) {
  return render_sensitivity(rows, format, {"type", "flip_fraction_x2", "extreme_fraction_x3", "extreme_multiplier"},
                            [](const AbnormalRow& r) {
                              ordered_json k;
                              k["type"] = r.type;
                              k["flip_fraction_x2"] = num(r.spec.flip_fraction_x2);
                              k["extreme_fraction_x3"] = num(r.spec.extreme_fraction_x3);
                              k["extreme_multiplier"] = num(r.spec.extreme_multiplier);
                              return std::pair{std::vector<std::string>{std::to_string(r.type),
                                                                        format_real(r.spec.flip_fraction_x2),
                                                                        format_real(r.spec.extreme_fraction_x3),
                                                                        format_real(r.spec.extreme_multiplier)},
                                               k};
                            });
}

std::string render_calibration(std::span<const CalibrationRow> rows, OutputFormat format) {
  if (format == OutputFormat::Tabular) {
    Rows out{{"scenario", "censor_intercept", "group", "min", "q1", "median", "mean", "q3", "max"}};
    for (const auto& r : rows) {
      for (auto [name, d] : {std::pair{"overall", &r.overall}, {"treated", &r.treated}, {"control", &r.control}}) {
        out.push_back({std::to_string(r.scenario_id), format_real(r.censor_intercept), name, format_real(d->min),
                       format_real(d->q1), format_real(d->median), format_real(d->mean), format_real(d->q3),
                       format_real(d->max)});
      }
    }
    return to_csv(out);
  }
  ordered_json j = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json o;
    o["scenario"] = r.scenario_id;
    o["censor_intercept"] = num(r.censor_intercept);
    o["overall"] = distribution_json(r.overall);
    o["treated"] = distribution_json(r.treated);
    o["control"] = distribution_json(r.control);
    j.push_back(std::move(o));
  }
  return dump(j);
}

std::string render_km_curves(std::span<const AdjustedCurve> curves, OutputFormat format) {
  if (format == OutputFormat::Tabular) {
    Rows rows{{"curve", "time", "survival", "n_risk_weighted"}};
    for (const auto& c : curves) {
      const std::string name(to_string(c.adjustment));
      rows.push_back({name, "0", "1", format_real(initial_risk(c.curve, 0))});
      for (std::size_t k = 0; k < c.curve.times.size(); ++k)
        rows.push_back({name, format_real(c.curve.times[k]), format_real(c.curve.survival[k]),
                        format_real(c.curve.n_risk_weighted[k])});
    }
    return to_csv(rows);
  }
  ordered_json j = ordered_json::array();
  for (const auto& c : curves) {
    ordered_json o;
    o["curve"] = std::string(to_string(c.adjustment));
    ordered_json time{0.0}, surv{1.0}, risk{num(initial_risk(c.curve, 0))};
    for (std::size_t k = 0; k < c.curve.times.size(); ++k) {
      time.push_back(num(c.curve.times[k]));
      surv.push_back(num(c.curve.survival[k]));
      risk.push_back(num(c.curve.n_risk_weighted[k]));
    }
    o["time"] = std::move(time);
    o["survival"] = std::move(surv);
    o["n_risk_weighted"] = std::move(risk);
    o["median"] = num(c.curve.median);
    j.push_back(std::move(o));
  }
  return dump(j);
}

std::string render_medians(std::span<const MedianEstimate> medians, OutputFormat format) {
  if (format == OutputFormat::Tabular) {
    Rows rows{{"curve", "median", "ci_low", "ci_high", "failed_draws"}};
    for (const auto& m : medians)
      rows.push_back({std::string(to_string(m.adjustment)), cell(m.median), cell(m.ci_low, "NA"),
                      cell(m.ci_high, "NA"), std::to_string(m.failed_draws)});
    return to_csv(rows);
  }
  ordered_json j = ordered_json::array();
  for (const auto& m : medians) {
    ordered_json o;
    o["curve"] = std::string(to_string(m.adjustment));
    o["median"] = num(m.median);
    o["ci_low"] = num(m.ci_low);
    o["ci_high"] = num(m.ci_high);
    o["failed_draws"] = m.failed_draws;
    j.push_back(std::move(o));
  }
  return dump(j);
}

std::string render_survival_at(std::span<const AdjustedCurve> curves, std::span<const double> times,
                               OutputFormat format) {
  if (format == OutputFormat::Tabular) {
    Rows rows{{"curve", "time", "survival"}};
    for (const auto& c : curves)
      for (double t : times)
        rows.push_back({std::string(to_string(c.adjustment)), format_real(t), format_real(km_survival_at(c.curve, t))});
    return to_csv(rows);
  }
  ordered_json j = ordered_json::array();
  for (const auto& c : curves) {
    ordered_json o;
    o["curve"] = std::string(to_string(c.adjustment));
    ordered_json tt = ordered_json::array(), ss = ordered_json::array();
    for (double t : times) {
      tt.push_back(num(t));
      ss.push_back(num(km_survival_at(c.curve, t)));
    }
    o["time"] = std::move(tt);
    o["survival"] = std::move(ss);
    j.push_back(std::move(o));
  }
  return dump(j);
}

Histogram weight_histogram(std::span<const double> values, int bins) {
  if (values.empty()) throw ValidationError("histogram of an empty set");
  if (bins < 1) throw ValidationError("histogram needs at least one bin");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  Histogram h;
  if (hi == lo) {
    h.edges = {lo, hi};
    h.percent = {100.0};
    return h;
  }
  const auto nb = static_cast<std::size_t>(bins);
  const double width = (hi - lo) / static_cast<double>(nb);
  for (std::size_t b = 0; b <= nb; ++b) h.edges.push_back(b == nb ? hi : lo + width * static_cast<double>(b));
  std::vector<std::size_t> counts(nb, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    ++counts[std::min(b, nb - 1)];
  }
  const double n = static_cast<double>(values.size());
  for (auto c : counts) h.percent.push_back(100.0 * static_cast<double>(c) / n);
  return h;
}

std::string render_weight_diagnostics(const Histogram& histogram, const ThresholdTable& thresholds,
                                      const WeightSummary& summary, OutputFormat format) {
  if (format == OutputFormat::Tabular) {
    Rows rows{{"section", "key", "lower", "upper", "value"}};
    for (auto [k, v] : {std::pair{"q90", thresholds.q90}, {"q95", thresholds.q95}, {"q99", thresholds.q99}})
      rows.push_back({"threshold", k, "", "", format_real(v)});
    for (auto [k, v] : {std::pair{"min", summary.min}, {"mean", summary.mean}, {"max", summary.max}})
      rows.push_back({"summary", k, "", "", format_real(v)});
    rows.push_back({"summary", "count", "", "", std::to_string(summary.count)});
    for (std::size_t b = 0; b < histogram.percent.size(); ++b)
      rows.push_back({"bin", std::to_string(b + 1), format_real(histogram.edges[b]),
                      format_real(histogram.edges[b + 1]), format_real(histogram.percent[b])});
    return to_csv(rows);
  }
  ordered_json j;
  j["thresholds"] = {{"q90", num(thresholds.q90)}, {"q95", num(thresholds.q95)}, {"q99", num(thresholds.q99)}};
  j["summary"] = {{"count", summary.count}, {"min", num(summary.min)}, {"mean", num(summary.mean)},
                  {"max", num(summary.max)}};
  ordered_json edges = ordered_json::array(), pct = ordered_json::array();
  for (double e : histogram.edges) edges.push_back(num(e));
  for (double p : histogram.percent) pct.push_back(num(p));
  j["histogram"] = {{"edges", std::move(edges)}, {"percent", std::move(pct)}};
  return dump(j);
}

}  // namespace tada
