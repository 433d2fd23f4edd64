#include "tada/cli/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "tada/errors.hpp"
#include "tada/estimator/bootstrap.hpp"
#include "tada/estimator/km_analysis.hpp"
#include "tada/estimator/parallel.hpp"
#include "tada/io/config.hpp"
#include "tada/io/csv.hpp"
#include "tada/io/ipd.hpp"
#include "tada/io/results.hpp"
#include "tada/weights/final_weights.hpp"

namespace tada::cli {

namespace {

// A readable file whose contents are unusable; reported with the I/O exit code.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class F>
auto load(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const IoError&) {
    throw;
  } catch (const ValidationError& e) {
    throw InputError(e.what());
  }
}

struct InputOptions {
  std::string ipd;
  std::string target;
  std::string id_column;
  std::string time_column = "time";
  std::string event_column = "event";
  std::string treatment_column = "treatment";
  std::vector<std::string> covariates;  // name:kind
  std::string missing = "reject";
};

struct AnalysisOptions {
  std::string config;
  std::vector<std::string> balance;
  std::vector<std::string> censoring;
  bool second_moments = false;
  std::string strategy;
  std::string truncation;
  int bootstrap = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  unsigned workers = 0;
};

struct OutputOptions {
  std::string path;
  std::string format;
};

void add_input_options(CLI::App* cmd, InputOptions& o, bool target_required) {
  cmd->add_option("--ipd", o.ipd, "Source-trial IPD (CSV with header)")->required();
  auto* t = cmd->add_option("--target", o.target, "Target aggregate (JSON)");
  if (target_required) t->required();
  cmd->add_option("--id-col", o.id_column, "ID column (default: line numbers)");
  cmd->add_option("--time-col", o.time_column, "Observed-time column")->capture_default_str();
  cmd->add_option("--event-col", o.event_column, "Event indicator column (1 = event)")->capture_default_str();
  cmd->add_option("--treatment-col", o.treatment_column, "Treatment indicator column")->capture_default_str();
  cmd->add_option("--covariates", o.covariates,
                  "Extra IPD covariates as name:kind (kind binary|continuous); target covariates are read automatically")
      ->delimiter(',');
  cmd->add_option("--missing", o.missing, "Missing/invalid cell policy: reject|drop-row")->capture_default_str();
}

void add_analysis_options(CLI::App* cmd, AnalysisOptions& o, bool with_strategy) {
  cmd->add_option("--config", o.config, "Analysis config (JSON); flags override its values");
  cmd->add_option("--balance", o.balance, "Balance covariates (default: every target covariate)")->delimiter(',');
  cmd->add_option("--censoring-covariates", o.censoring,
                  "Censoring-model covariates; 'treatment' allowed (default: balance covariates + treatment)")
      ->delimiter(',');
  cmd->add_flag("--second-moments", o.second_moments, "Also balance variances of continuous covariates");
  if (with_strategy) cmd->add_option("--strategy", o.strategy, "Censoring strategy: adjusted|ignored");
  cmd->add_option("--truncation", o.truncation, "Final-weight truncation quantile in (0,1], or 'none' (default 0.95)");
  cmd->add_option("-B,--bootstrap", o.bootstrap, "Bootstrap resamples (default 200)");
  cmd->add_option("--seed", o.seed, "Random seed (default 1)")->each([&o](const std::string&) { o.seed_set = true; });
  cmd->add_option("--workers", o.workers, "Worker threads (default: TADA_WORKERS or available cores)");
}

void add_output_options(CLI::App* cmd, OutputOptions& o, const char* what) {
  cmd->add_option("--out", o.path, what);
  cmd->add_option("--format", o.format, "csv|json (default: from the --out extension)");
}

OutputFormat resolve_format(const OutputOptions& o) {
  if (!o.format.empty()) return parse_output_format(o.format);
  return std::filesystem::path(o.path).extension() == ".json" ? OutputFormat::Structured : OutputFormat::Tabular;
}

std::optional<double> parse_cutoff(const std::string& text) {
  if (text == "none") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && v > 0.0 && v <= 1.0) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("truncation must be a quantile in (0, 1] or 'none', got '" + text + "'");
}

AnalysisConfig resolve_analysis(const AnalysisOptions& o) {
  AnalysisConfig c = o.config.empty() ? AnalysisConfig{} : load([&] { return read_analysis_config(o.config); });
  if (!o.balance.empty()) c.balance_covariates = o.balance;
  if (!o.censoring.empty()) c.censoring_covariates = o.censoring;
  if (o.second_moments) c.include_second_moments = true;
  if (!o.strategy.empty()) c.strategy = parse_censoring_strategy(o.strategy);
  if (!o.truncation.empty()) c.truncation_cutoff = parse_cutoff(o.truncation);
  if (o.bootstrap >= 0) c.bootstrap_B = o.bootstrap;
  if (o.seed_set) c.seed = o.seed;
  c.workers = o.workers > 0 ? o.workers : default_worker_count();
  c.validate();
  return c;
}

struct Inputs {
  SurvivalDataset data;
  std::optional<TargetAggregate> target;
};

Inputs load_inputs(const InputOptions& o, std::ostream& err) {
  std::optional<TargetAggregate> target;
  if (!o.target.empty()) target = load([&] { return read_target_aggregate(o.target); });

  IpdTableSpec spec;
  spec.id_column = o.id_column;
  spec.time_column = o.time_column;
  spec.event_column = o.event_column;
  spec.treatment_column = o.treatment_column;
  spec.missing = parse_missing_policy(o.missing);
  auto add = [&](const std::string& name, CovariateKind kind) {
    for (auto& c : spec.covariates)
      if (c.name == name) {
        c.kind = kind;
        return;
      }
    spec.covariates.push_back({name, kind});
  };
  if (target)
    for (const auto& e : target->entries) add(e.name, e.kind);
  for (const auto& item : o.covariates) {
    const auto colon = item.rfind(':');
    if (colon == std::string::npos) throw ValidationError("--covariates entry '" + item + "' must be name:kind");
    add(item.substr(0, colon), parse_covariate_kind(item.substr(colon + 1)));
  }
  IpdLoad loaded = load([&] { return read_ipd(o.ipd, spec); });
  if (!loaded.dropped.empty()) {
    err << "dropped " << loaded.dropped.size() << " row(s) from " << o.ipd << ":\n";
    for (const auto& m : loaded.dropped) err << "  " << m << "\n";
  }
  return {std::move(loaded.dataset), std::move(target)};
}

void emit(const OutputOptions& o, const std::string& content, std::ostream& out) {
  if (o.path.empty()) {
    out << content;
  } else {
    write_text(o.path, content);
  }
}

std::string fmt(double v) { return format_real(v); }

int pipeline_exit_code(const PipelineError& e) {
  try {
    std::rethrow_exception(e.cause());
  } catch (const InfeasibleMomentsError&) {
    return kInfeasibleMoments;
  } catch (const RankDeficiencyError&) {
    return kInfeasibleMoments;
  } catch (const ValidationError&) {
    return e.stage() == PipelineStage::BalanceSpec ? kUsage : kCoxFailure;
  } catch (...) {
  }
  return e.stage() == PipelineStage::ParticipationWeights ? kInfeasibleMoments : kCoxFailure;
}

int cmd_analyze(const InputOptions& in, const AnalysisOptions& ao, const OutputOptions& oo, std::ostream& out,
                std::ostream& err) {
  const AnalysisConfig config = resolve_analysis(ao);
  const OutputFormat format = resolve_format(oo);
  const Inputs inputs = load_inputs(in, err);
  const TransportEstimate e = bootstrap_transport(inputs.data, *inputs.target, config);
  out << "strategy: " << to_string(config.strategy) << "\n"
      << "HR " << fmt(e.hr) << " (95% CI " << fmt(e.ci_low) << ", " << fmt(e.ci_high) << ")\n"
      << "effective sample size: " << fmt(e.diagnostics.effective_sample_size) << "\n"
      << "bootstrap draws: " << e.bootstrap_draws.size() << " used, " << e.failed_draws.size() << " failed\n";
  if (e.diagnostics.no_censoring) out << "note: no censored records; censoring weights are all one\n";
  if (!oo.path.empty()) write_text(oo.path, render_estimate(e, config.strategy, format));
  return kOk;
}

int cmd_km(const InputOptions& in, const AnalysisOptions& ao, bool no_censoring_adjustment,
           const std::vector<double>& times, const OutputOptions& oo, const std::string& medians_out,
           const std::string& times_out, std::ostream& out, std::ostream& err) {
  const AnalysisConfig config = resolve_analysis(ao);
  const OutputFormat format = resolve_format(oo);
  const Inputs inputs = load_inputs(in, err);
  const TargetAggregate* target = inputs.target ? &*inputs.target : nullptr;
  const auto curves = km_adjusted_curves(inputs.data, target, config, !no_censoring_adjustment);
  const auto medians = km_medians(inputs.data, target, config, !no_censoring_adjustment);

  emit(oo, render_km_curves(curves, format), out);
  out << "median survival";
  if (config.bootstrap_B > 0) out << " (95% bootstrap CI, B = " << config.bootstrap_B << ")";
  out << ":\n";
  for (const auto& m : medians) {
    out << "  " << to_string(m.adjustment) << ": " << (m.median ? fmt(*m.median) : "not reached");
    if (m.ci_low && m.ci_high) out << " (" << fmt(*m.ci_low) << ", " << fmt(*m.ci_high) << ")";
    if (m.failed_draws) out << " [" << m.failed_draws << " draws without a median]";
    out << "\n";
  }
  if (!medians_out.empty()) write_text(medians_out, render_medians(medians, format));
  if (!times.empty()) {
    const std::string table = render_survival_at(curves, times, format);
    if (times_out.empty()) {
      out << table;
    } else {
      write_text(times_out, table);
    }
  }
  return kOk;
}

int cmd_weights_diagnose(const InputOptions& in, const AnalysisOptions& ao, int bins, const OutputOptions& oo,
                         std::ostream& out, std::ostream& err) {
  AnalysisConfig config = resolve_analysis(ao);
  config.truncation_cutoff.reset();
  const OutputFormat format = resolve_format(oo);
  const Inputs inputs = load_inputs(in, err);
  const WeightingResult w = build_final_weights(inputs.data, &*inputs.target, config);
  const auto raw = w.raw_final.pooled();
  const ThresholdTable thresholds{quantile_type7(raw, 0.90), quantile_type7(raw, 0.95), quantile_type7(raw, 0.99)};
  const Histogram histogram = weight_histogram(raw, bins);
  out << "raw final weights: " << raw.size() << " subject-time values, max " << fmt(summarize_weights(raw).max)
      << "\n"
      << "truncation thresholds: 90th " << fmt(thresholds.q90) << ", 95th " << fmt(thresholds.q95) << ", 99th "
      << fmt(thresholds.q99) << "\n";
  emit(oo, render_weight_diagnostics(histogram, thresholds, summarize_weights(raw), format), out);
  return kOk;
}

struct SimulateOptions {
  std::string mode = "main";
  std::vector<int> scenarios;
  std::vector<int> levels;
  int replicates = -1;
  int bootstrap = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  unsigned workers = 0;
  std::string truncation;
  std::vector<std::string> cutoffs{"0.8", "0.9", "0.95", "0.99", "none"};
  std::vector<std::size_t> sizes{300, 500, 800, 1000};
  std::vector<int> types{1, 2, 3, 4, 5, 6, 7};
  bool first_moments_only = false;
  std::string config;
  std::string out_dir = ".";
  std::string format = "csv";
  bool replicates_out = false;
};

int cmd_simulate(const SimulateOptions& so, std::ostream& out) {
  SimulationPlan plan;
  if (!so.config.empty()) {
    plan = load([&] { return read_simulation_plan(so.config); });
  } else {
    plan.scenarios.push_back(ScenarioConfig::preset(1));
  }
  if (!so.scenarios.empty() || !so.levels.empty()) {
    std::vector<int> ids = so.scenarios;
    std::vector<int> levels = so.levels;
    if (ids.empty())
      for (const auto& s : plan.scenarios)
        if (std::find(ids.begin(), ids.end(), s.id) == ids.end()) ids.push_back(s.id);
    if (levels.empty()) levels.push_back(20);
    const std::size_t source_n = plan.scenarios.empty() ? 200 : plan.scenarios.front().source.sample;
    plan.scenarios.clear();
    for (int level : levels)
      for (int id : ids) {
        auto c = ScenarioConfig::preset(id, censor_intercept_for_level(level));
        c.source.sample = source_n;
        plan.scenarios.push_back(c);
      }
  }
  auto& opt = plan.options;
  if (so.replicates >= 0) opt.replicates = so.replicates;
  if (so.bootstrap >= 0) opt.bootstrap_B = so.bootstrap;
  if (so.seed_set) opt.seed = so.seed;
  if (!so.truncation.empty()) opt.truncation_cutoff = parse_cutoff(so.truncation);
  if (so.first_moments_only) opt.include_second_moments = false;
  opt.workers = so.workers > 0 ? so.workers : default_worker_count();
  opt.validate();

  const OutputFormat format = parse_output_format(so.format);
  const std::string ext = format == OutputFormat::Structured ? ".json" : ".csv";
  const std::filesystem::path dir(so.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  auto progress = [&](const ScenarioConfig& c, const char* what) {
    out << what << " scenario " << c.id << " (censoring intercept " << fmt(c.censor_intercept) << ")\n";
    out.flush();
  };
  auto write_replicates = [&](const ScenarioSummary& s, const std::string& tag) {
    if (so.replicates_out)
      write_text(dir / ("replicates_s" + std::to_string(s.scenario_id) + "_b" + fmt(s.censor_intercept) + tag +
                        ".csv"),
                 render_replicates(s));
  };

  if (so.mode == "main") {
    std::vector<ScenarioSummary> summaries;
    for (const auto& c : plan.scenarios) {
      progress(c, "running");
      summaries.push_back(run_scenario(c, opt));
      write_replicates(summaries.back(), "");
    }
    write_text(dir / ("summary" + ext), render_scenario_summaries(summaries, format));
  } else if (so.mode == "truncation") {
    std::vector<std::optional<double>> cutoffs;
    for (const auto& t : so.cutoffs) cutoffs.push_back(parse_cutoff(t));
    std::vector<TruncationRow> rows;
    for (const auto& c : plan.scenarios) {
      progress(c, "truncation sweep,");
      for (auto& r : sensitivity_truncation(c, cutoffs, opt)) {
        write_replicates(r.summary, "_cut" + (r.cutoff ? fmt(*r.cutoff) : std::string("none")));
        rows.push_back(std::move(r));
      }
    }
    write_text(dir / ("truncation" + ext), render_truncation(rows, format));
  } else if (so.mode == "sample-size") {
    std::vector<SampleSizeRow> rows;
    for (const auto& c : plan.scenarios) {
      progress(c, "sample-size sweep,");
      for (auto& r : sensitivity_sample_size(c, so.sizes, opt)) {
        write_replicates(r.summary, "_n" + std::to_string(r.source_n));
        rows.push_back(std::move(r));
      }
    }
    write_text(dir / ("sample_size" + ext), render_sample_size(rows, format));
  } else if (so.mode == "abnormal") {
    std::vector<AbnormalRow> rows;
    for (const auto& c : plan.scenarios) {
      progress(c, "abnormal-value sweep,");
      for (auto& r : sensitivity_abnormal(c, so.types, opt)) {
        write_replicates(r.summary, "_type" + std::to_string(r.type));
        rows.push_back(std::move(r));
      }
    }
    write_text(dir / ("abnormal" + ext), render_abnormal(rows, format));
  } else if (so.mode == "calibration") {
    const auto rows = censoring_calibration_report(plan.scenarios, opt.replicates, opt.seed, opt.workers);
    write_text(dir / ("calibration" + ext), render_calibration(rows, format));
  } else {
    throw ValidationError("unknown mode '" + so.mode + "' (expected main|truncation|sample-size|abnormal|calibration)");
  }
  out << "wrote results to " << dir.string() << "\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transport survival treatment effects from a source trial to a target population described by "
               "aggregate covariate moments."};
  app.name("tada");
  app.require_subcommand(1);

  InputOptions in;
  AnalysisOptions ao;
  OutputOptions oo;

  auto* analyze = app.add_subcommand("analyze", "Weighted Cox hazard ratio with bootstrap CI");
  add_input_options(analyze, in, true);
  add_analysis_options(analyze, ao, true);
  add_output_options(analyze, oo, "Write the estimate here (CSV or JSON)");

  auto* km = app.add_subcommand("km", "Kaplan-Meier curves under the four adjustments, with median survival");
  bool no_censoring_adjustment = false;
  std::vector<double> times;
  std::string medians_out, times_out;
  add_input_options(km, in, false);
  add_analysis_options(km, ao, false);
  km->add_flag("--no-censoring-adjustment", no_censoring_adjustment, "Skip the censoring-adjusted curves");
  km->add_option("--times", times, "Report survival at these times")->delimiter(',');
  km->add_option("--medians-out", medians_out, "Write the median table here");
  km->add_option("--times-out", times_out, "Write the survival-at-times table here");
  add_output_options(km, oo, "Write the curves here (default: stdout)");

  auto* diagnose = app.add_subcommand("weights-diagnose", "Raw final-weight histogram and truncation thresholds");
  int bins = 30;
  add_input_options(diagnose, in, true);
  add_analysis_options(diagnose, ao, true);
  diagnose->add_option("--bins", bins, "Histogram bins")->capture_default_str()->check(CLI::PositiveNumber);
  add_output_options(diagnose, oo, "Write the histogram and thresholds here (default: stdout)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo study and sensitivity analyses");
  SimulateOptions so;
  simulate->add_option("--mode", so.mode, "main|truncation|sample-size|abnormal|calibration")->capture_default_str();
  simulate->add_option("--scenarios", so.scenarios, "Scenario ids 1-10 (default 1)")->delimiter(',');
  simulate->add_option("--levels", so.levels, "Censoring levels in percent: 20,30,40,50 (default 20)")->delimiter(',');
  simulate->add_option("-R,--replicates", so.replicates, "Replicates per scenario (default 500)");
  simulate->add_option("-B,--bootstrap", so.bootstrap, "Bootstrap resamples per replicate (default 200)");
  simulate->add_option("--seed", so.seed, "Master seed (default 1)")->each([&so](const std::string&) {
    so.seed_set = true;
  });
  simulate->add_option("--workers", so.workers, "Worker threads (default: TADA_WORKERS or available cores)");
  simulate->add_option("--truncation", so.truncation, "Truncation quantile or 'none' (default 0.95)");
  simulate->add_option("--cutoffs", so.cutoffs, "Cutoffs for --mode truncation")->delimiter(',')->capture_default_str();
  simulate->add_option("--sizes", so.sizes, "Source sample sizes for --mode sample-size")
      ->delimiter(',')
      ->capture_default_str();
  simulate->add_option("--types", so.types, "Abnormal-value types 1-7 for --mode abnormal")
      ->delimiter(',')
      ->capture_default_str();
  simulate->add_flag("--first-moments-only", so.first_moments_only, "Balance means only (default adds X3 variance)");
  simulate->add_option("--config", so.config, "Simulation plan (JSON); flags override its values");
  simulate->add_option("--out-dir", so.out_dir, "Output directory")->capture_default_str();
  simulate->add_option("--format", so.format, "csv|json")->capture_default_str();
  simulate->add_flag("--replicates-out", so.replicates_out, "Also write per-replicate outcomes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(in, ao, oo, out, err);
    if (km->parsed()) return cmd_km(in, ao, no_censoring_adjustment, times, oo, medians_out, times_out, out, err);
    if (diagnose->parsed()) return cmd_weights_diagnose(in, ao, bins, oo, out, err);
    if (simulate->parsed()) return cmd_simulate(so, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const BootstrapError& e) {
    err << "error: bootstrap failed: " << e.what() << "\n";
    return kBootstrapFailure;
  } catch (const PipelineError& e) {
    err << "error: " << e.what() << "\n";
    return pipeline_exit_code(e);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kCoxFailure;
  }
  return kUsage;
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"tada"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace tada::cli
