#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tada/estimator/bootstrap.hpp"
#include "tada/estimator/km_analysis.hpp"
#include "tada/simulation/study.hpp"

namespace tada {

enum class OutputFormat { Tabular, Structured };  // CSV, JSON

OutputFormat parse_output_format(std::string_view text);  // "csv" | "json"

// Reals are written with 6 significant digits; field order is fixed.

std::string render_estimate(const TransportEstimate& estimate, CensoringStrategy strategy, OutputFormat format);

// One row per scenario: HR (CI) per strategy and benchmark, bias (interval), coverage, SD / SE.
std::string render_scenario_summaries(std::span<const ScenarioSummary> summaries, OutputFormat format);
// Per-replicate outcomes of one scenario (CSV only).
std::string render_replicates(const ScenarioSummary& summary);
std::string render_truncation(std::span<const TruncationRow> rows, OutputFormat format);
std::string render_sample_size(std::span<const SampleSizeRow> rows, OutputFormat format);
std::string render_abnormal(std::span<const AbnormalRow> rows, OutputFormat format);
std::string render_calibration(std::span<const CalibrationRow> rows, OutputFormat format);

// (curve, time, survival, n_risk_weighted); each curve starts with a t = 0 row.
std::string render_km_curves(std::span<const AdjustedCurve> curves, OutputFormat format);
std::string render_medians(std::span<const MedianEstimate> medians, OutputFormat format);
// Survival of every curve at the requested times.
std::string render_survival_at(std::span<const AdjustedCurve> curves, std::span<const double> times,
                               OutputFormat format);

struct Histogram {
  std::vector<double> edges;    // bins + 1 edges
  std::vector<double> percent;  // sums to 100
};

// Equal-width bins over [min, max]; a single bin when all values are equal.
Histogram weight_histogram(std::span<const double> values, int bins = 30);

struct ThresholdTable {
  double q90 = 0.0, q95 = 0.0, q99 = 0.0;
};

std::string render_weight_diagnostics(const Histogram& histogram, const ThresholdTable& thresholds,
                                      const WeightSummary& summary, OutputFormat format);

}  // namespace tada
