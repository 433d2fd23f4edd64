#include <catch_amalgamated.hpp>

#include <atomic>
#include <cmath>
#include <set>

#include "tada/errors.hpp"
#include "tada/estimator/bootstrap.hpp"
#include "tada/estimator/km_analysis.hpp"
#include "tada/estimator/parallel.hpp"
#include "tada/estimator/pipeline.hpp"
#include "tada/estimator/rng.hpp"
#include "tada/simulation/generate.hpp"
#include "tada/simulation/scenario.hpp"

using Catch::Approx;
using namespace tada;

namespace {

SurvivalDataset simulated_source(std::uint64_t seed, bool censored = true, std::size_t n = 200) {
  auto cfg = ScenarioConfig::preset(1);
  cfg.source.sample = n;
  cfg.source.superpopulation = 5000;
  if (!censored) cfg.censor_scale = 0.0;
  return generate_study_ipd(cfg, seed);
}

TargetAggregate simulated_target(std::uint64_t seed) {
  auto cfg = ScenarioConfig::preset(1);
  cfg.target.superpopulation = 20000;
  return generate_target(cfg, seed).aggregate;
}

}  // namespace

TEST_CASE("seed derivation", "[estimator]") {
  REQUIRE(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a)
    for (std::uint64_t b = 0; b < 20; ++b) seen.insert(derive_seed(7, {a, b}));
  REQUIRE(seen.size() == 400);
  REQUIRE(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  REQUIRE(derive_seed(1, {2}) != derive_seed(2, {2}));
}

TEST_CASE("rng draw helpers", "[estimator]") {
  Rng rng(42);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform_open();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    const double z = rng.normal(1.0, 2.0);
    sum += z;
    sq += z * z;
    REQUIRE(rng.index(7) < 7);
  }
  const double mean = sum / n;
  REQUIRE(std::abs(mean - 1.0) < 0.03);
  REQUIRE(std::abs(std::sqrt(sq / n - mean * mean) - 2.0) < 0.03);

  Rng a = Rng::stream(5, {1, 2}), b = Rng::stream(5, {1, 2});
  for (int i = 0; i < 100; ++i) REQUIRE(a.next() == b.next());
}

TEST_CASE("parallel_for visits each index once and rethrows", "[estimator]") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (auto& h : hits) REQUIRE(h.load() == 1);
  REQUIRE_THROWS_AS(parallel_for(100, 3,
                                 [](std::size_t i) {
                                   if (i == 37) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
  REQUIRE_NOTHROW(parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); }));
}

TEST_CASE("effective sample size", "[estimator]") {
  const double w[] = {1.0, 1.0, 2.0};
  REQUIRE(effective_sample_size(w) == Approx(16.0 / 6.0).epsilon(1e-15));
  const double u[] = {3.0, 3.0, 3.0, 3.0};
  REQUIRE(effective_sample_size(u) == Approx(4.0).epsilon(1e-15));
}

TEST_CASE("configuration parsing and validation", "[estimator]") {
  REQUIRE(parse_censoring_strategy("adjusted") == CensoringStrategy::Adjusted);
  REQUIRE(parse_censoring_strategy("ignored") == CensoringStrategy::Ignored);
  REQUIRE_THROWS_AS(parse_censoring_strategy("maybe"), ValidationError);
  AnalysisConfig c;
  REQUIRE_NOTHROW(c.validate());
  c.truncation_cutoff = 1.5;
  REQUIRE_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.max_failure_fraction = -0.1;
  REQUIRE_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("default censoring covariates", "[estimator]") {
  const auto data = simulated_source(3);
  const auto target = simulated_target(4);
  const auto sel = resolve_censoring_selectors({}, &target, data);
  REQUIRE(sel.size() == 4);
  REQUIRE(sel[0] == Selector::treatment());
  AnalysisConfig c;
  c.censoring_covariates = {"X2"};
  const auto one = resolve_censoring_selectors(c, &target, data);
  REQUIRE(one == std::vector<Selector>{Selector::covariate("X2")});
}

TEST_CASE("without censoring both strategies give the same estimate", "[estimator][property]") {
  const auto data = simulated_source(11, false);
  REQUIRE(data.censored_count() == 0);
  const auto target = simulated_target(12);
  AnalysisConfig adj, ign;
  adj.include_second_moments = ign.include_second_moments = true;
  ign.strategy = CensoringStrategy::Ignored;
  const auto a = tada_point_estimate(data, target, adj);
  const auto b = tada_point_estimate(data, target, ign);
  REQUIRE(a.hr == b.hr);
  REQUIRE(a.diagnostics.no_censoring);
}

TEST_CASE("target equal to the source moments reproduces the unweighted fit", "[estimator]") {
  const auto data = simulated_source(21, false);
  const auto target = aggregate_covariates(data, data.size());
  AnalysisConfig c;
  c.truncation_cutoff = std::nullopt;
  const auto est = tada_point_estimate(data, target, c);
  const Selector trt[] = {Selector::treatment()};
  const auto fit = fit_cox(data, trt);
  REQUIRE(est.log_hr == Approx(fit.coefficients[0]).margin(1e-8));
  for (double z : est.diagnostics.zeta) REQUIRE(std::abs(z) < 1e-8);
  REQUIRE(est.diagnostics.effective_sample_size == Approx(static_cast<double>(data.size())).epsilon(1e-10));
}

TEST_CASE("weights and diagnostics", "[estimator]") {
  const auto data = simulated_source(31);
  const auto target = simulated_target(32);
  AnalysisConfig c;
  c.include_second_moments = true;
  const auto w = build_final_weights(data, &target, c);
  REQUIRE(w.censoring.has_value());
  REQUIRE(w.final.truncation().has_value());
  REQUIRE(*w.final.truncation()->cutoff == 0.95);
  REQUIRE(w.participation.converged);

  // weighted source means equal the target moments
  const auto& x = w.participation.centered_design;
  const Eigen::VectorXd pw = Eigen::Map<const Eigen::VectorXd>(w.participation.weights.data(), x.rows());
  REQUIRE((x.transpose() * pw).cwiseAbs().maxCoeff() / pw.sum() < 1e-8);

  const auto d = diagnose(w);
  REQUIRE(d.censoring_adjusted);
  REQUIRE(d.final.max <= d.raw.max);
  REQUIRE(d.final.max == Approx(d.truncation_threshold));
  REQUIRE(d.effective_sample_size > 0.0);
  REQUIRE(d.effective_sample_size <= static_cast<double>(data.size()));

  c.strategy = CensoringStrategy::Ignored;
  const auto wi = build_final_weights(data, &target, c);
  REQUIRE_FALSE(wi.censoring.has_value());
  REQUIRE(wi.final.all_rows_constant());
}

TEST_CASE("pipeline failures name their stage", "[estimator]") {
  const auto data = simulated_source(41);
  auto target = simulated_target(42);
  target.entries[2].mean = 50.0;
  try {
    tada_point_estimate(data, target, {});
    FAIL("expected PipelineError");
  } catch (const PipelineError& e) {
    REQUIRE(e.stage() == PipelineStage::ParticipationWeights);
    REQUIRE_THROWS_AS(std::rethrow_exception(e.cause()), InfeasibleMomentsError);
  }
  AnalysisConfig c;
  c.balance_covariates = {"nope"};
  try {
    tada_point_estimate(data, simulated_target(42), c);
    FAIL("expected PipelineError");
  } catch (const PipelineError& e) {
    REQUIRE(e.stage() == PipelineStage::BalanceSpec);
  }
}

TEST_CASE("bootstrap indices", "[estimator]") {
  const auto a = bootstrap_indices(50, 9, 3);
  REQUIRE(a == bootstrap_indices(50, 9, 3));
  REQUIRE(a != bootstrap_indices(50, 9, 4));
  for (auto i : a) REQUIRE(i < 50);
}

TEST_CASE("bootstrap with a single draw", "[estimator]") {
  const auto data = simulated_source(51);
  const auto target = simulated_target(52);
  AnalysisConfig c;
  c.bootstrap_B = 1;
  const auto est = bootstrap_transport(data, target, c);
  REQUIRE(est.bootstrap_draws.size() == 1);
  REQUIRE(est.ci_low == est.bootstrap_draws[0]);
  REQUIRE(est.ci_high == est.bootstrap_draws[0]);
  REQUIRE(est.bootstrap_se == 0.0);
  c.bootstrap_B = 0;
  REQUIRE_THROWS(bootstrap_transport(data, target, c));
}

TEST_CASE("bootstrap does not depend on the worker count", "[estimator][property]") {
  const auto data = simulated_source(61);
  const auto target = simulated_target(62);
  AnalysisConfig c;
  c.bootstrap_B = 40;
  c.include_second_moments = true;
  c.workers = 1;
  const auto one = bootstrap_transport(data, target, c);
  c.workers = 4;
  const auto four = bootstrap_transport(data, target, c);
  REQUIRE(one.bootstrap_draws == four.bootstrap_draws);
  REQUIRE(one.failed_draws == four.failed_draws);
  REQUIRE(one.ci_low == four.ci_low);
  REQUIRE(one.ci_low <= one.ci_high);
  REQUIRE(one.bootstrap_se > 0.0);
}

TEST_CASE("too many failed resamples raise BootstrapError", "[estimator]") {
  // a single treated event: resamples that miss it separate
  const std::vector<CovariateSpec> schema{{"x", CovariateKind::Continuous}};
  std::vector<SubjectRecord> recs{{"a", 1, true, true, {0.1}},   {"b", 2, false, true, {-0.4}},
                                  {"c", 3, false, true, {0.3}},  {"d", 4, false, true, {0.9}},
                                  {"e", 1.5, true, false, {-1}}, {"f", 2.5, true, false, {0.5}},
                                  {"g", 3.5, true, false, {1.2}}, {"h", 4.5, false, false, {-0.2}}};
  SurvivalDataset data(schema, recs);
  const TargetAggregate target{{{"x", CovariateKind::Continuous, 0.2, std::nullopt}}, 100};
  AnalysisConfig c;
  c.bootstrap_B = 50;
  c.strategy = CensoringStrategy::Ignored;
  try {
    bootstrap_transport(data, target, c);
    FAIL("expected BootstrapError");
  } catch (const BootstrapError& e) {
    REQUIRE(e.attempted() == 50);
    REQUIRE(e.failed() > 10);
  }
}

TEST_CASE("kaplan-meier adjustments", "[estimator]") {
  const auto data = simulated_source(71);
  const auto target = simulated_target(72);
  AnalysisConfig c;
  c.include_second_moments = true;
  const auto curves = km_adjusted_curves(data, &target, c);
  REQUIRE(curves.size() == 4);
  REQUIRE(curves[0].adjustment == KmAdjustment::Original);
  REQUIRE(curves[3].adjustment == KmAdjustment::FullyAdjusted);
  REQUIRE(curves[0].curve.survival == weighted_km(data).survival);
  for (const auto& a : curves) REQUIRE(a.curve.times == data.event_times());

  REQUIRE(km_adjusted_curves(data, nullptr, c).size() == 2);
  REQUIRE(km_adjusted_curves(data, &target, c, false).size() == 2);

  c.bootstrap_B = 20;
  const auto med = km_medians(data, &target, c);
  REQUIRE(med.size() == 4);
  REQUIRE(med[0].median == weighted_km(data).median);
  c.bootstrap_B = 0;
  for (const auto& m : km_medians(data, &target, c)) REQUIRE_FALSE(m.ci_low.has_value());
}
