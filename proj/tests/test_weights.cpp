#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tada/errors.hpp"
#include "tada/weights/balance.hpp"
#include "tada/weights/censoring.hpp"
#include "tada/weights/final_weights.hpp"
#include "tada/weights/participation.hpp"
#include "tada/weights/target_aggregate.hpp"

using Catch::Approx;
using namespace tada;

namespace {

std::vector<CovariateSpec> schema2() {
  return {{"b", CovariateKind::Binary}, {"c", CovariateKind::Continuous}};
}

SurvivalDataset two_cov(const std::vector<double>& b, const std::vector<double>& c) {
  std::vector<SubjectRecord> recs;
  for (std::size_t i = 0; i < b.size(); ++i)
    recs.push_back({"s" + std::to_string(i), 1.0 + static_cast<double>(i), true, i % 2 == 0, {b[i], c[i]}});
  return SurvivalDataset(schema2(), recs);
}

TargetAggregate target2(double pb, double mc, std::optional<double> sd) {
  return {{{"b", CovariateKind::Binary, pb, std::nullopt}, {"c", CovariateKind::Continuous, mc, sd}}, 100};
}

Eigen::MatrixXd column(std::initializer_list<double> v) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double d : v) x(i++, 0) = d;
  return x;
}

}  // namespace

TEST_CASE("target aggregate validation", "[weights]") {
  REQUIRE_NOTHROW(target2(0.4, 0.0, 1.0).validate());
  REQUIRE_THROWS_AS(target2(1.2, 0.0, 1.0).validate(), ValidationError);
  REQUIRE_THROWS_AS(target2(0.4, 0.0, -1.0).validate(), ValidationError);
  auto t = target2(0.4, 0.0, 1.0);
  t.target_n = 0;
  REQUIRE_THROWS_AS(t.validate(), ValidationError);
  t = target2(0.4, 0.0, 1.0);
  t.entries[1].name = "b";
  REQUIRE_THROWS_AS(t.validate(), ValidationError);
}

TEST_CASE("aggregate_covariates uses the n-1 standard deviation", "[weights]") {
  const auto d = two_cov({0, 1, 1, 0}, {1, 2, 3, 4});
  const auto a = aggregate_covariates(d, 4);
  REQUIRE(a.entries[0].mean == 0.5);
  REQUIRE_FALSE(a.entries[0].sd.has_value());
  REQUIRE(a.entries[1].mean == 2.5);
  REQUIRE(*a.entries[1].sd == Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-15));
}

TEST_CASE("balance spec", "[weights]") {
  const auto s = schema2();
  SECTION("second moments add a function for continuous covariates only") {
    REQUIRE(build_balance_spec(s, target2(0.4, 0.0, 1.0), true).functions.size() == 3);
    REQUIRE(build_balance_spec(s, target2(0.4, 0.0, 1.0), false).functions.size() == 2);
  }
  SECTION("second moment without sd") {
    REQUIRE_THROWS_AS(build_balance_spec(s, target2(0.4, 0.0, std::nullopt), true), ValidationError);
  }
  SECTION("kind mismatch") {
    auto t = target2(0.4, 0.0, 1.0);
    t.entries[0].kind = CovariateKind::Continuous;
    REQUIRE_THROWS_AS(build_balance_spec(s, t, false), ValidationError);
  }
  SECTION("unknown covariate") {
    const std::string names[] = {"zz"};
    REQUIRE_THROWS_AS(build_balance_spec(s, target2(0.4, 0.0, 1.0), false, names), ValidationError);
  }
  SECTION("centered design arithmetic") {
    const auto d = two_cov({0, 1, 1, 0}, {1.0, 2.0, 0.0, 3.0});
    const auto spec = build_balance_spec(s, target2(0.75, 1.0, 1.0), true);
    const auto x = center_design(d, spec);
    REQUIRE(x.rows() == 4);
    REQUIRE(x.cols() == 3);
    REQUIRE(x(0, 0) == -0.75);
    REQUIRE(x(1, 0) == 0.25);
    REQUIRE(x(3, 1) == 2.0);
    // (3 - 1)^2 - 1
    REQUIRE(x(3, 2) == 3.0);
    // (1 - 1)^2 - 1
    REQUIRE(x(0, 2) == -1.0);
  }
}

TEST_CASE("method-of-moments weights", "[weights]") {
  SECTION("target equal to the source mean gives zeta = 0") {
    const auto w = solve_mom_weights(column({-0.5, 0.5}));
    REQUIRE(w.converged);
    REQUIRE(std::abs(w.zeta[0]) < 1e-12);
    REQUIRE(w.weights[0] == Approx(1.0).epsilon(1e-12));
  }
  SECTION("two-point closed form") {
    const auto w = solve_mom_weights(column({-0.75, 0.25}));
    REQUIRE(w.converged);
    REQUIRE(w.zeta[0] == Approx(std::log(3.0)).epsilon(1e-10));
    REQUIRE(w.weights[0] == Approx(std::pow(3.0, -0.75)).epsilon(1e-10));
    REQUIRE(w.weights[1] == Approx(std::pow(3.0, 0.25)).epsilon(1e-10));
  }
  SECTION("target outside the hull is infeasible") {
    try {
      solve_mom_weights(column({-1.2, -0.2}));
      FAIL("expected InfeasibleMomentsError");
    } catch (const InfeasibleMomentsError& e) {
      REQUIRE(e.components() == std::vector<std::size_t>{0});
    }
  }
  SECTION("duplicate columns are rank deficient") {
    Eigen::MatrixXd x(3, 2);
    x << -1, -1, 0.5, 0.5, 1, 1;
    REQUIRE_THROWS_AS(solve_mom_weights(x), RankDeficiencyError);
  }
  SECTION("constant-zero column is pinned") {
    Eigen::MatrixXd x(3, 2);
    x << -1, 0, 0.5, 0, 1, 0;
    const auto w = solve_mom_weights(x);
    REQUIRE(w.zeta[1] == 0.0);
  }
}

TEST_CASE("method-of-moments solution is unique across starting points", "[weights][property]") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nz(0, 1);
  std::uniform_real_distribution<double> start(-1.5, 1.5);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::MatrixXd x(50, 3);
    for (int i = 0; i < 50; ++i)
      for (int k = 0; k < 3; ++k) x(i, k) = nz(gen) - 0.2 * (k + 1);
    const auto ref = solve_mom_weights(x);
    REQUIRE(ref.converged);
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(ref.weights.data(), 50);
    REQUIRE((x.transpose() * w).cwiseAbs().maxCoeff() / w.sum() < 1e-8);
    for (int s = 0; s < 10; ++s) {
      const double z0[] = {start(gen), start(gen), start(gen)};
      const auto alt = solve_mom_weights(x, {}, z0);
      for (int k = 0; k < 3; ++k) REQUIRE(std::abs(alt.zeta[k] - ref.zeta[k]) < 1e-6);
    }
  }
}

TEST_CASE("method-of-moments agrees with a grid minimizer", "[weights][property]") {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> nz(0, 1);
  for (int rep = 0; rep < 5; ++rep) {
    Eigen::MatrixXd x(30, 2);
    std::vector<std::vector<double>> rows(30, std::vector<double>(2));
    for (int i = 0; i < 30; ++i)
      for (int k = 0; k < 2; ++k) rows[i][k] = x(i, k) = nz(gen) + 0.3;
    const auto w = solve_mom_weights(x);
    const auto g = oracle::mom_grid_minimize(rows, 2);
    for (int k = 0; k < 2; ++k) REQUIRE(std::abs(w.zeta[k] - g[k]) < 1e-6);
    REQUIRE(mom_log_objective(x, w.zeta) == Approx(std::log(oracle::mom_q(rows, g))).epsilon(1e-12));
  }
}

TEST_CASE("censoring weights", "[weights]") {
  const std::vector<CovariateSpec> schema;
  const Selector design[] = {Selector::treatment()};
  SECTION("no censored records gives unit weights") {
    SurvivalDataset d(schema, {{"a", 1, true, true, {}}, {"b", 2, true, false, {}}, {"c", 3, true, true, {}}});
    const auto c = fit_censoring_weights(d, design);
    REQUIRE(c.no_censoring);
    REQUIRE_FALSE(c.model.has_value());
    for (double v : c.weights.pooled()) REQUIRE(v == 1.0);
  }
  SECTION("single censoring jump with no covariates") {
    // censoring at t=1 among n=5 at risk; H_c = 1/5 from then on
    SurvivalDataset d(schema, {{"a", 1, false, false, {}},
                               {"b", 2, true, false, {}},
                               {"c", 3, true, false, {}},
                               {"d", 4, true, false, {}},
                               {"e", 5, true, false, {}}});
    const auto c = fit_censoring_weights(d, {});
    REQUIRE(c.weights.grid() == std::vector<double>{2, 3, 4, 5});
    for (double v : c.weights.pooled()) REQUIRE(v == Approx(std::exp(0.2)).epsilon(1e-14));
  }
  SECTION("a subject's own censoring jump is excluded") {
    SurvivalDataset d(schema, {{"a", 1, true, false, {}}, {"b", 2, false, true, {}}, {"c", 2, true, false, {}},
                               {"d", 3, true, true, {}}});
    const auto c = fit_censoring_weights(d, {});
    REQUIRE(c.weights.row(1).size() == 2);
    REQUIRE(c.weights.row(1)[1] == 1.0);
    REQUIRE(c.weights.row(3)[2] == Approx(std::exp(1.0 / 3.0)).epsilon(1e-14));
  }
}

TEST_CASE("censoring weights are at least one and non-decreasing in time", "[weights][property]") {
  std::mt19937_64 gen(9);
  std::exponential_distribution<double> ex(1.0);
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> nz(0, 1);
  const std::vector<CovariateSpec> schema{{"x", CovariateKind::Continuous}};
  const Selector design[] = {Selector::treatment(), Selector::covariate("x")};
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<SubjectRecord> recs;
    for (int i = 0; i < 80; ++i) {
      const double t = ex(gen), c = 2.0 * ex(gen);
      recs.push_back({std::to_string(i), std::min(t, c), t <= c, coin(gen), {nz(gen)}});
    }
    SurvivalDataset d(schema, recs);
    const auto c = fit_censoring_weights(d, design);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto row = c.weights.row(i);
      for (std::size_t k = 0; k < row.size(); ++k) {
        REQUIRE(row[k] >= 1.0);
        if (k) REQUIRE(row[k] >= row[k - 1]);
      }
    }
  }
}

TEST_CASE("final weight assembly and truncation", "[weights][property]") {
  const std::vector<CovariateSpec> schema;
  SurvivalDataset d(schema, {{"a", 1, true, false, {}}, {"b", 2, false, true, {}}, {"c", 3, true, true, {}}});
  const auto unit = TimeVaryingWeights::unit(d);

  SECTION("combine multiplies row-wise") {
    ParticipationWeights p;
    p.weights = {2.0, 3.0, 5.0};
    const auto cw = unit.with_values({1.0, 1.5, 1.0, 2.0});
    const auto f = combine_final_weights(p, cw);
    REQUIRE(std::vector<double>(f.pooled().begin(), f.pooled().end()) == std::vector<double>{2, 4.5, 5, 10});
  }
  SECTION("no truncation is the identity and records it") {
    const auto w = unit.with_values({1, 2, 3, 4});
    const auto t = truncate_weights(w, std::nullopt);
    REQUIRE(std::vector<double>(t.pooled().begin(), t.pooled().end()) == std::vector<double>{1, 2, 3, 4});
    REQUIRE(t.truncation().has_value());
    REQUIRE(std::isinf(t.truncation()->threshold));
    REQUIRE_THROWS_AS(truncate_weights(t, 0.9), std::logic_error);
  }
  SECTION("equal weights are unchanged at every cutoff") {
    const auto w = unit.with_values({2, 2, 2, 2});
    for (double q : {0.5, 0.8, 0.99}) {
      const auto t = truncate_weights(w, q);
      for (double v : t.pooled()) REQUIRE(v == 2.0);
    }
  }
  SECTION("cap applies at the pooled type-7 quantile") {
    const auto w = unit.with_values({1, 2, 4, 3});
    const auto t = truncate_weights(w, 0.9);
    REQUIRE(t.truncation()->threshold == Approx(3.7));
    REQUIRE(t.pooled()[2] == Approx(3.7));
    REQUIRE(t.pooled()[3] == 3.0);
  }
  REQUIRE_THROWS_AS(truncate_weights(unit, 0.0), ValidationError);
}

TEST_CASE("type-7 quantile", "[weights]") {
  std::vector<double> v(100);
  for (int i = 0; i < 100; ++i) v[i] = 100.0 - i;
  REQUIRE(quantile_type7(v, 0.95) == Approx(95.05).epsilon(1e-14));
  REQUIRE(quantile_type7(v, 0.0) == 1.0);
  REQUIRE(quantile_type7(v, 1.0) == 100.0);
  std::mt19937_64 gen(2);
  std::lognormal_distribution<double> ln(0, 1);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> x(1 + rep * 7);
    for (auto& e : x) e = ln(gen);
    for (double q : {0.1, 0.5, 0.9, 0.95, 0.99}) REQUIRE(quantile_type7(x, q) == oracle::quantile_sorted(x, q));
  }
}

TEST_CASE("truncation is ordered in the cutoff", "[weights][property]") {
  std::mt19937_64 gen(12);
  std::lognormal_distribution<double> ln(0, 1.2);
  const std::vector<CovariateSpec> schema;
  std::vector<SubjectRecord> recs;
  for (int i = 0; i < 40; ++i) recs.push_back({std::to_string(i), 1.0 + i, i % 3 != 0, i % 2 == 0, {}});
  SurvivalDataset d(schema, recs);
  const auto unit = TimeVaryingWeights::unit(d);
  std::vector<double> v(unit.pooled().size());
  for (auto& x : v) x = ln(gen);
  const auto w = unit.with_values(v);
  const double cuts[] = {0.5, 0.8, 0.9, 0.95, 0.99};
  std::vector<TimeVaryingWeights> t;
  for (double q : cuts) t.push_back(truncate_weights(w, q));
  for (std::size_t k = 0; k < v.size(); ++k) {
    for (std::size_t c = 0; c < t.size(); ++c) {
      REQUIRE(t[c].pooled()[k] <= v[k]);
      if (c) REQUIRE(t[c].pooled()[k] >= t[c - 1].pooled()[k]);
    }
  }
}
