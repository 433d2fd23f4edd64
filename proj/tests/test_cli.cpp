#include <catch_amalgamated.hpp>

#include <filesystem>
#include <json.hpp>
#include <map>
#include <sstream>

#include "tada/cli/cli.hpp"
#include "tada/io/config.hpp"
#include "tada/io/csv.hpp"
#include "tada/io/ipd.hpp"
#include "tada/simulation/generate.hpp"
#include "tada/survival/cox.hpp"

using namespace tada;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tada_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const fs::path kFixtures = TADA_FIXTURE_DIR;

std::string fixture(const char* name) { return (kFixtures / name).string(); }

// curve label -> (time, survival) rows
std::map<std::string, std::vector<std::pair<double, double>>> read_curves(const fs::path& path) {
  std::map<std::string, std::vector<std::pair<double, double>>> curves;
  for (const auto& row : read_csv(path).rows) curves[row[0]].emplace_back(std::stod(row[1]), std::stod(row[2]));
  return curves;
}

}  // namespace

TEST_CASE("fixture files regenerate from the simulator", "[cli]") {
  const auto cfg = ScenarioConfig::preset(1);
  REQUIRE(render_ipd(generate_study_ipd(cfg, 2024)) == read_text(kFixtures / "censored_ipd.csv"));
  REQUIRE(render_target_aggregate(generate_target(cfg, 2025).aggregate) == read_text(kFixtures / "target.json"));
}

TEST_CASE("usage errors", "[cli]") {
  REQUIRE(invoke({"--help"}).code == cli::kOk);
  REQUIRE(invoke({"analyze", "--help"}).code == cli::kOk);
  REQUIRE(invoke({}).code == cli::kUsage);
  REQUIRE(invoke({"frobnicate"}).code == cli::kUsage);
  REQUIRE(invoke({"analyze", "--ipd", fixture("censored_ipd.csv")}).code == cli::kUsage);
  const auto r = invoke({"simulate", "--scenarios", "11", "-R", "1", "-B", "1"});
  REQUIRE(r.code == cli::kUsage);
  REQUIRE(r.err.find("scenario") != std::string::npos);
  REQUIRE(invoke({"analyze", "--ipd", fixture("censored_ipd.csv"), "--target", fixture("target.json"), "--strategy",
               "sometimes"})
              .code == cli::kUsage);
  REQUIRE(invoke({"analyze", "--ipd", fixture("censored_ipd.csv"), "--target", fixture("target.json"), "--balance",
               "X9", "-B", "5"})
              .code == cli::kUsage);
}

TEST_CASE("input errors exit with the i/o code", "[cli]") {
  const auto missing = (fs::temp_directory_path() / "tada_no_such_target.json").string();
  auto r = invoke({"analyze", "--ipd", fixture("censored_ipd.csv"), "--target", missing});
  REQUIRE(r.code == cli::kIo);
  REQUIRE(r.err.find(missing) != std::string::npos);

  const auto dir = scratch_dir("bad_ipd");
  write_text(dir / "ipd.csv", "time,event,treatment,X1,X2,X3\n1.5,1,0,1,0,0.3\nNA,1,1,0,1,0.2\n");
  r = invoke({"analyze", "--ipd", (dir / "ipd.csv").string(), "--target", fixture("target.json")});
  REQUIRE(r.code == cli::kIo);
  REQUIRE(r.err.find("line 3") != std::string::npos);
  REQUIRE(r.err.find("time") != std::string::npos);

  write_text(dir / "target.json", R"({"target_n": 10, "covariates": [{"name": "X1", "kind": "binary", "mean": 2}]})");
  REQUIRE(invoke({"analyze", "--ipd", fixture("censored_ipd.csv"), "--target", (dir / "target.json").string()}).code ==
          cli::kIo);
}

TEST_CASE("analyze without censoring reproduces the unweighted Cox fit", "[cli]") {
  auto cfg = ScenarioConfig::preset(2);
  cfg.censor_scale = 0.0;
  const auto data = generate_study_ipd(cfg, 31);
  const auto dir = scratch_dir("nocens");
  write_ipd(data, dir / "ipd.csv");
  write_text(dir / "target.json", render_target_aggregate(aggregate_covariates(data, 500)));
  const auto r = invoke({"analyze", "--ipd", (dir / "ipd.csv").string(), "--target", (dir / "target.json").string(),
                      "--id-col", "id", "--truncation", "none", "-B", "5", "--out", (dir / "est.json").string()});
  REQUIRE(r.code == cli::kOk);
  REQUIRE(r.out.find("no censored records") != std::string::npos);
  const auto j = nlohmann::json::parse(read_text(dir / "est.json"));
  const Selector trt[] = {Selector::treatment()};
  const double hr = std::exp(fit_cox(data, trt).coefficients[0]);
  REQUIRE(j.at("hr").get<double>() == Catch::Approx(hr).epsilon(1e-5));
}

TEST_CASE("analyze distinguishes the censoring strategies", "[cli]") {
  auto cfg = ScenarioConfig::preset(1);
  cfg.source.sample = 2000;
  const auto dir = scratch_dir("strategies");
  write_ipd(generate_study_ipd(cfg, 4242), dir / "ipd.csv");
  std::vector<std::string> base{"analyze",  "--ipd", (dir / "ipd.csv").string(), "--target", fixture("target.json"),
                                "--second-moments", "-B", "10", "--seed", "3"};
  auto adj = base, ign = base;
  adj.insert(adj.end(), {"--strategy", "adjusted", "--out", (dir / "adj.csv").string()});
  ign.insert(ign.end(), {"--strategy", "ignored", "--out", (dir / "ign.csv").string()});
  REQUIRE(invoke(adj).code == cli::kOk);
  REQUIRE(invoke(ign).code == cli::kOk);
  const auto a = read_csv(dir / "adj.csv"), i = read_csv(dir / "ign.csv");
  REQUIRE(a.header == i.header);
  REQUIRE(a.rows[0] != i.rows[0]);
  REQUIRE(invoke(adj).out == invoke(adj).out);
}

TEST_CASE("pipeline failures map to exit codes", "[cli]") {
  const auto dir = scratch_dir("codes");
  write_text(dir / "far.json",
             R"({"target_n": 10, "covariates": [{"name": "X3", "kind": "continuous", "mean": 40, "sd": 1}]})");
  auto r = invoke({"analyze", "--ipd", fixture("censored_ipd.csv"), "--target", (dir / "far.json").string(), "-B", "5"});
  REQUIRE(r.code == cli::kInfeasibleMoments);

  write_text(dir / "tiny.csv",
             "time,event,treatment,x\n1,1,1,0.1\n2,0,1,-0.4\n3,0,1,0.3\n4,0,1,0.9\n1.5,1,0,-1\n2.5,1,0,0.5\n"
             "3.5,1,0,1.2\n4.5,0,0,-0.2\n");
  write_text(dir / "tiny.json",
             R"({"target_n": 10, "covariates": [{"name": "x", "kind": "continuous", "mean": 0.2}]})");
  r = invoke({"analyze", "--ipd", (dir / "tiny.csv").string(), "--target", (dir / "tiny.json").string(), "--strategy",
           "ignored", "-B", "50"});
  REQUIRE(r.code == cli::kBootstrapFailure);

  write_text(dir / "sep.csv", "time,event,treatment,x\n1,1,1,0\n2,1,1,1\n3,1,0,0\n4,1,0,1\n");
  r = invoke({"analyze", "--ipd", (dir / "sep.csv").string(), "--target", (dir / "tiny.json").string(), "-B", "5"});
  REQUIRE(r.code == cli::kCoxFailure);
}

TEST_CASE("km writes four curves that agree until the first censoring", "[cli]") {
  const auto dir = scratch_dir("km");
  const auto r = invoke({"km", "--ipd", fixture("censored_ipd.csv"), "--target", fixture("target.json"), "--id-col", "id",
                      "-B", "20", "--out", (dir / "curves.csv").string(), "--medians-out",
                      (dir / "medians.csv").string(), "--times", "1,2,5"});
  REQUIRE(r.code == cli::kOk);
  REQUIRE(r.out.find("median survival") != std::string::npos);
  const auto curves = read_curves(dir / "curves.csv");
  REQUIRE(curves.size() == 4);
  REQUIRE(read_csv(dir / "medians.csv").rows.size() == 4);

  IpdTableSpec spec;
  spec.id_column = "id";
  spec.covariates = simulation_schema();
  const auto data = read_ipd(fixture("censored_ipd.csv"), spec).dataset;
  const double first_censoring = data.censoring_times().front();
  const auto& orig = curves.at("Original");
  const auto& cens = curves.at("Original (with Censoring Adjusted)");
  REQUIRE(orig.size() == cens.size());
  bool differs_after = false;
  for (std::size_t k = 0; k < orig.size(); ++k) {
    REQUIRE(orig[k].first == cens[k].first);
    if (orig[k].first <= first_censoring) {
      REQUIRE(orig[k].second == cens[k].second);
    } else if (orig[k].second != cens[k].second) {
      differs_after = true;
    }
  }
  REQUIRE(differs_after);

  const auto two = invoke({"km", "--ipd", fixture("censored_ipd.csv"), "--target", fixture("target.json"), "-B", "0",
                        "--no-censoring-adjustment", "--out", (dir / "two.csv").string()});
  REQUIRE(two.code == cli::kOk);
  REQUIRE(read_curves(dir / "two.csv").size() == 2);
}

TEST_CASE("weights-diagnose", "[cli]") {
  const auto dir = scratch_dir("diag");
  const auto r = invoke({"weights-diagnose", "--ipd", fixture("censored_ipd.csv"), "--target", fixture("target.json"),
                      "--second-moments", "--bins", "12", "--out", (dir / "w.json").string()});
  REQUIRE(r.code == cli::kOk);
  REQUIRE(r.out.find("truncation thresholds") != std::string::npos);
  const auto j = nlohmann::json::parse(read_text(dir / "w.json"));
  REQUIRE(j.dump().find("q95") != std::string::npos);
}

TEST_CASE("simulate writes summaries", "[cli]") {
  const auto dir = scratch_dir("sim");
  auto r = invoke({"simulate", "--scenarios", "1,2", "-R", "2", "-B", "3", "--workers", "2", "--out-dir", dir.string(),
                "--replicates-out"});
  REQUIRE(r.code == cli::kOk);
  const auto summary = read_csv(dir / "summary.csv");
  REQUIRE(summary.rows.size() == 2);
  REQUIRE(summary.header.front() == "scenario");

  const auto first = read_text(dir / "summary.csv");
  r = invoke({"simulate", "--scenarios", "1,2", "-R", "2", "-B", "3", "--workers", "1", "--out-dir", dir.string()});
  REQUIRE(r.code == cli::kOk);
  REQUIRE(read_text(dir / "summary.csv") == first);

  r = invoke({"simulate", "--mode", "calibration", "--scenarios", "1", "--levels", "20,30", "-R", "5", "--out-dir",
           dir.string(), "--format", "json"});
  REQUIRE(r.code == cli::kOk);
  REQUIRE(nlohmann::json::parse(read_text(dir / "calibration.json")).size() == 2);
}
