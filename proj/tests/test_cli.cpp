// Copyright 2026 The krigmis Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"
#include "krigmis/study_io.hpp"
#include "test_util.hpp"

namespace krigmis {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "krigmis");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) { return read_text_file(p.string()); }

std::string write_json(const fs::path& dir, const std::string& name, const std::string& text) {
  const auto path = (dir / name).string();
  std::ofstream(path) << text;
  return path;
}

std::string sample_data(const fs::path& dir) {
  const auto design = lhs_maximin(25, 2, 4, 50);
  std::ostringstream csv;
  csv << "x1,x2,y\n";
  for (Eigen::Index i = 0; i < design.size(); ++i) {
    const double x = design.points(i, 0), z = design.points(i, 1);
    csv << format_double(x) << ',' << format_double(z) << ','
        << format_double(std::sin(5.0 * x) + 0.5 * z * z) << '\n';
  }
  return write_json(dir, "data.csv", csv.str());
}

const char* kRiskConfig = R"({
  "study": "variance_misspec", "n": 10, "d": 2, "n_p": 2, "n_t": 40, "seed": 5,
  "true_model": {"family": "matern", "lengths": 0.5, "shape": 1.5},
  "model": {"family": "matern", "lengths": 0.5, "shape": 1.5},
  "axis": "regularity", "values": [1.5]
})";

const char* kFunctionConfig = R"({
  "study": "enforced_lengths", "function": "ishigami", "n": 20, "n_p": 2, "n_t": 50, "seed": 2,
  "cases": [{"family": "exponential", "source": "fixed", "lengths": [1, 1, 1]}]
})";

TEST(CliDoe, SrsCsvIsDeterministic) {
  const auto dir = testing::temp_dir("cli_doe");
  const auto r = run_cli({"doe", "--kind", "srs", "--n", "3", "--d", "2", "--seed", "1",
                          "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(dir / "design.csv");
  EXPECT_EQ(csv.substr(0, 6), "x1,x2\n");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  ASSERT_EQ(run_cli({"doe", "--kind", "srs", "--n", "3", "--d", "2", "--seed", "1", "--out",
                     (dir / "again").string()}).code, 0);
  EXPECT_EQ(slurp(dir / "again" / "design.csv"), csv);
}

TEST(CliDoe, OneDimensionalSparseGrid) {
  const auto dir = testing::temp_dir("cli_grid");
  const auto r = run_cli({"doe", "--kind", "sparse_grid", "--d", "1", "--level", "2", "--out",
                          dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir / "design.csv"), "x1\n0.25\n0.5\n0.75\n");
  const json manifest = json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["command"], "doe");
  EXPECT_EQ(manifest["outputs"], json::array({"design.csv"}));
  EXPECT_TRUE(manifest.contains("version"));
  EXPECT_TRUE(manifest["wall_clock"].contains("elapsed_seconds"));
}

TEST(CliRiskStudy, SingleCellOutputs) {
  const auto dir = testing::temp_dir("cli_risk");
  const auto cfg = write_json(dir, "c.json", kRiskConfig);
  const auto r = run_cli({"risk-study", "--config", cfg, "--out", (dir / "o").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(dir / "o" / "results.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "axis,value,method,criterion,mean,std_error,successes,failures");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_TRUE(fs::exists(dir / "o" / "irtr.svg"));
  EXPECT_TRUE(fs::exists(dir / "o" / "ibtr.svg"));
  const json res = json::parse(slurp(dir / "o" / "results.json"));
  EXPECT_EQ(res["config"]["seed"], 5);
  EXPECT_EQ(res["cells"].size(), 1u);
}

TEST(CliRiskStudy, SeedOverrideIsRecorded) {
  const auto dir = testing::temp_dir("cli_seed");
  const auto cfg = write_json(dir, "c.json", kRiskConfig);
  ASSERT_EQ(run_cli({"risk-study", "--config", cfg, "--seed", "9", "--out", dir.string()}).code, 0);
  const json manifest = json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 9);
  EXPECT_EQ(manifest["config"]["seed"], 9);
}

TEST(CliRiskStudy, SchemaErrorsExitWithConfigCode) {
  const auto dir = testing::temp_dir("cli_schema");
  auto j = json::parse(kRiskConfig);
  j.erase("model");
  const auto cfg = write_json(dir, "c.json", j.dump());
  const auto r = run_cli({"risk-study", "--config", cfg, "--out", dir.string()});
  EXPECT_EQ(r.code, cli::kExitConfig);
  EXPECT_NE(r.err.find("/model"), std::string::npos) << r.err;

  const auto fcfg = write_json(dir, "f.json", kFunctionConfig);
  const auto wrong = run_cli({"risk-study", "--config", fcfg, "--out", dir.string()});
  EXPECT_EQ(wrong.code, cli::kExitConfig);
  EXPECT_NE(wrong.err.find("/study"), std::string::npos) << wrong.err;

  const auto bad_json = write_json(dir, "b.json", "{ \"study\": ");
  EXPECT_EQ(run_cli({"risk-study", "--config", bad_json, "--out", dir.string()}).code,
            cli::kExitConfig);
}

TEST(CliFunctionStudy, EnforcedLayout) {
  const auto dir = testing::temp_dir("cli_fn");
  const auto cfg = write_json(dir, "f.json", kFunctionConfig);
  const auto r = run_cli({"function-study", "--config", cfg, "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(dir / "results.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_NE(csv.find("ishigami,exponential,fixed,ML,"), std::string::npos);
  EXPECT_NE(csv.find("ishigami,exponential,fixed,CV,"), std::string::npos);
}

TEST(CliEstimate, PenaltyPlumbing) {
  const auto dir = testing::temp_dir("cli_est");
  const auto data = sample_data(dir);
  const auto cv = run_cli({"estimate", "--data", data, "--method", "cv", "--family", "gaussian",
                           "--starts", "3"});
  ASSERT_EQ(cv.code, 0) << cv.err;
  const json jc = json::parse(cv.out);
  EXPECT_EQ(jc["penalty_active"], true);
  EXPECT_EQ(jc["method"], "CV");
  const auto ml = run_cli({"estimate", "--data", data, "--method", "ml", "--family", "gaussian",
                           "--starts", "3"});
  ASSERT_EQ(ml.code, 0) << ml.err;
  EXPECT_EQ(json::parse(ml.out)["penalty_active"], false);
  const auto off = run_cli({"estimate", "--data", data, "--method", "cv", "--family", "gaussian",
                            "--starts", "3", "--penalty", "off"});
  EXPECT_EQ(json::parse(off.out)["penalty_active"], false);
}

TEST(CliEstimate, MissingColumnIsLineNumbered) {
  const auto dir = testing::temp_dir("cli_est_err");
  const auto data = write_json(dir, "d.csv", "x1,x2\n0.1,0.2\n0.3,0.4\n");
  const auto r = run_cli({"estimate", "--data", data, "--family", "exponential"});
  EXPECT_EQ(r.code, cli::kExitConfig);
  EXPECT_NE(r.err.find("line 1"), std::string::npos) << r.err;
}

TEST(CliEstimate, RecoversSimulatedLength) {
  const auto dir = testing::temp_dir("cli_est_sim");
  const auto design = srs(60, 1, 8);
  const auto model = CorrelationModel::matern({0.2}, 2.5);
  const auto state = fit(design, model);
  const Eigen::VectorXd y = testing::gaussian_sample(state.gamma(), 9);
  std::ostringstream csv;
  csv << "x1,y\n";
  for (Eigen::Index i = 0; i < 60; ++i) {
    csv << format_double(design.points(i, 0)) << ',' << format_double(y(i)) << '\n';
  }
  const auto data = write_json(dir, "sim.csv", csv.str());
  const auto r = run_cli({"estimate", "--data", data, "--family", "matern", "--method", "ml",
                          "--case", "i"});
  ASSERT_EQ(r.code, 0) << r.err;
  const double l = json::parse(r.out)["theta_hat"]["lengths"][0].get<double>();
  EXPECT_LE(std::abs(std::log(l / 0.2)), 0.5) << l;
}

TEST(CliReplay, ByteIdenticalOutputs) {
  const auto dir = testing::temp_dir("cli_replay");
  const auto rcfg = write_json(dir, "r.json", kRiskConfig);
  const auto fcfg = write_json(dir, "f.json", kFunctionConfig);
  const auto data = sample_data(dir);
  const std::vector<std::pair<std::string, std::vector<std::string>>> runs{
      {"doe", {"doe", "--kind", "lhs_maximin", "--n", "7", "--d", "3", "--seed", "4",
               "--candidates", "20"}},
      {"risk", {"risk-study", "--config", rcfg}},
      {"fn", {"function-study", "--config", fcfg}},
      {"est", {"estimate", "--data", data, "--family", "exponential", "--starts", "2"}}};
  for (const auto& [tag, args] : runs) {
    auto first = args;
    first.push_back("--out");
    first.push_back((dir / tag).string());
    ASSERT_EQ(run_cli(first).code, 0) << tag;
    const auto replayed = run_cli({"replay", "--manifest", (dir / tag / "manifest.json").string(),
                                   "--out", (dir / (tag + "_again")).string()});
    ASSERT_EQ(replayed.code, 0) << tag << replayed.err;
    const json manifest = json::parse(slurp(dir / tag / "manifest.json"));
    for (const auto& name : manifest["outputs"]) {
      const std::string n = name.get<std::string>();
      EXPECT_EQ(slurp(dir / tag / n), slurp(dir / (tag + "_again") / n)) << tag << " " << n;
    }
  }
}

TEST(CliArgs, ExitCodes) {
  EXPECT_EQ(run_cli({"--help"}).code, cli::kExitOk);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kExitConfig);
  EXPECT_EQ(run_cli({}).code, cli::kExitConfig);
  EXPECT_EQ(run_cli({"doe", "--kind", "hexagonal", "--n", "3", "--d", "2", "--out", "/tmp/x"}).code,
            cli::kExitConfig);
}

}  // namespace
}  // namespace krigmis
