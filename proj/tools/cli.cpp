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

#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>

#include "krigmis/doe.hpp"
#include "krigmis/error.hpp"
#include "krigmis/hyperopt.hpp"
#include "krigmis/study.hpp"
#include "krigmis/study_io.hpp"
#include "krigmis/svg.hpp"

namespace krigmis::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Output {
  std::string name;
  std::string text;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

// Writes the outputs into `dir` followed by a manifest describing the run.
void emit(const std::string& dir, const std::string& command, const json& config,
          std::uint64_t seed, const std::vector<Output>& outputs, const std::string& started,
          double seconds) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + dir + "': " + ec.message());
  json names = json::array();
  for (const auto& o : outputs) {
    write_text_file((fs::path(dir) / o.name).string(), o.text);
    names.push_back(o.name);
  }
  json manifest{{"command", command},
                {"config", config},
                {"seed", seed},
                {"version", KRIGMIS_VERSION},
                {"wall_clock", {{"started_utc", started}, {"elapsed_seconds", seconds}}},
                {"threads", omp_get_max_threads()},
                {"outputs", names}};
  write_text_file((fs::path(dir) / "manifest.json").string(), dump_json(manifest));
}

// A resolved command: its config, seed and a function producing the outputs.
struct Job {
  std::string command;
  json config;
  std::uint64_t seed = 0;
  std::function<std::vector<Output>()> produce;
};

void run_job(const Job& job, const std::string& dir, std::ostream& out) {
  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  const auto outputs = job.produce();
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(dir, job.command, job.config, job.seed, outputs, started, seconds);
  out << "wrote";
  for (const auto& o : outputs) out << ' ' << (fs::path(dir) / o.name).string();
  out << ' ' << (fs::path(dir) / "manifest.json").string() << '\n';
}

// ---- doe ------------------------------------------------------------------

struct DoeArgs {
  std::string kind = "lhs_maximin";
  std::int64_t n = 0;
  std::int64_t d = 0;
  std::uint64_t seed = 0;
  int level = 0;
  std::uint64_t candidates = 1000;
};

json doe_config(const DoeArgs& a) {
  return {{"kind", a.kind}, {"n", a.n}, {"d", a.d}, {"seed", a.seed},
          {"level", a.level}, {"candidates", a.candidates}};
}

DoeArgs doe_from_json(const json& j) {
  DoeArgs a;
  try {
    a.kind = j.at("kind").get<std::string>();
    a.n = j.at("n").get<std::int64_t>();
    a.d = j.at("d").get<std::int64_t>();
    a.seed = j.at("seed").get<std::uint64_t>();
    a.level = j.at("level").get<int>();
    a.candidates = j.at("candidates").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError("/config", e.what());
  }
  return a;
}

Job doe_job(DoeArgs a) {
  const DesignKind kind = parse_design_kind(a.kind);
  if (a.d < 1) throw ConfigError("/d", "must be at least 1");
  if (kind == DesignKind::SparseGrid) {
    if (a.level < 1 && a.n < 1) throw ConfigError("/level", "sparse grids need --level or --n");
    if (a.level < 1) {
      a.level = sparse_grid_level_for(static_cast<std::size_t>(a.n), static_cast<int>(a.d));
    }
    a.n = static_cast<std::int64_t>(sparse_grid_size({a.level, static_cast<int>(a.d)}));
  } else if (a.n < 1) {
    throw ConfigError("/n", "must be at least 1");
  }
  Job job{"doe", doe_config(a), a.seed, {}};
  job.produce = [a, kind]() {
    Design design;
    switch (kind) {
      case DesignKind::SRS:
        design = srs(a.n, a.d, a.seed);
        break;
      case DesignKind::LHSMaximin:
        design = lhs_maximin(a.n, a.d, a.seed, a.candidates);
        break;
      default:
        design = sparse_grid({a.level, static_cast<int>(a.d)});
        break;
    }
    return std::vector<Output>{{"design.csv", design_csv(design)}};
  };
  return job;
}

// ---- studies --------------------------------------------------------------

LineChart panel(const StudyResult& result, const std::string& criterion) {
  LineChart chart;
  const bool sweep_n = result.config.study == StudyKind::VarianceSampleSize;
  chart.x_label = sweep_n ? "n" : std::string(to_string(result.config.axis));
  chart.y_label = criterion;
  chart.title = criterion + " vs " + chart.x_label;
  for (Method m : {Method::ML, Method::CV}) {
    Series s;
    s.name = to_string(m);
    for (std::size_t c = 0; c < result.cells.size(); ++c) {
      s.x.push_back(result.cells[c].value);
      s.y.push_back(result.stat(c, m, criterion).mean);
    }
    chart.series.push_back(std::move(s));
  }
  return chart;
}

Job study_job(const std::string& command, const StudyConfig& config) {
  const bool fn = config.study == StudyKind::FunctionStudy ||
                  config.study == StudyKind::EnforcedLengths;
  if (command == "risk-study" && fn) {
    throw ConfigError("/study", "risk-study needs a variance study config");
  }
  if (command == "function-study" && !fn) {
    throw ConfigError("/study", "function-study needs a function study config");
  }
  Job job{command, study_config_json(config), config.master_seed, {}};
  job.produce = [config, fn]() {
    const StudyResult result = run_study(config);
    std::vector<Output> outputs;
    outputs.push_back({"results.csv", fn ? function_csv(result) : variance_csv(result)});
    outputs.push_back({"results.json", dump_json(study_result_json(result))});
    if (!fn) {
      const bool sweep_n = config.study == StudyKind::VarianceSampleSize;
      for (const char* crit : sweep_n ? std::vector<const char*>{"rtr", "btr"}
                                      : std::vector<const char*>{"irtr", "ibtr"}) {
        outputs.push_back({std::string(crit) + ".svg", render_svg(panel(result, crit))});
      }
    }
    return outputs;
  };
  return job;
}

// ---- estimate -------------------------------------------------------------

struct EstimateArgs {
  std::string data;
  std::string family = "gaussian";
  std::string length_case = "a";
  std::string method = "ml";
  OptimizerConfig optimizer{};
  double nugget = 1e-8;
  std::string penalty = "auto";
  double length_min = 0.05;
  double length_max = 5.0;
  double nu_min = 0.5;
  double nu_max = 5.0;
};

Method parse_method(const std::string& text) {
  if (text == "ml" || text == "ML") return Method::ML;
  if (text == "cv" || text == "CV") return Method::CV;
  throw ConfigError("/method", "unknown method '" + text + "' (expected ml or cv)");
}

json estimate_config(const EstimateArgs& a) {
  OptimizerConfig opt = a.optimizer;
  opt.nugget = Nugget(a.nugget);
  opt.penalty = parse_penalty_mode(a.penalty);
  return {{"data", a.data},
          {"family", a.family},
          {"case", a.length_case},
          {"method", a.method},
          {"length_bounds", {a.length_min, a.length_max}},
          {"nu_bounds", {a.nu_min, a.nu_max}},
          {"optimizer", optimizer_json(opt)}};
}

EstimateArgs estimate_from_json(const json& j) {
  EstimateArgs a;
  try {
    a.data = j.at("data").get<std::string>();
    a.family = j.at("family").get<std::string>();
    a.length_case = j.at("case").get<std::string>();
    a.method = j.at("method").get<std::string>();
    a.length_min = j.at("length_bounds").at(0).get<double>();
    a.length_max = j.at("length_bounds").at(1).get<double>();
    a.nu_min = j.at("nu_bounds").at(0).get<double>();
    a.nu_max = j.at("nu_bounds").at(1).get<double>();
  } catch (const json::exception& e) {
    throw ConfigError("/config", e.what());
  }
  a.optimizer = parse_optimizer(j.at("optimizer"), "/config/optimizer");
  a.nugget = a.optimizer.nugget.tau2;
  a.penalty = to_string(a.optimizer.penalty);
  return a;
}

Job estimate_job(EstimateArgs a) {
  const Method method = parse_method(a.method);
  StudyFamily family;
  try {
    family = parse_study_family(a.family);
  } catch (const InputError& e) {
    throw ConfigError("/family", e.what());
  }
  if (a.length_case != "i" && a.length_case != "a") {
    throw ConfigError("/case", "unknown case '" + a.length_case + "' (expected i or a)");
  }
  try {
    a.optimizer.penalty = parse_penalty_mode(a.penalty);
    a.optimizer.nugget = Nugget(a.nugget);
  } catch (const InputError& e) {
    throw ConfigError("/optimizer", e.what());
  }
  if (a.optimizer.starts < 1) throw ConfigError("/optimizer/starts", "need at least one start");
  if (!(a.length_min > 0.0 && a.length_min < a.length_max)) {
    throw ConfigError("/length_bounds", "need 0 < min < max");
  }
  if (!(a.nu_min > 0.0 && a.nu_min < a.nu_max)) {
    throw ConfigError("/nu_bounds", "need 0 < min < max");
  }
  a.data = fs::absolute(a.data).lexically_normal().string();
  Job job{"estimate", estimate_config(a), a.optimizer.seed, {}};
  job.produce = [a, method, family]() {
    const DataSet data = read_data_csv(a.data);
    FunctionCase fc;
    fc.family = family;
    fc.length_mode = a.length_case == "i" ? LengthMode::Isotropic : LengthMode::Anisotropic;
    auto space = space_for(fc, data.design.dim());
    space.log_length_bounds = {std::log(a.length_min), std::log(a.length_max)};
    if (space.shape_free()) space.shape_bounds = Interval{a.nu_min, a.nu_max};
    const auto result = estimate(method, data.design, data.y, space, a.optimizer);
    return std::vector<Output>{{"estimate.json", dump_json(estimation_json(result))}};
  };
  return job;
}

// ---- replay ---------------------------------------------------------------

Job job_from_manifest(const std::string& path) {
  json manifest;
  try {
    manifest = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("/", std::string("malformed manifest: ") + e.what());
  }
  if (!manifest.is_object() || !manifest.contains("command") || !manifest.contains("config")) {
    throw ConfigError("/", "manifest needs command and config");
  }
  const std::string command = manifest["command"].get<std::string>();
  const json& config = manifest["config"];
  if (command == "doe") return doe_job(doe_from_json(config));
  if (command == "estimate") return estimate_job(estimate_from_json(config));
  if (command == "risk-study" || command == "function-study") {
    return study_job(command, parse_study_config(config, Scale::Desk));
  }
  throw ConfigError("/command", "unknown command '" + command + "'");
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InputError*>(&e)) {
    return kExitConfig;
  }
  if (dynamic_cast<const Error*>(&e)) return kExitNumerical;
  return 1;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kriging covariance misspecification lab: ML versus CV variance estimation"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Cap on OpenMP worker threads (0: runtime default)")
      ->check(CLI::NonNegativeNumber);
  app.set_version_flag("--version", KRIGMIS_VERSION);

  std::function<Job()> make;
  std::string out_dir;
  bool out_required = true;

  DoeArgs doe;
  auto* doe_cmd = app.add_subcommand("doe", "Write a design of experiments as CSV");
  doe_cmd->add_option("--kind", doe.kind, "srs, lhs_maximin or sparse_grid")->capture_default_str();
  doe_cmd->add_option("--n", doe.n, "Number of points (sparse grid: target size)");
  doe_cmd->add_option("--d", doe.d, "Dimension")->required();
  doe_cmd->add_option("--seed", doe.seed, "Master seed");
  doe_cmd->add_option("--level", doe.level, "Sparse grid level");
  doe_cmd->add_option("--candidates", doe.candidates, "LHS-Maximin candidates")
      ->capture_default_str();
  doe_cmd->add_option("--out", out_dir, "Output directory")->required();
  doe_cmd->callback([&]() { make = [&]() { return doe_job(doe); }; });

  std::string config_path;
  std::string scale = "desk";
  std::optional<std::uint64_t> seed_override;
  const auto add_study = [&](const std::string& name, const std::string& help) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("--config", config_path, "Study config (JSON)")->required();
    cmd->add_option("--out", out_dir, "Output directory")->required();
    cmd->add_option("--seed", seed_override, "Override the config master seed");
    cmd->add_option("--scale", scale, "Defaults for n_p and n_t: desk or paper")
        ->check(CLI::IsMember({"desk", "paper"}))
        ->capture_default_str();
    cmd->callback([&, name]() {
      make = [&, name]() {
        StudyConfig config = load_study_config(config_path, parse_scale(scale));
        if (seed_override) config.master_seed = *seed_override;
        return study_job(name, config);
      };
    });
  };
  add_study("risk-study", "Predictive-variance risk study (IRTR/IBTR or RTR/BTR)");
  add_study("function-study", "MSE and PVA study on an analytical function");

  EstimateArgs est;
  auto* est_cmd = app.add_subcommand("estimate", "Estimate hyper-parameters from (X, y) CSV");
  est_cmd->add_option("--data", est.data, "CSV with columns x1..xd and y")->required();
  est_cmd->add_option("--family", est.family, "exponential, gaussian or matern")
      ->capture_default_str();
  est_cmd->add_option("--case", est.length_case, "i (isotropic) or a (anisotropic)")
      ->capture_default_str();
  est_cmd->add_option("--method", est.method, "ml or cv")->capture_default_str();
  est_cmd->add_option("--starts", est.optimizer.starts, "Optimizer starts")->capture_default_str();
  est_cmd->add_option("--max-iterations", est.optimizer.max_iterations, "BFGS iterations per start")
      ->capture_default_str();
  est_cmd->add_option("--tolerance", est.optimizer.tolerance, "Relative gradient tolerance")
      ->capture_default_str();
  est_cmd->add_option("--penalty", est.penalty, "CV penalty: auto, on or off")
      ->capture_default_str();
  est_cmd->add_option("--seed", est.optimizer.seed, "Seed of the start design");
  est_cmd->add_option("--candidates", est.optimizer.start_candidates,
                      "LHS-Maximin candidates for the starts")
      ->capture_default_str();
  est_cmd->add_option("--nugget", est.nugget, "Initial nugget tau2")->capture_default_str();
  est_cmd->add_option("--length-min", est.length_min, "Lower bound of every correlation length")
      ->capture_default_str();
  est_cmd->add_option("--length-max", est.length_max, "Upper bound of every correlation length")
      ->capture_default_str();
  est_cmd->add_option("--nu-min", est.nu_min, "Lower bound of the Matern nu")->capture_default_str();
  est_cmd->add_option("--nu-max", est.nu_max, "Upper bound of the Matern nu")->capture_default_str();
  est_cmd->add_option("--out", out_dir, "Output directory (JSON and manifest)");
  est_cmd->callback([&]() {
    out_required = !out_dir.empty();
    make = [&]() { return estimate_job(est); };
  });

  std::string manifest_path;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a command from its manifest");
  replay_cmd->add_option("--manifest", manifest_path, "manifest.json of a previous run")
      ->required()
      ->check(CLI::ExistingFile);
  replay_cmd->add_option("--out", out_dir, "Output directory (default: the manifest's)");
  replay_cmd->callback([&]() {
    if (out_dir.empty()) out_dir = fs::path(manifest_path).parent_path().string();
    if (out_dir.empty()) out_dir = ".";
    make = [&]() { return job_from_manifest(manifest_path); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (threads > 0) omp_set_num_threads(threads);
    const Job job = make();
    if (job.command == "estimate" && !out_required) {
      out << job.produce().front().text;
      return kExitOk;
    }
    run_job(job, out_dir, out);
    if (job.command == "estimate") {
      out << read_text_file((fs::path(out_dir) / "estimate.json").string());
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace krigmis::cli
