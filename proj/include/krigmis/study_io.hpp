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

#pragma once

#include <string>

#include <json.hpp>

#include "krigmis/doe.hpp"
#include "krigmis/hyperopt.hpp"
#include "krigmis/study.hpp"

namespace krigmis {

/// Replication defaults for fields a config leaves out.
enum class Scale { Desk, Paper };

const char* to_string(Scale scale);
Scale parse_scale(const std::string& text);

/// Shortest decimal string that parses back to `value`; "nan", "inf", "-inf"
/// for non-finite values.
std::string format_double(double value);

/// Parses a study config. Missing n_p / n_t take the defaults of `scale`.
/// Throws ConfigError naming the JSON pointer of the offending field.
StudyConfig parse_study_config(const nlohmann::json& j, Scale scale);

/// Reads and parses a JSON config file.
StudyConfig load_study_config(const std::string& path, Scale scale);

/// Fully resolved config; parse_study_config(study_config_json(c), s) == c.
nlohmann::json study_config_json(const StudyConfig& config);

DesignKind parse_design_kind(const std::string& text);
PenaltyMode parse_penalty_mode(const std::string& text);
const char* to_string(PenaltyMode mode);
StudyFamily parse_study_family(const std::string& text);

nlohmann::json optimizer_json(const OptimizerConfig& config);
OptimizerConfig parse_optimizer(const nlohmann::json& j, const std::string& path);

/// Header `x1,...,xd`, one row per point, 17 significant digits.
std::string design_csv(const Design& design);

/// `axis,value,method,criterion,mean,std_error,successes,failures`.
std::string variance_csv(const StudyResult& result);

/// `function,family,case,method,mse_mean,mse_std_error,pva_mean,pva_std_error,successes,failures`.
std::string function_csv(const StudyResult& result);

/// Config, per-cell statistics with replicate values, and failures.
nlohmann::json study_result_json(const StudyResult& result);

struct DataSet {
  Design design;
  Eigen::VectorXd y;
};

/// Reads a CSV with a header naming columns `x1..xd` and `y` in any order.
/// Throws InputError carrying the 1-based line number of malformed rows.
DataSet read_data_csv(const std::string& path);

nlohmann::json estimation_json(const EstimationResult& result);

/// Writes `text` to `path`; throws InputError when the file cannot be written.
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

/// nlohmann dump with two-space indent and a trailing newline.
std::string dump_json(const nlohmann::json& j);

}  // namespace krigmis
