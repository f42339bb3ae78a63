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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "krigmis/corr.hpp"
#include "krigmis/doe.hpp"
#include "krigmis/hyperopt.hpp"
#include "krigmis/varest.hpp"

namespace krigmis {

enum class StudyKind { VarianceMisspec, VarianceSampleSize, FunctionStudy, EnforcedLengths };

const char* to_string(StudyKind kind);

/// Parameter of the model R2 swept by a misspecification study.
enum class MisspecAxis { Exponent, Regularity, Length };

const char* to_string(MisspecAxis axis);

enum class TestFunction { Ishigami, Morris };

const char* to_string(TestFunction fn);
Eigen::Index dimension_of(TestFunction fn);
double evaluate(TestFunction fn, std::span<const double> x);

/// Correlation family of a function-study row.
enum class StudyFamily { Exponential, Gaussian, Matern };

const char* to_string(StudyFamily family);

/// How a function-study row obtains its correlation lengths.
enum class LengthSource {
  Estimated,   // estimated per replicate by each method
  Fixed,       // lengths given in the config
  WellChosen,  // min-MSE estimate over an auxiliary set of designs
};

const char* to_string(LengthSource source);

struct FunctionCase {
  StudyFamily family = StudyFamily::Exponential;
  LengthMode length_mode = LengthMode::Anisotropic;
  LengthSource source = LengthSource::Estimated;
  std::vector<double> lengths;  // Fixed only
  double nu = 2.5;              // Matern with enforced lengths only

  /// "i"/"a" for estimated rows, "fixed"/"well_chosen_i"/"well_chosen_a" otherwise.
  std::string label() const;
};

/// Search space of an estimated case on [0,1]^d.
HyperParamSpace space_for(const FunctionCase& fc, Eigen::Index d);

struct StudyConfig {
  StudyKind study = StudyKind::VarianceMisspec;
  Eigen::Index n = 70;
  Eigen::Index d = 5;
  int n_p = 20;
  int n_t = 1000;
  DesignKind doe_kind = DesignKind::LHSMaximin;
  std::uint64_t lhs_candidates = 1000;
  std::uint64_t master_seed = 0;
  Nugget nugget{};

  // Variance studies.
  std::optional<CorrelationModel> true_model;
  std::optional<CorrelationModel> base_model;  // R2 before the axis is applied
  MisspecAxis axis = MisspecAxis::Regularity;
  std::vector<double> axis_values;          // misspecification sweep
  std::vector<Eigen::Index> sample_sizes;   // sample-size sweep, at the centre

  // Function studies.
  TestFunction function = TestFunction::Ishigami;
  std::vector<FunctionCase> cases;
  OptimizerConfig optimizer{};

  /// Throws InputError on inconsistent settings.
  void validate() const;
};

struct ReplicateFailure {
  std::size_t cell = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  std::string cause;
};

/// Mean and standard error of one criterion over the successful replicates.
struct CellStat {
  std::string criterion;
  Method method = Method::ML;
  double mean = 0.0;
  double std_error = 0.0;
  int successes = 0;
  int failures = 0;
  std::vector<std::optional<double>> replicates;  // index order; nullopt = failed
};

/// One sweep value of a variance study or one case of a function study.
struct StudyCell {
  std::string key;        // axis name, "n", or function case label
  double value = 0.0;     // axis or sample-size value; 0 for function studies
  std::optional<FunctionCase> function_case;
  std::vector<double> enforced_lengths;  // lengths actually used, enforced rows
  std::vector<CellStat> stats;
};

struct StudyResult {
  StudyConfig config;
  std::vector<StudyCell> cells;
  std::vector<ReplicateFailure> failures;

  const CellStat& stat(std::size_t cell, Method method, const std::string& criterion) const;
};

/// Seed for `index` under a study-specific `tag`.
std::uint64_t study_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index);

inline constexpr std::uint64_t kTagTestSample = 1;
inline constexpr std::uint64_t kTagDesign = 2;
inline constexpr std::uint64_t kTagOptimizer = 3;
inline constexpr std::uint64_t kTagWellChosen = 4;
inline constexpr std::uint64_t kTagWellChosenOptimizer = 5;

/// Learning design of replicate `index`.
Design study_design(DesignKind kind, Eigen::Index n, Eigen::Index d, std::uint64_t seed,
                    std::uint64_t lhs_candidates);

/// IRTR/IBTR across the sweep (misspecification) or RTR/BTR at the centre
/// of the domain (sample size) for ML and CV. A sparse grid is deterministic
/// and is evaluated once.
StudyResult run_variance_study(const StudyConfig& config);

/// MSE and PVA per case and method.
StudyResult run_function_study(const StudyConfig& config);

/// Dispatches on config.study.
StudyResult run_study(const StudyConfig& config);

}  // namespace krigmis
