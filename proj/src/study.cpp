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

#include "krigmis/study.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

#include "krigmis/error.hpp"
#include "krigmis/functions.hpp"
#include "krigmis/krig.hpp"
#include "krigmis/risk.hpp"
#include "krigmis/rng.hpp"

namespace krigmis {

const char* to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::VarianceMisspec:
      return "variance_misspec";
    case StudyKind::VarianceSampleSize:
      return "variance_sample_size";
    case StudyKind::FunctionStudy:
      return "function_study";
    case StudyKind::EnforcedLengths:
      return "enforced_lengths";
  }
  return "unknown";
}

const char* to_string(MisspecAxis axis) {
  switch (axis) {
    case MisspecAxis::Exponent:
      return "exponent";
    case MisspecAxis::Regularity:
      return "regularity";
    case MisspecAxis::Length:
      return "length";
  }
  return "unknown";
}

const char* to_string(TestFunction fn) {
  return fn == TestFunction::Ishigami ? "ishigami" : "morris";
}

Eigen::Index dimension_of(TestFunction fn) {
  return fn == TestFunction::Ishigami ? 3 : 10;
}

double evaluate(TestFunction fn, std::span<const double> x) {
  return fn == TestFunction::Ishigami ? ishigami(x) : morris(x);
}

const char* to_string(StudyFamily family) {
  switch (family) {
    case StudyFamily::Exponential:
      return "exponential";
    case StudyFamily::Gaussian:
      return "gaussian";
    case StudyFamily::Matern:
      return "matern";
  }
  return "unknown";
}

const char* to_string(LengthSource source) {
  switch (source) {
    case LengthSource::Estimated:
      return "estimated";
    case LengthSource::Fixed:
      return "fixed";
    case LengthSource::WellChosen:
      return "well_chosen";
  }
  return "unknown";
}

std::string FunctionCase::label() const {
  const char* mode = length_mode == LengthMode::Isotropic ? "i" : "a";
  switch (source) {
    case LengthSource::Estimated:
      return mode;
    case LengthSource::Fixed:
      return "fixed";
    case LengthSource::WellChosen:
      return std::string("well_chosen_") + mode;
  }
  return mode;
}

void StudyConfig::validate() const {
  if (n_p < 1) throw InputError("n_p must be at least 1");
  if (n_t < 1) throw InputError("n_t must be at least 1");
  if (d < 1) throw InputError("d must be at least 1");
  switch (study) {
    case StudyKind::VarianceMisspec:
    case StudyKind::VarianceSampleSize: {
      if (!true_model || !base_model) {
        throw InputError("variance studies need a true model and a base model");
      }
      if (true_model->dim() != static_cast<std::size_t>(d) ||
          base_model->dim() != static_cast<std::size_t>(d)) {
        throw InputError("model dimensions must equal d");
      }
      if (study == StudyKind::VarianceMisspec) {
        if (axis_values.empty()) throw InputError("misspecification sweep is empty");
        if (n < 2) throw InputError("n must be at least 2");
        const bool pe = base_model->family() == Family::PowerExponential;
        if (axis == MisspecAxis::Exponent && !pe) {
          throw InputError("the exponent axis needs a power-exponential model");
        }
        if (axis == MisspecAxis::Regularity && pe) {
          throw InputError("the regularity axis needs a Matern model");
        }
      } else {
        if (sample_sizes.empty()) throw InputError("sample-size sweep is empty");
        for (auto s : sample_sizes) {
          if (s < 2) throw InputError("sample sizes must be at least 2");
        }
      }
      break;
    }
    case StudyKind::FunctionStudy:
    case StudyKind::EnforcedLengths: {
      if (d != dimension_of(function)) {
        throw InputError("d does not match the dimension of the test function");
      }
      if (n < 3) throw InputError("n must be at least 3");
      if (cases.empty()) throw InputError("function study has no cases");
      for (const auto& c : cases) {
        if (c.source != LengthSource::Fixed) continue;
        const bool ok = c.lengths.size() == 1 ||
                        c.lengths.size() == static_cast<std::size_t>(d);
        if (!ok) throw InputError("fixed lengths need 1 or d entries");
      }
      break;
    }
  }
}

const CellStat& StudyResult::stat(std::size_t cell, Method method,
                                  const std::string& criterion) const {
  for (const auto& s : cells.at(cell).stats) {
    if (s.method == method && s.criterion == criterion) return s;
  }
  throw InputError("no such criterion in study cell: " + criterion);
}

std::uint64_t study_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
  return substream_seed(substream_seed(master, tag), index);
}

Design study_design(DesignKind kind, Eigen::Index n, Eigen::Index d, std::uint64_t seed,
                    std::uint64_t lhs_candidates) {
  switch (kind) {
    case DesignKind::SRS:
      return srs(n, d, seed);
    case DesignKind::LHSMaximin:
      return lhs_maximin(n, d, seed, lhs_candidates);
    case DesignKind::SparseGrid: {
      const int level = sparse_grid_level_for(static_cast<std::size_t>(n), static_cast<int>(d));
      return sparse_grid({level, static_cast<int>(d)});
    }
    case DesignKind::Custom:
      break;
  }
  throw InputError("studies cannot draw custom designs");
}

HyperParamSpace space_for(const FunctionCase& fc, Eigen::Index d) {
  const int dim = static_cast<int>(d);
  switch (fc.family) {
    case StudyFamily::Exponential:
      return HyperParamSpace::exponential(dim, fc.length_mode);
    case StudyFamily::Gaussian:
      return HyperParamSpace::gaussian(dim, fc.length_mode);
    case StudyFamily::Matern:
      return HyperParamSpace::matern(dim, fc.length_mode);
  }
  throw InputError("unknown study family");
}

namespace {

// Fills mean, standard error and counts of `stat` from its replicate values.
void summarize(CellStat& stat) {
  double sum = 0.0;
  int count = 0;
  for (const auto& v : stat.replicates) {
    if (v) {
      sum += *v;
      ++count;
    }
  }
  stat.successes = count;
  stat.failures = static_cast<int>(stat.replicates.size()) - count;
  if (count == 0) {
    stat.mean = std::numeric_limits<double>::quiet_NaN();
    stat.std_error = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  stat.mean = sum / count;
  double ss = 0.0;
  for (const auto& v : stat.replicates) {
    if (v) ss += (*v - stat.mean) * (*v - stat.mean);
  }
  stat.std_error = count > 1 ? std::sqrt(ss / (count - 1) / count) : 0.0;
}

std::string describe(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const std::exception& e) {
    return e.what();
  } catch (...) {
    return "unknown error";
  }
}

CorrelationModel swept_model(const CorrelationModel& base, MisspecAxis axis, double v) {
  if (axis == MisspecAxis::Length) {
    return base.with_lengths(std::vector<double>(base.dim(), v));
  }
  return base.with_shape(v);
}

// Per-replicate outputs: values[cell][slot] for the slots of one cell.
struct ReplicateOutput {
  std::vector<std::vector<std::optional<double>>> values;
  std::vector<std::pair<std::size_t, std::string>> errors;
};

void collect(StudyResult& result, const std::vector<ReplicateOutput>& outputs,
             const std::vector<std::uint64_t>& seeds) {
  for (std::size_t r = 0; r < outputs.size(); ++r) {
    const auto& out = outputs[r];
    for (std::size_t c = 0; c < result.cells.size(); ++c) {
      auto& stats = result.cells[c].stats;
      for (std::size_t s = 0; s < stats.size(); ++s) {
        stats[s].replicates.push_back(out.values[c][s]);
      }
    }
    for (const auto& [cell, cause] : out.errors) {
      result.failures.push_back({cell, static_cast<int>(r), seeds[r], cause});
    }
  }
  for (auto& cell : result.cells) {
    for (auto& s : cell.stats) summarize(s);
  }
}

std::vector<CellStat> make_stats(const char* first, const char* second) {
  std::vector<CellStat> stats;
  for (Method m : {Method::ML, Method::CV}) {
    for (const char* crit : {first, second}) {
      CellStat s;
      s.criterion = crit;
      s.method = m;
      stats.push_back(std::move(s));
    }
  }
  return stats;
}

int replicate_count(const StudyConfig& config) {
  return config.doe_kind == DesignKind::SparseGrid ? 1 : config.n_p;
}

}  // namespace

StudyResult run_variance_study(const StudyConfig& config) {
  config.validate();
  const bool sweep_n = config.study == StudyKind::VarianceSampleSize;
  StudyResult result{config, {}, {}};
  const std::size_t num_cells = sweep_n ? config.sample_sizes.size() : config.axis_values.size();
  for (std::size_t c = 0; c < num_cells; ++c) {
    StudyCell cell;
    cell.key = sweep_n ? "n" : to_string(config.axis);
    cell.value = sweep_n ? static_cast<double>(config.sample_sizes[c]) : config.axis_values[c];
    cell.stats = sweep_n ? make_stats("rtr", "btr") : make_stats("irtr", "ibtr");
    result.cells.push_back(std::move(cell));
  }

  PointMatrix test_points;
  if (!sweep_n) {
    test_points = srs(config.n_t, config.d, study_seed(config.master_seed, kTagTestSample, 0)).points;
  }
  const std::vector<double> centre(static_cast<std::size_t>(config.d), 0.5);

  const int reps = replicate_count(config);
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) {
    seeds[static_cast<std::size_t>(r)] =
        study_seed(config.master_seed, kTagDesign, static_cast<std::uint64_t>(r));
  }
  std::vector<ReplicateOutput> outputs(static_cast<std::size_t>(reps));

#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < reps; ++r) {
    auto& out = outputs[static_cast<std::size_t>(r)];
    out.values.assign(num_cells, std::vector<std::optional<double>>(4));
    const std::uint64_t seed = seeds[static_cast<std::size_t>(r)];
    std::optional<Design> shared;
    std::optional<KrigingState> shared_truth;
    for (std::size_t c = 0; c < num_cells; ++c) {
      try {
        const Eigen::Index n = sweep_n ? config.sample_sizes[c] : config.n;
        if (!shared || sweep_n) {
          shared = study_design(config.doe_kind, n, config.d, seed, config.lhs_candidates);
          shared_truth = KrigingState::fit(*shared, *config.true_model, config.nugget);
        }
        const CorrelationModel model =
            sweep_n ? *config.base_model
                    : swept_model(*config.base_model, config.axis, config.axis_values[c]);
        const auto model_state = KrigingState::fit(*shared, model, config.nugget);
        std::size_t slot = 0;
        for (Method m : {Method::ML, Method::CV}) {
          const auto est = estimator_matrix(m, model_state);
          const RiskContext context(*shared_truth, model_state, est);
          if (sweep_n) {
            const auto report = context.at(centre);
            out.values[c][slot++] = report.rtr;
            out.values[c][slot++] = report.btr;
          } else {
            const auto ic = integrated_criteria(context, test_points);
            out.values[c][slot++] = ic.irtr;
            out.values[c][slot++] = ic.ibtr;
          }
        }
      } catch (const Error&) {
        out.values[c].assign(4, std::nullopt);
        out.errors.emplace_back(c, describe(std::current_exception()));
        if (!sweep_n) shared.reset();
      }
    }
  }
  collect(result, outputs, seeds);
  return result;
}

namespace {

CorrelationModel enforced_model(const FunctionCase& fc, const std::vector<double>& lengths) {
  switch (fc.family) {
    case StudyFamily::Exponential:
      return CorrelationModel::exponential(lengths);
    case StudyFamily::Gaussian:
      return CorrelationModel::gaussian(lengths);
    case StudyFamily::Matern:
      return CorrelationModel::matern(lengths, fc.nu);
  }
  throw InputError("unknown study family");
}

struct Scores {
  double mse;
  double pva;
};

Scores score(const KrigingState& state, double sigma2, const Eigen::VectorXd& y,
             const PointMatrix& test_points, const Eigen::VectorXd& test_values) {
  const auto pred = predict_batch(state, y, test_points);
  return {mse_criterion(pred.mean, test_values),
          pva_criterion(pred.mean, test_values, sigma2 * pred.variance_factor)};
}

Eigen::VectorXd evaluate_rows(TestFunction fn, const PointMatrix& points) {
  Eigen::VectorXd y(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    y(i) = evaluate(fn, {points.row(i).data(), static_cast<std::size_t>(points.cols())});
  }
  return y;
}

double mse_only(const KrigingState& state, const Eigen::VectorXd& y,
                const PointMatrix& test_points, const Eigen::VectorXd& test_values) {
  const auto pred = predict_batch(state, y, test_points);
  return mse_criterion(pred.mean, test_values);
}

// Min-MSE lengths among ML and CV estimates over n_p auxiliary designs.
std::vector<double> well_chosen_lengths(const StudyConfig& config, const FunctionCase& fc,
                                        std::size_t cell, const PointMatrix& test_points,
                                        const Eigen::VectorXd& test_values) {
  const HyperParamSpace space = space_for(fc, config.d);
  const int reps = config.n_p;
  std::vector<std::optional<std::pair<double, std::vector<double>>>> best(
      static_cast<std::size_t>(2 * reps));
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < 2 * reps; ++k) {
    const int r = k / 2;
    const Method method = k % 2 == 0 ? Method::ML : Method::CV;
    try {
      const Design design = lhs_maximin(
          config.n, config.d,
          study_seed(config.master_seed, kTagWellChosen, static_cast<std::uint64_t>(r)),
          config.lhs_candidates);
      const Eigen::VectorXd y = evaluate_rows(config.function, design.points);
      OptimizerConfig opt = config.optimizer;
      opt.seed = study_seed(config.master_seed, kTagWellChosenOptimizer,
                            static_cast<std::uint64_t>(k));
      const auto est = estimate(method, design, y, space, opt);
      const auto state = KrigingState::fit(design, est.theta_hat, Nugget(est.nugget));
      const double mse = mse_only(state, y, test_points, test_values);
      if (std::isfinite(mse)) {
        best[static_cast<std::size_t>(k)] = std::make_pair(mse, est.theta_hat.lengths());
      }
    } catch (const Error&) {
    }
  }
  std::optional<std::size_t> pick;
  for (std::size_t k = 0; k < best.size(); ++k) {
    if (best[k] && (!pick || best[k]->first < best[*pick]->first)) pick = k;
  }
  if (!pick) {
    std::ostringstream msg;
    msg << "no successful estimate for the well-chosen lengths of case " << cell;
    throw EstimationError(msg.str());
  }
  return best[*pick]->second;
}

}  // namespace

StudyResult run_function_study(const StudyConfig& config) {
  config.validate();
  StudyResult result{config, {}, {}};

  const PointMatrix test_points =
      srs(config.n_t, config.d, study_seed(config.master_seed, kTagTestSample, 0)).points;
  const Eigen::VectorXd test_values = evaluate_rows(config.function, test_points);

  for (std::size_t c = 0; c < config.cases.size(); ++c) {
    const auto& fc = config.cases[c];
    StudyCell cell;
    cell.key = fc.label();
    cell.function_case = fc;
    cell.stats = make_stats("mse", "pva");
    if (fc.source == LengthSource::Fixed) {
      cell.enforced_lengths = fc.lengths.size() == 1
                                  ? std::vector<double>(static_cast<std::size_t>(config.d),
                                                        fc.lengths.front())
                                  : fc.lengths;
    } else if (fc.source == LengthSource::WellChosen) {
      cell.enforced_lengths = well_chosen_lengths(config, fc, c, test_points, test_values);
    }
    result.cells.push_back(std::move(cell));
  }

  const int reps = config.n_p;
  const std::size_t num_cells = result.cells.size();
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) {
    seeds[static_cast<std::size_t>(r)] =
        study_seed(config.master_seed, kTagDesign, static_cast<std::uint64_t>(r));
  }
  std::vector<ReplicateOutput> outputs(static_cast<std::size_t>(reps));

#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < reps; ++r) {
    auto& out = outputs[static_cast<std::size_t>(r)];
    out.values.assign(num_cells, std::vector<std::optional<double>>(4));
    const std::uint64_t seed = seeds[static_cast<std::size_t>(r)];
    std::optional<Design> design;
    Eigen::VectorXd y;
    try {
      design = lhs_maximin(config.n, config.d, seed, config.lhs_candidates);
      y = evaluate_rows(config.function, design->points);
    } catch (const Error&) {
      out.errors.emplace_back(0, describe(std::current_exception()));
      for (auto& v : out.values) v.assign(4, std::nullopt);
      continue;
    }
    for (std::size_t c = 0; c < num_cells; ++c) {
      const auto& cell = result.cells[c];
      const FunctionCase& fc = *cell.function_case;
      std::optional<KrigingState> enforced;
      for (std::size_t m = 0; m < 2; ++m) {
        const Method method = m == 0 ? Method::ML : Method::CV;
        try {
          Scores s{};
          if (fc.source == LengthSource::Estimated) {
            OptimizerConfig opt = config.optimizer;
            opt.seed = study_seed(config.master_seed, kTagOptimizer,
                                  static_cast<std::uint64_t>(r) * 2 * num_cells + 2 * c + m);
            const auto est = estimate(method, *design, y, space_for(fc, config.d), opt);
            const auto state = KrigingState::fit(*design, est.theta_hat, Nugget(est.nugget));
            s = score(state, est.sigma2_hat, y, test_points, test_values);
          } else {
            if (!enforced) {
              enforced = KrigingState::fit(*design, enforced_model(fc, cell.enforced_lengths),
                                           config.nugget);
            }
            s = score(*enforced, sigma2(method, *enforced, y), y, test_points, test_values);
          }
          out.values[c][2 * m] = s.mse;
          out.values[c][2 * m + 1] = s.pva;
        } catch (const Error&) {
          out.values[c][2 * m] = std::nullopt;
          out.values[c][2 * m + 1] = std::nullopt;
          out.errors.emplace_back(c, std::string(to_string(method)) + ": " +
                                         describe(std::current_exception()));
        }
      }
    }
  }
  collect(result, outputs, seeds);
  return result;
}

StudyResult run_study(const StudyConfig& config) {
  switch (config.study) {
    case StudyKind::VarianceMisspec:
    case StudyKind::VarianceSampleSize:
      return run_variance_study(config);
    case StudyKind::FunctionStudy:
    case StudyKind::EnforcedLengths:
      return run_function_study(config);
  }
  throw InputError("unknown study kind");
}

}  // namespace krigmis
