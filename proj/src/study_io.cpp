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

#include "krigmis/study_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "krigmis/error.hpp"

namespace krigmis {

using nlohmann::json;

const char* to_string(Scale scale) { return scale == Scale::Desk ? "desk" : "paper"; }

Scale parse_scale(const std::string& text) {
  if (text == "desk") return Scale::Desk;
  if (text == "paper") return Scale::Paper;
  throw InputError("unknown scale '" + text + "' (expected desk or paper)");
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return {buf, res.ptr};
}

const char* to_string(PenaltyMode mode) {
  switch (mode) {
    case PenaltyMode::Auto:
      return "auto";
    case PenaltyMode::On:
      return "on";
    case PenaltyMode::Off:
      return "off";
  }
  return "unknown";
}

PenaltyMode parse_penalty_mode(const std::string& text) {
  if (text == "auto") return PenaltyMode::Auto;
  if (text == "on") return PenaltyMode::On;
  if (text == "off") return PenaltyMode::Off;
  throw InputError("unknown penalty mode '" + text + "' (expected auto, on or off)");
}

DesignKind parse_design_kind(const std::string& text) {
  for (DesignKind k : {DesignKind::SRS, DesignKind::LHSMaximin, DesignKind::SparseGrid}) {
    if (text == to_string(k)) return k;
  }
  throw InputError("unknown design kind '" + text +
                   "' (expected srs, lhs_maximin or sparse_grid)");
}

StudyFamily parse_study_family(const std::string& text) {
  for (StudyFamily f : {StudyFamily::Exponential, StudyFamily::Gaussian, StudyFamily::Matern}) {
    if (text == to_string(f)) return f;
  }
  throw InputError("unknown family '" + text + "' (expected exponential, gaussian or matern)");
}

namespace {

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }

std::string child(const std::string& path, std::size_t index) {
  return path + "/" + std::to_string(index);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "/" : path, "expected an object");
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(child(path, key), "unknown field");
  }
}

const json& required(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError(child(path, key), "missing required field");
  return j.at(key);
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "expected a finite number");
  return x;
}

std::uint64_t as_unsigned(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw ConfigError(path, "expected a non-negative integer");
}

int as_int(const json& v, const std::string& path) {
  const auto u = as_unsigned(v, path);
  if (u > 1000000000u) throw ConfigError(path, "value too large");
  return static_cast<int>(u);
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

// Runs `parse` on a text value and turns InputError into a ConfigError at `path`.
template <typename F>
auto parse_enum(const json& v, const std::string& path, F parse) {
  const std::string text = as_string(v, path);
  try {
    return parse(text);
  } catch (const InputError& e) {
    throw ConfigError(path, e.what());
  }
}

std::vector<double> as_lengths(const json& v, const std::string& path, Eigen::Index d) {
  if (v.is_number()) {
    return std::vector<double>(static_cast<std::size_t>(std::max<Eigen::Index>(d, 1)),
                               as_number(v, path));
  }
  if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a number or a non-empty array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], child(path, i)));
  return out;
}

CorrelationModel parse_model(const json& j, const std::string& path, Eigen::Index d) {
  require_object(j, path);
  check_keys(j, path, {"family", "lengths", "shape"});
  const std::string family = as_string(required(j, "family", path), child(path, "family"));
  const auto lengths = as_lengths(required(j, "lengths", path), child(path, "lengths"), d);
  const auto shape_of = [&]() { return as_number(required(j, "shape", path), child(path, "shape")); };
  try {
    if (family == "exponential" || family == "gaussian") {
      if (j.contains("shape")) {
        throw ConfigError(child(path, "shape"), "shape is implied by the family");
      }
      return family == "exponential" ? CorrelationModel::exponential(lengths)
                                     : CorrelationModel::gaussian(lengths);
    }
    if (family == "power_exponential") return CorrelationModel::power_exponential(lengths, shape_of());
    if (family == "matern") return CorrelationModel::matern(lengths, shape_of());
  } catch (const InputError& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(child(path, "family"),
                    "unknown family '" + family +
                        "' (expected exponential, gaussian, power_exponential or matern)");
}

json model_json(const CorrelationModel& m) {
  return {{"family", to_string(m.family())}, {"lengths", m.lengths()}, {"shape", m.shape()}};
}

LengthMode parse_length_mode(const std::string& text) {
  if (text == "i") return LengthMode::Isotropic;
  if (text == "a") return LengthMode::Anisotropic;
  throw InputError("unknown length mode '" + text + "' (expected i or a)");
}

LengthSource parse_length_source(const std::string& text) {
  for (LengthSource s : {LengthSource::Estimated, LengthSource::Fixed, LengthSource::WellChosen}) {
    if (text == to_string(s)) return s;
  }
  throw InputError("unknown length source '" + text +
                   "' (expected estimated, fixed or well_chosen)");
}

FunctionCase parse_case(const json& j, const std::string& path, Eigen::Index d) {
  require_object(j, path);
  check_keys(j, path, {"family", "mode", "source", "lengths", "nu"});
  FunctionCase fc;
  fc.family = parse_enum(required(j, "family", path), child(path, "family"), parse_study_family);
  if (j.contains("mode")) fc.length_mode = parse_enum(j["mode"], child(path, "mode"), parse_length_mode);
  if (j.contains("source")) {
    fc.source = parse_enum(j["source"], child(path, "source"), parse_length_source);
  }
  if (fc.source == LengthSource::Fixed) {
    fc.lengths = as_lengths(required(j, "lengths", path), child(path, "lengths"), 1);
    for (double l : fc.lengths) {
      if (!(l > 0.0)) throw ConfigError(child(path, "lengths"), "lengths must be positive");
    }
    if (fc.lengths.size() != 1 && fc.lengths.size() != static_cast<std::size_t>(d)) {
      throw ConfigError(child(path, "lengths"), "expected 1 or d lengths");
    }
  } else if (j.contains("lengths")) {
    throw ConfigError(child(path, "lengths"), "lengths are only allowed with source fixed");
  }
  if (j.contains("nu")) {
    fc.nu = as_number(j["nu"], child(path, "nu"));
    if (!(fc.nu > 0.0)) throw ConfigError(child(path, "nu"), "nu must be positive");
  }
  return fc;
}

json case_json(const FunctionCase& fc) {
  json j{{"family", to_string(fc.family)},
         {"mode", fc.length_mode == LengthMode::Isotropic ? "i" : "a"},
         {"source", to_string(fc.source)}};
  if (fc.source == LengthSource::Fixed) j["lengths"] = fc.lengths;
  if (fc.family == StudyFamily::Matern) j["nu"] = fc.nu;
  return j;
}

StudyKind parse_study_kind(const std::string& text) {
  for (StudyKind k : {StudyKind::VarianceMisspec, StudyKind::VarianceSampleSize,
                      StudyKind::FunctionStudy, StudyKind::EnforcedLengths}) {
    if (text == to_string(k)) return k;
  }
  throw InputError("unknown study '" + text +
                   "' (expected variance_misspec, variance_sample_size, function_study or "
                   "enforced_lengths)");
}

MisspecAxis parse_axis(const std::string& text) {
  for (MisspecAxis a : {MisspecAxis::Exponent, MisspecAxis::Regularity, MisspecAxis::Length}) {
    if (text == to_string(a)) return a;
  }
  throw InputError("unknown axis '" + text + "' (expected exponent, regularity or length)");
}

TestFunction parse_function(const std::string& text) {
  if (text == "ishigami") return TestFunction::Ishigami;
  if (text == "morris") return TestFunction::Morris;
  throw InputError("unknown function '" + text + "' (expected ishigami or morris)");
}

double parse_nugget(const json& v, const std::string& path) {
  const double tau2 = as_number(v, path);
  if (tau2 < 0.0) throw ConfigError(path, "nugget must be non-negative");
  return tau2;
}

bool is_function_study(StudyKind k) {
  return k == StudyKind::FunctionStudy || k == StudyKind::EnforcedLengths;
}

}  // namespace

OptimizerConfig parse_optimizer(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path,
             {"starts", "max_iterations", "tolerance", "penalty", "seed", "start_candidates",
              "nugget"});
  OptimizerConfig c;
  if (j.contains("starts")) c.starts = as_int(j["starts"], child(path, "starts"));
  if (c.starts < 1) throw ConfigError(child(path, "starts"), "need at least one start");
  if (j.contains("max_iterations")) {
    c.max_iterations = as_int(j["max_iterations"], child(path, "max_iterations"));
  }
  if (j.contains("tolerance")) {
    c.tolerance = as_number(j["tolerance"], child(path, "tolerance"));
    if (!(c.tolerance > 0.0)) throw ConfigError(child(path, "tolerance"), "must be positive");
  }
  if (j.contains("penalty")) c.penalty = parse_enum(j["penalty"], child(path, "penalty"), parse_penalty_mode);
  if (j.contains("seed")) c.seed = as_unsigned(j["seed"], child(path, "seed"));
  if (j.contains("start_candidates")) {
    c.start_candidates = as_unsigned(j["start_candidates"], child(path, "start_candidates"));
    if (c.start_candidates < 1) throw ConfigError(child(path, "start_candidates"), "must be >= 1");
  }
  if (j.contains("nugget")) c.nugget = Nugget(parse_nugget(j["nugget"], child(path, "nugget")));
  return c;
}

json optimizer_json(const OptimizerConfig& c) {
  return {{"starts", c.starts},
          {"max_iterations", c.max_iterations},
          {"tolerance", c.tolerance},
          {"penalty", to_string(c.penalty)},
          {"seed", c.seed},
          {"start_candidates", c.start_candidates},
          {"nugget", c.nugget.tau2}};
}

StudyConfig parse_study_config(const json& j, Scale scale) {
  const std::string root;
  require_object(j, root);
  check_keys(j, root,
             {"study", "n", "d", "n_p", "n_t", "doe", "lhs_candidates", "seed", "nugget",
              "true_model", "model", "axis", "values", "sample_sizes", "function", "cases",
              "optimizer"});
  StudyConfig c;
  c.study = parse_enum(required(j, "study", root), "/study", parse_study_kind);
  const bool fn = is_function_study(c.study);

  if (fn) {
    c.function = j.contains("function") ? parse_enum(j["function"], "/function", parse_function)
                                        : TestFunction::Ishigami;
    c.d = dimension_of(c.function);
    if (j.contains("d") && as_int(j["d"], "/d") != c.d) {
      throw ConfigError("/d", "does not match the dimension of the test function");
    }
  } else {
    c.d = as_int(required(j, "d", root), "/d");
    if (c.d < 1) throw ConfigError("/d", "must be at least 1");
  }
  if (c.study == StudyKind::VarianceSampleSize) {
    if (j.contains("n")) throw ConfigError("/n", "use sample_sizes for a sample-size study");
  } else {
    c.n = as_int(required(j, "n", root), "/n");
  }

  const int default_np = scale == Scale::Desk ? 20 : (fn ? 100 : 50);
  const int default_nt = scale == Scale::Desk ? 1000 : (fn ? 10000 : 5000);
  c.n_p = j.contains("n_p") ? as_int(j["n_p"], "/n_p") : default_np;
  c.n_t = j.contains("n_t") ? as_int(j["n_t"], "/n_t") : default_nt;
  if (c.n_p < 1) throw ConfigError("/n_p", "must be at least 1");
  if (c.n_t < 1) throw ConfigError("/n_t", "must be at least 1");

  c.doe_kind = fn ? DesignKind::LHSMaximin : DesignKind::SRS;
  if (j.contains("doe")) c.doe_kind = parse_enum(j["doe"], "/doe", parse_design_kind);
  if (fn && c.doe_kind != DesignKind::LHSMaximin) {
    throw ConfigError("/doe", "function studies use lhs_maximin designs");
  }
  if (j.contains("lhs_candidates")) {
    c.lhs_candidates = as_unsigned(j["lhs_candidates"], "/lhs_candidates");
    if (c.lhs_candidates < 1) throw ConfigError("/lhs_candidates", "must be at least 1");
  }
  if (j.contains("seed")) c.master_seed = as_unsigned(j["seed"], "/seed");
  if (j.contains("nugget")) c.nugget = Nugget(parse_nugget(j["nugget"], "/nugget"));

  if (!fn) {
    c.true_model = parse_model(required(j, "true_model", root), "/true_model", c.d);
    c.base_model = parse_model(required(j, "model", root), "/model", c.d);
    if (c.study == StudyKind::VarianceMisspec) {
      c.axis = parse_enum(required(j, "axis", root), "/axis", parse_axis);
      const json& values = required(j, "values", root);
      if (!values.is_array() || values.empty()) {
        throw ConfigError("/values", "expected a non-empty array");
      }
      for (std::size_t i = 0; i < values.size(); ++i) {
        c.axis_values.push_back(as_number(values[i], child("/values", i)));
        try {
          (void)(c.axis == MisspecAxis::Length
                     ? c.base_model->with_lengths(std::vector<double>(
                           static_cast<std::size_t>(c.d), c.axis_values.back()))
                     : c.base_model->with_shape(c.axis_values.back()));
        } catch (const InputError& e) {
          throw ConfigError(child("/values", i), e.what());
        }
      }
    } else {
      const json& sizes = required(j, "sample_sizes", root);
      if (!sizes.is_array() || sizes.empty()) {
        throw ConfigError("/sample_sizes", "expected a non-empty array");
      }
      for (std::size_t i = 0; i < sizes.size(); ++i) {
        c.sample_sizes.push_back(as_int(sizes[i], child("/sample_sizes", i)));
      }
    }
  } else {
    const json& cases = required(j, "cases", root);
    if (!cases.is_array() || cases.empty()) throw ConfigError("/cases", "expected a non-empty array");
    for (std::size_t i = 0; i < cases.size(); ++i) {
      c.cases.push_back(parse_case(cases[i], child("/cases", i), c.d));
    }
    if (j.contains("optimizer")) c.optimizer = parse_optimizer(j["optimizer"], "/optimizer");
  }
  for (const char* key : {"true_model", "model", "axis", "values", "sample_sizes"}) {
    if (fn && j.contains(key)) throw ConfigError(child(root, key), "not used by function studies");
  }
  for (const char* key : {"function", "cases", "optimizer"}) {
    if (!fn && j.contains(key)) throw ConfigError(child(root, key), "not used by variance studies");
  }
  if (c.study == StudyKind::VarianceSampleSize && j.contains("axis")) {
    throw ConfigError("/axis", "not used by sample-size studies");
  }
  try {
    c.validate();
  } catch (const InputError& e) {
    throw ConfigError("/", e.what());
  }
  return c;
}

StudyConfig load_study_config(const std::string& path, Scale scale) {
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("/", std::string("malformed JSON: ") + e.what());
  }
  return parse_study_config(j, scale);
}

json study_config_json(const StudyConfig& c) {
  json j{{"study", to_string(c.study)}, {"d", c.d},       {"n_p", c.n_p},
         {"n_t", c.n_t},               {"doe", to_string(c.doe_kind)},
         {"lhs_candidates", c.lhs_candidates},
         {"seed", c.master_seed},       {"nugget", c.nugget.tau2}};
  if (c.study != StudyKind::VarianceSampleSize) j["n"] = c.n;
  if (is_function_study(c.study)) {
    j["function"] = to_string(c.function);
    json cases = json::array();
    for (const auto& fc : c.cases) cases.push_back(case_json(fc));
    j["cases"] = cases;
    j["optimizer"] = optimizer_json(c.optimizer);
  } else {
    j["true_model"] = model_json(*c.true_model);
    j["model"] = model_json(*c.base_model);
    if (c.study == StudyKind::VarianceMisspec) {
      j["axis"] = to_string(c.axis);
      j["values"] = c.axis_values;
    } else {
      j["sample_sizes"] = c.sample_sizes;
    }
  }
  return j;
}

std::string design_csv(const Design& design) {
  std::string out;
  for (Eigen::Index k = 0; k < design.dim(); ++k) {
    if (k) out += ',';
    out += "x" + std::to_string(k + 1);
  }
  out += '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < design.size(); ++i) {
    for (Eigen::Index k = 0; k < design.dim(); ++k) {
      if (k) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", design.points(i, k));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::string variance_csv(const StudyResult& result) {
  std::string out = "axis,value,method,criterion,mean,std_error,successes,failures\n";
  for (const auto& cell : result.cells) {
    for (const auto& s : cell.stats) {
      out += cell.key + ',' + format_double(cell.value) + ',' + to_string(s.method) + ',' +
             s.criterion + ',' + format_double(s.mean) + ',' + format_double(s.std_error) + ',' +
             std::to_string(s.successes) + ',' + std::to_string(s.failures) + '\n';
    }
  }
  return out;
}

std::string function_csv(const StudyResult& result) {
  std::string out =
      "function,family,case,method,mse_mean,mse_std_error,pva_mean,pva_std_error,successes,"
      "failures\n";
  const std::string fn = to_string(result.config.function);
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    const auto& cell = result.cells[c];
    for (Method m : {Method::ML, Method::CV}) {
      const auto& mse = result.stat(c, m, "mse");
      const auto& pva = result.stat(c, m, "pva");
      out += fn + ',' + to_string(cell.function_case->family) + ',' + cell.key + ',' +
             to_string(m) + ',' + format_double(mse.mean) + ',' + format_double(mse.std_error) +
             ',' + format_double(pva.mean) + ',' + format_double(pva.std_error) + ',' +
             std::to_string(std::min(mse.successes, pva.successes)) + ',' +
             std::to_string(std::max(mse.failures, pva.failures)) + '\n';
    }
  }
  return out;
}

json study_result_json(const StudyResult& result) {
  json cells = json::array();
  for (const auto& cell : result.cells) {
    json stats = json::array();
    for (const auto& s : cell.stats) {
      json reps = json::array();
      for (const auto& v : s.replicates) reps.push_back(v ? json(*v) : json(nullptr));
      stats.push_back({{"method", to_string(s.method)},
                       {"criterion", s.criterion},
                       {"mean", s.mean},
                       {"std_error", s.std_error},
                       {"successes", s.successes},
                       {"failures", s.failures},
                       {"replicates", reps}});
    }
    json jc{{"key", cell.key}, {"value", cell.value}, {"stats", stats}};
    if (cell.function_case) jc["case"] = case_json(*cell.function_case);
    if (!cell.enforced_lengths.empty()) jc["enforced_lengths"] = cell.enforced_lengths;
    cells.push_back(jc);
  }
  json failures = json::array();
  for (const auto& f : result.failures) {
    failures.push_back({{"cell", f.cell}, {"replicate", f.replicate}, {"seed", f.seed},
                        {"cause", f.cause}});
  }
  return {{"config", study_config_json(result.config)},
          {"cells", cells},
          {"failures", failures}};
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void csv_error(std::size_t line, const std::string& what) {
  throw InputError("line " + std::to_string(line) + ": " + what);
}

}  // namespace

DataSet read_data_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv(line);
      break;
    }
  }
  if (header.empty()) throw InputError("line 1: missing header");

  int y_col = -1;
  std::vector<int> x_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto& name = header[c];
    if (name == "y") {
      if (y_col >= 0) csv_error(line_no, "duplicate column y");
      y_col = static_cast<int>(c);
    } else if (name.size() > 1 && name[0] == 'x') {
      int k = 0;
      const auto res = std::from_chars(name.data() + 1, name.data() + name.size(), k);
      if (res.ec != std::errc() || res.ptr != name.data() + name.size() || k < 1) {
        csv_error(line_no, "unexpected column '" + name + "'");
      }
      if (static_cast<std::size_t>(k) > x_cols.size()) x_cols.resize(static_cast<std::size_t>(k), -1);
      if (x_cols[static_cast<std::size_t>(k - 1)] >= 0) csv_error(line_no, "duplicate column " + name);
      x_cols[static_cast<std::size_t>(k - 1)] = static_cast<int>(c);
    } else {
      csv_error(line_no, "unexpected column '" + name + "'");
    }
  }
  if (y_col < 0) csv_error(line_no, "missing column y");
  if (x_cols.empty()) csv_error(line_no, "missing column x1");
  for (std::size_t k = 0; k < x_cols.size(); ++k) {
    if (x_cols[k] < 0) csv_error(line_no, "missing column x" + std::to_string(k + 1));
  }

  std::vector<std::vector<double>> rows;
  std::vector<double> ys;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      csv_error(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
    }
    std::vector<double> values(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto& f = fields[c];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), values[c]);
      if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size() ||
          !std::isfinite(values[c])) {
        csv_error(line_no, "column " + header[c] + " is not a finite number: '" + f + "'");
      }
    }
    std::vector<double> x;
    for (int c : x_cols) x.push_back(values[static_cast<std::size_t>(c)]);
    rows.push_back(std::move(x));
    ys.push_back(values[static_cast<std::size_t>(y_col)]);
  }
  if (rows.empty()) throw InputError("line " + std::to_string(line_no) + ": no data rows");

  PointMatrix points(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(x_cols.size()));
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < x_cols.size(); ++k) {
      points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
    y(static_cast<Eigen::Index>(i)) = ys[i];
  }
  return {Design::custom(std::move(points)), std::move(y)};
}

json estimation_json(const EstimationResult& r) {
  json diags = json::array();
  for (const auto& d : r.diagnostics) {
    diags.push_back({{"start", std::vector<double>(d.start.data(), d.start.data() + d.start.size())},
                     {"end", std::vector<double>(d.end.data(), d.end.data() + d.end.size())},
                     {"start_value", d.start_value},
                     {"value", d.value},
                     {"iterations", d.iterations},
                     {"converged", d.converged},
                     {"failed", d.failed},
                     {"status", d.status}});
  }
  return {{"method", to_string(r.method)},
          {"theta_hat", model_json(r.theta_hat)},
          {"theta_vector",
           std::vector<double>(r.theta_vector.data(), r.theta_vector.data() + r.theta_vector.size())},
          {"sigma2_hat", r.sigma2_hat},
          {"objective", r.objective},
          {"nugget", r.nugget},
          {"starts", r.starts},
          {"converged_starts", r.converged_starts},
          {"penalty_active", r.penalty_active},
          {"penalty_engaged", r.penalty_engaged},
          {"diagnostics", diags}};
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) throw InputError("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace krigmis
