#include "msmpower/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "msmpower/version.hpp"

namespace msmpower {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

json require_key(const json& j, const std::string& key,
                 const std::string& context) {
  if (!j.contains(key)) {
    throw SchemaError(context + " is missing required key \"" + key + "\"");
  }
  return j.at(key);
}

}  // namespace

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

PilotDataset read_pilot_csv(const std::string& path, const CsvSchema& schema,
                            CsvReadStats* stats) {
  if (schema.treatment_column.empty()) {
    throw SchemaError("schema must name a treatment column");
  }
  if (schema.covariate_columns.empty()) {
    throw SchemaError("schema must name at least one covariate column");
  }
  std::ifstream file(path);
  if (!file) throw ParseError("cannot open " + path);

  std::string line;
  if (!std::getline(file, line)) throw ParseError(path + " is empty");
  const auto header = split_csv_line(line);
  auto column_index = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    throw MissingColumnError("column \"" + name + "\" not found in " + path);
  };

  const std::size_t treat_idx = column_index(schema.treatment_column);
  std::vector<std::size_t> cov_idx;
  for (const auto& name : schema.covariate_columns) {
    cov_idx.push_back(column_index(name));
  }
  std::optional<std::size_t> outcome_idx;
  if (schema.outcome_column.has_value()) {
    outcome_idx = column_index(*schema.outcome_column);
  }

  PilotDataset data(schema.covariate_columns);
  CsvReadStats local_stats;
  std::vector<std::string> bad_rows;
  std::vector<double> x(cov_idx.size());
  std::size_t line_no = 1;
  while (std::getline(file, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    auto field_at = [&](std::size_t idx) -> std::string {
      return idx < fields.size() ? trim(fields[idx]) : std::string();
    };
    auto record_bad = [&](const std::string& why) {
      std::ostringstream msg;
      msg << "row " << line_no << ": " << why;
      bad_rows.push_back(msg.str());
    };

    const std::string treat_raw = field_at(treat_idx);
    int a = -1;
    if (treat_raw == "0") {
      a = 0;
    } else if (treat_raw == "1") {
      a = 1;
    } else {
      record_bad("treatment value \"" + treat_raw + "\" must be 0 or 1");
      continue;
    }

    bool row_ok = true;
    for (std::size_t j = 0; j < cov_idx.size(); ++j) {
      const std::string raw = field_at(cov_idx[j]);
      if (raw.empty()) {
        record_bad("missing value in column \"" +
                   schema.covariate_columns[j] + "\"");
        row_ok = false;
        break;
      }
      try {
        std::size_t pos = 0;
        x[j] = std::stod(raw, &pos);
        if (pos != raw.size() || !std::isfinite(x[j])) throw std::exception();
      } catch (...) {
        record_bad("cannot parse \"" + raw + "\" in column \"" +
                   schema.covariate_columns[j] + "\"");
        row_ok = false;
        break;
      }
    }
    if (!row_ok) continue;

    std::optional<double> y;
    if (outcome_idx.has_value()) {
      const std::string raw = field_at(*outcome_idx);
      if (raw.empty() || raw == "NA") {
        if (schema.require_outcome) {
          ++local_stats.rows_dropped_missing_outcome;
          continue;
        }
      } else {
        try {
          std::size_t pos = 0;
          const double value = std::stod(raw, &pos);
          if (pos != raw.size() || !std::isfinite(value)) {
            throw std::exception();
          }
          y = value;
        } catch (...) {
          record_bad("cannot parse outcome \"" + raw + "\"");
          continue;
        }
      }
    }
    data.add_row(a, x, y);
    ++local_stats.rows_read;
  }
  if (!bad_rows.empty()) {
    std::ostringstream msg;
    msg << bad_rows.size() << " malformed row(s) in " << path << ": ";
    for (std::size_t i = 0; i < bad_rows.size() && i < 10; ++i) {
      if (i > 0) msg << "; ";
      msg << bad_rows[i];
    }
    if (bad_rows.size() > 10) msg << "; ...";
    throw ParseError(msg.str());
  }
  if (stats != nullptr) *stats = local_stats;
  return data;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

void to_json(json& j, const ConfounderCell& cell) {
  j = json{{"label", cell.label},
           {"p_l", cell.p_l},
           {"p_a1_given_l", cell.p_a1_given_l}};
}

void from_json(const json& j, ConfounderCell& cell) {
  cell.label = require_key(j, "label", "cell").get<std::string>();
  cell.p_l = require_key(j, "p_l", "cell").get<double>();
  cell.p_a1_given_l = require_key(j, "p_a1_given_l", "cell").get<double>();
}

void to_json(json& j, const JointDistributionSpec& spec) {
  j = json{{"cells", spec.cells}};
}

void from_json(const json& j, JointDistributionSpec& spec) {
  spec.cells =
      require_key(j, "cells", "joint spec").get<std::vector<ConfounderCell>>();
}

void to_json(json& j, const OutcomeLaw& law) {
  if (law.kind == OutcomeLaw::Kind::bernoulli) {
    j = json{{"dist", "bernoulli"}, {"p", law.p}};
  } else {
    j = json{{"dist", "normal"}, {"mean", law.mean}, {"variance", law.variance}};
  }
}

void from_json(const json& j, OutcomeLaw& law) {
  const std::string dist =
      require_key(j, "dist", "outcome law").get<std::string>();
  if (dist == "bernoulli") {
    law = OutcomeLaw::make_bernoulli(
        require_key(j, "p", "bernoulli law").get<double>());
  } else if (dist == "normal") {
    law = OutcomeLaw::make_normal(
        require_key(j, "mean", "normal law").get<double>(),
        require_key(j, "variance", "normal law").get<double>());
  } else {
    throw SchemaError("unknown outcome law \"" + dist + "\"");
  }
}

void to_json(json& j, const ScenarioSpec& spec) {
  json cells = json::array();
  for (std::size_t i = 0; i < spec.joint.cells.size(); ++i) {
    json cell = spec.joint.cells[i];
    cell["y0"] = spec.y0[i];
    cell["y1"] = spec.y1[i];
    cells.push_back(cell);
  }
  j = json{{"name", spec.name}, {"delta", spec.delta}, {"cells", cells}};
}

void from_json(const json& j, ScenarioSpec& spec) {
  spec.name = j.value("name", "");
  spec.delta = require_key(j, "delta", "scenario").get<double>();
  spec.joint.cells.clear();
  spec.y0.clear();
  spec.y1.clear();
  for (const auto& cell : require_key(j, "cells", "scenario")) {
    spec.joint.cells.push_back(cell.get<ConfounderCell>());
    spec.y0.push_back(require_key(cell, "y0", "scenario cell").get<OutcomeLaw>());
    spec.y1.push_back(require_key(cell, "y1", "scenario cell").get<OutcomeLaw>());
  }
}

void to_json(json& j, const PilotDataset& data) {
  json rows = json::array();
  for (std::size_t i = 0; i < data.size(); ++i) {
    json row;
    row["a"] = data.a(i);
    json x = json::array();
    for (std::size_t k = 0; k < data.arity(); ++k) x.push_back(data.x(i, k));
    row["x"] = x;
    if (data.has_outcome(i)) row["y"] = data.y(i);
    rows.push_back(row);
  }
  j = json{{"covariate_names", data.covariate_names()}, {"rows", rows}};
}

void from_json(const json& j, PilotDataset& data) {
  data = PilotDataset(require_key(j, "covariate_names", "pilot dataset")
                          .get<std::vector<std::string>>());
  for (const auto& row : require_key(j, "rows", "pilot dataset")) {
    const auto x = require_key(row, "x", "pilot row").get<std::vector<double>>();
    std::optional<double> y;
    if (row.contains("y")) y = row.at("y").get<double>();
    data.add_row(require_key(row, "a", "pilot row").get<int>(), x, y);
  }
}

void to_json(json& j, const WeightSet& weights) {
  json entries = json::array();
  for (const auto& entry : weights.entries) {
    entries.push_back(json{{"a", entry.a}, {"w", entry.w}});
  }
  j = json{{"entries", entries}};
}

void from_json(const json& j, WeightSet& weights) {
  weights.entries.clear();
  for (const auto& entry : require_key(j, "entries", "weight set")) {
    weights.entries.push_back({require_key(entry, "a", "weight").get<int>(),
                               require_key(entry, "w", "weight").get<double>()});
  }
}

namespace {

std::string method_name(DeffMethod method) {
  switch (method) {
    case DeffMethod::closed_form: return "closed_form";
    case DeffMethod::pilot_kish: return "pilot_kish";
    case DeffMethod::full_with_remainder: return "full_with_remainder";
  }
  return "closed_form";
}

DeffMethod method_from_name(const std::string& name) {
  if (name == "closed_form") return DeffMethod::closed_form;
  if (name == "pilot_kish") return DeffMethod::pilot_kish;
  if (name == "full_with_remainder") return DeffMethod::full_with_remainder;
  throw SchemaError("unknown deff method \"" + name + "\"");
}

}  // namespace

void to_json(json& j, const DesignEffectPair& deff) {
  j = json{{"deff0", deff.deff0},
           {"deff1", deff.deff1},
           {"method", method_name(deff.method)}};
  if (deff.remainder0.has_value()) j["remainder0"] = *deff.remainder0;
  if (deff.remainder1.has_value()) j["remainder1"] = *deff.remainder1;
}

void from_json(const json& j, DesignEffectPair& deff) {
  deff.deff0 = require_key(j, "deff0", "deff pair").get<double>();
  deff.deff1 = require_key(j, "deff1", "deff pair").get<double>();
  deff.method = method_from_name(j.value("method", "closed_form"));
  deff.remainder0.reset();
  deff.remainder1.reset();
  if (j.contains("remainder0")) deff.remainder0 = j.at("remainder0").get<double>();
  if (j.contains("remainder1")) deff.remainder1 = j.at("remainder1").get<double>();
  if (deff.method == DeffMethod::full_with_remainder) {
    if (!deff.remainder0 || !deff.remainder1) {
      throw SchemaError("full_with_remainder requires remainder0 and remainder1");
    }
  } else if (deff.remainder0 || deff.remainder1) {
    throw SchemaError("remainders are only valid with method full_with_remainder");
  }
}

void to_json(json& j, const DesignInputs& inputs) {
  j = json{{"alpha", inputs.alpha},       {"power", inputs.power},
           {"delta", inputs.delta},       {"k", inputs.k},
           {"sigma0_sq", inputs.sigma0_sq}, {"sigma1_sq", inputs.sigma1_sq},
           {"deff", inputs.deff}};
}

void from_json(const json& j, DesignInputs& inputs) {
  inputs.alpha = require_key(j, "alpha", "design inputs").get<double>();
  inputs.power = require_key(j, "power", "design inputs").get<double>();
  inputs.delta = require_key(j, "delta", "design inputs").get<double>();
  inputs.k = require_key(j, "k", "design inputs").get<double>();
  inputs.sigma0_sq = require_key(j, "sigma0_sq", "design inputs").get<double>();
  inputs.sigma1_sq = require_key(j, "sigma1_sq", "design inputs").get<double>();
  if (j.contains("deff")) {
    inputs.deff = j.at("deff").get<DesignEffectPair>();
  } else {
    inputs.deff = DesignEffectPair{};
  }
}

void to_json(json& j, const AdjustedVariances& adj) {
  j = json{{"sigma0_adj", adj.sigma0_adj}, {"sigma1_adj", adj.sigma1_adj}};
}

void from_json(const json& j, AdjustedVariances& adj) {
  adj.sigma0_adj = require_key(j, "sigma0_adj", "adjusted variances").get<double>();
  adj.sigma1_adj = require_key(j, "sigma1_adj", "adjusted variances").get<double>();
}

void to_json(json& j, const SampleSizeResult& result) {
  j = json{{"n_total", result.n_total},
           {"n_treated", result.n_treated},
           {"n_control", result.n_control},
           {"achieved_power", result.achieved_power}};
}

void from_json(const json& j, SampleSizeResult& result) {
  result.n_total = require_key(j, "n_total", "sample size").get<long>();
  result.n_treated = require_key(j, "n_treated", "sample size").get<long>();
  result.n_control = require_key(j, "n_control", "sample size").get<long>();
  result.achieved_power =
      require_key(j, "achieved_power", "sample size").get<double>();
}

void to_json(json& j, const MsmFit& fit) {
  j = json{{"beta0", fit.beta0},
           {"beta1", fit.beta1},
           {"cov", {{fit.cov[0][0], fit.cov[0][1]},
                    {fit.cov[1][0], fit.cov[1][1]}}},
           {"wald_z", fit.wald_z},
           {"p_value", fit.p_value},
           {"weights_treated_as",
            fit.weights_treated_as == WeightTreatment::estimated ? "estimated"
                                                                 : "known"}};
}

void from_json(const json& j, MsmFit& fit) {
  fit.beta0 = require_key(j, "beta0", "msm fit").get<double>();
  fit.beta1 = require_key(j, "beta1", "msm fit").get<double>();
  const auto cov = require_key(j, "cov", "msm fit");
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) fit.cov[r][c] = cov.at(r).at(c).get<double>();
  }
  fit.wald_z = require_key(j, "wald_z", "msm fit").get<double>();
  fit.p_value = require_key(j, "p_value", "msm fit").get<double>();
  const std::string treated =
      require_key(j, "weights_treated_as", "msm fit").get<std::string>();
  if (treated == "estimated") {
    fit.weights_treated_as = WeightTreatment::estimated;
  } else if (treated == "known") {
    fit.weights_treated_as = WeightTreatment::known;
  } else {
    throw SchemaError("unknown weight treatment \"" + treated + "\"");
  }
}

void to_json(json& j, const SimulationReport& report) {
  j = json{{"scenario", report.scenario},
           {"n_used", report.n_used},
           {"replications", report.replications},
           {"n_failed", report.n_failed},
           {"seed", report.seed},
           {"alpha", report.alpha},
           {"empirical_power", report.empirical_power},
           {"mean_er0", report.mean_er0},
           {"mean_er1", report.mean_er1},
           {"mc_stderr", report.mc_stderr},
           {"mean_ace", report.mean_ace},
           {"empirical_var_ace", report.empirical_var_ace},
           {"mean_sandwich_var", report.mean_sandwich_var},
           {"coverage", report.coverage},
           {"population_ace", report.population_ace}};
}

void from_json(const json& j, SimulationReport& report) {
  report.scenario = require_key(j, "scenario", "report").get<std::string>();
  report.n_used = require_key(j, "n_used", "report").get<long>();
  report.replications = require_key(j, "replications", "report").get<long>();
  report.n_failed = require_key(j, "n_failed", "report").get<long>();
  report.seed = require_key(j, "seed", "report").get<std::uint64_t>();
  report.alpha = require_key(j, "alpha", "report").get<double>();
  report.empirical_power =
      require_key(j, "empirical_power", "report").get<double>();
  report.mean_er0 = require_key(j, "mean_er0", "report").get<double>();
  report.mean_er1 = require_key(j, "mean_er1", "report").get<double>();
  report.mc_stderr = require_key(j, "mc_stderr", "report").get<double>();
  report.mean_ace = require_key(j, "mean_ace", "report").get<double>();
  report.empirical_var_ace =
      require_key(j, "empirical_var_ace", "report").get<double>();
  report.mean_sandwich_var =
      require_key(j, "mean_sandwich_var", "report").get<double>();
  report.coverage = require_key(j, "coverage", "report").get<double>();
  report.population_ace =
      require_key(j, "population_ace", "report").get<double>();
}

// ---------------------------------------------------------------------------
// Config files
// ---------------------------------------------------------------------------

json load_json_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ParseError("cannot open " + path);
  try {
    return json::parse(file);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

JointDistributionSpec load_joint_spec(const std::string& path) {
  try {
    return load_json_file(path).get<JointDistributionSpec>();
  } catch (const json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

ScenarioSpec load_scenario_spec(const std::string& path) {
  try {
    return load_json_file(path).get<ScenarioSpec>();
  } catch (const json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

DesignInputs load_design_inputs(const std::string& path) {
  try {
    return load_json_file(path).get<DesignInputs>();
  } catch (const json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

PilotConfig load_pilot_config(const std::string& path) {
  const json j = load_json_file(path);
  PilotConfig config;
  try {
    config.schema.treatment_column =
        require_key(j, "treatment_column", "pilot config").get<std::string>();
    config.schema.covariate_columns =
        require_key(j, "covariate_columns", "pilot config")
            .get<std::vector<std::string>>();
    if (j.contains("outcome_column")) {
      config.schema.outcome_column = j.at("outcome_column").get<std::string>();
    }
    config.schema.require_outcome = j.value("require_outcome", false);
    if (j.contains("quadratic_columns")) {
      config.quadratic_columns =
          j.at("quadratic_columns").get<std::vector<std::string>>();
    }
    if (j.contains("target_ace")) {
      config.target_ace = j.at("target_ace").get<double>();
    }
  } catch (const json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
  return config;
}

ModelTerms terms_from_config(const PilotConfig& config) {
  ModelTerms terms;
  for (const auto& name : config.quadratic_columns) {
    const auto& columns = config.schema.covariate_columns;
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) {
      throw SchemaError("quadratic column \"" + name +
                        "\" is not a covariate column");
    }
    terms.quadratic.push_back(
        static_cast<std::size_t>(std::distance(columns.begin(), it)));
  }
  return terms;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

Report make_report(const std::string& command, const json& inputs,
                   const json& results, const std::string& text) {
  Report report;
  report.text = text;
  report.record = json{{"tool", "msmpower"},
                       {"version", kVersion},
                       {"command", command},
                       {"inputs", inputs},
                       {"results", results}};
  return report;
}

void emit_report(const Report& report, std::ostream& out,
                 const std::optional<std::string>& out_path) {
  out << report.text;
  if (!report.text.empty() && report.text.back() != '\n') out << '\n';
  out << report.record.dump() << '\n';
  if (out_path.has_value()) {
    std::ofstream file(*out_path);
    if (!file) throw ParseError("cannot write " + *out_path);
    file << report.record.dump(2) << '\n';
  }
}

}  // namespace msmpower
