#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "msmpower/estimation.hpp"
#include "msmpower/simulation.hpp"
#include "msmpower/types.hpp"

// Data ingestion, config file parsing, JSON serialization of every domain
// type, and report emission.

namespace msmpower {

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

struct CsvSchema {
  std::string treatment_column;
  std::vector<std::string> covariate_columns;
  std::optional<std::string> outcome_column;
  // When set, rows with a missing outcome are dropped (and counted) instead
  // of kept with an absent y.
  bool require_outcome = false;
};

struct CsvReadStats {
  std::size_t rows_read = 0;
  std::size_t rows_dropped_missing_outcome = 0;
};

// Reads a comma-delimited file with a header row. Treatment must parse as 0
// or 1 and covariates as finite reals; offending rows are reported by number
// (1-based, counting the header as line 1).
PilotDataset read_pilot_csv(const std::string& path, const CsvSchema& schema,
                            CsvReadStats* stats = nullptr);

// ---------------------------------------------------------------------------
// Config files (JSON with explicit keys; vocabulary documented in README)
// ---------------------------------------------------------------------------

struct PilotConfig {
  CsvSchema schema;
  std::vector<std::string> quadratic_columns;
  std::optional<double> target_ace;  // resample configs only
};

JointDistributionSpec load_joint_spec(const std::string& path);
ScenarioSpec load_scenario_spec(const std::string& path);
DesignInputs load_design_inputs(const std::string& path);
PilotConfig load_pilot_config(const std::string& path);

// Resolves quadratic column names against the schema's covariate list.
ModelTerms terms_from_config(const PilotConfig& config);

nlohmann::json load_json_file(const std::string& path);

// ---------------------------------------------------------------------------
// JSON serialization (round-trips exactly)
// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const ConfounderCell& cell);
void from_json(const nlohmann::json& j, ConfounderCell& cell);
void to_json(nlohmann::json& j, const JointDistributionSpec& spec);
void from_json(const nlohmann::json& j, JointDistributionSpec& spec);
void to_json(nlohmann::json& j, const OutcomeLaw& law);
void from_json(const nlohmann::json& j, OutcomeLaw& law);
void to_json(nlohmann::json& j, const ScenarioSpec& spec);
void from_json(const nlohmann::json& j, ScenarioSpec& spec);
void to_json(nlohmann::json& j, const PilotDataset& data);
void from_json(const nlohmann::json& j, PilotDataset& data);
void to_json(nlohmann::json& j, const WeightSet& weights);
void from_json(const nlohmann::json& j, WeightSet& weights);
void to_json(nlohmann::json& j, const DesignEffectPair& deff);
void from_json(const nlohmann::json& j, DesignEffectPair& deff);
void to_json(nlohmann::json& j, const DesignInputs& inputs);
void from_json(const nlohmann::json& j, DesignInputs& inputs);
void to_json(nlohmann::json& j, const AdjustedVariances& adj);
void from_json(const nlohmann::json& j, AdjustedVariances& adj);
void to_json(nlohmann::json& j, const SampleSizeResult& result);
void from_json(const nlohmann::json& j, SampleSizeResult& result);
void to_json(nlohmann::json& j, const MsmFit& fit);
void from_json(const nlohmann::json& j, MsmFit& fit);
void to_json(nlohmann::json& j, const SimulationReport& report);
void from_json(const nlohmann::json& j, SimulationReport& report);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

// Every report carries a human-readable block and a machine-readable record
// holding the command, all inputs, the seed where applicable, and the
// toolkit version.
struct Report {
  std::string text;
  nlohmann::json record;
};

Report make_report(const std::string& command, const nlohmann::json& inputs,
                   const nlohmann::json& results, const std::string& text);

// Writes the text block and the single-line JSON record to `out`; when
// out_path is set, also writes the record there.
void emit_report(const Report& report, std::ostream& out,
                 const std::optional<std::string>& out_path);

}  // namespace msmpower
