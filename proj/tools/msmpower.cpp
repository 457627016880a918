// Command-line front end: design effects from assumed or pilot-data inputs,
// sample size and power calculations, Monte Carlo power validation, and
// illustrative weight distributions.

#include <CLI11.hpp>

#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "msmpower/deff.hpp"
#include "msmpower/design.hpp"
#include "msmpower/estimation.hpp"
#include "msmpower/io.hpp"
#include "msmpower/simulation.hpp"
#include "msmpower/weightgen.hpp"

namespace {

using msmpower::DesignInputs;
using msmpower::ModelTerms;
using msmpower::PilotConfig;
using msmpower::PilotDataset;
using msmpower::SimulationConfig;
using msmpower::SimulationReport;
using nlohmann::json;

// Table-style display: design effects at 2 decimals, variances at 4,
// sample sizes as integers. Records carry full precision.
std::string fixed(double value, int decimals) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(decimals) << value;
  return out.str();
}

std::optional<std::string> out_path;

void emit(const msmpower::Report& report) {
  msmpower::emit_report(report, std::cout, out_path);
}

int run_deff_assume(const std::string& spec_path, const std::string& arm) {
  const auto spec = msmpower::load_joint_spec(spec_path);
  msmpower::require_valid(spec);
  json results;
  std::ostringstream text;
  text << "Design effects due to weighting (assumed joint distribution)\n";
  for (int a : {0, 1}) {
    if (arm != "both" && arm != std::to_string(a)) continue;
    const double deff = msmpower::closed_form_deff(spec, a);
    results["deff" + std::to_string(a)] = deff;
    text << "  arm " << a << ": deff = " << fixed(deff, 2) << "\n";
  }
  results["p_a1"] = msmpower::treatment_prevalence(spec);
  results["k"] = msmpower::treatment_odds(spec);
  emit(msmpower::make_report("deff assume",
                             json{{"spec", spec}, {"arm", arm}}, results,
                             text.str()));
  return 0;
}

int run_deff_pilot(const std::string& data_path, const std::string& terms_path,
                   const std::string& arm) {
  const PilotConfig config = msmpower::load_pilot_config(terms_path);
  msmpower::CsvReadStats stats;
  const PilotDataset data =
      msmpower::read_pilot_csv(data_path, config.schema, &stats);
  msmpower::require_valid(data);
  const ModelTerms terms = msmpower::terms_from_config(config);
  const auto fit = msmpower::fit_propensity(data, terms);
  const auto weights = msmpower::iptw_weights(fit, data);

  json results;
  results["rows"] = data.size();
  results["rows_dropped_missing_outcome"] = stats.rows_dropped_missing_outcome;
  results["iterations"] = fit.iterations;
  std::ostringstream text;
  text << "Kish design effects from pilot data (" << data.size() << " rows)\n";
  for (int a : {0, 1}) {
    if (arm != "both" && arm != std::to_string(a)) continue;
    const double deff = msmpower::kish_deff_from_pilot(data, weights, a);
    results["deff" + std::to_string(a)] = deff;
    const auto n_arm = data.arm_count(a);
    results["n" + std::to_string(a)] = n_arm;
    text << "  arm " << a << ": deff = " << fixed(deff, 2)
         << "  (n = " << n_arm << ", effective n = "
         << fixed(msmpower::effective_sample_size(
                      static_cast<long>(n_arm), deff), 1)
         << ")\n";
  }
  emit(msmpower::make_report(
      "deff pilot",
      json{{"data", data_path}, {"terms", terms_path}, {"arm", arm}}, results,
      text.str()));
  return 0;
}

int run_samplesize(const std::string& inputs_path) {
  const DesignInputs inputs = msmpower::load_design_inputs(inputs_path);
  const auto with_deff = msmpower::required_sample_size(inputs);
  DesignInputs naive = inputs;
  naive.deff = msmpower::DesignEffectPair{};
  const auto rct = msmpower::required_sample_size(naive);
  const auto adj = msmpower::adjusted_variances(inputs.sigma0_sq,
                                                inputs.sigma1_sq, inputs.deff);

  std::ostringstream text;
  text << "Required sample size (alpha = " << inputs.alpha
       << ", power = " << inputs.power << ", delta = " << inputs.delta
       << ", k = " << inputs.k << ")\n"
       << "  design effects:     " << fixed(inputs.deff.deff0, 2) << " / "
       << fixed(inputs.deff.deff1, 2) << "\n"
       << "  adjusted variances: " << fixed(adj.sigma0_adj, 4) << " / "
       << fixed(adj.sigma1_adj, 4) << "\n"
       << "  n (deff-adjusted):  " << with_deff.n_total << "  ("
       << with_deff.n_treated << " treated, " << with_deff.n_control
       << " control; achieved power " << fixed(with_deff.achieved_power, 4)
       << ")\n"
       << "  n (naive RCT):      " << rct.n_total << "\n";
  emit(msmpower::make_report(
      "samplesize", json{{"inputs", inputs}},
      json{{"n_deff", with_deff},
           {"n_rct", rct},
           {"adjusted_variances", adj}},
      text.str()));
  return 0;
}

int run_power(const std::string& inputs_path, long n) {
  const DesignInputs inputs = msmpower::load_design_inputs(inputs_path);
  const double power = msmpower::compute_power(n, inputs);
  std::ostringstream text;
  text << "Power at n = " << n << ": " << fixed(power, 4) << "\n";
  emit(msmpower::make_report("power",
                             json{{"inputs", inputs}, {"n", n}},
                             json{{"power", power}}, text.str()));
  return 0;
}

std::string report_text(const SimulationReport& report) {
  std::ostringstream text;
  text << "Simulation: " << report.scenario << " (n = " << report.n_used
       << ", R = " << report.replications << ", seed = " << report.seed
       << ")\n"
       << "  empirical power: " << fixed(report.empirical_power, 4)
       << "  (MC stderr " << fixed(report.mc_stderr, 4) << ")\n"
       << "  mean Er0 / Er1:  " << fixed(report.mean_er0, 4) << " / "
       << fixed(report.mean_er1, 4) << "\n"
       << "  coverage:        " << fixed(report.coverage, 4) << "\n"
       << "  population ACE:  " << fixed(report.population_ace, 4) << "\n";
  if (report.n_failed > 0) {
    text << "  failed replications: " << report.n_failed << "\n";
  }
  return text.str();
}

int run_simulate_generative(const std::string& scenario_path,
                            const SimulationConfig& config) {
  const auto spec = msmpower::load_scenario_spec(scenario_path);
  const SimulationReport report = msmpower::run_generative_power(spec, config);
  emit(msmpower::make_report(
      "simulate generative",
      json{{"scenario", spec},
           {"n", config.n},
           {"replications", config.replications},
           {"seed", config.seed},
           {"alpha", config.alpha},
           {"superpopulation_size", config.superpopulation_size}},
      json{{"report", report}}, report_text(report)));
  return 0;
}

int run_simulate_resample(const std::string& data_path,
                          const std::string& config_path,
                          const SimulationConfig& config) {
  const PilotConfig pilot = msmpower::load_pilot_config(config_path);
  if (!pilot.target_ace.has_value()) {
    throw msmpower::SchemaError("resample config must set target_ace");
  }
  if (!pilot.schema.outcome_column.has_value()) {
    throw msmpower::SchemaError("resample config must set outcome_column");
  }
  msmpower::CsvSchema schema = pilot.schema;
  schema.require_outcome = true;
  msmpower::CsvReadStats stats;
  msmpower::ResampleSpec spec;
  spec.base_data = msmpower::read_pilot_csv(data_path, schema, &stats);
  spec.name = "resample:" + data_path;
  spec.propensity_terms = msmpower::terms_from_config(pilot);
  spec.outcome_terms = spec.propensity_terms;
  spec.target_ace = *pilot.target_ace;
  const SimulationReport report = msmpower::run_resample_power(spec, config);
  emit(msmpower::make_report(
      "simulate resample",
      json{{"data", data_path},
           {"config", config_path},
           {"n", config.n},
           {"replications", config.replications},
           {"seed", config.seed},
           {"alpha", config.alpha},
           {"rows", spec.base_data.size()},
           {"rows_dropped_missing_outcome",
            stats.rows_dropped_missing_outcome}},
      json{{"report", report}}, report_text(report)));
  return 0;
}

int run_weights_gen(double deff, std::size_t n, std::uint64_t seed,
                    std::optional<double> tolerance, int attempts) {
  const auto sample =
      msmpower::sample_weight_distribution(deff, n, seed, tolerance, attempts);
  const auto histogram = msmpower::weight_histogram(sample.weights);
  std::ostringstream text;
  text << "Reciprocal-beta weights: target deff " << fixed(deff, 2)
       << ", shape " << fixed(sample.shape, 6) << ", realized Kish deff "
       << fixed(sample.realized_deff, 2) << " (" << sample.attempts
       << " attempt(s))\n"
       << "bin_left\tcount\n"
       << msmpower::histogram_to_text(histogram);
  json bins = json::array();
  for (const auto& bin : histogram) {
    bins.push_back(json{{"left", bin.left}, {"count", bin.count}});
  }
  emit(msmpower::make_report(
      "weights gen",
      json{{"deff", deff}, {"n", n}, {"seed", seed}},
      json{{"shape", sample.shape},
           {"realized_deff", sample.realized_deff},
           {"attempts", sample.attempts},
           {"histogram", bins}},
      text.str()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design effects, sample size, and power for observational "
               "studies analyzed with weighted marginal structural models"};
  app.require_subcommand(1);

  app.add_option("--out", out_path, "Also write the JSON record to this path");

  // deff assume / deff pilot
  auto* deff_cmd = app.add_subcommand("deff", "Design effects");
  deff_cmd->require_subcommand(1);
  auto* assume = deff_cmd->add_subcommand(
      "assume", "Closed-form deff from an assumed joint distribution");
  std::string spec_path, arm = "both";
  assume->add_option("--spec", spec_path, "Joint distribution spec (JSON)")
      ->required();
  assume->add_option("--arm", arm, "0, 1, or both")
      ->check(CLI::IsMember({"0", "1", "both"}));
  auto* pilot = deff_cmd->add_subcommand(
      "pilot", "Kish deff from pilot data with a fitted propensity model");
  std::string data_path, terms_path;
  pilot->add_option("--data", data_path, "Pilot CSV")->required();
  pilot->add_option("--terms", terms_path, "Pilot config (JSON)")->required();
  pilot->add_option("--arm", arm, "0, 1, or both")
      ->check(CLI::IsMember({"0", "1", "both"}));

  // samplesize / power
  auto* samplesize = app.add_subcommand("samplesize",
                                        "Required sample size from inputs");
  std::string inputs_path;
  samplesize->add_option("--inputs", inputs_path, "Design inputs (JSON)")
      ->required();
  auto* power = app.add_subcommand("power", "Power at a given sample size");
  long power_n = 0;
  power->add_option("--inputs", inputs_path, "Design inputs (JSON)")
      ->required();
  power->add_option("--n", power_n, "Total sample size")->required();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo power");
  simulate->require_subcommand(1);
  SimulationConfig sim_config;
  std::string scenario_path, resample_config_path;
  auto* generative = simulate->add_subcommand(
      "generative", "Repeated samples from a generated superpopulation");
  generative->add_option("--scenario", scenario_path, "Scenario spec (JSON)")
      ->required();
  generative->add_option("--n", sim_config.n, "Sample size")->required();
  generative->add_option("--reps", sim_config.replications, "Replications");
  generative->add_option("--seed", sim_config.seed, "RNG seed")->required();
  generative->add_option("--alpha", sim_config.alpha, "Test level");
  generative->add_option("--superpopulation-size",
                         sim_config.superpopulation_size,
                         "Superpopulation size");
  auto* resample = simulate->add_subcommand(
      "resample", "Resampling design built from a pilot dataset");
  resample->add_option("--data", data_path, "Base CSV")->required();
  resample->add_option("--config", resample_config_path,
                       "Resample config (JSON)")
      ->required();
  resample->add_option("--n", sim_config.n, "Sample size")->required();
  resample->add_option("--reps", sim_config.replications, "Replications");
  resample->add_option("--seed", sim_config.seed, "RNG seed")->required();
  resample->add_option("--alpha", sim_config.alpha, "Test level");

  // weights gen
  auto* weights = app.add_subcommand("weights", "Weight distributions");
  weights->require_subcommand(1);
  auto* gen = weights->add_subcommand(
      "gen", "Reciprocal-beta weights achieving a target deff");
  double target_deff = 0.0;
  std::size_t weights_n = 1000;
  std::uint64_t weights_seed = 0;
  double tolerance_value = -1.0;
  int attempts = 50;
  gen->add_option("--deff", target_deff, "Target design effect")->required();
  gen->add_option("--n", weights_n, "Number of draws");
  gen->add_option("--seed", weights_seed, "RNG seed")->required();
  gen->add_option("--tolerance", tolerance_value,
                  "Resample until realized deff is within this tolerance");
  gen->add_option("--attempts", attempts, "Resampling budget");

  CLI11_PARSE(app, argc, argv);

  try {
    if (assume->parsed()) return run_deff_assume(spec_path, arm);
    if (pilot->parsed()) return run_deff_pilot(data_path, terms_path, arm);
    if (samplesize->parsed()) return run_samplesize(inputs_path);
    if (power->parsed()) {
      if (power_n < 2) {
        throw msmpower::InvalidInputsError("n must be at least 2");
      }
      return run_power(inputs_path, power_n);
    }
    if (generative->parsed()) {
      return run_simulate_generative(scenario_path, sim_config);
    }
    if (resample->parsed()) {
      return run_simulate_resample(data_path, resample_config_path,
                                   sim_config);
    }
    if (gen->parsed()) {
      std::optional<double> tolerance;
      if (tolerance_value > 0.0) tolerance = tolerance_value;
      return run_weights_gen(target_deff, weights_n, weights_seed, tolerance,
                             attempts);
    }
  } catch (const msmpower::Error& e) {
    nlohmann::json errors = nlohmann::json::array();
    errors.push_back({{"code", e.code()}, {"message", e.what()}});
    std::cerr << nlohmann::json{{"errors", errors}}.dump() << std::endl;
    return e.kind() == msmpower::ErrorKind::input ? 2 : 3;
  } catch (const std::exception& e) {
    nlohmann::json errors = nlohmann::json::array();
    errors.push_back({{"code", "InternalError"}, {"message", e.what()}});
    std::cerr << nlohmann::json{{"errors", errors}}.dump() << std::endl;
    return 3;
  }
  return 1;
}
