#pragma once

// Batch front-end: turn a flat config into one experiment run and its
// CSV/JSON artifacts. Identical configs produce byte-identical artifacts.

#include <optional>
#include <string>
#include <vector>

#include "wva/io.hpp"
#include "wva/model.hpp"
#include "wva/noise.hpp"
#include "wva/phasespace.hpp"

namespace wva {

enum class Experiment {
  estimate,
  kick,
  flywheel,
  fisher,
  decohere,
  husimi,
  zassenhaus_check,
};

Experiment experiment_from_string(const std::string& name);
std::string to_string(Experiment e);

struct SweepSpec {
  std::string parameter;        // config key, e.g. "params.theta_postselect"
  std::vector<double> values;   // resolved grid, in output order
};

struct RunConfig {
  Experiment experiment = Experiment::estimate;
  ConfigMap raw;  // normalized key-value view; reparses to the same RunConfig
  ExperimentParams params;
  NoiseParams noise;
  PDDSchedule schedule;
  std::optional<SweepSpec> sweep;
  std::string output_dir;

  // experiment extras
  int n_kicks = 1;
  int oracle_steps = 10000;
  bool oracle_check_convergence = true;
  std::vector<double> plateau_grid;
  bool oracle_diagnostic = false;
  QGridSpec husimi_spec;
  std::string husimi_source = "kick";
  Complex husimi_alpha{0.0, 0.0};
  int decohere_samples = 90;
  bool kick_diagnostic = false;
  std::optional<double> calibrate_target;
  NoiseChannel calibrate_channel = NoiseChannel::dephasing;
};

// Builds and validates a RunConfig from a flat config map. `experiment` from
// the command line must agree with the config's `experiment` key if both are
// present.
RunConfig parse_run_config(const std::optional<Experiment>& experiment, ConfigMap cfg,
                           const std::string& output_dir_override);

// Executes the experiment and writes its artifacts plus manifest.json under
// output_dir. Returns the list of artifact file names (manifest last).
std::vector<std::string> run(const RunConfig& config);

// CLI entry: catches wva errors and maps them to exit codes 1/2/3.
int run_cli(const std::optional<Experiment>& experiment, const std::string& config_path,
            const std::vector<std::string>& overrides, const std::string& output_dir);

}  // namespace wva
