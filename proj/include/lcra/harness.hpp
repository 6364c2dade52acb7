#pragma once

#include <string>
#include <vector>

#include "lcra/config.hpp"
#include "lcra/detect.hpp"

namespace lcra::harness {

enum class SweepVariable { rho, spreading_gain, gamma_db, n_sweeps, layers };

SweepVariable parse_sweep_variable(const std::string& s);  // rho, N, gamma_db, n_sweeps, Q
std::string to_string(SweepVariable v);

struct ExperimentSpec {
  model::SystemConfig base;
  SweepVariable variable = SweepVariable::rho;
  std::vector<double> values;
  int n_trials = 1000;
  detect::DetectorSpec detector;
  bool known_b = true;
  std::string output_path;
  int workers = 1;

  void validate() const;  // throws std::invalid_argument
};

// Reads the base SystemConfig plus the experiment keys: sweep, values (comma
// list), trials, detector, known_b, out, workers. With require_sweep a missing
// sweep/values pair is an error; without it the spec defaults to a single
// n_sweeps point at the detector's own sweep count.
ExperimentSpec experiment_from_map(const model::KeyValueMap& kv, bool require_sweep = true);

// One sweep point. The error metric counts wrongly resolved devices:
// (MD + FA) / 2 per layer, which is exactly the MD (== FA) count when the
// per-layer activity counts are known.
struct MetricsRow {
  std::string sweep_name;
  double sweep_value = 0.0;
  bool feasible = true;
  std::vector<double> layer_md;      // mean MD count per layer
  std::vector<double> layer_fa;      // mean FA count per layer
  std::vector<double> layer_stderr;  // std error of the per-layer error metric
  double total_md = 0.0;
  double total_fa = 0.0;
  double total_err = 0.0;  // sum over layers of (md + fa) / 2
  double total_stderr = 0.0;
  long n_trials = 0;
  double seconds = 0.0;
};

// Per-trial RNG streams derive from (seed, sweep index, trial index) and the
// per-trial counts reduce in trial order, so results do not depend on the
// worker count.
std::vector<MetricsRow> run_experiment(const ExperimentSpec& spec);

// Columns: sweep_name, sweep_value, layer, mean_md, mean_fa, total, stderr,
// n_trials, seconds; one line per layer plus a "total" line per row; LF
// endings; floats at full round-trip precision. zero_timing clears the
// wall-clock column for byte-reproducible output.
void emit_csv(const std::vector<MetricsRow>& rows, const std::string& path,
              bool zero_timing = false);

std::vector<MetricsRow> parse_metrics_csv(const std::string& path);

}  // namespace lcra::harness
