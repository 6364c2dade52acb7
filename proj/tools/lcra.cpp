#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lcra/design.hpp"
#include "lcra/detect.hpp"
#include "lcra/harness.hpp"
#include "lcra/model.hpp"
#include "lcra/stats.hpp"
#include "lcra/types.hpp"

namespace {

using namespace lcra;

// Flags override the config file only when given explicitly; the _set /
// sentinel members distinguish "absent" from "default".
struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::string detector = "cavi:5";
  bool detector_set = false;
  std::string known_b = "true";
  bool known_b_set = false;
  std::string xi_convention = "printed";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = 0;   // 0: keep config/subcommand default
  int workers = 0;  // 0: keep config default
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "flat key-value configuration file");
  sub->add_option("--seed", args.seed, "RNG seed (overrides config)")
      ->each([&](const std::string&) { args.seed_set = true; });
  sub->add_option("--out", args.out_path, "output CSV path");
  sub->add_option("--trials", args.trials, "Monte Carlo trials");
  sub->add_option("--detector", args.detector, "detector: cavi:<sweeps> or map")
      ->each([&](const std::string&) { args.detector_set = true; });
  sub->add_option("--known-b", args.known_b, "per-layer activity counts known")
      ->check(CLI::IsMember({"true", "false"}))
      ->each([&](const std::string&) { args.known_b_set = true; });
  sub->add_option("--xi-convention", args.xi_convention, "PEP xi convention")
      ->check(CLI::IsMember({"printed", "lemma2"}));
  sub->add_option("--workers", args.workers, "worker threads for trials");
}

model::SystemConfig load_base_config(const CommonArgs& args) {
  model::SystemConfig cfg;
  if (!args.config_path.empty()) cfg = model::load_config(args.config_path);
  if (args.seed_set) cfg.seed = args.seed;
  return cfg;
}

std::string fmt(double x, int prec = 6) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
  return buf;
}

int run_design(const CommonArgs& args, double gamma_db, bool gamma_db_set) {
  model::SystemConfig cfg = load_base_config(args);
  if (gamma_db_set) cfg.target_snr = from_db(gamma_db);
  const auto plan = design::plan_power_levels(cfg);
  if (!plan.feasible) {
    std::cout << "plan infeasible: gamma_target " << fmt(cfg.target_snr)
              << " is below the single-layer SIR limit "
              << fmt(design::beta(1.0 / cfg.noise_power,
                                  cfg.access_prob.back() * cfg.devices_per_layer() /
                                      cfg.spreading_gain))
              << "\n";
    return 1;
  }
  const auto rep = design::asymptotic_analysis(plan, cfg.symbols_per_slot);

  std::printf("power plan: Q=%d M=%d N=%d T=%d gamma=%.6g load=%.6g\n", plan.layers,
              plan.devices_per_layer, plan.spreading_gain, cfg.symbols_per_slot,
              plan.gamma_target, plan.load);
  std::printf("%-6s %-8s %-12s %-9s %-12s %-9s %-12s %-10s %-10s %-10s\n", "layer", "R", "V",
              "V_dB", "sigma2", "tx_dB", "beta", "p_fa", "p_md", "md_bound");
  for (int q = 0; q < plan.layers; ++q) {
    const auto& lp = plan.layer[q];
    const auto& la = rep.layer[q];
    std::printf("%-6d %-8.4f %-12.6g %-9.3f %-12.6g %-9.3f %-12.6g %-10.3g %-10.3g %-10.3g\n",
                q + 1, lp.radius, lp.receive_power, to_db(lp.receive_power),
                lp.interference_var, to_db(lp.tx_power), lp.sir, la.p_fa, la.p_md, la.md_bound);
  }
  if (!args.out_path.empty()) {
    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) throw std::runtime_error("design: cannot open '" + args.out_path + "'");
    out << "layer,R,V_dB,sigma2,tx_dB,beta,p_fa,p_md,md_bound\n";
    char buf[256];
    for (int q = 0; q < plan.layers; ++q) {
      const auto& lp = plan.layer[q];
      const auto& la = rep.layer[q];
      std::snprintf(buf, sizeof(buf),
                    "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", q + 1, lp.radius,
                    to_db(lp.receive_power), lp.interference_var, to_db(lp.tx_power), lp.sir,
                    la.p_fa, la.p_md, la.md_bound);
      out << buf;
    }
  }
  return 0;
}

void print_rows(const std::vector<harness::MetricsRow>& rows) {
  std::printf("%-10s %-12s %-7s %-12s %-12s %-12s %-12s %-8s %-9s\n", "sweep", "value", "layer",
              "mean_md", "mean_fa", "total", "stderr", "trials", "seconds");
  for (const auto& row : rows) {
    if (!row.feasible) {
      std::printf("%-10s %-12s infeasible\n", row.sweep_name.c_str(), fmt(row.sweep_value).c_str());
      continue;
    }
    for (std::size_t l = 0; l < row.layer_md.size(); ++l)
      std::printf("%-10s %-12s %-7zu %-12s %-12s %-12s %-12s %-8ld %-9.2f\n",
                  row.sweep_name.c_str(), fmt(row.sweep_value).c_str(), l + 1,
                  fmt(row.layer_md[l]).c_str(), fmt(row.layer_fa[l]).c_str(),
                  fmt(0.5 * (row.layer_md[l] + row.layer_fa[l])).c_str(),
                  fmt(row.layer_stderr[l]).c_str(), row.n_trials, row.seconds);
    std::printf("%-10s %-12s %-7s %-12s %-12s %-12s %-12s %-8ld %-9.2f\n", row.sweep_name.c_str(),
                fmt(row.sweep_value).c_str(), "total", fmt(row.total_md).c_str(),
                fmt(row.total_fa).c_str(), fmt(row.total_err).c_str(),
                fmt(row.total_stderr).c_str(), row.n_trials, row.seconds);
  }
}

harness::ExperimentSpec experiment_from_args(const CommonArgs& args, bool require_config) {
  harness::ExperimentSpec spec;
  if (!args.config_path.empty()) {
    spec = harness::experiment_from_map(model::read_key_values_file(args.config_path),
                                        require_config);
  } else if (require_config) {
    throw std::invalid_argument("sweep: --config is required");
  }
  if (args.seed_set) spec.base.seed = args.seed;
  if (args.trials > 0) spec.n_trials = args.trials;
  if (args.detector_set) spec.detector = detect::parse_detector(args.detector);
  if (args.known_b_set) spec.known_b = args.known_b == "true";
  if (args.workers > 0) spec.workers = args.workers;
  if (!args.out_path.empty()) spec.output_path = args.out_path;
  return spec;
}

int run_simulate(const CommonArgs& args, const std::string& dump_slot_path) {
  harness::ExperimentSpec spec = experiment_from_args(args, false);
  if (args.config_path.empty()) spec.base = load_base_config(args);
  if (args.trials == 0 && args.config_path.empty()) spec.n_trials = 100;
  // A single sweep point that leaves the configuration untouched.
  spec.variable = harness::SweepVariable::n_sweeps;
  spec.values = {static_cast<double>(spec.detector.cavi_sweeps)};

  if (!dump_slot_path.empty()) {
    auto rng = RandomStream::derive(spec.base.seed, 0, 0);
    const auto plan = design::plan_power_levels(spec.base);
    if (!plan.feasible) throw std::runtime_error("simulate: plan infeasible");
    const auto ens = model::gen_spreading(spec.base, rng);
    const auto slot = model::synth_slot(spec.base, plan, ens, rng, spec.base.symbol_model);
    model::dump_slot(slot, dump_slot_path);
    std::cout << "slot dumped to " << dump_slot_path << "\n";
  }

  const auto rows = harness::run_experiment(spec);
  print_rows(rows);
  if (!spec.output_path.empty()) {
    harness::emit_csv(rows, spec.output_path);
    std::cout << "wrote " << spec.output_path << "\n";
  }
  return 0;
}

int run_sweep(const CommonArgs& args, bool stable_output) {
  harness::ExperimentSpec spec = experiment_from_args(args, true);
  const auto rows = harness::run_experiment(spec);
  print_rows(rows);
  const std::string path = spec.output_path.empty() ? "sweep.csv" : spec.output_path;
  harness::emit_csv(rows, path, stable_output);
  std::cout << "wrote " << path << "\n";
  return 0;
}

struct PepArgs {
  int m = 100, n = 30, b0 = 5, t = 100;
  double v = 4.3471976735856328, sigma2 = 1.0, rho = 0.05;
};

int run_pep(const CommonArgs& args, const PepArgs& pa) {
  const int n_trials = args.trials > 0 ? args.trials : 10000;
  const std::uint64_t seed = args.seed_set ? args.seed : 1;
  const auto conv = args.xi_convention == "lemma2" ? design::XiConvention::lemma2
                                                   : design::XiConvention::printed;
  if (pa.b0 < 0 || pa.b0 > pa.m) throw std::invalid_argument("pep: B0 must lie in [0, M]");

  auto code_rng = RandomStream::derive(seed, 0, 0);
  model::SystemConfig gen_cfg;
  gen_cfg.device_count = pa.m;
  gen_cfg.layer_count = 1;
  gen_cfg.spreading_gain = pa.n;
  gen_cfg.symbols_per_slot = pa.t;
  gen_cfg.access_prob = {pa.rho};
  const CMatrix codes = model::gen_spreading(gen_cfg, code_rng).layer_codes[0];
  std::vector<std::uint8_t> b_true(pa.m, 0);
  for (int i = 0; i < pa.b0; ++i) b_true[i] = 1;

  struct Line {
    std::string direction;
    double alpha, p_formula, p_emp, se;
    bool ks;
  };
  std::vector<Line> lines;

  if (pa.b0 < pa.m) {
    auto rng = RandomStream::derive(seed, 1, 0);
    const auto est = detect::empirical_pep(codes, b_true, pa.b0, pa.v, pa.sigma2, pa.rho, pa.t,
                                           n_trials, rng);
    const auto rep = design::pep_probabilities(pa.b0, pa.m, pa.rho, pa.t, pa.v, est.alpha,
                                               est.alpha_prime, conv);
    lines.push_back({"fa", est.alpha, rep.p_fa, est.estimate, est.std_error, est.ks_pass_1pct});
  }
  if (pa.b0 > 0) {
    auto rng = RandomStream::derive(seed, 2, 0);
    const auto est =
        detect::empirical_pep(codes, b_true, 0, pa.v, pa.sigma2, pa.rho, pa.t, n_trials, rng);
    const auto rep = design::pep_probabilities(pa.b0, pa.m, pa.rho, pa.t, pa.v, est.alpha,
                                               est.alpha_prime, conv);
    lines.push_back(
        {"md", est.alpha_prime, rep.p_md, est.estimate, est.std_error, est.ks_pass_1pct});
  } else {
    std::cout << "no-MD-possible: support is empty (B0 = 0)\n";
  }
  if (pa.b0 == pa.m) std::cout << "no-FA-possible: support is full (B0 = M)\n";

  std::printf("%-5s %-6s %-6s %-12s %-12s %-12s %-12s %-4s\n", "dir", "T", "V", "alpha",
              "p_formula", "p_empirical", "stderr", "ks");
  for (const auto& ln : lines)
    std::printf("%-5s %-6d %-6.4g %-12.6g %-12.6g %-12.6g %-12.6g %-4s\n", ln.direction.c_str(),
                pa.t, pa.v, ln.alpha, ln.p_formula, ln.p_emp, ln.se, ln.ks ? "pass" : "FAIL");

  if (!args.out_path.empty()) {
    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) throw std::runtime_error("pep: cannot open '" + args.out_path + "'");
    out << "direction,T,V,alpha,p_formula,p_empirical,stderr\n";
    char buf[256];
    for (const auto& ln : lines) {
      std::snprintf(buf, sizeof(buf), "%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    ln.direction.c_str(), pa.t, pa.v, ln.alpha, ln.p_formula, ln.p_emp, ln.se);
      out << buf;
    }
  }
  return 0;
}

struct MomentArgs {
  int m = 100, kmax = 4, samples = 100000, bins = 61;
  double rho = 0.05, sigma2 = 1.0;
  std::string hist_out = "moments_hist.csv";
};

int run_moments(const CommonArgs& args, const MomentArgs& ma) {
  const std::uint64_t seed = args.seed_set ? args.seed : 1;
  const auto reports = stats::random_sum_moments(ma.m, ma.rho, ma.sigma2, ma.kmax);
  std::printf("%-4s %-14s %-14s %-14s\n", "k", "EY_k", "EZ_k", "E[B^(k/2)]");
  for (const auto& rep : reports)
    std::printf("%-4d %-14.8g %-14.8g %-14.8g\n", rep.order, rep.random_sum, rep.reference,
                rep.binom_moment);
  std::printf("excess kurtosis: %.8g\n", reports.back().excess_kurtosis);

  const std::string out_path = args.out_path.empty() ? "moments.csv" : args.out_path;
  {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("moments: cannot open '" + out_path + "'");
    out << "k,EY_k,EZ_k\n";
    char buf[128];
    for (const auto& rep : reports) {
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", rep.order, rep.random_sum,
                    rep.reference);
      out << buf;
    }
  }

  auto rng = RandomStream::derive(seed, 0, 0);
  const auto sample =
      stats::random_sum_sample(ma.m, ma.rho, ma.sigma2, ma.samples, rng);
  const double ref_sd = std::sqrt(ma.m * ma.rho * ma.sigma2);
  const double lim = 5.0 * ref_sd;
  const double width = 2.0 * lim / ma.bins;
  std::vector<long> counts(ma.bins, 0);
  for (double y : sample) {
    const int bin = static_cast<int>((y + lim) / width);
    if (bin >= 0 && bin < ma.bins) ++counts[bin];
  }
  {
    std::ofstream out(ma.hist_out, std::ios::binary);
    if (!out) throw std::runtime_error("moments: cannot open '" + ma.hist_out + "'");
    out << "bin_center,count,gaussian_pdf\n";
    char buf[128];
    for (int i = 0; i < ma.bins; ++i) {
      const double center = -lim + (i + 0.5) * width;
      const double pdf = std::exp(-0.5 * center * center / (ref_sd * ref_sd)) /
                         (ref_sd * std::sqrt(2.0 * std::numbers::pi));
      std::snprintf(buf, sizeof(buf), "%.17g,%ld,%.17g\n", center, counts[i], pdf);
      out << buf;
    }
  }
  std::cout << "wrote " << out_path << " and " << ma.hist_out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"layered compressive random access: design, simulation and analysis"};
  app.require_subcommand(1);

  CommonArgs design_args, sim_args, sweep_args, pep_args_c, mom_args_c;
  double gamma_db = 0.0;
  std::string dump_slot_path;
  bool stable_output = false;
  PepArgs pep_args;
  MomentArgs mom_args;

  auto* design_cmd = app.add_subcommand("design", "power plan and asymptotic error analysis");
  add_common(design_cmd, design_args);
  auto* gamma_opt = design_cmd->add_option("--gamma-db", gamma_db, "target SNR in dB");

  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo run at one configuration");
  add_common(sim_cmd, sim_args);
  sim_cmd->add_option("--dump-slot", dump_slot_path, "write one slot realization to a file");

  auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep from a config file");
  add_common(sweep_cmd, sweep_args);
  sweep_cmd->add_flag("--stable-output", stable_output,
                      "zero the wall-clock column for byte-reproducible CSV");

  auto* pep_cmd = app.add_subcommand("pep", "single-flip error probability: formula vs simulation");
  add_common(pep_cmd, pep_args_c);
  pep_cmd->add_option("--M", pep_args.m, "devices");
  pep_cmd->add_option("--N", pep_args.n, "spreading gain");
  pep_cmd->add_option("--B0", pep_args.b0, "true support size");
  pep_cmd->add_option("--T", pep_args.t, "symbols per slot");
  pep_cmd->add_option("--V", pep_args.v, "receive power");
  pep_cmd->add_option("--sigma2", pep_args.sigma2, "noise-plus-interference power");
  pep_cmd->add_option("--rho", pep_args.rho, "access probability");

  auto* mom_cmd = app.add_subcommand("moments", "random-sum moments and histogram");
  add_common(mom_cmd, mom_args_c);
  mom_cmd->add_option("--M", mom_args.m, "devices");
  mom_cmd->add_option("--rho", mom_args.rho, "access probability");
  mom_cmd->add_option("--sigma2", mom_args.sigma2, "per-term variance");
  mom_cmd->add_option("--kmax", mom_args.kmax, "highest moment order (even)");
  mom_cmd->add_option("--samples", mom_args.samples, "empirical sample count");
  mom_cmd->add_option("--bins", mom_args.bins, "histogram bins");
  mom_cmd->add_option("--hist-out", mom_args.hist_out, "histogram CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (design_cmd->parsed()) return run_design(design_args, gamma_db, gamma_opt->count() > 0);
    if (sim_cmd->parsed()) return run_simulate(sim_args, dump_slot_path);
    if (sweep_cmd->parsed()) return run_sweep(sweep_args, stable_output);
    if (pep_cmd->parsed()) return run_pep(pep_args_c, pep_args);
    if (mom_cmd->parsed()) return run_moments(mom_args_c, mom_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
