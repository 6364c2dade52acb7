// Acceptance gate: one pass/fail line per criterion, exit code = #failures.
// Every check is fully seeded, so a given build either always passes or
// always fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lcra/design.hpp"
#include "lcra/detect.hpp"
#include "lcra/harness.hpp"
#include "lcra/model.hpp"
#include "lcra/rng.hpp"
#include "lcra/stats.hpp"
#include "lcra/types.hpp"

#ifndef LCRA_BIN
#error "LCRA_BIN must name the CLI executable"
#endif

namespace {

using namespace lcra;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
  return buf;
}

int run_cli(const std::string& args, const std::string& log) {
  const std::string cmd = std::string("\"") + LCRA_BIN + "\" " + args + " > " + log + " 2>&1";
  return std::system(cmd.c_str());
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::vector<std::vector<double>> read_csv(const std::string& path, std::string& header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::getline(in, header);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& f : split(line, ',')) row.push_back(std::stod(f));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CMatrix random_codes(int n, int m, RandomStream& rng) {
  CMatrix g(n, m);
  const double var = 1.0 / n;
  for (int c = 0; c < m; ++c)
    for (int r = 0; r < n; ++r) g(r, c) = rng.cgauss(var);
  return g;
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  return std::exp(x) / (1.0 + std::exp(x));
}

// ---- criterion 1: reference power plan through the CLI --------------------

Outcome power_plan_reference() {
  const auto t0 = Clock::now();
  const int rc = run_cli("design --out acc_design.csv", "acc_design.log");
  const double dt = seconds_since(t0);
  if (rc != 0) return {false, "CLI exit code " + std::to_string(rc)};

  std::string header;
  const auto rows = read_csv("acc_design.csv", header);
  std::remove("acc_design.csv");
  std::remove("acc_design.log");
  if (rows.size() != 3) return {false, "expected 3 layers, got " + std::to_string(rows.size())};

  const double want_r[] = {0.577, 0.816, 1.000};
  const double want_v[] = {32.840, 19.618, 6.382};
  const double want_tx[] = {24.490, 16.536, 6.382};
  std::string got;
  bool ok = dt < 1.0;
  for (int q = 0; q < 3; ++q) {
    const double r = rows[q][1], v_db = rows[q][2], tx_db = rows[q][4];
    ok = ok && std::abs(r - want_r[q]) < 0.001 && std::abs(v_db - want_v[q]) < 0.01 &&
         std::abs(tx_db - want_tx[q]) < 0.01;
    got += (q ? " " : "") + fmt(v_db, 5) + "/" + fmt(tx_db, 5) + "dB R=" + fmt(r, 3);
  }
  return {ok, got + ", " + fmt(dt, 2) + " s"};
}

// ---- criterion 2: load-capacity fixed point and empirical MMSE SIR --------

Outcome fixed_point_oracle() {
  const auto t0 = Clock::now();
  const double gammas[] = {0.25, 0.5, 1, 2, 4, 8, 16, 32, 64, 128};
  double worst = 0.0;
  for (double g : gammas) {
    if (design::beta(g, 0.0) != g) return {false, "beta(gamma, 0) != gamma at " + fmt(g)};
    for (int i = 1; i <= 10; ++i) {
      const double k = 0.05 * i;
      const double b = design::beta(g, k);
      const double resid = b * b + b * (1.0 - g + g * k) - g;
      const double scale = b * b + std::abs(b * (1.0 - g + g * k)) + g;
      worst = std::max(worst, std::abs(resid) / scale);
    }
  }
  if (worst > 1e-10) return {false, "fixed-point residual " + fmt(worst)};

  // 33 interferers over 198 chips is a load of exactly 1/6.
  const int n = 198, b_cnt = 33, draws = 500;
  auto rng = RandomStream::derive(21, 0, 0);
  double acc = 0.0;
  for (int i = 0; i < draws; ++i) {
    const CMatrix codes = random_codes(n, b_cnt + 1, rng);
    acc += design::mmse_sir(codes.col(0), codes.rightCols(b_cnt), 1.0);
  }
  const double mean = acc / draws;
  const double want = 0.92014;
  const double dt = seconds_since(t0);
  const bool ok = std::abs(mean - want) < 0.05 * want && dt < 30.0;
  return {ok, "residual " + fmt(worst, 2) + ", SIR mean " + fmt(mean, 5) + " vs " +
                  fmt(want, 5) + ", " + fmt(dt, 2) + " s"};
}

// ---- criterion 3: random-sum moments vs the Gaussian reference ------------

Outcome moment_oracle() {
  const auto t0 = Clock::now();
  const int m = 100;
  const double rho = 0.05, sigma2 = 1.0;
  const auto reports = stats::random_sum_moments(m, rho, sigma2, 4);
  const auto& k2 = reports[1];
  const auto& k4 = reports[3];
  bool ok = std::abs(k2.random_sum - 5.0) < 1e-9 && std::abs(k2.reference - 5.0) < 1e-9 &&
            std::abs(k4.random_sum - 89.25) < 1e-9 && std::abs(k4.reference - 75.0) < 1e-9 &&
            k4.random_sum >= k4.reference;

  auto rng = RandomStream::derive(31, 0, 0);
  const auto sample = stats::random_sum_sample(m, rho, sigma2, 1000000, rng);
  double mean = 0.0;
  for (double y : sample) mean += y;
  mean /= sample.size();
  double m2 = 0.0, m4 = 0.0;
  for (double y : sample) {
    const double d = y - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= sample.size();
  m4 /= sample.size();
  const double kurt = m4 / (m2 * m2) - 3.0;
  ok = ok && std::abs(m2 - 5.0) < 0.05 && std::abs(kurt - 0.57) < 0.057;

  // Moment-generating function of the random sum against both envelopes,
  // all in log domain.
  for (int i = 1; i <= 10; ++i) {
    const double s = 0.1 * i;
    const double half_s2 = 0.5 * sigma2 * s * s;
    const double mid = m * std::log1p(rho * std::expm1(half_s2));
    ok = ok && mid >= m * rho * half_s2 - 1e-12 && mid <= m * half_s2 + 1e-12;
  }
  const double dt = seconds_since(t0);
  ok = ok && dt < 30.0;
  return {ok, "EY4 " + fmt(k4.random_sum, 6) + " >= EZ4 " + fmt(k4.reference, 4) +
                  ", sample var " + fmt(m2, 5) + ", kurt " + fmt(kurt, 3) + ", " +
                  fmt(dt, 2) + " s"};
}

// ---- criterion 4: variational posterior agreement -------------------------

Outcome posterior_agreement() {
  const auto t0 = Clock::now();
  auto rng = RandomStream::derive(41, 0, 0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int n = 4 + static_cast<int>(rng.uniform() * 12);
    const int t = 1 + static_cast<int>(rng.uniform() * 30);
    const double v = 0.5 + 5.0 * rng.uniform();
    const double sigma2 = 0.3 + 2.0 * rng.uniform();
    const double rho = 0.02 + 0.9 * rng.uniform();
    const CMatrix g = random_codes(n, 1, rng);
    CMatrix y(n, t);
    for (int c = 0; c < t; ++c)
      for (int r = 0; r < n; ++r) y(r, c) = rng.cgauss(sigma2 + v / n);
    const auto state = detect::cavi_detect(y, g, v, sigma2, rho, 2);
    const double exact = logistic(detect::log_ap(y, g, {1}, v, sigma2, rho) -
                                  detect::log_ap(y, g, {0}, v, sigma2, rho));
    worst = std::max(worst, std::abs(state.beliefs[0] - exact));
  }
  if (worst > 1e-8) return {false, "single-device belief off by " + fmt(worst)};

  auto rng2 = RandomStream::derive(42, 0, 0);
  const int n = 8, m = 12, t = 50, trials = 200;
  const double v = 100.0, sigma2 = 1.0, rho = 0.2;
  int matches = 0;
  for (int i = 0; i < trials; ++i) {
    const CMatrix codes = random_codes(n, m, rng2);
    std::vector<std::uint8_t> truth(m, 0);
    for (auto& b : truth) b = rng2.bernoulli(rho) ? 1 : 0;
    CMatrix y(n, t);
    for (int c = 0; c < t; ++c)
      for (int r = 0; r < n; ++r) y(r, c) = rng2.cgauss(sigma2);
    for (int dev = 0; dev < m; ++dev)
      if (truth[dev]) {
        CVector s(t);
        for (int c = 0; c < t; ++c) s(c) = rng2.cgauss(v);
        y += codes.col(dev) * s.transpose();
      }
    const auto map = detect::map_bruteforce(y, codes, v, sigma2, rho);
    const auto state = detect::cavi_detect(y, codes, v, sigma2, rho, 5);
    std::vector<int> map_idx;
    for (int dev = 0; dev < m; ++dev)
      if (map[dev]) map_idx.push_back(dev);
    matches += detect::select_top_b(state.beliefs, static_cast<int>(map_idx.size())) == map_idx;
  }
  const double dt = seconds_since(t0);
  const bool ok = matches >= 180 && dt < 120.0;
  return {ok, "belief gap " + fmt(worst, 2) + ", exhaustive-search match " +
                  std::to_string(matches) + "/200, " + fmt(dt, 2) + " s"};
}

// ---- criterion 5: single-flip error rates, formula vs simulation ----------

Outcome pairwise_error_rates() {
  const auto t0 = Clock::now();
  const int trials = 10000;
  std::string got;
  bool ok = true;

  auto gen = [](int m, int n, std::uint64_t seed) {
    auto rng = RandomStream::derive(seed, 0, 0);
    return random_codes(n, m, rng);
  };

  // Symmetric prior with B0 = (M -+ 1)/2 cancels the combinatorial prior
  // terms, and V = 1 makes the two xi conventions coincide.
  {
    const int m = 61, n = 40, t = 50;
    const CMatrix codes = gen(m, n, 51);
    std::vector<std::uint8_t> b(m, 0);
    for (int i = 0; i < 30; ++i) b[i] = 1;
    auto rng = RandomStream::derive(51, 1, 0);
    const auto est = detect::empirical_pep(codes, b, 30, 1.0, 1.0, 0.5, t, trials, rng);
    const auto rep = design::pep_probabilities(30, m, 0.5, t, 1.0, est.alpha, est.alpha_prime);
    ok = ok && rep.p_fa >= 1e-3 && std::abs(est.estimate - rep.p_fa) < 3.0 * est.std_error &&
         est.ks_pass_1pct;
    got += "fa " + fmt(est.estimate, 3) + " vs " + fmt(rep.p_fa, 3);
  }
  {
    const int m = 61, n = 40, t = 50;
    const CMatrix codes = gen(m, n, 51);
    std::vector<std::uint8_t> b(m, 0);
    for (int i = 0; i < 31; ++i) b[i] = 1;
    auto rng = RandomStream::derive(51, 2, 0);
    const auto est = detect::empirical_pep(codes, b, 0, 1.0, 1.0, 0.5, t, trials, rng);
    const auto rep = design::pep_probabilities(31, m, 0.5, t, 1.0, est.alpha, est.alpha_prime);
    ok = ok && rep.p_md >= 1e-3 && std::abs(est.estimate - rep.p_md) < 3.0 * est.std_error &&
         est.ks_pass_1pct;
    got += ", md " + fmt(est.estimate, 3) + " vs " + fmt(rep.p_md, 3);
  }
  // V != 1: the chi-squared scale of the decision statistic, not the
  // low-power surrogate, must match the simulation.
  {
    const int m = 41, n = 30, t = 4;
    const double v = 4.0;
    const CMatrix codes = gen(m, n, 52);
    std::vector<std::uint8_t> b(m, 0);
    for (int i = 0; i < 20; ++i) b[i] = 1;
    auto rng = RandomStream::derive(52, 1, 0);
    const auto est = detect::empirical_pep(codes, b, 20, v, 1.0, 0.5, t, trials, rng);
    const auto sharp = design::pep_probabilities(20, m, 0.5, t, v, est.alpha, est.alpha_prime,
                                                 design::XiConvention::lemma2);
    const auto loose = design::pep_probabilities(20, m, 0.5, t, v, est.alpha, est.alpha_prime,
                                                 design::XiConvention::printed);
    ok = ok && sharp.p_fa >= 1e-3 &&
         std::abs(est.estimate - sharp.p_fa) < 3.0 * est.std_error && est.ks_pass_1pct;
    got += ", fa@V=4 " + fmt(est.estimate, 3) + " vs " + fmt(sharp.p_fa, 3) + " (surrogate " +
           fmt(loose.p_fa, 3) + ")";
  }
  {
    const int m = 41, n = 30, t = 4;
    const double v = 4.0;
    const CMatrix codes = gen(m, n, 52);
    std::vector<std::uint8_t> b(m, 0);
    for (int i = 0; i < 21; ++i) b[i] = 1;
    auto rng = RandomStream::derive(52, 2, 0);
    const auto est = detect::empirical_pep(codes, b, 0, v, 1.0, 0.5, t, trials, rng);
    const auto rep = design::pep_probabilities(21, m, 0.5, t, v, est.alpha, est.alpha_prime,
                                               design::XiConvention::lemma2);
    ok = ok && rep.p_md >= 1e-3 && std::abs(est.estimate - rep.p_md) < 3.0 * est.std_error &&
         est.ks_pass_1pct;
    got += ", md@V=4 " + fmt(est.estimate, 3) + " vs " + fmt(rep.p_md, 3);
  }
  const double dt = seconds_since(t0);
  ok = ok && dt < 300.0;
  return {ok, got + ", " + fmt(dt, 2) + " s"};
}

// ---- criteria 6-9: Monte Carlo trend checks --------------------------------

harness::ExperimentSpec trend_spec(int k, int q, int n, double rho, double gamma, int t,
                                   int trials, std::uint64_t seed) {
  harness::ExperimentSpec spec;
  spec.base.device_count = k;
  spec.base.layer_count = q;
  spec.base.spreading_gain = n;
  spec.base.symbols_per_slot = t;
  spec.base.access_prob.assign(q, rho);
  spec.base.target_snr = gamma;
  spec.base.seed = seed;
  spec.n_trials = trials;
  spec.detector = {detect::DetectorKind::cavi, 5};
  spec.known_b = true;
  return spec;
}

// Known failure. The target totals assume a much weaker detector than the
// full-block statistic implemented here: at these operating points the
// coherent T=100 statistic separates active from idle essentially without
// error on a single layer (pairwise error ~1e-15), and LMMSE cancellation of
// a strong layer leaves ~V/(1+SIR) residual power per detected device, which
// swamps the inner layers' design noise budget. Measured totals therefore
// increase with Q instead of decreasing. Rerunning this sweep with T=1 gives
// (8.4, 7.2, 6.9), bracketing the target's Q=1 value, so the targets
// correspond to roughly one symbol of integration per decision. Kept as
// stated rather than tuned to pass.
Outcome layering_trend() {
  const auto t0 = Clock::now();
  auto spec = trend_spec(300, 3, 30, 0.04, 4.0, 100, 1000, 61);
  spec.variable = harness::SweepVariable::layers;
  spec.values = {1.0, 2.0, 3.0};
  const auto rows = harness::run_experiment(spec);
  const double want[] = {6.71, 1.90, 0.66};
  bool ok = true;
  std::string got;
  for (int i = 0; i < 3; ++i) {
    ok = ok && rows[i].feasible && std::abs(rows[i].total_err - want[i]) < 0.30 * want[i];
    got += (i ? ", " : "") + fmt(rows[i].total_err, 3) + "+-" + fmt(rows[i].total_stderr, 2);
  }
  ok = ok && rows[0].total_err > rows[1].total_err && rows[1].total_err > rows[2].total_err;
  return {ok, got + " vs (6.71, 1.90, 0.66), " + fmt(seconds_since(t0), 1) + " s"};
}

// Known failure, same root cause as the layering trend: every error sits in
// layer 2, whose detector assumes the design noise (~1/chip) but faces the
// layer-1 LMMSE residual (~10/chip). Extra sweeps make the mean-field
// beliefs more confident in the mismatched model, so the error grows mildly
// with sweep count (about 1.8 -> 2.3 from 1 to 8 sweeps) instead of
// plateauing from above.
Outcome sweep_count_plateau() {
  const auto t0 = Clock::now();
  model::SystemConfig cfg;
  cfg.device_count = 300;
  cfg.layer_count = 2;
  cfg.spreading_gain = 30;
  cfg.symbols_per_slot = 100;
  cfg.access_prob = {0.05, 0.05};
  cfg.target_snr = 4.0;
  const auto plan = design::plan_power_levels(cfg);
  if (!plan.feasible) return {false, "plan infeasible"};

  // Paired trials: each slot is decoded at every sweep count.
  const int settings[] = {1, 2, 3, 4, 8};
  const int trials = 500;
  double sums[5] = {};
  for (int trial = 0; trial < trials; ++trial) {
    auto rng = RandomStream::derive(71, 0, static_cast<std::uint64_t>(trial));
    const auto ens = model::gen_spreading(cfg, rng);
    const auto slot = model::synth_slot(cfg, plan, ens, rng);
    for (int i = 0; i < 5; ++i) {
      const detect::DetectorSpec det{detect::DetectorKind::cavi, settings[i]};
      const auto rep = detect::sic_pipeline(slot, ens, plan, det, true);
      sums[i] += 0.5 * (rep.total_md + rep.total_fa);
    }
  }
  double m[5];
  std::string got;
  for (int i = 0; i < 5; ++i) {
    m[i] = sums[i] / trials;
    got += (i ? ", " : "") + std::to_string(settings[i]) + ":" + fmt(m[i], 3);
  }
  const double improvement = (m[3] - m[4]) / m[3];
  const bool ok = m[0] >= m[1] && m[1] >= m[2] && m[2] >= m[3] && m[3] > 0.0 &&
                  improvement < 0.05;
  return {ok, got + ", 4->8 improvement " + fmt(100.0 * improvement, 2) + "%, " +
                  fmt(seconds_since(t0), 1) + " s"};
}

Outcome spreading_gain_trend() {
  const auto t0 = Clock::now();
  auto spec = trend_spec(300, 2, 30, 0.05, 4.0, 100, 500, 81);
  spec.variable = harness::SweepVariable::spreading_gain;
  spec.values = {20, 25, 30, 35, 40};
  const auto rows = harness::run_experiment(spec);
  bool ok = true;
  std::string got;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ok = ok && rows[i].feasible;
    if (i) ok = ok && rows[i].total_err < rows[i - 1].total_err;
    got += (i ? ", " : "") + fmt(rows[i].total_err, 3);
  }
  return {ok, got + ", " + fmt(seconds_since(t0), 1) + " s"};
}

// Known failure, same root cause as the layering trend: the layer-1 LMMSE
// residual scales with sigma1^2 ~ V2*M*rho, so layer 2's effective SNR
// saturates near 1/(kappa*M*rho) no matter the target, and the measured
// error is monotone increasing in the target SNR rather than dipping at
// 9 dB.
Outcome snr_dip() {
  const auto t0 = Clock::now();
  auto run_at = [](double rho, double gamma_db) {
    auto spec = trend_spec(300, 2, 30, rho, from_db(gamma_db), 100, 400, 91);
    // A single self-preserving sweep point; identical trial streams across
    // calls give common random numbers over the SNR grid.
    spec.variable = harness::SweepVariable::n_sweeps;
    spec.values = {5.0};
    return harness::run_experiment(spec)[0].total_err;
  };
  const double a6 = run_at(0.05, 6.0), a9 = run_at(0.05, 9.0), a16 = run_at(0.05, 16.0);
  const double b6 = run_at(0.025, 6.0), b9 = run_at(0.025, 9.0), b16 = run_at(0.025, 16.0);
  const bool ok = a9 < a6 && a9 < a16 && b9 < b6 && b9 < b16 && (b16 - b9) < (a16 - a9);
  return {ok, "rho=0.05: " + fmt(a6, 3) + "/" + fmt(a9, 3) + "/" + fmt(a16, 3) +
                  ", rho=0.025: " + fmt(b6, 3) + "/" + fmt(b9, 3) + "/" + fmt(b16, 3) +
                  " at 6/9/16 dB, " + fmt(seconds_since(t0), 1) + " s"};
}

// ---- criterion 10: missed-detection tail bound -----------------------------

Outcome tail_bound_domination() {
  const auto t0 = Clock::now();
  int checked = 0;
  for (double gamma : {4.0, 6.0, 8.0, 16.0})
    for (double kappa : {1.0 / 12.0, 1.0 / 6.0, 1.0 / 3.0})
      for (int t : {50, 100, 200})
        for (int q : {1, 3}) {
          model::SystemConfig cfg;
          cfg.device_count = 30 * q;
          cfg.layer_count = q;
          cfg.spreading_gain = 30;
          cfg.symbols_per_slot = t;
          cfg.access_prob.assign(q, kappa);  // M == N makes the load kappa
          cfg.target_snr = gamma;
          const auto plan = design::plan_power_levels(cfg);
          if (!plan.feasible) return {false, "unexpected infeasible grid point"};
          const auto rep = design::asymptotic_analysis(plan, t);
          for (const auto& la : rep.layer) {
            if (!(la.md_bound >= la.p_md))
              return {false, "bound " + fmt(la.md_bound) + " < p_md " + fmt(la.p_md)};
            ++checked;
          }
        }

  model::SystemConfig ref;  // reference three-layer plan
  const auto rep = design::asymptotic_analysis(design::plan_power_levels(ref), 100);
  double worst_p = 0.0, worst_b = 0.0;
  for (const auto& la : rep.layer) {
    worst_p = std::max(worst_p, la.p_md);
    worst_b = std::max(worst_b, la.md_bound);
  }
  const bool ok = worst_p < 1e-6 && worst_b < 1e-6;
  return {ok, std::to_string(checked) + " layer checks; reference plan p_md " + fmt(worst_p, 3) +
                  ", bound " + fmt(worst_b, 3) + ", " + fmt(seconds_since(t0), 2) + " s"};
}

// ---- criterion 11: byte-identical output across worker counts --------------

Outcome determinism() {
  const auto t0 = Clock::now();
  {
    std::ofstream cfg("acc_sweep.cfg");
    cfg << "K = 60\nQ = 2\nN = 20\nT = 50\nrho = 0.08\ngamma_target = 4.0\nseed = 9\n"
        << "sweep = rho\nvalues = 0.05,0.1\ntrials = 60\ndetector = cavi:3\n";
  }
  const int rc1 = run_cli(
      "sweep --config acc_sweep.cfg --out acc_a.csv --workers 1 --stable-output", "acc_a.log");
  const int rc2 = run_cli(
      "sweep --config acc_sweep.cfg --out acc_b.csv --workers 3 --stable-output", "acc_b.log");
  if (rc1 != 0 || rc2 != 0) return {false, "CLI exit codes " + std::to_string(rc1) + "/" +
                                               std::to_string(rc2)};
  const std::string a = slurp("acc_a.csv"), b = slurp("acc_b.csv");
  for (const char* f : {"acc_sweep.cfg", "acc_a.csv", "acc_b.csv", "acc_a.log", "acc_b.log"})
    std::remove(f);
  const bool ok = !a.empty() && a == b;
  return {ok, std::to_string(a.size()) + " bytes, workers 1 vs 3 " +
                  (ok ? "identical" : "DIFFER") + ", " + fmt(seconds_since(t0), 2) + " s"};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "reference power plan via CLI", power_plan_reference},
      {2, "load-capacity fixed point and MMSE SIR", fixed_point_oracle},
      {3, "random-sum moments vs Gaussian reference", moment_oracle},
      {4, "variational posterior agreement", posterior_agreement},
      {5, "single-flip error rates: formula vs simulation", pairwise_error_rates},
      {6, "layering reduces total error", layering_trend},
      {7, "detector sweep-count plateau", sweep_count_plateau},
      {8, "error decreases with spreading gain", spreading_gain_trend},
      {9, "error is non-monotone in target SNR", snr_dip},
      {10, "missed-detection tail bound dominates", tail_bound_domination},
      {11, "byte-identical output across worker counts", determinism},
  };

  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failures = 0, ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    ++ran;
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    failures += out.pass ? 0 : 1;
    std::printf("[%s] criterion %d: %s (%s)\n", out.pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/%d passed\n", ran - failures, ran);
  return failures;
}
