#include "lcra/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "lcra/types.hpp"

namespace lcra::harness {

namespace {

std::string fmt_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void apply_sweep_value(model::SystemConfig& cfg, detect::DetectorSpec& det, SweepVariable var,
                       double value) {
  switch (var) {
    case SweepVariable::rho:
      cfg.access_prob.assign(cfg.layer_count, value);
      break;
    case SweepVariable::spreading_gain:
      cfg.spreading_gain = static_cast<int>(std::lround(value));
      break;
    case SweepVariable::gamma_db:
      cfg.target_snr = from_db(value);
      break;
    case SweepVariable::n_sweeps:
      det.cavi_sweeps = static_cast<int>(std::lround(value));
      if (det.cavi_sweeps < 0) throw std::invalid_argument("config: key 'values' has a negative sweep count");
      break;
    case SweepVariable::layers: {
      const int q = static_cast<int>(std::lround(value));
      const double rho0 = cfg.access_prob.empty() ? 0.05 : cfg.access_prob[0];
      cfg.layer_count = q;
      if (q > 0) cfg.access_prob.assign(q, rho0);
      break;
    }
  }
  cfg.validate();
}

}  // namespace

SweepVariable parse_sweep_variable(const std::string& s) {
  if (s == "rho") return SweepVariable::rho;
  if (s == "N") return SweepVariable::spreading_gain;
  if (s == "gamma_db") return SweepVariable::gamma_db;
  if (s == "n_sweeps") return SweepVariable::n_sweeps;
  if (s == "Q") return SweepVariable::layers;
  throw std::invalid_argument(
      "config: key 'sweep' must be one of rho, N, gamma_db, n_sweeps, Q; got '" + s + "'");
}

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::rho: return "rho";
    case SweepVariable::spreading_gain: return "N";
    case SweepVariable::gamma_db: return "gamma_db";
    case SweepVariable::n_sweeps: return "n_sweeps";
    case SweepVariable::layers: return "Q";
  }
  return "?";
}

void ExperimentSpec::validate() const {
  base.validate();
  if (values.empty()) throw std::invalid_argument("config: key 'values' must be non-empty");
  if (n_trials < 1) throw std::invalid_argument("config: key 'trials' must be >= 1");
  if (workers < 1) throw std::invalid_argument("config: key 'workers' must be >= 1");
}

ExperimentSpec experiment_from_map(const model::KeyValueMap& kv, bool require_sweep) {
  ExperimentSpec spec;
  spec.base = model::config_from_map(kv);
  for (const auto& [key, value] : kv) {
    if (key == "sweep") {
      spec.variable = parse_sweep_variable(value);
    } else if (key == "values") {
      spec.values.clear();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          spec.values.push_back(std::stod(item));
        } catch (const std::exception&) {
          throw std::invalid_argument("config: key 'values' has a bad number '" + item + "'");
        }
      }
    } else if (key == "trials") {
      try {
        spec.n_trials = std::stoi(value);
      } catch (const std::exception&) {
        throw std::invalid_argument("config: key 'trials' expects an integer");
      }
    } else if (key == "detector") {
      spec.detector = detect::parse_detector(value);
    } else if (key == "known_b") {
      if (value == "true") spec.known_b = true;
      else if (value == "false") spec.known_b = false;
      else throw std::invalid_argument("config: key 'known_b' must be true or false");
    } else if (key == "out") {
      spec.output_path = value;
    } else if (key == "workers") {
      try {
        spec.workers = std::stoi(value);
      } catch (const std::exception&) {
        throw std::invalid_argument("config: key 'workers' expects an integer");
      }
    }
  }
  if (!require_sweep && !kv.count("sweep") && !kv.count("values")) {
    spec.variable = SweepVariable::n_sweeps;
    spec.values = {static_cast<double>(spec.detector.cavi_sweeps)};
  }
  spec.validate();
  return spec;
}

std::vector<MetricsRow> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<MetricsRow> rows;
  rows.reserve(spec.values.size());

  for (std::size_t si = 0; si < spec.values.size(); ++si) {
    const auto t0 = std::chrono::steady_clock::now();
    model::SystemConfig cfg = spec.base;
    detect::DetectorSpec det = spec.detector;
    apply_sweep_value(cfg, det, spec.variable, spec.values[si]);

    MetricsRow row;
    row.sweep_name = to_string(spec.variable);
    row.sweep_value = spec.values[si];
    const int q_count = cfg.layer_count;
    row.layer_md.assign(q_count, nan);
    row.layer_fa.assign(q_count, nan);
    row.layer_stderr.assign(q_count, nan);

    const auto plan = design::plan_power_levels(cfg);
    if (!plan.feasible) {
      row.feasible = false;
      row.total_md = row.total_fa = row.total_err = row.total_stderr = nan;
      row.n_trials = 0;
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      rows.push_back(std::move(row));
      continue;
    }

    const int n_trials = spec.n_trials;
    std::vector<int> md_counts(static_cast<std::size_t>(n_trials) * q_count);
    std::vector<int> fa_counts(static_cast<std::size_t>(n_trials) * q_count);
    const int workers = std::min(spec.workers, n_trials);

    auto run_range = [&](int first, int step) {
      for (int trial = first; trial < n_trials; trial += step) {
        auto rng = RandomStream::derive(cfg.seed, si, static_cast<std::uint64_t>(trial));
        const auto ens = model::gen_spreading(cfg, rng);
        const auto slot = model::synth_slot(cfg, plan, ens, rng, cfg.symbol_model);
        const auto rep = detect::sic_pipeline(slot, ens, plan, det, spec.known_b);
        for (int l = 0; l < q_count; ++l) {
          md_counts[static_cast<std::size_t>(trial) * q_count + l] = rep.layer[l].md_count;
          fa_counts[static_cast<std::size_t>(trial) * q_count + l] = rep.layer[l].fa_count;
        }
      }
    };

    if (workers == 1) {
      run_range(0, 1);
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errs(workers);
      for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          try {
            run_range(w, workers);
          } catch (...) {
            errs[w] = std::current_exception();
          }
        });
      for (auto& th : pool) th.join();
      for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    }

    // Reduce in trial order; the per-trial metrics are quarter-integers, so
    // these sums are exact in double and independent of the worker count.
    row.total_md = row.total_fa = 0.0;
    double total_sum = 0.0, total_sumsq = 0.0;
    std::vector<double> layer_sum(q_count, 0.0), layer_sumsq(q_count, 0.0);
    std::vector<double> md_sum(q_count, 0.0), fa_sum(q_count, 0.0);
    for (int trial = 0; trial < n_trials; ++trial) {
      double trial_total = 0.0;
      for (int l = 0; l < q_count; ++l) {
        const int md = md_counts[static_cast<std::size_t>(trial) * q_count + l];
        const int fa = fa_counts[static_cast<std::size_t>(trial) * q_count + l];
        const double err = 0.5 * (md + fa);
        md_sum[l] += md;
        fa_sum[l] += fa;
        layer_sum[l] += err;
        layer_sumsq[l] += err * err;
        trial_total += err;
      }
      total_sum += trial_total;
      total_sumsq += trial_total * trial_total;
    }
    auto std_error = [n_trials](double sum, double sumsq) {
      if (n_trials < 2) return 0.0;
      const double var = (sumsq - sum * sum / n_trials) / (n_trials - 1.0);
      return std::sqrt(std::max(var, 0.0) / n_trials);
    };
    for (int l = 0; l < q_count; ++l) {
      row.layer_md[l] = md_sum[l] / n_trials;
      row.layer_fa[l] = fa_sum[l] / n_trials;
      row.layer_stderr[l] = std_error(layer_sum[l], layer_sumsq[l]);
      row.total_md += row.layer_md[l];
      row.total_fa += row.layer_fa[l];
    }
    row.total_err = total_sum / n_trials;
    row.total_stderr = std_error(total_sum, total_sumsq);
    row.n_trials = n_trials;
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rows.push_back(std::move(row));
  }
  return rows;
}

void emit_csv(const std::vector<MetricsRow>& rows, const std::string& path, bool zero_timing) {
  if (rows.empty()) throw std::invalid_argument("emit_csv: no rows");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_csv: cannot open '" + path + "'");
  out << "sweep_name,sweep_value,layer,mean_md,mean_fa,total,stderr,n_trials,seconds\n";
  for (const auto& row : rows) {
    const double secs = zero_timing ? 0.0 : row.seconds;
    const auto line = [&](const std::string& layer, double md, double fa, double total,
                          double se) {
      out << row.sweep_name << ',' << fmt_full(row.sweep_value) << ',' << layer << ','
          << fmt_full(md) << ',' << fmt_full(fa) << ',' << fmt_full(total) << ','
          << fmt_full(se) << ',' << row.n_trials << ',' << fmt_full(secs) << '\n';
    };
    for (std::size_t l = 0; l < row.layer_md.size(); ++l) {
      const double total = 0.5 * (row.layer_md[l] + row.layer_fa[l]);
      line(std::to_string(l + 1), row.layer_md[l], row.layer_fa[l], total, row.layer_stderr[l]);
    }
    line("total", row.total_md, row.total_fa, row.total_err, row.total_stderr);
  }
  if (!out) throw std::runtime_error("emit_csv: write failed for '" + path + "'");
}

std::vector<MetricsRow> parse_metrics_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("parse_metrics_csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) ||
      line != "sweep_name,sweep_value,layer,mean_md,mean_fa,total,stderr,n_trials,seconds")
    throw std::runtime_error("parse_metrics_csv: bad header in '" + path + "'");

  std::vector<MetricsRow> rows;
  MetricsRow cur;
  bool open = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != 9) throw std::runtime_error("parse_metrics_csv: bad line '" + line + "'");
    if (!open) {
      cur = MetricsRow{};
      cur.sweep_name = f[0];
      cur.sweep_value = std::stod(f[1]);
      open = true;
    }
    const double md = std::stod(f[3]);
    const double fa = std::stod(f[4]);
    const double se = std::stod(f[6]);
    if (f[2] == "total") {
      cur.total_md = md;
      cur.total_fa = fa;
      cur.total_err = std::stod(f[5]);
      cur.total_stderr = se;
      cur.n_trials = std::stol(f[7]);
      cur.seconds = std::stod(f[8]);
      cur.feasible = cur.n_trials > 0;
      rows.push_back(cur);
      open = false;
    } else {
      cur.layer_md.push_back(md);
      cur.layer_fa.push_back(fa);
      cur.layer_stderr.push_back(se);
    }
  }
  if (open) throw std::runtime_error("parse_metrics_csv: truncated row in '" + path + "'");
  return rows;
}

}  // namespace lcra::harness
