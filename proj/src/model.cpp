#include "lcra/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace lcra::model {

SpreadingEnsemble gen_spreading(const SystemConfig& cfg, RandomStream& rng) {
  cfg.validate();
  const int n = cfg.spreading_gain;
  const int m = cfg.devices_per_layer();
  const double var = 1.0 / n;
  SpreadingEnsemble ens;
  ens.layer_codes.resize(cfg.layer_count);
  for (auto& g : ens.layer_codes) {
    g.resize(n, m);
    for (int col = 0; col < m; ++col)
      for (int row = 0; row < n; ++row) g(row, col) = rng.cgauss(var);
  }
  return ens;
}

SlotRealization synth_slot(const SystemConfig& cfg, const design::PowerPlan& plan,
                           const SpreadingEnsemble& ens, RandomStream& rng,
                           SymbolModel symbol_model) {
  cfg.validate();
  if (!plan.feasible) throw std::invalid_argument("synth_slot: plan is infeasible");
  if (plan.layers != cfg.layer_count || ens.layer_codes.size() != static_cast<std::size_t>(cfg.layer_count))
    throw std::invalid_argument("synth_slot: plan/ensemble layer count mismatch");
  const int n = cfg.spreading_gain;
  const int m = cfg.devices_per_layer();
  const int t = cfg.symbols_per_slot;

  SlotRealization slot;
  slot.activity.resize(cfg.layer_count);
  slot.symbols.resize(cfg.layer_count);
  slot.received = CMatrix::Zero(n, t);

  for (int q = 0; q < cfg.layer_count; ++q) {
    if (ens.layer_codes[q].rows() != n || ens.layer_codes[q].cols() != m)
      throw std::invalid_argument("synth_slot: ensemble dimension mismatch");
    const double rho = cfg.access_prob[q];
    const double v = plan.layer[q].receive_power;
    auto& act = slot.activity[q];
    act.resize(m);
    for (int dev = 0; dev < m; ++dev) act[dev] = rng.bernoulli(rho) ? 1 : 0;

    CMatrix s = CMatrix::Zero(m, t);
    for (int dev = 0; dev < m; ++dev) {
      if (!act[dev]) continue;
      if (symbol_model == SymbolModel::gaussian) {
        for (int col = 0; col < t; ++col) s(dev, col) = rng.cgauss(v);
      } else {
        // QPSK with a per-device phase offset; |s| = sqrt(V) exactly.
        const double amp = std::sqrt(v);
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        for (int col = 0; col < t; ++col) {
          const int k = static_cast<int>(rng.uniform() * 4.0) & 3;
          const double phase = theta + std::numbers::pi * (0.25 + 0.5 * k);
          s(dev, col) = amp * std::complex<double>(std::cos(phase), std::sin(phase));
        }
      }
    }
    slot.received.noalias() += ens.layer_codes[q] * s;
    slot.symbols[q] = std::move(s);
  }

  slot.noise.resize(n, t);
  for (int col = 0; col < t; ++col)
    for (int row = 0; row < n; ++row) slot.noise(row, col) = rng.cgauss(cfg.noise_power);
  slot.received += slot.noise;
  return slot;
}

namespace {

void write_matrix(std::ofstream& out, const char* name, const CMatrix& x) {
  out << name << ' ' << x.rows() << ' ' << x.cols() << '\n';
  char buf[64];
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g %.17g", x(r, c).real(), x(r, c).imag());
      out << buf << (c + 1 < x.cols() ? " " : "");
    }
    out << '\n';
  }
}

}  // namespace

void dump_slot(const SlotRealization& slot, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("dump_slot: cannot open '" + path + "'");
  out << "layers " << slot.activity.size() << '\n';
  for (std::size_t q = 0; q < slot.activity.size(); ++q) {
    out << "activity " << q + 1;
    for (auto b : slot.activity[q]) out << ' ' << static_cast<int>(b);
    out << '\n';
    write_matrix(out, "symbols", slot.symbols[q]);
  }
  write_matrix(out, "noise", slot.noise);
  write_matrix(out, "received", slot.received);
  if (!out) throw std::runtime_error("dump_slot: write failed for '" + path + "'");
}

}  // namespace lcra::model
