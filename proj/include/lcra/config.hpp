#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace lcra::model {

enum class SymbolModel { gaussian, qpsk };

SymbolModel parse_symbol_model(const std::string& s);
std::string to_string(SymbolModel m);

// Slot-level system parameters. Power control keeps layer populations equal,
// so device_count must be divisible by layer_count.
struct SystemConfig {
  int device_count = 300;      // K, total devices
  int layer_count = 3;         // Q, power layers
  int spreading_gain = 30;     // N, chips per symbol
  int symbols_per_slot = 100;  // T
  std::vector<double> access_prob = {0.05, 0.05, 0.05};  // rho, per layer
  double target_snr = 4.0;     // Gamma, linear
  double path_loss_exp = 3.5;  // eta
  double noise_power = 1.0;    // N0
  std::uint64_t seed = 1;
  SymbolModel symbol_model = SymbolModel::gaussian;

  int devices_per_layer() const { return device_count / layer_count; }

  // Throws std::invalid_argument naming the offending key.
  void validate() const;
};

using KeyValueMap = std::map<std::string, std::string>;

// Flat "key = value" text, '#' comments. Unknown keys are preserved in the map
// so callers (e.g. the sweep harness) can define additional keys.
KeyValueMap read_key_values(std::istream& in);
KeyValueMap read_key_values_file(const std::string& path);

// Recognized keys: K, Q, N, T, rho (scalar or comma list), gamma_target, eta,
// n0, seed, symbol_model. Missing keys keep their defaults.
SystemConfig config_from_map(const KeyValueMap& kv);
SystemConfig load_config(const std::string& path);

}  // namespace lcra::model
