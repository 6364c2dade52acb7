#include "lcra/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lcra::model {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "' expects an integer, got '" + v + "'");
  }
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

std::vector<double> parse_real_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw std::invalid_argument("config: key '" + key + "' has an empty list element");
    out.push_back(parse_real(key, item));
  }
  if (out.empty()) throw std::invalid_argument("config: key '" + key + "' has no values");
  return out;
}

}  // namespace

SymbolModel parse_symbol_model(const std::string& s) {
  if (s == "gaussian") return SymbolModel::gaussian;
  if (s == "qpsk") return SymbolModel::qpsk;
  throw std::invalid_argument("config: key 'symbol_model' must be 'gaussian' or 'qpsk', got '" + s + "'");
}

std::string to_string(SymbolModel m) {
  return m == SymbolModel::gaussian ? "gaussian" : "qpsk";
}

void SystemConfig::validate() const {
  if (device_count <= 0)
    throw std::invalid_argument("config: key 'K' must be positive");
  if (layer_count <= 0)
    throw std::invalid_argument("config: key 'Q' must be positive");
  if (device_count % layer_count != 0)
    throw std::invalid_argument("config: key 'K' must be divisible by 'Q'");
  if (spreading_gain <= 0)
    throw std::invalid_argument("config: key 'N' must be positive");
  if (symbols_per_slot <= 0)
    throw std::invalid_argument("config: key 'T' must be positive");
  if (access_prob.size() != static_cast<std::size_t>(layer_count))
    throw std::invalid_argument("config: key 'rho' must have one value or one per layer");
  for (double r : access_prob)
    if (!(r >= 0.0 && r <= 1.0))
      throw std::invalid_argument("config: key 'rho' values must lie in [0, 1]");
  if (!(target_snr > 0.0))
    throw std::invalid_argument("config: key 'gamma_target' must be positive");
  if (!(path_loss_exp >= 2.0))
    throw std::invalid_argument("config: key 'eta' must be at least 2");
  if (!(noise_power > 0.0))
    throw std::invalid_argument("config: key 'n0' must be positive");
}

KeyValueMap read_key_values(std::istream& in) {
  KeyValueMap kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not of the form 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config: line " + std::to_string(lineno) + " has an empty key");
    kv[key] = value;
  }
  return kv;
}

KeyValueMap read_key_values_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  return read_key_values(in);
}

SystemConfig config_from_map(const KeyValueMap& kv) {
  SystemConfig cfg;
  bool rho_set = false;
  for (const auto& [key, value] : kv) {
    if (key == "K") {
      cfg.device_count = static_cast<int>(parse_int(key, value));
    } else if (key == "Q") {
      cfg.layer_count = static_cast<int>(parse_int(key, value));
    } else if (key == "N") {
      cfg.spreading_gain = static_cast<int>(parse_int(key, value));
    } else if (key == "T") {
      cfg.symbols_per_slot = static_cast<int>(parse_int(key, value));
    } else if (key == "rho") {
      cfg.access_prob = parse_real_list(key, value);
      rho_set = true;
    } else if (key == "gamma_target") {
      cfg.target_snr = parse_real(key, value);
    } else if (key == "eta") {
      cfg.path_loss_exp = parse_real(key, value);
    } else if (key == "n0") {
      cfg.noise_power = parse_real(key, value);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "symbol_model") {
      cfg.symbol_model = parse_symbol_model(value);
    }
    // Other keys belong to higher layers (sweep definitions etc.).
  }
  if (cfg.layer_count > 0) {
    if (cfg.access_prob.size() == 1)
      cfg.access_prob.assign(cfg.layer_count, cfg.access_prob[0]);
    else if (!rho_set && cfg.access_prob.size() != static_cast<std::size_t>(cfg.layer_count))
      cfg.access_prob.assign(cfg.layer_count, 0.05);
  }
  cfg.validate();
  return cfg;
}

SystemConfig load_config(const std::string& path) {
  return config_from_map(read_key_values_file(path));
}

}  // namespace lcra::model
