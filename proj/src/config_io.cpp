#include "bdisac/config_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace bdisac {

SceneConfig default_config() {
  SceneConfig cfg;
  cfg.apply_derived_defaults();
  return cfg;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& value, const std::string& key, int line,
                    const std::string& origin) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(origin + ":" + std::to_string(line) + ": key '" + key +
                      "': cannot parse number from '" + value + "'");
  }
}

struct KeyHandler {
  std::function<void(SceneConfig&, const std::string&, int, const std::string&)> set;
};

const std::map<std::string, KeyHandler>& handlers() {
  static const std::map<std::string, KeyHandler> table = [] {
    std::map<std::string, KeyHandler> h;
    auto num = [](auto setter) {
      return KeyHandler{[setter](SceneConfig& c, const std::string& v, int line,
                                 const std::string& origin) {
        setter(c, parse_number(v, "", line, origin));
      }};
    };
    h["num_symbols"] = num([](SceneConfig& c, double v) { c.grid.num_symbols = static_cast<int>(v); });
    h["num_subcarriers"] = num([](SceneConfig& c, double v) { c.grid.num_subcarriers = static_cast<int>(v); });
    h["subcarrier_spacing"] = num([](SceneConfig& c, double v) { c.grid.subcarrier_spacing = v; });
    h["symbol_duration"] = num([](SceneConfig& c, double v) { c.grid.symbol_duration = v; });
    h["guard_duration"] = num([](SceneConfig& c, double v) { c.grid.guard_duration = v; });
    h["bd_count"] = num([](SceneConfig& c, double v) { c.bds.count = static_cast<int>(v); });
    h["bd_attenuation"] = num([](SceneConfig& c, double v) { c.bds.attenuation = v; });
    h["bd_activity_min"] = num([](SceneConfig& c, double v) { c.bds.activity_min = v; });
    h["bd_activity_max"] = num([](SceneConfig& c, double v) { c.bds.activity_max = v; });
    h["total_power_dbm"] = num([](SceneConfig& c, double v) { c.total_power = dbm_to_watts(v); });
    h["total_power"] = num([](SceneConfig& c, double v) { c.total_power = v; });
    h["per_re_power_cap"] = num([](SceneConfig& c, double v) { c.per_re_power_cap = v; });
    h["noise_sensing"] = num([](SceneConfig& c, double v) { c.noise_sensing = v; });
    h["noise_comm"] = num([](SceneConfig& c, double v) { c.noise_comm = v; });
    h["rcs_variance"] = num([](SceneConfig& c, double v) { c.rcs_variance = v; });
    h["bs_target_distance"] = num([](SceneConfig& c, double v) { c.bs_target_distance = v; });
    h["bs_user_distance"] = num([](SceneConfig& c, double v) { c.bs_user_distance = v; });
    h["comm_sensing_weight"] = num([](SceneConfig& c, double v) { c.comm_sensing_weight = v; });
    h["seed"] = num([](SceneConfig& c, double v) { c.seed = static_cast<std::uint64_t>(v); });
    h["eps_power"] = num([](SceneConfig& c, double v) { c.eps_power = v; });
    h["eps_re"] = num([](SceneConfig& c, double v) { c.eps_re = v; });
    h["eps_phase"] = num([](SceneConfig& c, double v) { c.eps_phase = v; });
    h["sca_delta"] = num([](SceneConfig& c, double v) { c.sca_delta = v; });
    h["max_outer"] = num([](SceneConfig& c, double v) { c.max_outer = static_cast<int>(v); });
    h["paths_per_link"] = num([](SceneConfig& c, double v) { c.paths_per_link = static_cast<int>(v); });
    h["path_loss_exponent"] = num([](SceneConfig& c, double v) { c.path_loss_exponent = v; });
    h["doppler_max"] = num([](SceneConfig& c, double v) { c.doppler_max = v; });
    h["delay_spread"] = num([](SceneConfig& c, double v) { c.delay_spread = v; });
    h["carrier_frequency"] = num([](SceneConfig& c, double v) { c.carrier_frequency = v; });

    auto enum_key = [](auto setter) {
      return KeyHandler{[setter](SceneConfig& c, const std::string& v, int line,
                                 const std::string& origin) {
        if (!setter(c, v))
          throw ConfigError(origin + ":" + std::to_string(line) +
                            ": unrecognized value '" + v + "'");
      }};
    };
    h["bd_host"] = enum_key([](SceneConfig& c, const std::string& v) {
      if (v == "bs") c.bds.host = BdHost::Bs;
      else if (v == "user") c.bds.host = BdHost::User;
      else if (v == "target") c.bds.host = BdHost::Target;
      else return false;
      return true;
    });
    h["bd_modulation"] = enum_key([](SceneConfig& c, const std::string& v) {
      if (v == "fixed") c.bds.modulation = BdModulationMode::FixedSequence;
      else if (v == "dynamic") c.bds.modulation = BdModulationMode::Dynamic;
      else return false;
      return true;
    });
    h["rcs_mode"] = enum_key([](SceneConfig& c, const std::string& v) {
      if (v == "deterministic") c.rcs_mode = RcsMode::DeterministicExpected;
      else if (v == "sampled") c.rcs_mode = RcsMode::Sampled;
      else return false;
      return true;
    });
    h["geometry"] = enum_key([](SceneConfig& c, const std::string& v) {
      if (v == "monostatic") c.geometry = Geometry::Monostatic;
      else if (v == "bistatic") c.geometry = Geometry::Bistatic;
      else return false;
      return true;
    });
    return h;
  }();
  return table;
}

}  // namespace

SceneConfig parse_config(const std::string& text, const std::string& origin) {
  SceneConfig cfg;  // field initializers carry the default parameter table
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line) +
                        ": expected 'key = value', got '" + trim(raw) + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    const auto it = handlers().find(key);
    if (it == handlers().end())
      throw ConfigError(origin + ":" + std::to_string(line) + ": unknown key '" + key + "'");
    try {
      it->second.set(cfg, value, line, origin);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(origin + ":" + std::to_string(line) + ": key '" + key +
                        "': " + e.what());
    }
  }
  cfg.apply_derived_defaults();
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ConfigError(origin + ": invalid configuration: " + e.what());
  }
  return cfg;
}

SceneConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string format_config(const SceneConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "num_symbols = " << cfg.grid.num_symbols << "\n";
  out << "num_subcarriers = " << cfg.grid.num_subcarriers << "\n";
  out << "subcarrier_spacing = " << cfg.grid.subcarrier_spacing << "\n";
  out << "symbol_duration = " << cfg.grid.symbol_duration << "\n";
  out << "guard_duration = " << cfg.grid.guard_duration << "\n";
  out << "bd_count = " << cfg.bds.count << "\n";
  out << "bd_attenuation = " << cfg.bds.attenuation << "\n";
  out << "bd_activity_min = " << cfg.bds.activity_min << "\n";
  out << "bd_activity_max = " << cfg.bds.activity_max << "\n";
  out << "bd_host = " << (cfg.bds.host == BdHost::Bs ? "bs" : cfg.bds.host == BdHost::User ? "user" : "target") << "\n";
  out << "bd_modulation = " << (cfg.bds.modulation == BdModulationMode::FixedSequence ? "fixed" : "dynamic") << "\n";
  out << "total_power_dbm = " << watts_to_dbm(cfg.total_power) << "\n";
  out << "per_re_power_cap = " << cfg.per_re_power_cap << "\n";
  out << "noise_sensing = " << cfg.noise_sensing << "\n";
  out << "noise_comm = " << cfg.noise_comm << "\n";
  out << "rcs_variance = " << cfg.rcs_variance << "\n";
  out << "rcs_mode = " << (cfg.rcs_mode == RcsMode::DeterministicExpected ? "deterministic" : "sampled") << "\n";
  out << "bs_target_distance = " << cfg.bs_target_distance << "\n";
  out << "bs_user_distance = " << cfg.bs_user_distance << "\n";
  out << "comm_sensing_weight = " << cfg.comm_sensing_weight << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "eps_power = " << cfg.eps_power << "\n";
  out << "eps_re = " << cfg.eps_re << "\n";
  out << "eps_phase = " << cfg.eps_phase << "\n";
  out << "sca_delta = " << cfg.sca_delta << "\n";
  out << "max_outer = " << cfg.max_outer << "\n";
  out << "geometry = " << (cfg.geometry == Geometry::Monostatic ? "monostatic" : "bistatic") << "\n";
  out << "paths_per_link = " << cfg.paths_per_link << "\n";
  out << "path_loss_exponent = " << cfg.path_loss_exponent << "\n";
  out << "doppler_max = " << cfg.doppler_max << "\n";
  out << "delay_spread = " << cfg.delay_spread << "\n";
  out << "carrier_frequency = " << cfg.carrier_frequency << "\n";
  return out.str();
}

std::string config_schema_text() {
  return
      "key                   unit    default       description\n"
      "num_symbols           count   8             OFDM symbols per frame (M)\n"
      "num_subcarriers       count   128           subcarriers per symbol (N)\n"
      "subcarrier_spacing    Hz      1/T           subcarrier spacing (delta f)\n"
      "symbol_duration       s       4.1470e-6     OFDM symbol duration (T)\n"
      "guard_duration        s       T/8           cyclic prefix duration (T_G)\n"
      "bd_count              count   50            number of backscatter devices (K)\n"
      "bd_attenuation        -       0.5           BD attenuation coefficient (alpha_k)\n"
      "bd_activity_min       m       0.1           BD activity range, inner radius\n"
      "bd_activity_max       m       0.5           BD activity range, outer radius\n"
      "bd_host               -       bs            entity the BDs cluster around (bs|user|target)\n"
      "bd_modulation         -       dynamic       fixed sequence or dynamically controlled\n"
      "total_power_dbm       dBm     0             transmit power budget (P_t)\n"
      "total_power           W       1e-3          transmit power budget, linear form\n"
      "per_re_power_cap      W       10x uniform   per-RE power cap (P_max); 0 derives it\n"
      "noise_sensing         W       1e-11         sensing receiver noise power (sigma_r^2)\n"
      "noise_comm            W       1e-9          communication noise power (sigma_c^2)\n"
      "rcs_variance          -       1.0           target RCS variance (sigma_t^2)\n"
      "rcs_mode              -       deterministic deterministic expectation or sampled draws\n"
      "bs_target_distance    m       8             BS to target distance (D_ST)\n"
      "bs_user_distance      m       10            BS to user distance (d_BU)\n"
      "comm_sensing_weight   -       0.5           sensing weight of communication REs (eta_c)\n"
      "seed                  -       1             RNG seed\n"
      "eps_power             W^2     1e-12*P_t^2   power-loop stop on squared Frobenius change\n"
      "eps_re                count   1             RE-loop stop on changed cells per sweep\n"
      "eps_phase             count   0.5           phase-loop stop on changed signs\n"
      "sca_delta             -       1e-3          smoothed-l0 constant (delta)\n"
      "max_outer             count   30            outer BCD iteration cap\n"
      "geometry              -       monostatic    monostatic or bistatic sensing\n"
      "paths_per_link        count   4             multipath components per link\n"
      "path_loss_exponent    -       2.0           distance power-law exponent\n"
      "doppler_max           Hz      200           per-path Doppler bound\n"
      "delay_spread          s       5e-8          excess-delay scale of the power delay profile\n"
      "carrier_frequency     Hz      28e9          carrier frequency (reference)\n";
}

}  // namespace bdisac
