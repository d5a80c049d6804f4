#include "irswpcn/harness.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace irswpcn {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf") return kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
}

long long to_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  try {
    std::size_t used = 0;
    const long long v = std::stoll(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + text + "'");
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split(text)) out.push_back(to_double(key, s));
  return out;
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_same_v<T, double>) out += fmt(xs[i]);
    else out += to_string(xs[i]);
  }
  return out;
}

std::string init_name(InitStrategy s) { return s == InitStrategy::kZero ? "zero" : "co_phased"; }

// key -> setter; one table for the whole file
using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"system.hap_power_dbm", [](auto& c, auto& k, auto& v) { c.params.hap_power = dbm_to_watts(to_double(k, v)); }},
      {"system.amplify_budget_dbm",
       [](auto& c, auto& k, auto& v) { c.params.amplify_budget = dbm_to_watts(to_double(k, v)); }},
      {"system.noise_irs_dl_dbm",
       [](auto& c, auto& k, auto& v) { c.params.noise_irs_dl = dbm_to_watts(to_double(k, v)); }},
      {"system.noise_irs_ul_dbm",
       [](auto& c, auto& k, auto& v) { c.params.noise_irs_ul = dbm_to_watts(to_double(k, v)); }},
      {"system.noise_receiver_dl_dbm",
       [](auto& c, auto& k, auto& v) { c.params.noise_receiver_dl = dbm_to_watts(to_double(k, v)); }},
      {"system.noise_receiver_ul_dbm",
       [](auto& c, auto& k, auto& v) { c.params.noise_receiver_ul = dbm_to_watts(to_double(k, v)); }},
      {"system.efficiency", [](auto& c, auto& k, auto& v) { c.params.efficiency = to_double(k, v); }},
      {"system.frame_time_s", [](auto& c, auto& k, auto& v) { c.params.frame_time = to_double(k, v); }},
      {"system.num_elements",
       [](auto& c, auto& k, auto& v) { c.params.num_elements = static_cast<int>(to_integer(k, v)); }},
      {"system.num_devices",
       [](auto& c, auto& k, auto& v) { c.params.num_devices = static_cast<int>(to_integer(k, v)); }},
      {"system.weights", [](auto& c, auto& k, auto& v) { c.params.weights = to_list(k, v); }},
      {"geometry.irs_x_m", [](auto& c, auto& k, auto& v) { c.geometry.irs_x = to_double(k, v); }},
      {"geometry.irs_height_m", [](auto& c, auto& k, auto& v) { c.geometry.irs_height = to_double(k, v); }},
      {"geometry.cluster_center_x_m",
       [](auto& c, auto& k, auto& v) { c.geometry.cluster_center_x = to_double(k, v); }},
      {"geometry.cluster_radius_m", [](auto& c, auto& k, auto& v) { c.geometry.cluster_radius = to_double(k, v); }},
      {"fading.pathloss_exponent_irs",
       [](auto& c, auto& k, auto& v) { c.fading.pathloss_exponent_irs = to_double(k, v); }},
      {"fading.pathloss_exponent_direct",
       [](auto& c, auto& k, auto& v) { c.fading.pathloss_exponent_direct = to_double(k, v); }},
      {"fading.rician_factor", [](auto& c, auto& k, auto& v) { c.fading.rician_factor = to_double(k, v); }},
      {"fading.reference_gain_db", [](auto& c, auto& k, auto& v) { c.fading.reference_gain_db = to_double(k, v); }},
      {"fading.reference_distance_m",
       [](auto& c, auto& k, auto& v) { c.fading.reference_distance = to_double(k, v); }},
      {"experiment.schemes",
       [](auto& c, auto& k, auto& v) {
         c.schemes.clear();
         for (const auto& name : split(v)) {
           auto s = parse_scheme(name);
           if (!s) throw ConfigError(k + ": unknown scheme '" + name + "'");
           c.schemes.push_back(*s);
         }
       }},
      {"experiment.amax_db", [](auto& c, auto& k, auto& v) { c.amax_db = to_list(k, v); }},
      {"experiment.sweep_variable",
       [](auto& c, auto& k, auto& v) {
         auto s = parse_sweep_variable(trim(v));
         if (!s) throw ConfigError(k + ": unknown sweep variable '" + v + "' (P_A_dbm, x_ue, x_irs)");
         c.sweep = *s;
       }},
      {"experiment.grid", [](auto& c, auto& k, auto& v) { c.grid = to_list(k, v); }},
      {"experiment.irs_follows_devices", [](auto& c, auto& k, auto& v) { c.irs_follows_devices = to_bool(k, v); }},
      {"experiment.num_realizations",
       [](auto& c, auto& k, auto& v) { c.num_realizations = static_cast<int>(to_integer(k, v)); }},
      {"experiment.seed",
       [](auto& c, auto& k, auto& v) {
         const auto t = trim(v);
         try {
           std::size_t used = 0;
           c.seed = std::stoull(t, &used);
           if (used != t.size() || t.starts_with('-')) throw std::invalid_argument(t);
         } catch (const std::exception&) {
           throw ConfigError(k + ": expected an unsigned integer, got '" + v + "'");
         }
       }},
      {"experiment.workers", [](auto& c, auto& k, auto& v) { c.workers = static_cast<int>(to_integer(k, v)); }},
      {"experiment.output_dir", [](auto& c, auto&, auto& v) { c.output_dir = trim(v); }},
      {"solver.ao_rel_tolerance", [](auto& c, auto& k, auto& v) { c.solver.ao_rel_tolerance = to_double(k, v); }},
      {"solver.ao_max_iterations",
       [](auto& c, auto& k, auto& v) { c.solver.ao_max_iterations = static_cast<int>(to_integer(k, v)); }},
      {"solver.fp_rel_tolerance", [](auto& c, auto& k, auto& v) { c.solver.fp_rel_tolerance = to_double(k, v); }},
      {"solver.fp_max_iterations",
       [](auto& c, auto& k, auto& v) { c.solver.fp_max_iterations = static_cast<int>(to_integer(k, v)); }},
      {"solver.randomization_count",
       [](auto& c, auto& k, auto& v) { c.solver.randomization_count = static_cast<int>(to_integer(k, v)); }},
      {"solver.init",
       [](auto& c, auto& k, auto& v) {
         const auto t = trim(v);
         if (t == "co_phased") c.solver.init = InitStrategy::kCoPhased;
         else if (t == "zero") c.solver.init = InitStrategy::kZero;
         else throw ConfigError(k + ": expected co_phased or zero, got '" + v + "'");
       }},
  };
  return table;
}

}  // namespace

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kUeActive: return "ue_active";
    case Scheme::kUlActive: return "ul_active";
    case Scheme::kStaticActive: return "static_active";
    case Scheme::kUePassive: return "ue_passive";
    case Scheme::kStaticPassive: return "static_passive";
  }
  return "?";
}

std::optional<Scheme> parse_scheme(const std::string& name) {
  for (auto s : {Scheme::kUeActive, Scheme::kUlActive, Scheme::kStaticActive, Scheme::kUePassive,
                 Scheme::kStaticPassive})
    if (to_string(s) == name) return s;
  return std::nullopt;
}

bool is_active(Scheme scheme) { return scheme != Scheme::kUePassive && scheme != Scheme::kStaticPassive; }

Setup setup_of(Scheme scheme) {
  switch (scheme) {
    case Scheme::kUeActive:
    case Scheme::kUePassive: return Setup::kUserAdaptive;
    case Scheme::kUlActive: return Setup::kUplinkAdaptive;
    case Scheme::kStaticActive:
    case Scheme::kStaticPassive: return Setup::kStatic;
  }
  return Setup::kUserAdaptive;
}

std::string to_string(SweepVariable variable) {
  switch (variable) {
    case SweepVariable::kHapPowerDbm: return "P_A_dbm";
    case SweepVariable::kDeviceX: return "x_ue";
    case SweepVariable::kIrsX: return "x_irs";
  }
  return "?";
}

std::optional<SweepVariable> parse_sweep_variable(const std::string& name) {
  for (auto v : {SweepVariable::kHapPowerDbm, SweepVariable::kDeviceX, SweepVariable::kIrsX})
    if (to_string(v) == name) return v;
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  try {
    params.validate();
    geometry.validate();
    fading.validate();
    solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (geometry.num_devices != params.num_devices) throw ConfigError("geometry and system disagree on num_devices");
  if (schemes.empty()) throw ConfigError("experiment.schemes must not be empty");
  if (grid.empty()) throw ConfigError("experiment.grid must not be empty");
  if (!std::is_sorted(grid.begin(), grid.end()) || std::adjacent_find(grid.begin(), grid.end()) != grid.end())
    throw ConfigError("experiment.grid must be strictly increasing");
  if (std::any_of(schemes.begin(), schemes.end(), is_active) && amax_db.empty())
    throw ConfigError("experiment.amax_db must not be empty when an active scheme is listed");
  if (num_realizations < 1) throw ConfigError("experiment.num_realizations must be >= 1");
  if (workers < 1) throw ConfigError("experiment.workers must be >= 1");
}

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  ExperimentConfig config;
  bool weights_given = false;
  const auto& table = setters();
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' outside of a section");
    for (const auto& [name, value] : body) {
      const std::string key = section + "." + name;
      const auto it = table.find(key);
      if (it == table.end()) throw ConfigError("unknown key '" + key + "'");
      it->second(config, key, value.data());
      weights_given |= key == "system.weights";
    }
  }
  if (!weights_given) config.params.weights.assign(config.params.num_devices, 1.0);
  config.geometry.num_devices = config.params.num_devices;
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  const auto& p = c.params;
  out << "[system]\n"
      << "hap_power_dbm = " << fmt(watts_to_dbm(p.hap_power)) << "\n"
      << "amplify_budget_dbm = " << fmt(watts_to_dbm(p.amplify_budget)) << "\n"
      << "noise_irs_dl_dbm = " << fmt(watts_to_dbm(p.noise_irs_dl)) << "\n"
      << "noise_irs_ul_dbm = " << fmt(watts_to_dbm(p.noise_irs_ul)) << "\n"
      << "noise_receiver_dl_dbm = " << fmt(watts_to_dbm(p.noise_receiver_dl)) << "\n"
      << "noise_receiver_ul_dbm = " << fmt(watts_to_dbm(p.noise_receiver_ul)) << "\n"
      << "efficiency = " << fmt(p.efficiency) << "\n"
      << "frame_time_s = " << fmt(p.frame_time) << "\n"
      << "num_elements = " << p.num_elements << "\n"
      << "num_devices = " << p.num_devices << "\n"
      << "weights = " << join(p.weights) << "\n\n"
      << "[geometry]\n"
      << "irs_x_m = " << fmt(c.geometry.irs_x) << "\n"
      << "irs_height_m = " << fmt(c.geometry.irs_height) << "\n"
      << "cluster_center_x_m = " << fmt(c.geometry.cluster_center_x) << "\n"
      << "cluster_radius_m = " << fmt(c.geometry.cluster_radius) << "\n\n"
      << "[fading]\n"
      << "pathloss_exponent_irs = " << fmt(c.fading.pathloss_exponent_irs) << "\n"
      << "pathloss_exponent_direct = " << fmt(c.fading.pathloss_exponent_direct) << "\n"
      << "rician_factor = " << fmt(c.fading.rician_factor) << "\n"
      << "reference_gain_db = " << fmt(c.fading.reference_gain_db) << "\n"
      << "reference_distance_m = " << fmt(c.fading.reference_distance) << "\n\n"
      << "[experiment]\n"
      << "; ue_active, ul_active, static_active, ue_passive, static_passive\n"
      << "schemes = " << join(c.schemes) << "\n"
      << "; amplitude caps for the active schemes (passive schemes always use 0 dB)\n"
      << "amax_db = " << join(c.amax_db) << "\n"
      << "; P_A_dbm, x_ue or x_irs\n"
      << "sweep_variable = " << to_string(c.sweep) << "\n"
      << "grid = " << join(c.grid) << "\n"
      << "irs_follows_devices = " << (c.irs_follows_devices ? "true" : "false") << "\n"
      << "num_realizations = " << c.num_realizations << "\n"
      << "seed = " << c.seed << "\n"
      << "workers = " << c.workers << "\n"
      << "output_dir = " << c.output_dir << "\n\n"
      << "[solver]\n"
      << "ao_rel_tolerance = " << fmt(c.solver.ao_rel_tolerance) << "\n"
      << "ao_max_iterations = " << c.solver.ao_max_iterations << "\n"
      << "fp_rel_tolerance = " << fmt(c.solver.fp_rel_tolerance) << "\n"
      << "fp_max_iterations = " << c.solver.fp_max_iterations << "\n"
      << "randomization_count = " << c.solver.randomization_count << "\n"
      << "init = " << init_name(c.solver.init) << "\n";
}

}  // namespace irswpcn
