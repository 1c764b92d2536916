// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cfmimo {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

Real parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const Real r = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing junk");
    return r;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad numeric value for '" + key + "': " + value);
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing junk");
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer value for '" + key + "': " + value);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing junk");
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad unsigned value for '" + key + "': " + value);
  }
}

Real parse_threshold(const std::string& value) {
  if (value == "inf" || value == "all") return std::numeric_limits<Real>::infinity();
  return parse_real("selection_threshold_db", value);
}

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void fnv_append(std::uint64_t& h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  h ^= 0xffu;  // field separator
  h *= kFnvPrime;
}

std::string format_real(Real v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string to_string(PilotPolicy policy) {
  switch (policy) {
    case PilotPolicy::RoundRobin: return "round_robin";
    case PilotPolicy::Random: return "random";
    case PilotPolicy::FarthestFirst: return "farthest_first";
  }
  throw std::logic_error("unreachable pilot policy");
}

PilotPolicy pilot_policy_from_string(const std::string& name) {
  if (name == "round_robin") return PilotPolicy::RoundRobin;
  if (name == "random") return PilotPolicy::Random;
  if (name == "farthest_first") return PilotPolicy::FarthestFirst;
  throw std::invalid_argument("config: unknown pilot_policy '" + name + "'");
}

void SimConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };

  if (num_aps <= 0) fail("num_aps must be positive");
  if (num_seus <= 0) fail("num_seus must be positive");
  if (num_ues <= 0) fail("num_ues must be positive");
  if (antennas_per_ap <= 0) fail("antennas_per_ap must be positive");
  if (num_pilots <= 0) fail("num_pilots must be positive");
  if (num_pilots > num_ues) fail("num_pilots must not exceed num_ues");
  if (!(area_radius_m > 0.0)) fail("area_radius_m must be positive");
  if (!(min_access_distance_m >= 0.0)) fail("min_access_distance_m must be non-negative");
  if (!(min_access_distance_m < area_radius_m))
    fail("min_access_distance_m must be below area_radius_m");
  if (!(pathloss_exponent > 0.0)) fail("pathloss_exponent must be positive");
  if (!(pathloss_constant > 0.0)) fail("pathloss_constant must be positive");
  if (!(shadowing_sigma_db >= 0.0)) fail("shadowing_sigma_db must be non-negative");
  if (!std::isfinite(ul_power_dbm)) fail("ul_power_dbm must be finite");
  if (!std::isfinite(pilot_power_dbm)) fail("pilot_power_dbm must be finite");
  if (!std::isfinite(noise_power_dbm)) fail("noise_power_dbm must be finite");
  if (std::isnan(selection_threshold_db)) fail("selection_threshold_db must not be NaN");
  if (max_ues_per_ap && *max_ues_per_ap <= 0) fail("max_ues_per_ap must be positive");
  for (const auto& [seu, dbm] : noise_power_dbm_per_seu) {
    if (seu < 0 || seu >= num_seus) fail("noise_power_dbm_seu_<l> index out of range");
    if (!std::isfinite(dbm)) fail("per-SEU noise power must be finite");
  }
}

std::string SimConfig::fingerprint() const {
  std::uint64_t h = kFnvOffset;
  fnv_append(h, format_real(area_radius_m));
  fnv_append(h, std::to_string(num_aps));
  fnv_append(h, std::to_string(num_seus));
  fnv_append(h, std::to_string(num_ues));
  fnv_append(h, std::to_string(antennas_per_ap));
  fnv_append(h, format_real(min_access_distance_m));
  fnv_append(h, format_real(pathloss_exponent));
  fnv_append(h, format_real(pathloss_constant));
  fnv_append(h, format_real(shadowing_sigma_db));
  fnv_append(h, format_real(ul_power_dbm));
  fnv_append(h, format_real(pilot_power_dbm));
  fnv_append(h, format_real(noise_power_dbm));
  fnv_append(h, std::to_string(num_pilots));
  fnv_append(h, format_real(selection_threshold_db));
  fnv_append(h, std::to_string(rng_seed));
  fnv_append(h, to_string(pilot_policy));
  fnv_append(h, max_ues_per_ap ? std::to_string(*max_ues_per_ap) : "none");
  for (const auto& [seu, dbm] : noise_power_dbm_per_seu) {
    fnv_append(h, std::to_string(seu));
    fnv_append(h, format_real(dbm));
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

SimConfig parse_config(const std::string& text) {
  SimConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not of the form 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " has an empty key or value");

    if (key == "area_radius_m") cfg.area_radius_m = parse_real(key, value);
    else if (key == "num_aps") cfg.num_aps = parse_int(key, value);
    else if (key == "num_seus") cfg.num_seus = parse_int(key, value);
    else if (key == "num_ues") cfg.num_ues = parse_int(key, value);
    else if (key == "antennas_per_ap") cfg.antennas_per_ap = parse_int(key, value);
    else if (key == "min_access_distance_m") cfg.min_access_distance_m = parse_real(key, value);
    else if (key == "pathloss_exponent") cfg.pathloss_exponent = parse_real(key, value);
    else if (key == "pathloss_constant") cfg.pathloss_constant = parse_real(key, value);
    else if (key == "shadowing_sigma_db") cfg.shadowing_sigma_db = parse_real(key, value);
    else if (key == "ul_power_dbm") cfg.ul_power_dbm = parse_real(key, value);
    else if (key == "pilot_power_dbm") cfg.pilot_power_dbm = parse_real(key, value);
    else if (key == "noise_power_dbm") cfg.noise_power_dbm = parse_real(key, value);
    else if (key == "num_pilots") cfg.num_pilots = parse_int(key, value);
    else if (key == "selection_threshold_db") cfg.selection_threshold_db = parse_threshold(value);
    else if (key == "rng_seed") cfg.rng_seed = parse_u64(key, value);
    else if (key == "pilot_policy") cfg.pilot_policy = pilot_policy_from_string(value);
    else if (key == "max_ues_per_ap") cfg.max_ues_per_ap = parse_int(key, value);
    else if (key.rfind("noise_power_dbm_seu_", 0) == 0) {
      const int seu = parse_int(key, key.substr(std::string("noise_power_dbm_seu_").size()));
      cfg.noise_power_dbm_per_seu[seu] = parse_real(key, value);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "' on line " +
                                  std::to_string(line_no));
    }
  }
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void save_config(const SimConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("config: cannot write '" + path + "'");
  out.precision(17);
  out << "area_radius_m = " << config.area_radius_m << "\n";
  out << "num_aps = " << config.num_aps << "\n";
  out << "num_seus = " << config.num_seus << "\n";
  out << "num_ues = " << config.num_ues << "\n";
  out << "antennas_per_ap = " << config.antennas_per_ap << "\n";
  out << "min_access_distance_m = " << config.min_access_distance_m << "\n";
  out << "pathloss_exponent = " << config.pathloss_exponent << "\n";
  out << "pathloss_constant = " << config.pathloss_constant << "\n";
  out << "shadowing_sigma_db = " << config.shadowing_sigma_db << "\n";
  out << "ul_power_dbm = " << config.ul_power_dbm << "\n";
  out << "pilot_power_dbm = " << config.pilot_power_dbm << "\n";
  out << "noise_power_dbm = " << config.noise_power_dbm << "\n";
  out << "num_pilots = " << config.num_pilots << "\n";
  if (std::isinf(config.selection_threshold_db))
    out << "selection_threshold_db = inf\n";
  else
    out << "selection_threshold_db = " << config.selection_threshold_db << "\n";
  out << "rng_seed = " << config.rng_seed << "\n";
  out << "pilot_policy = " << to_string(config.pilot_policy) << "\n";
  if (config.max_ues_per_ap) out << "max_ues_per_ap = " << *config.max_ues_per_ap << "\n";
  for (const auto& [seu, dbm] : config.noise_power_dbm_per_seu)
    out << "noise_power_dbm_seu_" << seu << " = " << dbm << "\n";
}

Powers make_powers(const SimConfig& config, int effective_num_seus) {
  Powers p;
  p.rho_ul = Vec::Constant(config.num_ues, dbm_to_mw(config.ul_power_dbm));
  p.rho_pilot = dbm_to_mw(config.pilot_power_dbm);
  p.sigma2_ul = Vec::Constant(effective_num_seus, dbm_to_mw(config.noise_power_dbm));
  for (const auto& [seu, dbm] : config.noise_power_dbm_per_seu) {
    if (seu >= 0 && seu < effective_num_seus) p.sigma2_ul(seu) = dbm_to_mw(dbm);
  }
  p.sigma2_pilot = p.sigma2_ul;
  return p;
}

}  // namespace cfmimo
