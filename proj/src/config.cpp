#include "robustirs/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace robustirs {

ConfigError::ConfigError(int line, std::string field, const std::string& message)
    : InvalidArgument((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                      (field.empty() ? std::string() : "'" + field + "': ") + message),
      line_(line),
      field_(std::move(field)) {}

ChannelParams Scenario::channel_params() const {
  ChannelParams p;
  p.los_gain = db_to_linear(los_gain_db);
  p.nlos_gain = db_to_linear(nlos_gain_db);
  p.los_exponent = los_exponent;
  p.nlos_exponent = nlos_exponent;
  p.k_a = k_a;
  p.k_b = k_b;
  return p;
}

RobustConfig Scenario::robust_config(IrsMode mode) const {
  RobustConfig c;
  c.eta_u = eta_u;
  c.eta_e = eta_e;
  c.p_peak = dbm_to_watt(p_peak_dbm);
  c.p_f = dbm_to_watt(p_f_dbm);
  c.tau_max = db_to_amplitude(tau_max_db);
  c.sigma_i2 = dbm_to_watt(sigma_i_dbm);
  c.sigma_u2 = dbm_to_watt(sigma_u_dbm);
  c.sigma_e2 = dbm_to_watt(sigma_e_dbm);
  c.epsilon = epsilon;
  c.max_iterations = max_iterations;
  c.mode = mode;
  c.eve_bound = eve_bound;
  c.eve_constraint = eve_constraint;
  c.use_irs = use_irs;
  return c;
}

namespace {

const std::vector<std::pair<SweepAxis, const char*>> kAxes = {
    {SweepAxis::AodRatioAlice, "aod_ratio_alice"}, {SweepAxis::AodRatioEve, "aod_ratio_eve"},
    {SweepAxis::M, "M"},                           {SweepAxis::N, "N"},
    {SweepAxis::TauMaxDb, "tau_max_db"},           {SweepAxis::PFDbm, "P_F_dbm"},
    {SweepAxis::AsrThreshold, "asr_threshold"},    {SweepAxis::UavAltitude, "uav_altitude"}};

int checked_count(double value, const char* what) {
  const double r = std::round(value);
  if (std::abs(value - r) > 1e-9 || r < 1.0)
    throw InvalidArgument(std::string(what) + " axis values must be positive integers");
  return static_cast<int>(r);
}

}  // namespace

const char* axis_name(SweepAxis axis) {
  for (const auto& [a, name] : kAxes)
    if (a == axis) return name;
  return "unknown";
}

SweepAxis axis_from_name(const std::string& name) {
  for (const auto& [a, n] : kAxes)
    if (name == n) return a;
  throw InvalidArgument("unknown sweep axis '" + name + "'");
}

Scenario apply_axis(Scenario s, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::AodRatioAlice: s.aod_ratio_alice = value; break;
    case SweepAxis::AodRatioEve: s.aod_ratio_eve = value; break;
    case SweepAxis::M:
      s.geometry.m_x = checked_count(value, "M");
      s.geometry.m_y = 1;
      break;
    case SweepAxis::N:
      s.geometry.n_x = 1;
      s.geometry.n_y = checked_count(value, "N");
      break;
    case SweepAxis::TauMaxDb: s.tau_max_db = value; break;
    case SweepAxis::PFDbm: s.p_f_dbm = value; break;
    case SweepAxis::AsrThreshold: s.eta_u = s.eta_e + value; break;
    case SweepAxis::UavAltitude: s.geometry.ubs_pos.z() = value; break;
  }
  return s;
}

void SweepConfig::validate() const {
  if (values.empty()) throw ConfigError(0, "values", "axis values must be nonempty");
  if (modes.empty()) throw ConfigError(0, "modes", "at least one mode is required");
  if (trials < 1) throw ConfigError(0, "trials", "trials must be >= 1");
  if (!(failure_budget >= 0.0 && failure_budget <= 1.0))
    throw ConfigError(0, "failure_budget", "must lie in [0, 1]");
  if (base.grid_n < 2) throw ConfigError(0, "grid_n", "must be >= 2");
  for (double v : values) {
    try {
      const Scenario s = apply_axis(base, axis, v);
      s.geometry.validate();
      for (IrsMode m : modes) s.robust_config(m).validate();
      if (s.aod_ratio_alice < 0.0 || s.aod_ratio_eve < 0.0 || (s.aod_ratio_irs && *s.aod_ratio_irs < 0.0))
        throw InvalidArgument("AOD ratios must be >= 0");
    } catch (const ConfigError&) {
      throw;
    } catch (const InvalidArgument& e) {
      throw ConfigError(0, axis_name(axis), "value " + std::to_string(v) + ": " + e.what());
    }
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument("not a finite number");
  return v;
}

long long to_integer(const std::string& s) {
  std::size_t used = 0;
  const long long v = std::stoll(s, &used);
  if (used != s.size()) throw std::invalid_argument("not an integer");
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("expected true or false");
}

Vec3 to_vec3(const std::string& s) {
  const auto parts = split(s);
  if (parts.size() != 3) throw std::invalid_argument("expected three comma-separated numbers");
  return {to_double(parts[0]), to_double(parts[1]), to_double(parts[2])};
}

int to_int(const std::string& s) { return static_cast<int>(to_integer(s)); }

}  // namespace

SweepConfig parse_sweep_config(const std::string& text) {
  SweepConfig cfg;
  Scenario& sc = cfg.base;
  NetworkGeometry& g = sc.geometry;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"ubs_pos", [&](const std::string& v) { g.ubs_pos = to_vec3(v); }},
      {"irs_pos", [&](const std::string& v) { g.irs_pos = to_vec3(v); }},
      {"alice_pos", [&](const std::string& v) { g.alice_pos = to_vec3(v); }},
      {"eve_pos", [&](const std::string& v) { g.eve_pos = to_vec3(v); }},
      {"n_x", [&](const std::string& v) { g.n_x = to_int(v); }},
      {"n_y", [&](const std::string& v) { g.n_y = to_int(v); }},
      {"m_x", [&](const std::string& v) { g.m_x = to_int(v); }},
      {"m_y", [&](const std::string& v) { g.m_y = to_int(v); }},
      {"wavelength", [&](const std::string& v) { g.wavelength = to_double(v); }},
      {"ubs_spacing", [&](const std::string& v) { g.ubs_spacing = to_double(v); }},
      {"irs_spacing", [&](const std::string& v) { g.irs_spacing = to_double(v); }},
      {"los_gain_db", [&](const std::string& v) { sc.los_gain_db = to_double(v); }},
      {"nlos_gain_db", [&](const std::string& v) { sc.nlos_gain_db = to_double(v); }},
      {"los_exponent", [&](const std::string& v) { sc.los_exponent = to_double(v); }},
      {"nlos_exponent", [&](const std::string& v) { sc.nlos_exponent = to_double(v); }},
      {"k_a", [&](const std::string& v) { sc.k_a = to_double(v); }},
      {"k_b", [&](const std::string& v) { sc.k_b = to_double(v); }},
      {"p_peak_dbm", [&](const std::string& v) { sc.p_peak_dbm = to_double(v); }},
      {"p_f_dbm", [&](const std::string& v) { sc.p_f_dbm = to_double(v); }},
      {"tau_max_db", [&](const std::string& v) { sc.tau_max_db = to_double(v); }},
      {"sigma_i_dbm", [&](const std::string& v) { sc.sigma_i_dbm = to_double(v); }},
      {"sigma_u_dbm", [&](const std::string& v) { sc.sigma_u_dbm = to_double(v); }},
      {"sigma_e_dbm", [&](const std::string& v) { sc.sigma_e_dbm = to_double(v); }},
      {"eta_u", [&](const std::string& v) { sc.eta_u = to_double(v); }},
      {"eta_e", [&](const std::string& v) { sc.eta_e = to_double(v); }},
      {"aod_ratio_alice", [&](const std::string& v) { sc.aod_ratio_alice = to_double(v); }},
      {"aod_ratio_eve", [&](const std::string& v) { sc.aod_ratio_eve = to_double(v); }},
      {"aod_ratio_irs", [&](const std::string& v) { sc.aod_ratio_irs = to_double(v); }},
      {"epsilon", [&](const std::string& v) { sc.epsilon = to_double(v); }},
      {"max_iterations", [&](const std::string& v) { sc.max_iterations = to_int(v); }},
      {"eve_bound",
       [&](const std::string& v) {
         if (v == "exact") sc.eve_bound = EveBound::Exact;
         else if (v == "linearized") sc.eve_bound = EveBound::Linearized;
         else throw std::invalid_argument("expected exact or linearized");
       }},
      {"eve_constraint", [&](const std::string& v) { sc.eve_constraint = to_bool(v); }},
      {"use_irs", [&](const std::string& v) { sc.use_irs = to_bool(v); }},
      {"grid_n", [&](const std::string& v) { sc.grid_n = to_int(v); }},
      {"axis", [&](const std::string& v) { cfg.axis = axis_from_name(v); }},
      {"values",
       [&](const std::string& v) {
         cfg.values.clear();
         for (const auto& p : split(v)) cfg.values.push_back(to_double(p));
       }},
      {"modes",
       [&](const std::string& v) {
         cfg.modes.clear();
         for (const auto& p : split(v)) {
           if (p == "active") cfg.modes.push_back(IrsMode::Active);
           else if (p == "passive") cfg.modes.push_back(IrsMode::Passive);
           else throw std::invalid_argument("unknown mode '" + p + "'");
         }
       }},
      {"trials", [&](const std::string& v) { cfg.trials = to_int(v); }},
      {"seed",
       [&](const std::string& v) {
         std::size_t used = 0;
         cfg.seed = std::stoull(v, &used);
         if (used != v.size()) throw std::invalid_argument("not an unsigned integer");
       }},
      {"failure_budget", [&](const std::string& v) { cfg.failure_budget = to_double(v); }},
      {"evaluate", [&](const std::string& v) { cfg.evaluate = to_bool(v); }},
  };

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "", "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(line, key, "unknown key");
    if (value.empty()) throw ConfigError(line, key, "missing value");
    try {
      it->second(value);
    } catch (const std::exception& e) {
      throw ConfigError(line, key, e.what());
    }
  }
  cfg.validate();
  return cfg;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "", "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_sweep_config(buf.str());
}

}  // namespace robustirs
