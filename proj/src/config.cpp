#include "vct/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "vct/errors.hpp"

namespace vct {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for " + key + ": " + v);
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const auto d = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for " + key + ": " + v);
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("invalid boolean for " + key + ": " + v);
}

} // namespace

void TrialConfig::finalize() {
  sim.trial_duration = trial_weeks * 7.0 * 24.0 * 60.0;
  sim.titration_duration = titration_weeks * 7.0 * 24.0 * 60.0;
  sim.deterministic = deterministic;
  announcement = announcement_policy_from_string(announcement_text);
  try {
    sim.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (cohort_path.empty()) throw ConfigError("trial.cohort is required");
  if (workers < 0) throw ConfigError("trial.workers must be >= 0");
  if (max_failure_fraction < 0.0 || max_failure_fraction > 1.0)
    throw ConfigError("trial.max_failure_fraction must lie in [0,1]");
}

TrialConfig parse_config(const std::string& text) {
  TrialConfig c;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      if (section != "trial" && section != "sim" && section != "controller" &&
          section != "announcement")
        throw ConfigError("unknown config section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string full = section + "." + key;

    if (full == "trial.cohort") c.cohort_path = value;
    else if (full == "trial.protocol_file") c.protocol_file = value;
    else if (full == "trial.protocol_seed") c.protocol_seed = to_u64(full, value);
    else if (full == "trial.master_seed") c.master_seed = to_u64(full, value);
    else if (full == "trial.workers") c.workers = static_cast<int>(to_u64(full, value));
    else if (full == "trial.weeks") c.trial_weeks = to_double(full, value);
    else if (full == "trial.titration_weeks") c.titration_weeks = to_double(full, value);
    else if (full == "trial.max_failure_fraction") c.max_failure_fraction = to_double(full, value);
    else if (full == "trial.out") c.out_dir = value; // not hashed: no effect on results
    else if (full == "sim.step_size") c.sim.step_size = to_double(full, value);
    else if (full == "sim.cgm_period") c.sim.cgm_period = to_double(full, value);
    else if (full == "sim.deterministic") c.deterministic = to_bool(full, value);
    else if (full == "sim.observation_variance_hovorka")
      c.observation_variance_hovorka = to_double(full, value);
    else if (full == "sim.observation_variance_uvapadova")
      c.observation_variance_uvapadova = to_double(full, value);
    else if (full == "announcement.policy") c.announcement_text = value;
    else if (full == "controller.y_bar") c.controller.y_bar = to_double(full, value);
    else if (full == "controller.deadband_halfwidth")
      c.controller.deadband_halfwidth = to_double(full, value);
    else if (full == "controller.error_truncation")
      c.controller.error_truncation = to_double(full, value);
    else if (full == "controller.hypo_gain") c.controller.hypo_gain = to_double(full, value);
    else if (full == "controller.kp") c.controller.Kp = to_double(full, value);
    else if (full == "controller.kd") c.controller.Kd = to_double(full, value);
    else if (full == "controller.ki_basal") c.controller.Ki_basal = to_double(full, value);
    else if (full == "controller.ki_bolus") c.controller.Ki_bolus = to_double(full, value);
    else if (full == "controller.initial_carb_ratio")
      c.controller.initial_carb_ratio = to_double(full, value);
    else if (full == "controller.basal_band_factor")
      c.controller.basal_band_factor = to_double(full, value);
    else if (full == "controller.carb_ratio_min")
      c.controller.carb_ratio_min = to_double(full, value);
    else if (full == "controller.carb_ratio_max")
      c.controller.carb_ratio_max = to_double(full, value);
    else if (full == "controller.max_basal") c.controller.max_basal = to_double(full, value);
    else if (full == "controller.max_bolus") c.controller.max_bolus = to_double(full, value);
    else if (full == "controller.suspend_threshold")
      c.controller.suspend_threshold = to_double(full, value);
    else if (full == "controller.resume_threshold")
      c.controller.resume_threshold = to_double(full, value);
    else if (full == "controller.predictive_suspend_horizon")
      c.controller.predictive_suspend_horizon = to_double(full, value);
    else if (full == "controller.postprandial_window")
      c.controller.postprandial_window = to_double(full, value);
    else if (full == "controller.derivative_filter_window")
      c.controller.derivative_filter_window = static_cast<int>(to_u64(full, value));
    else
      throw ConfigError("unknown config key " + full);
  }
  c.finalize();
  return c;
}

TrialConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string config_hash(const TrialConfig& c) {
  std::ostringstream s;
  char buf[32];
  const auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    s << buf << ';';
  };
  s << c.cohort_path << ';' << c.protocol_file << ';' << c.protocol_seed << ';'
    << c.master_seed << ';';
  num(c.trial_weeks);
  num(c.titration_weeks);
  num(c.sim.step_size);
  num(c.sim.cgm_period);
  s << (c.deterministic ? 1 : 0) << ';';
  num(c.observation_variance_hovorka);
  num(c.observation_variance_uvapadova);
  s << c.announcement_text << ';';
  const auto& k = c.controller;
  for (double v : {k.y_bar, k.deadband_halfwidth, k.error_truncation, k.hypo_gain,
                   k.Kp, k.Kd, k.Ki_basal, k.Ki_bolus, k.initial_carb_ratio,
                   k.basal_band_factor, k.carb_ratio_min, k.carb_ratio_max,
                   k.max_basal, k.max_bolus, k.suspend_threshold,
                   k.resume_threshold, k.predictive_suspend_horizon,
                   k.postprandial_window,
                   static_cast<double>(k.derivative_filter_window)})
    num(v);
  num(c.max_failure_fraction);

  // FNV-1a 64
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s.str()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace vct
