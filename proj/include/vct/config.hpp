#pragma once

#include <cstdint>
#include <string>

#include "vct/controller.hpp"
#include "vct/protocol.hpp"
#include "vct/sim.hpp"

// Sectioned key = value run configuration and its provenance hash.

namespace vct {

struct TrialConfig {
  std::string cohort_path;
  std::string protocol_file;      // optional; overrides protocol_seed
  std::uint64_t protocol_seed = 0;
  std::uint64_t master_seed = 0;
  int workers = 0;                // 0: VCT_WORKERS or hardware concurrency
  double trial_weeks = 52.0;
  double titration_weeks = 4.0;
  SimConfig sim;                  // durations derived from the weeks above
  bool deterministic = false;
  double observation_variance_hovorka = 0.1;   // (mmol/L)^2
  double observation_variance_uvapadova = 1.8; // (mg/dL)^2
  AnnouncementPolicy announcement;
  std::string announcement_text = "exact";
  ControllerHyperparams controller;
  double max_failure_fraction = 0.01; // blowup tolerance before exit code 3
  std::string out_dir;                // where persist() writes; CLI overrides

  void finalize(); // fill sim durations, validate
};

TrialConfig load_config(const std::string& path);
TrialConfig parse_config(const std::string& text);

// stable fingerprint of every semantically relevant field
std::string config_hash(const TrialConfig& c);

} // namespace vct
