#pragma once

#include <string>

#include "vct/trial.hpp"

// On-disk run artifacts: per-participant summary CSV, cohort report
// JSON, and run metadata JSON. All writes go to a temp file first and
// are renamed into place.

namespace vct {

std::string summary_csv(const TrialResult& r);
std::string report_json(const TrialResult& r);
std::string run_json(const TrialResult& r);

void persist(const TrialResult& r, const std::string& out_dir);

struct LoadedRun {
  std::string summary_csv_text;
  std::string report_json_text;
  std::string run_json_text;
};

LoadedRun load_run(const std::string& out_dir);

} // namespace vct
