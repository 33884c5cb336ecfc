#include "vct/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "vct/errors.hpp"

namespace vct {
namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << text;
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json box_json(const BoxPlot& b) {
  return json{{"min", b.min},
              {"whisker_low", b.whisker_low},
              {"q1", b.q1},
              {"median", b.median},
              {"q3", b.q3},
              {"whisker_high", b.whisker_high},
              {"max", b.max}};
}

} // namespace

std::string summary_csv(const TrialResult& r) {
  std::ostringstream out;
  out << "# vct-summary v1\n";
  out << "# config_hash=" << r.meta.config_hash << "\n";
  out << "# master_seed=" << r.meta.master_seed << "\n";
  out << "id,model,mean_mmol_per_l,gmi_percent,cv_percent,"
         "tbr2,tbr1,tir,tar1,tar2,tdd_basal_u,tdd_bolus_u,min_cgm_mmol_per_l\n";
  for (const auto& row : r.rows) {
    out << row.id << ',' << to_string(row.model) << ',' << fmt(row.mean_mmol)
        << ',' << fmt(row.gmi) << ',' << fmt(row.cv);
    for (double f : row.fractions) out << ',' << fmt(f);
    out << ',' << fmt(row.tdd_basal) << ',' << fmt(row.tdd_bolus) << ','
        << fmt(row.min_cgm) << "\n";
  }
  return out.str();
}

std::string report_json(const TrialResult& r) {
  const auto& rep = r.report;
  json j;
  j["format"] = "vct-report";
  j["version"] = 1;
  j["participants"] = rep.participants;
  j["mean_fractions"] = {{"tbr2", rep.mean_fractions[0]},
                         {"tbr1", rep.mean_fractions[1]},
                         {"tir", rep.mean_fractions[2]},
                         {"tar1", rep.mean_fractions[3]},
                         {"tar2", rep.mean_fractions[4]}};
  j["worst_case"] = {{"id", rep.worst_case_id},
                     {"min_cgm_mmol_per_l", rep.worst_case_min_cgm},
                     {"fractions",
                      {{"tbr2", rep.worst_case_fractions[0]},
                       {"tbr1", rep.worst_case_fractions[1]},
                       {"tir", rep.worst_case_fractions[2]},
                       {"tar1", rep.worst_case_fractions[3]},
                       {"tar2", rep.worst_case_fractions[4]}}}};
  static const char* kFracNames[5] = {"tbr2", "tbr1", "tir", "tar1", "tar2"};
  for (int i = 0; i < 5; ++i)
    j["fraction_box"][kFracNames[i]] = box_json(rep.fraction_box[i]);
  j["tdd_histogram"] = {{"bin_width_u", kTddHistogramBinWidth},
                        {"basal", rep.tdd_basal_histogram},
                        {"bolus", rep.tdd_bolus_histogram}};
  j["glucose_histogram"] = {{"bin_width_mmol_per_l", kHistogramBinWidth},
                            {"bins", rep.merged_histogram},
                            {"cdf", rep.glucose_cdf}};
  static const char* kTargetNames[9] = {
      "mean_under_154", "gmi_under_7",  "cv_at_most_36",
      "tar2_under_5",   "tar_under_25", "tir_over_70",
      "tbr_under_4",    "tbr2_under_1", "all"};
  for (int i = 0; i < 9; ++i)
    j["target_attainment"][kTargetNames[i]] = rep.attainment[i];
  return j.dump(2) + "\n";
}

std::string run_json(const TrialResult& r) {
  const auto& m = r.meta;
  json j;
  j["format"] = "vct-run";
  j["version"] = 1;
  j["config_hash"] = m.config_hash;
  j["master_seed"] = m.master_seed;
  j["workers"] = m.workers;
  j["wall_seconds"] = m.wall_seconds;
  j["cohort_size"] = m.cohort_size;
  j["simulated"] = m.simulated;
  j["clamp_activations"] = m.clamp_activations;
  j["failures"] = json::array();
  for (const auto& f : m.failures) {
    j["failures"].push_back({{"id", f.id},
                             {"t_min", f.t},
                             {"state_index", f.state_index},
                             {"message", f.message}});
  }
  return j.dump(2) + "\n";
}

void persist(const TrialResult& r, const std::string& out_dir) {
  std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_atomic(dir / "summary.csv", summary_csv(r));
  write_atomic(dir / "report.json", report_json(r));
  write_atomic(dir / "run.json", run_json(r));
}

LoadedRun load_run(const std::string& out_dir) {
  std::filesystem::path dir(out_dir);
  LoadedRun lr;
  lr.summary_csv_text = read_all(dir / "summary.csv");
  lr.report_json_text = read_all(dir / "report.json");
  lr.run_json_text = read_all(dir / "run.json");
  if (lr.summary_csv_text.rfind("# vct-summary v1", 0) != 0)
    throw IoError("unrecognized summary format in " + dir.string());
  return lr;
}

} // namespace vct
