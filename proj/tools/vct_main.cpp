#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "vct/config.hpp"
#include "vct/errors.hpp"
#include "vct/population.hpp"
#include "vct/report.hpp"
#include "vct/trial.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitFailures = 3;

int cmd_generate_population(const std::string& model, std::uint64_t n,
                            std::uint64_t seed, const std::string& out) {
  const auto kind = vct::model_kind_from_string(model);
  vct::RejectionCounts counts;
  const auto cohort = vct::generate_cohort(n, kind, seed, &counts);
  vct::save_cohort(cohort, out);
  std::fprintf(stderr,
               "wrote %llu %s participants to %s "
               "(draws: %llu, rejected 1-SD: %llu, time-constant: %llu, basal: %llu)\n",
               static_cast<unsigned long long>(cohort.participants.size()),
               model.c_str(), out.c_str(),
               static_cast<unsigned long long>(counts.total_attempts),
               static_cast<unsigned long long>(counts.one_sd),
               static_cast<unsigned long long>(counts.time_constant),
               static_cast<unsigned long long>(counts.basal));
  return kExitOk;
}

int cmd_run(const std::string& config_path, int workers_override,
            bool deterministic, const std::string& out_dir) {
  auto cfg = vct::load_config(config_path);
  if (workers_override >= 0) cfg.workers = workers_override;
  if (deterministic) {
    cfg.deterministic = true;
    cfg.sim.deterministic = true;
  }
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (cfg.out_dir.empty()) throw vct::ConfigError("no output directory: pass --out or set trial.out");

  const auto result = vct::run_trial(cfg);
  vct::persist(result, cfg.out_dir);

  const auto& m = result.meta;
  std::fprintf(stderr,
               "simulated %llu/%llu participants in %.1f s on %d workers "
               "(%llu failures, %llu clamp activations) -> %s\n",
               static_cast<unsigned long long>(m.simulated),
               static_cast<unsigned long long>(m.cohort_size), m.wall_seconds,
               m.workers, static_cast<unsigned long long>(m.failures.size()),
               static_cast<unsigned long long>(m.clamp_activations),
               cfg.out_dir.c_str());
  const double frac =
      m.cohort_size == 0
          ? 0.0
          : static_cast<double>(m.failures.size()) / static_cast<double>(m.cohort_size);
  if (frac > cfg.max_failure_fraction) {
    std::fprintf(stderr, "failure fraction %.4f exceeds limit %.4f\n", frac,
                 cfg.max_failure_fraction);
    return kExitFailures;
  }
  return kExitOk;
}

int cmd_report(const std::string& in_dir, const std::string& format) {
  const auto run = vct::load_run(in_dir);
  if (format == "csv")
    std::cout << run.summary_csv_text;
  else if (format == "json")
    std::cout << run.report_json_text;
  else
    throw vct::ConfigError("unknown report format: " + format);
  return kExitOk;
}

struct ReportView {
  nlohmann::json j;
  double attain(const char* name) const {
    return j.at("target_attainment").at(name).get<double>();
  }
  double tir_box(const char* field) const {
    return j.at("fraction_box").at("tir").at(field).get<double>();
  }
};

int cmd_compare(const std::string& a_dir, const std::string& b_dir) {
  ReportView a{nlohmann::json::parse(vct::load_run(a_dir).report_json_text)};
  ReportView b{nlohmann::json::parse(vct::load_run(b_dir).report_json_text)};

  static const struct {
    const char* key;
    const char* label;
  } kTargets[] = {
      {"mean_under_154", "mean glucose < 154 mg/dL"},
      {"gmi_under_7", "GMI < 7%"},
      {"cv_at_most_36", "CV <= 36%"},
      {"tar2_under_5", "TAR level 2 < 5%"},
      {"tar_under_25", "TAR < 25%"},
      {"tir_over_70", "TIR > 70%"},
      {"tbr_under_4", "TBR < 4%"},
      {"tbr2_under_1", "TBR level 2 < 1%"},
      {"all", "all targets"},
  };

  std::printf("target attainment (fraction of cohort)\n");
  std::printf("  %-28s %10s %10s\n", "target", "A", "B");
  for (const auto& t : kTargets)
    std::printf("  %-28s %9.1f%% %9.1f%%\n", t.label, 100.0 * a.attain(t.key),
                100.0 * b.attain(t.key));

  std::printf("\ntime in range 3.9-10 mmol/L (fraction of time, cohort distribution)\n");
  std::printf("  %-28s %10s %10s\n", "statistic", "A", "B");
  static const char* kBoxFields[] = {"min",    "whisker_low",  "q1", "median",
                                     "q3",     "whisker_high", "max"};
  for (const char* f : kBoxFields)
    std::printf("  %-28s %9.1f%% %9.1f%%\n", f, 100.0 * a.tir_box(f),
                100.0 * b.tir_box(f));
  const double mean_a = a.j.at("mean_fractions").at("tir").get<double>();
  const double mean_b = b.j.at("mean_fractions").at("tir").get<double>();
  std::printf("  %-28s %9.1f%% %9.1f%%\n", "mean", 100.0 * mean_a, 100.0 * mean_b);
  std::printf("\nA: %s\nB: %s\n", a_dir.c_str(), b_dir.c_str());
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"virtual clinical trial engine for closed-loop glucose control"};
  app.require_subcommand(1);

  std::string model = "hovorka", pop_out;
  std::uint64_t n = 0, seed = 0;
  auto* gen = app.add_subcommand("generate-population",
                                 "sample a virtual cohort and write it to a file");
  gen->add_option("--model", model, "hovorka or uvapadova")
      ->check(CLI::IsMember({"hovorka", "uvapadova"}));
  gen->add_option("--n", n, "cohort size")->required();
  gen->add_option("--seed", seed, "master seed");
  gen->add_option("--out", pop_out, "output cohort file")->required();

  std::string config_path, run_out;
  int workers_override = -1;
  bool deterministic = false;
  auto* run = app.add_subcommand("run", "execute a closed-loop trial");
  run->add_option("--config", config_path, "run configuration file")->required();
  run->add_option("--workers", workers_override, "worker threads (0 = auto)");
  run->add_flag("--deterministic", deterministic,
                "disable process and measurement noise");
  run->add_option("--out", run_out, "output directory");

  std::string report_in, format = "csv";
  auto* rep = app.add_subcommand("report", "print stored results");
  rep->add_option("--in", report_in, "run output directory")->required();
  rep->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  std::string a_dir, b_dir;
  auto* cmp = app.add_subcommand("compare",
                                 "side-by-side attainment and time-in-range of two runs");
  cmp->add_option("--a", a_dir, "first run directory")->required();
  cmp->add_option("--b", b_dir, "second run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_generate_population(model, n, seed, pop_out);
    if (run->parsed())
      return cmd_run(config_path, workers_override, deterministic, run_out);
    if (rep->parsed()) return cmd_report(report_in, format);
    if (cmp->parsed()) return cmd_compare(a_dir, b_dir);
  } catch (const vct::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "malformed report: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
