#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vct/metrics.hpp"
#include "vct/population.hpp"
#include "vct/protocol.hpp"
#include "vct/report.hpp"
#include "vct/trial.hpp"
#include "vct/units.hpp"

namespace py = pybind11;
using namespace vct;

namespace {

SizeClass size_from_string(const std::string& s) {
  if (s == "large") return SizeClass::Large;
  if (s == "medium") return SizeClass::Medium;
  if (s == "small") return SizeClass::Small;
  if (s == "snack") return SizeClass::SnackSize;
  throw py::value_error("unknown meal size: " + s);
}

py::dict counts_dict(const RejectionCounts& rc) {
  py::dict d;
  d["attempts"] = rc.total_attempts;
  d["one_sd"] = rc.one_sd;
  d["time_constant"] = rc.time_constant;
  d["basal"] = rc.basal;
  return d;
}

py::dict row_dict(const SummaryRow& r) {
  py::dict d;
  d["id"] = r.id;
  d["model"] = to_string(r.model);
  d["mean_mmol_per_l"] = r.mean_mmol;
  d["gmi_percent"] = r.gmi;
  d["cv_percent"] = r.cv;
  d["tbr2"] = r.fractions[0];
  d["tbr1"] = r.fractions[1];
  d["tir"] = r.fractions[2];
  d["tar1"] = r.fractions[3];
  d["tar2"] = r.fractions[4];
  d["tdd_basal_u"] = r.tdd_basal;
  d["tdd_bolus_u"] = r.tdd_bolus;
  d["min_cgm_mmol_per_l"] = r.min_cgm;
  return d;
}

py::dict generate_population(std::size_t n, const std::string& model,
                             std::uint64_t seed, const std::string& out_path) {
  RejectionCounts rc;
  Cohort c;
  {
    py::gil_scoped_release release;
    c = generate_cohort(n, model_kind_from_string(model), seed, &rc);
    save_cohort(c, out_path);
  }
  py::dict d = counts_dict(rc);
  d["accepted"] = c.participants.size();
  d["path"] = out_path;
  return d;
}

py::dict run_trial_py(const std::string& config_path, int workers,
                      const std::string& out_dir) {
  TrialConfig cfg = load_config(config_path);
  if (workers >= 0) cfg.workers = workers;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  TrialResult res;
  {
    py::gil_scoped_release release;
    res = run_trial(cfg);
    if (!cfg.out_dir.empty()) persist(res, cfg.out_dir);
  }
  py::dict meta;
  meta["workers"] = res.meta.workers;
  meta["cohort_size"] = res.meta.cohort_size;
  meta["simulated"] = res.meta.simulated;
  meta["clamp_activations"] = res.meta.clamp_activations;
  meta["config_hash"] = res.meta.config_hash;
  meta["master_seed"] = res.meta.master_seed;
  meta["wall_seconds"] = res.meta.wall_seconds;
  py::list fails;
  for (const auto& f : res.meta.failures) {
    py::dict fd;
    fd["id"] = f.id;
    fd["t"] = f.t;
    fd["message"] = f.message;
    fails.append(fd);
  }
  meta["failures"] = fails;

  py::list rows;
  for (const auto& r : res.rows) rows.append(row_dict(r));

  py::dict d;
  d["meta"] = meta;
  d["rows"] = rows;
  d["summary_csv"] = summary_csv(res);
  d["mean_fractions"] = res.report.mean_fractions;
  d["attainment"] = res.report.attainment;
  return d;
}

py::dict build_protocol_py(double bw_kg, std::uint64_t seed,
                           const std::string& out_path) {
  const Protocol p = build_year(bw_kg, seed);
  std::size_t meals = 0, snacks = 0, exercise = 0;
  double grams = 0.0;
  for (const auto& e : p.events) {
    if (e.kind == EventKind::Meal) ++meals;
    if (e.kind == EventKind::Snack) ++snacks;
    if (e.kind == EventKind::Exercise) ++exercise;
    grams += e.true_grams;
  }
  if (!out_path.empty()) save_protocol(p, out_path);
  py::dict d;
  d["events"] = p.events.size();
  d["meals"] = meals;
  d["snacks"] = snacks;
  d["exercise"] = exercise;
  d["total_grams"] = grams;
  d["duration_min"] = p.duration;
  return d;
}

std::pair<std::string, double> screen_py(const std::string& model,
                                         const std::vector<double>& draws) {
  double u_ss = 0.0;
  const auto rule = screen_draws(model_kind_from_string(model), draws, &u_ss);
  const char* name = "none";
  switch (rule) {
  case RejectionRule::None: break;
  case RejectionRule::OneSd: name = "one_sd"; break;
  case RejectionRule::TimeConstant: name = "time_constant"; break;
  case RejectionRule::Basal: name = "basal"; break;
  }
  double u_per_h = 0.0;
  if (rule == RejectionRule::None || rule == RejectionRule::Basal) {
    ParticipantRecord r;
    r.model_kind = model_kind_from_string(model);
    r.basal_u_ss = u_ss;
    u_per_h = basal_units_per_hour(r);
  }
  return {name, u_per_h};
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "closed-loop virtual trial engine";

  m.def("meal_grams",
        [](double bw, const std::string& s) { return meal_grams(bw, size_from_string(s)); },
        py::arg("bw_kg"), py::arg("size"),
        "carbohydrate grams for a meal size at a body weight");
  m.def("classify",
        [](double y) { return static_cast<int>(classify(y)); }, py::arg("mmol_per_l"),
        "glycemic range index: 0 severe low .. 4 severe high");
  m.def("mmol_to_mgdl", &mmol_per_l_to_mg_per_dl, py::arg("mmol_per_l"));
  m.def("mgdl_to_mmol", &mg_per_dl_to_mmol_per_l, py::arg("mg_per_dl"));
  m.def("mean_draws",
        [](const std::string& model) { return mean_draws(model_kind_from_string(model)); },
        py::arg("model"), "distribution-mean parameter draws for a model");
  m.def("screen", &screen_py, py::arg("model"), py::arg("draws"),
        "(rule, basal U/h) for a raw draw vector; rule 'none' means accepted");
  m.def("generate_population", &generate_population, py::arg("n"), py::arg("model"),
        py::arg("seed"), py::arg("out"),
        "sample an accepted cohort to a file, returning rejection counts");
  m.def("build_protocol", &build_protocol_py, py::arg("bw_kg"), py::arg("seed"),
        py::arg("out") = std::string(),
        "build the year calendar, optionally saving it, returning totals");
  m.def("run_trial", &run_trial_py, py::arg("config"), py::arg("workers") = -1,
        py::arg("out") = std::string(),
        "run a configured trial, returning per-participant rows and metadata");
}
