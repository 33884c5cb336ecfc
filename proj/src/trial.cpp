#include "vct/trial.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include "vct/units.hpp"

namespace vct {

namespace {

template <SdeSystem S>
ParticipantOutcome run_loop(const S& sys, const ParticipantRecord& rec,
                            const typename S::State& x0, double u_ss_per_hour,
                            double obs_variance, double insulin_units_per_min,
                            const TrialConfig& cfg, const Protocol& protocol,
                            bool glucose_in_mgdl) {
  ParticipantOutcome out;
  const SimConfig& sim = cfg.sim;
  const auto ticks =
      static_cast<std::uint64_t>(std::llround(sim.trial_duration / sim.cgm_period));

  ControllerHyperparams hp = cfg.controller;
  hp.initial_basal = u_ss_per_hour;
  const ReferenceController controller(hp);
  auto cs = controller.init();

  NoiseStream process(cfg.master_seed, rec.id, StreamPurpose::ProcessNoise);
  NoiseStream measurement(cfg.master_seed, rec.id, StreamPurpose::MeasurementNoise);
  NoiseStream* meas_rng = sim.deterministic ? nullptr : &measurement;
  const ObservationNoise obs{obs_variance};

  ParticipantStats stats = make_stats(rec.id, rec.model_kind, sim.titration_duration);
  typename S::State x = x0;

  try {
    for (std::uint64_t k = 0; k < ticks; ++k) {
      const double t = static_cast<double>(k) * sim.cgm_period;
      double y = observe(sys, t, x, obs, meas_rng);
      if (glucose_in_mgdl) y = mg_per_dl_to_mmol_per_l(y);

      const double announced = announced_grams_in(protocol, t, t + sim.cgm_period);
      controller.update(cs, t, y, announced);
      const DoseCommand dose = controller.output(cs, t, y, announced);

      update(stats, y,
             DoseRecord{dose.basal_rate, dose.bolus, sim.cgm_period}, t);

      const double u = (dose.basal_rate / 60.0 + dose.bolus / sim.cgm_period) *
                       insulin_units_per_min;
      const double d =
          disturbance_for_interval(protocol, t, t + sim.cgm_period, rec.model_kind);
      x = simulate_control_interval(sys, t, x, u, d, sim, &process, NullSink{},
                                    &out.clamp_activations);
    }
    out.stats = std::move(stats);
  } catch (const NumericalBlowupError& e) {
    out.failure = ParticipantFailure{rec.id, e.time(), e.state_index(), e.what()};
  } catch (const SimulationError& e) {
    out.failure = ParticipantFailure{rec.id, 0.0, 0, e.what()};
  }
  return out;
}

} // namespace

ParticipantOutcome run_participant(const ParticipantRecord& rec,
                                   const TrialConfig& cfg) {
  Protocol protocol;
  if (!cfg.protocol_file.empty())
    protocol = load_protocol(cfg.protocol_file);
  else
    protocol = build_year(rec.body_weight_kg, cfg.protocol_seed);
  if (cfg.announcement.kind != AnnouncementPolicy::Kind::Exact) {
    NoiseStream rng(cfg.master_seed, rec.id, StreamPurpose::Protocol);
    apply_announcement_policy(protocol, cfg.announcement, rng);
  }

  try {
    if (rec.model_kind == ModelKind::Hovorka) {
      const auto p = build_hovorka_params(rec.draws);
      const auto ss = hovorka_steady_state(p, kScreeningTargetMmolPerL);
      const Hovorka sys(p, cfg.sim.deterministic);
      return run_loop(sys, rec, ss.state, mU_per_min_to_units_per_hour(ss.u_ss),
                      cfg.observation_variance_hovorka, kMilliunitsPerUnit,
                      cfg, protocol, false);
    }
    const auto p = build_uvapadova_params(rec.draws);
    const auto ss = uvapadova_steady_state(
        p, mmol_per_l_to_mg_per_dl(kScreeningTargetMmolPerL));
    const UvaPadova sys(p, cfg.sim.deterministic);
    return run_loop(sys, rec, ss.state, pmol_per_min_to_units_per_hour(ss.u_ss),
                    cfg.observation_variance_uvapadova, kPmolPerUnit, cfg,
                    protocol, true);
  } catch (const SimulationError& e) {
    ParticipantOutcome out;
    out.failure = ParticipantFailure{rec.id, 0.0, 0, e.what()};
    return out;
  }
}

int resolve_workers(int configured) {
  if (configured > 0) return configured;
  if (const char* env = std::getenv("VCT_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

TrialResult run_trial(const TrialConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const Cohort cohort = load_cohort(cfg.cohort_path);
  const int workers = resolve_workers(cfg.workers);

  std::vector<ParticipantOutcome> outcomes(cohort.participants.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cohort.participants.size()) return;
      outcomes[i] = run_participant(cohort.participants[i], cfg);
    }
  };
  if (workers <= 1 || cohort.participants.size() <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    const int n = std::min<std::size_t>(workers, cohort.participants.size());
    pool.reserve(n);
    for (int i = 0; i < n; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  // deterministic reduction in cohort (id) order
  TrialResult res;
  res.meta.workers = workers;
  res.meta.cohort_size = cohort.participants.size();
  res.meta.master_seed = cfg.master_seed;
  res.meta.config_hash = config_hash(cfg);
  std::vector<ParticipantStats> stats;
  stats.reserve(outcomes.size());
  for (auto& o : outcomes) {
    res.meta.clamp_activations += o.clamp_activations;
    if (o.failure) {
      res.meta.failures.push_back(*o.failure);
    } else if (o.stats) {
      res.rows.push_back(summarize(*o.stats));
      stats.push_back(std::move(*o.stats));
    }
  }
  res.meta.simulated = stats.size();
  res.report = cohort_report(stats);
  res.meta.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

} // namespace vct
