#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vct/config.hpp"
#include "vct/metrics.hpp"

// Closed-loop trial execution: one observe -> dose -> integrate loop
// per CGM tick per participant, participants fanned out across worker
// threads, reduction in participant order so results do not depend on
// scheduling.

namespace vct {

struct ParticipantFailure {
  std::uint64_t id = 0;
  double t = 0.0;
  std::size_t state_index = 0;
  std::string message;
};

struct RunMetadata {
  double wall_seconds = 0.0;
  int workers = 1;
  std::uint64_t cohort_size = 0;
  std::uint64_t simulated = 0;
  std::uint64_t clamp_activations = 0;
  std::vector<ParticipantFailure> failures;
  std::string config_hash;
  std::uint64_t master_seed = 0;
};

struct TrialResult {
  std::vector<SummaryRow> rows; // by participant id, failures omitted
  CohortReport report;
  RunMetadata meta;
};

struct ParticipantOutcome {
  std::optional<ParticipantStats> stats;
  std::uint64_t clamp_activations = 0;
  std::optional<ParticipantFailure> failure;
};

// Simulate one participant against its own protocol and noise streams.
ParticipantOutcome run_participant(const ParticipantRecord& rec,
                                   const TrialConfig& cfg);

TrialResult run_trial(const TrialConfig& cfg);

// resolve worker count: config, else VCT_WORKERS, else hardware
int resolve_workers(int configured);

} // namespace vct
