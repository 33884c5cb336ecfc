#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vct/hovorka.hpp"
#include "vct/rng.hpp"
#include "vct/uvapadova.hpp"

// Virtual-cohort synthesis: appendix parameter tables, rejection rules,
// demographic dressing, and the tab-separated cohort file format.

namespace vct {

enum class ModelKind { Hovorka, UvaPadova };

std::string to_string(ModelKind m);
ModelKind model_kind_from_string(const std::string& s);

enum class DistKind { Normal, LogNormal, Uniform, Fixed };
enum class DistTransform { None, Reciprocal };

struct DistributionSpec {
  DistKind kind = DistKind::Fixed;
  double location = 0.0; // mean / log-mean / lower bound / fixed value
  double scale = 0.0;    // sd / log-sd / width; 0 for fixed
  DistTransform transform = DistTransform::None;
};

struct ParamSpec {
  std::string name;
  std::string unit;
  DistributionSpec dist;
  bool per_kg = false;         // multiplied by BW when building model params
  double tc_reference = 0.0;   // >0: value must stay within an order of magnitude band
};

const std::vector<ParamSpec>& hovorka_param_table();
const std::vector<ParamSpec>& uvapadova_param_table();
const std::vector<ParamSpec>& param_table(ModelKind m);

// One draw from a spec; reciprocal transforms re-draw until the base
// value is positive.
double sample_parameter(const DistributionSpec& spec, NoiseStream& rng);

// Deviation of a realized value from its distribution's center, in SD
// units of the underlying normal; nullopt for uniform/fixed entries.
std::optional<double> normal_deviation(const DistributionSpec& spec, double value);

double mean_parameter(const DistributionSpec& spec);
std::vector<double> mean_draws(ModelKind m);

// order-of-magnitude band half-span on a log10 axis (0.5 = one order
// of magnitude total)
inline constexpr double kTimeConstantSpanDecades = 0.5;

enum class RejectionRule { None, OneSd, TimeConstant, Basal };

// First violated rule for a raw draw vector, solver screening included.
// basal screening target is 6 mmol/L in each model's glucose units.
RejectionRule screen_draws(ModelKind m, const std::vector<double>& draws,
                           double* u_ss_out = nullptr);

HovorkaParams build_hovorka_params(const std::vector<double>& draws);
UvaPadovaParams build_uvapadova_params(const std::vector<double>& draws);

inline constexpr double kMinBasalUnitsPerHour = 0.4;
inline constexpr double kScreeningTargetMmolPerL = 6.0;

enum class Sex { Female, Male };

std::string to_string(Sex s);

struct ParticipantRecord {
  std::uint64_t id = 0;
  std::string given_name;
  std::string family_name;
  std::string date_of_birth; // ISO 8601
  std::string place_of_birth;
  Sex sex = Sex::Female;
  double height_cm = 0.0;
  double body_weight_kg = 0.0;
  ModelKind model_kind = ModelKind::Hovorka;
  std::vector<double> draws; // raw sampled values, table order
  double basal_u_ss = 0.0;   // model infusion units per minute
};

double basal_units_per_hour(const ParticipantRecord& r);

struct RejectionCounts {
  std::uint64_t one_sd = 0;
  std::uint64_t time_constant = 0;
  std::uint64_t basal = 0;
  std::uint64_t total_attempts = 0;
};

inline constexpr std::uint64_t kDefaultMaxSampleAttempts = 1000000;

// Rejection-sample one participant on its own (master_seed, id) stream.
ParticipantRecord sample_participant(ModelKind m, std::uint64_t master_seed,
                                     std::uint64_t participant_id,
                                     RejectionCounts* counts = nullptr,
                                     std::uint64_t max_attempts = kDefaultMaxSampleAttempts);

struct Cohort {
  ModelKind model_kind = ModelKind::Hovorka;
  std::uint64_t master_seed = 0;
  std::vector<ParticipantRecord> participants;
};

Cohort generate_cohort(std::size_t n, ModelKind m, std::uint64_t master_seed,
                       RejectionCounts* counts = nullptr);

std::string cohort_to_string(const Cohort& c);
void save_cohort(const Cohort& c, const std::string& path);
Cohort load_cohort(const std::string& path);

} // namespace vct
