#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vct/population.hpp"
#include "vct/rng.hpp"

// Year-long behavioral protocol: seasons of shuffled week kinds, weeks
// of shuffled day kinds, days of meals/snacks/exercise. Event times are
// minutes from trial start; meal carbohydrate is delivered uniformly
// over the event window.

namespace vct {

enum class EventKind { Meal, Snack, Exercise };
enum class SizeClass { Large, Medium, Small, SnackSize, None };
enum class DayKind { Standard, Active, MovieNight, LateNight };
enum class WeekKind { Standard, Active, Vacation };
enum class Season { Winter, Spring, Summer, Autumn };

std::string to_string(EventKind k);
std::string to_string(SizeClass s);

struct ActivityEvent {
  std::uint64_t event_id = 0;
  EventKind kind = EventKind::Meal;
  double start = 0.0; // min from trial start
  double end = 0.0;   // min, exclusive; meals deliver over [start, end)
  double true_grams = 0.0;
  double announced_grams = 0.0;
  SizeClass size_class = SizeClass::None;
};

struct Protocol {
  std::uint64_t protocol_id = 0;
  double duration = 0.0; // min
  std::vector<ActivityEvent> events; // sorted by start
};

// meal size in g CHO for a given body weight
double meal_grams(double bw_kg, SizeClass size);

inline constexpr double kMealWindowMinutes = 15.0;
inline constexpr double kMinutesPerDay = 1440.0;
inline constexpr double kMinutesPerWeek = 7.0 * kMinutesPerDay;

// day-kind multiset of one week, shuffled
std::array<DayKind, 7> build_week(WeekKind kind, NoiseStream& rng);

// week-kind multiset of one 13-week season, shuffled
std::vector<WeekKind> season_weeks(Season s, NoiseStream& rng);

// 52-week year; all randomness from (master_seed) through the protocol
// stream purpose, so the calendar is a pure function of (bw, seed)
Protocol build_year(double bw_kg, std::uint64_t master_seed);

// mean true grams over [t0, t1) converted to the model's carb-rate units
// ((mmol/min) for Hovorka, (mg/min) for UVA/Padova); exercise ignored
double disturbance_for_interval(const Protocol& p, double t0, double t1,
                                ModelKind m);

// announced grams of events starting inside [t0, t1)
double announced_grams_in(const Protocol& p, double t0, double t1);

struct AnnouncementPolicy {
  enum class Kind { Exact, Multiplicative, Omit };
  Kind kind = Kind::Exact;
  double mu = 1.0;    // multiplicative bias
  double sigma = 0.0; // multiplicative spread
  double omit_probability = 0.0;
};

AnnouncementPolicy announcement_policy_from_string(const std::string& s);

// announced value for one event under a policy (draws at most once)
double announce(const ActivityEvent& e, const AnnouncementPolicy& policy,
                NoiseStream& rng);

// stamp announced_grams across the whole protocol, one draw per event
void apply_announcement_policy(Protocol& p, const AnnouncementPolicy& policy,
                               NoiseStream& rng);

std::string protocol_to_string(const Protocol& p);
void save_protocol(const Protocol& p, const std::string& path);
Protocol load_protocol(const std::string& path);

} // namespace vct
