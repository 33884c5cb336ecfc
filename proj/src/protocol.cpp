#include "vct/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vct/errors.hpp"
#include "vct/units.hpp"

namespace vct {

namespace {

// g CHO per kg body weight
constexpr double kGramsPerKg[4] = {1.29, 0.86, 0.57, 0.29}; // large, medium, small, snack

constexpr double kBreakfast = 7 * 60.0;
constexpr double kMorningSnack = 10 * 60.0; // spring/summer
constexpr double kLunch = 12 * 60.0;
constexpr double kExerciseStart = 17 * 60.0;
constexpr double kExerciseEnd = 17 * 60.0 + 45.0;
constexpr double kDinner = 18 * 60.0;
constexpr double kEveningSnack = 21 * 60.0; // autumn/winter
constexpr double kLateSnack = 23 * 60.0;    // movie night / late night
constexpr double kNightSnack = 25 * 60.0;   // late night, past midnight

bool cold_season(Season s) { return s == Season::Winter || s == Season::Autumn; }

void shuffle_tail(std::vector<int>& v, NoiseStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng.below(i)]);
}

template <class T>
std::vector<T> shuffled_multiset(const std::vector<std::pair<T, int>>& counts,
                                 NoiseStream& rng) {
  std::vector<T> out;
  for (const auto& [kind, n] : counts)
    for (int i = 0; i < n; ++i) out.push_back(kind);
  std::vector<int> idx(out.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  shuffle_tail(idx, rng);
  std::vector<T> shuffled(out.size());
  for (std::size_t i = 0; i < idx.size(); ++i) shuffled[i] = out[idx[i]];
  return shuffled;
}

void push_meal(std::vector<ActivityEvent>& events, std::uint64_t& next_id,
               double day_start, double clock, EventKind kind, SizeClass size,
               double bw) {
  ActivityEvent e;
  e.event_id = next_id++;
  e.kind = kind;
  e.start = day_start + clock;
  e.end = e.start + kMealWindowMinutes;
  e.true_grams = meal_grams(bw, size);
  e.announced_grams = e.true_grams; // exact policy by default
  e.size_class = size;
  events.push_back(e);
}

void expand_day(std::vector<ActivityEvent>& events, std::uint64_t& next_id,
                double day_start, Season season, DayKind day, double bw) {
  push_meal(events, next_id, day_start, kBreakfast, EventKind::Meal,
            SizeClass::Medium, bw);
  if (!cold_season(season))
    push_meal(events, next_id, day_start, kMorningSnack, EventKind::Snack,
              SizeClass::SnackSize, bw);
  push_meal(events, next_id, day_start, kLunch, EventKind::Meal, SizeClass::Small,
            bw);
  if (day == DayKind::Active) {
    ActivityEvent e;
    e.event_id = next_id++;
    e.kind = EventKind::Exercise;
    e.start = day_start + kExerciseStart;
    e.end = day_start + kExerciseEnd;
    e.size_class = SizeClass::None;
    events.push_back(e);
  }
  push_meal(events, next_id, day_start, kDinner, EventKind::Meal,
            cold_season(season) ? SizeClass::Large : SizeClass::Medium, bw);
  if (cold_season(season))
    push_meal(events, next_id, day_start, kEveningSnack, EventKind::Snack,
              SizeClass::SnackSize, bw);
  if (day == DayKind::MovieNight || day == DayKind::LateNight)
    push_meal(events, next_id, day_start, kLateSnack, EventKind::Snack,
              SizeClass::SnackSize, bw);
  if (day == DayKind::LateNight)
    push_meal(events, next_id, day_start, kNightSnack, EventKind::Snack,
              SizeClass::SnackSize, bw);
}

double overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::Meal: return "meal";
    case EventKind::Snack: return "snack";
    case EventKind::Exercise: return "exercise";
  }
  return "meal";
}

std::string to_string(SizeClass s) {
  switch (s) {
    case SizeClass::Large: return "large";
    case SizeClass::Medium: return "medium";
    case SizeClass::Small: return "small";
    case SizeClass::SnackSize: return "snack";
    case SizeClass::None: return "none";
  }
  return "none";
}

double meal_grams(double bw_kg, SizeClass size) {
  switch (size) {
    case SizeClass::Large: return kGramsPerKg[0] * bw_kg;
    case SizeClass::Medium: return kGramsPerKg[1] * bw_kg;
    case SizeClass::Small: return kGramsPerKg[2] * bw_kg;
    case SizeClass::SnackSize: return kGramsPerKg[3] * bw_kg;
    case SizeClass::None: return 0.0;
  }
  return 0.0;
}

std::array<DayKind, 7> build_week(WeekKind kind, NoiseStream& rng) {
  std::vector<std::pair<DayKind, int>> counts;
  switch (kind) {
    case WeekKind::Standard:
      counts = {{DayKind::Standard, 4}, {DayKind::Active, 1},
                {DayKind::MovieNight, 1}, {DayKind::LateNight, 1}};
      break;
    case WeekKind::Active:
      counts = {{DayKind::Standard, 3}, {DayKind::Active, 3},
                {DayKind::MovieNight, 1}};
      break;
    case WeekKind::Vacation:
      counts = {{DayKind::Standard, 5}, {DayKind::LateNight, 2}};
      break;
  }
  const auto days = shuffled_multiset(counts, rng);
  std::array<DayKind, 7> out{};
  std::copy(days.begin(), days.end(), out.begin());
  return out;
}

std::vector<WeekKind> season_weeks(Season s, NoiseStream& rng) {
  std::vector<std::pair<WeekKind, int>> counts;
  switch (s) {
    case Season::Winter:
      counts = {{WeekKind::Standard, 6}, {WeekKind::Active, 4}, {WeekKind::Vacation, 3}};
      break;
    case Season::Spring:
      counts = {{WeekKind::Standard, 6}, {WeekKind::Active, 6}, {WeekKind::Vacation, 1}};
      break;
    case Season::Summer:
      counts = {{WeekKind::Standard, 7}, {WeekKind::Active, 3}, {WeekKind::Vacation, 3}};
      break;
    case Season::Autumn:
      counts = {{WeekKind::Standard, 9}, {WeekKind::Active, 3}, {WeekKind::Vacation, 1}};
      break;
  }
  return shuffled_multiset(counts, rng);
}

Protocol build_year(double bw_kg, std::uint64_t master_seed) {
  NoiseStream rng(master_seed, 0, StreamPurpose::Protocol);
  Protocol p;
  p.protocol_id = master_seed;
  p.duration = 52.0 * kMinutesPerWeek;
  std::uint64_t next_id = 1;
  const Season seasons[4] = {Season::Winter, Season::Spring, Season::Summer,
                             Season::Autumn};
  double week_start = 0.0;
  for (Season season : seasons) {
    const auto weeks = season_weeks(season, rng);
    for (WeekKind wk : weeks) {
      const auto days = build_week(wk, rng);
      for (int d = 0; d < 7; ++d)
        expand_day(p.events, next_id, week_start + d * kMinutesPerDay, season,
                   days[d], bw_kg);
      week_start += kMinutesPerWeek;
    }
  }
  std::stable_sort(p.events.begin(), p.events.end(),
                   [](const ActivityEvent& a, const ActivityEvent& b) {
                     return a.start < b.start;
                   });
  return p;
}

double disturbance_for_interval(const Protocol& p, double t0, double t1,
                                ModelKind m) {
  if (!(t1 > t0)) throw std::invalid_argument("empty disturbance interval");
  // events are sorted by start and never longer than the meal window
  const auto first = std::lower_bound(
      p.events.begin(), p.events.end(), t0 - kMealWindowMinutes,
      [](const ActivityEvent& e, double t) { return e.start < t; });
  double grams = 0.0;
  for (auto it = first; it != p.events.end() && it->start < t1; ++it) {
    if (it->kind == EventKind::Exercise) continue;
    const double span = it->end - it->start;
    if (span <= 0.0) continue;
    grams += it->true_grams * overlap(it->start, it->end, t0, t1) / span;
  }
  const double grams_per_min = grams / (t1 - t0);
  return m == ModelKind::Hovorka ? grams_to_mmol(grams_per_min)
                                 : grams_to_mg(grams_per_min);
}

double announced_grams_in(const Protocol& p, double t0, double t1) {
  const auto first = std::lower_bound(
      p.events.begin(), p.events.end(), t0,
      [](const ActivityEvent& e, double t) { return e.start < t; });
  double grams = 0.0;
  for (auto it = first; it != p.events.end() && it->start < t1; ++it)
    if (it->kind != EventKind::Exercise) grams += it->announced_grams;
  return grams;
}

AnnouncementPolicy announcement_policy_from_string(const std::string& s) {
  AnnouncementPolicy p;
  if (s == "exact") {
    p.kind = AnnouncementPolicy::Kind::Exact;
    return p;
  }
  std::istringstream in(s);
  std::string head;
  std::getline(in, head, ':');
  if (head == "multiplicative") {
    p.kind = AnnouncementPolicy::Kind::Multiplicative;
    char comma;
    if (!(in >> p.mu >> comma >> p.sigma) || comma != ',')
      throw ConfigError("expected multiplicative:<mu>,<sigma>");
    return p;
  }
  if (head == "omit") {
    p.kind = AnnouncementPolicy::Kind::Omit;
    if (!(in >> p.omit_probability))
      throw ConfigError("expected omit:<probability>");
    return p;
  }
  throw ConfigError("unknown announcement policy: " + s);
}

double announce(const ActivityEvent& e, const AnnouncementPolicy& policy,
                NoiseStream& rng) {
  if (e.kind == EventKind::Exercise) return 0.0;
  switch (policy.kind) {
    case AnnouncementPolicy::Kind::Exact:
      return e.true_grams;
    case AnnouncementPolicy::Kind::Multiplicative: {
      const double f = rng.normal(policy.mu, policy.sigma);
      return std::max(0.0, f * e.true_grams);
    }
    case AnnouncementPolicy::Kind::Omit:
      return rng.uniform01() < policy.omit_probability ? 0.0 : e.true_grams;
  }
  return e.true_grams;
}

void apply_announcement_policy(Protocol& p, const AnnouncementPolicy& policy,
                               NoiseStream& rng) {
  for (auto& e : p.events) e.announced_grams = announce(e, policy, rng);
}

std::string protocol_to_string(const Protocol& p) {
  std::ostringstream out;
  out << "# vct-protocol v1\n";
  out << "# protocol_id = " << p.protocol_id << "\n";
  out << "# duration = " << format_double(p.duration) << "\n";
  out << "event_id\tkind\tstart\tend\ttrue_grams\tannounced_grams\tsize_class\n";
  for (const auto& e : p.events) {
    out << e.event_id << "\t" << to_string(e.kind) << "\t" << format_double(e.start)
        << "\t" << format_double(e.end) << "\t" << format_double(e.true_grams)
        << "\t" << format_double(e.announced_grams) << "\t"
        << to_string(e.size_class) << "\n";
  }
  return out.str();
}

void save_protocol(const Protocol& p, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw IoError("cannot write " + tmp);
    f << protocol_to_string(p);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoError("cannot rename " + tmp + " to " + path);
}

Protocol load_protocol(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path);
  Protocol p;
  std::string line;
  bool header_seen = false;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string word, eq;
      ls >> word;
      if (word == "protocol_id") {
        ls >> eq >> p.protocol_id;
      } else if (word == "duration") {
        ls >> eq >> p.duration;
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, '\t')) fields.push_back(field);
    if (fields.size() != 7) throw IoError("protocol row has wrong field count");
    ActivityEvent e;
    e.event_id = std::stoull(fields[0]);
    if (fields[1] == "meal") e.kind = EventKind::Meal;
    else if (fields[1] == "snack") e.kind = EventKind::Snack;
    else if (fields[1] == "exercise") e.kind = EventKind::Exercise;
    else throw IoError("unknown event kind " + fields[1]);
    e.start = std::strtod(fields[2].c_str(), nullptr);
    e.end = std::strtod(fields[3].c_str(), nullptr);
    e.true_grams = std::strtod(fields[4].c_str(), nullptr);
    e.announced_grams = std::strtod(fields[5].c_str(), nullptr);
    if (fields[6] == "large") e.size_class = SizeClass::Large;
    else if (fields[6] == "medium") e.size_class = SizeClass::Medium;
    else if (fields[6] == "small") e.size_class = SizeClass::Small;
    else if (fields[6] == "snack") e.size_class = SizeClass::SnackSize;
    else e.size_class = SizeClass::None;
    if (!(e.start < e.end)) throw IoError("event must start before it ends");
    p.events.push_back(e);
  }
  return p;
}

} // namespace vct
