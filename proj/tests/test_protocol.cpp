#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "vct/protocol.hpp"

using namespace vct;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

Protocol single_meal(double grams, double start) {
  Protocol p;
  p.duration = 2880.0;
  ActivityEvent e;
  e.event_id = 1;
  e.kind = EventKind::Meal;
  e.start = start;
  e.end = start + kMealWindowMinutes;
  e.true_grams = grams;
  e.announced_grams = grams;
  e.size_class = SizeClass::Medium;
  p.events.push_back(e);
  return p;
}

} // namespace

TEST_CASE("meal sizes scale with body weight") {
  CHECK(meal_grams(70.0, SizeClass::Large) == doctest::Approx(90.3).epsilon(1e-12));
  CHECK(meal_grams(70.0, SizeClass::Medium) == doctest::Approx(60.2).epsilon(1e-12));
  CHECK(meal_grams(70.0, SizeClass::Small) == doctest::Approx(39.9).epsilon(1e-12));
  CHECK(meal_grams(70.0, SizeClass::SnackSize) == doctest::Approx(20.3).epsilon(1e-12));
  CHECK(meal_grams(70.0, SizeClass::None) == 0.0);
  CHECK(meal_grams(0.0, SizeClass::Large) == 0.0);
  CHECK(meal_grams(85.0, SizeClass::Small) ==
        doctest::Approx(85.0 / 70.0 * meal_grams(70.0, SizeClass::Small)).epsilon(1e-12));
}

TEST_CASE("every week kind keeps its day composition") {
  const std::map<WeekKind, std::map<DayKind, int>> expected = {
      {WeekKind::Standard,
       {{DayKind::Standard, 4}, {DayKind::Active, 1}, {DayKind::MovieNight, 1},
        {DayKind::LateNight, 1}}},
      {WeekKind::Active,
       {{DayKind::Standard, 3}, {DayKind::Active, 3}, {DayKind::MovieNight, 1},
        {DayKind::LateNight, 0}}},
      {WeekKind::Vacation,
       {{DayKind::Standard, 5}, {DayKind::Active, 0}, {DayKind::MovieNight, 0},
        {DayKind::LateNight, 2}}},
  };
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    NoiseStream rng(seed, 0, StreamPurpose::Protocol);
    for (const auto& [kind, want] : expected) {
      const auto days = build_week(kind, rng);
      std::map<DayKind, int> got;
      for (DayKind d : days) ++got[d];
      for (const auto& [day, n] : want) CHECK(got[day] == n);
    }
  }
}

TEST_CASE("every season keeps its week composition") {
  const std::map<Season, std::map<WeekKind, int>> expected = {
      {Season::Winter, {{WeekKind::Standard, 6}, {WeekKind::Active, 4}, {WeekKind::Vacation, 3}}},
      {Season::Spring, {{WeekKind::Standard, 6}, {WeekKind::Active, 6}, {WeekKind::Vacation, 1}}},
      {Season::Summer, {{WeekKind::Standard, 7}, {WeekKind::Active, 3}, {WeekKind::Vacation, 3}}},
      {Season::Autumn, {{WeekKind::Standard, 9}, {WeekKind::Active, 3}, {WeekKind::Vacation, 1}}},
  };
  for (std::uint64_t seed : {4u, 5u}) {
    NoiseStream rng(seed, 0, StreamPurpose::Protocol);
    for (const auto& [season, want] : expected) {
      const auto weeks = season_weeks(season, rng);
      REQUIRE(weeks.size() == 13);
      std::map<WeekKind, int> got;
      for (WeekKind w : weeks) ++got[w];
      for (const auto& [kind, n] : want) CHECK(got[kind] == n);
    }
  }
}

TEST_CASE("the year is composition-exact under any seed") {
  for (std::uint64_t seed : {5u, 99u}) {
    const auto p = build_year(70.0, seed);
    CHECK(p.duration == 52.0 * kMinutesPerWeek);
    CHECK(std::is_sorted(p.events.begin(), p.events.end(),
                         [](const ActivityEvent& a, const ActivityEvent& b) {
                           return a.start < b.start;
                         }));
    int meals = 0, snacks = 0, exercise = 0;
    int large = 0, medium = 0, small = 0;
    int breakfasts = 0;
    for (const auto& e : p.events) {
      switch (e.kind) {
        case EventKind::Meal: ++meals; break;
        case EventKind::Snack: ++snacks; break;
        case EventKind::Exercise: ++exercise; break;
      }
      switch (e.size_class) {
        case SizeClass::Large: ++large; break;
        case SizeClass::Medium: ++medium; break;
        case SizeClass::Small: ++small; break;
        default: break;
      }
      if (e.kind == EventKind::Meal && std::fmod(e.start, kMinutesPerDay) == 7 * 60.0)
        ++breakfasts;
      if (e.kind == EventKind::Exercise) {
        CHECK(e.end - e.start == 45.0);
        CHECK(e.true_grams == 0.0);
      } else {
        CHECK(e.end - e.start == kMealWindowMinutes);
        CHECK(e.true_grams > 0.0);
      }
    }
    CHECK(p.events.size() == 1664);
    CHECK(meals == 52 * 7 * 3);
    CHECK(snacks == 496);
    CHECK(exercise == 76);
    CHECK(large == 182);  // cold-season dinners
    CHECK(medium == 546); // breakfasts plus warm-season dinners
    CHECK(small == 364);  // lunches
    CHECK(breakfasts == 364);
  }
}

TEST_CASE("meal and snack starts stay at least two hours apart") {
  const auto p = build_year(70.0, 7);
  std::vector<double> starts;
  for (const auto& e : p.events)
    if (e.kind != EventKind::Exercise) starts.push_back(e.start);
  REQUIRE(std::is_sorted(starts.begin(), starts.end()));
  for (std::size_t i = 1; i < starts.size(); ++i)
    REQUIRE(starts[i] - starts[i - 1] >= 120.0);
}

TEST_CASE("carbohydrate is delivered uniformly over the meal window") {
  const auto p = single_meal(60.0, 720.0);
  const double full = 22.202486678507995; // 4 g/min in glucose-mass units
  CHECK(disturbance_for_interval(p, 720.0, 725.0, ModelKind::Hovorka) ==
        doctest::Approx(full).epsilon(1e-12));
  CHECK(disturbance_for_interval(p, 720.0, 735.0, ModelKind::Hovorka) ==
        doctest::Approx(full).epsilon(1e-12));
  CHECK(disturbance_for_interval(p, 720.0, 735.0, ModelKind::UvaPadova) ==
        doctest::Approx(4000.0).epsilon(1e-12));
  // half the query window overlaps the tail of the meal
  CHECK(disturbance_for_interval(p, 730.0, 740.0, ModelKind::Hovorka) ==
        doctest::Approx(full / 2.0).epsilon(1e-12));
  CHECK(disturbance_for_interval(p, 700.0, 710.0, ModelKind::Hovorka) == 0.0);
  CHECK(disturbance_for_interval(p, 735.0, 745.0, ModelKind::Hovorka) == 0.0);
  CHECK_THROWS_AS(disturbance_for_interval(p, 10.0, 10.0, ModelKind::Hovorka),
                  std::invalid_argument);

  Protocol ex;
  ex.duration = 1440.0;
  ActivityEvent e;
  e.kind = EventKind::Exercise;
  e.start = 1020.0;
  e.end = 1065.0;
  ex.events.push_back(e);
  CHECK(disturbance_for_interval(ex, 1020.0, 1065.0, ModelKind::Hovorka) == 0.0);
}

TEST_CASE("announcements count events that start inside the window") {
  const auto p = single_meal(60.0, 720.0);
  CHECK(announced_grams_in(p, 715.0, 725.0) == 60.0);
  CHECK(announced_grams_in(p, 720.0, 725.0) == 60.0);
  CHECK(announced_grams_in(p, 725.0, 735.0) == 0.0);
  CHECK(announced_grams_in(p, 700.0, 720.0) == 0.0);
}

TEST_CASE("announcement policy strings parse or reject") {
  CHECK(announcement_policy_from_string("exact").kind ==
        AnnouncementPolicy::Kind::Exact);
  const auto m = announcement_policy_from_string("multiplicative:1.1,0.2");
  CHECK(m.kind == AnnouncementPolicy::Kind::Multiplicative);
  CHECK(m.mu == 1.1);
  CHECK(m.sigma == 0.2);
  const auto o = announcement_policy_from_string("omit:0.25");
  CHECK(o.kind == AnnouncementPolicy::Kind::Omit);
  CHECK(o.omit_probability == 0.25);
  CHECK_THROWS_AS(announcement_policy_from_string("guess"), ConfigError);
  CHECK_THROWS_AS(announcement_policy_from_string("multiplicative:1.0;0.2"),
                  ConfigError);
  CHECK_THROWS_AS(announcement_policy_from_string("omit:"), ConfigError);
}

TEST_CASE("announcement policies transform the whole protocol") {
  auto p = build_year(70.0, 11);
  NoiseStream rng(11, 0, StreamPurpose::Protocol);

  auto omitted = p;
  apply_announcement_policy(omitted, announcement_policy_from_string("omit:1.0"), rng);
  for (const auto& e : omitted.events) CHECK(e.announced_grams == 0.0);

  auto kept = p;
  apply_announcement_policy(kept, announcement_policy_from_string("omit:0.0"), rng);
  for (std::size_t i = 0; i < kept.events.size(); ++i)
    CHECK(kept.events[i].announced_grams == p.events[i].true_grams *
          (p.events[i].kind == EventKind::Exercise ? 0.0 : 1.0));

  auto biased = p;
  apply_announcement_policy(
      biased, announcement_policy_from_string("multiplicative:1.0,0.2"), rng);
  double ratio_sum = 0.0;
  int n = 0;
  for (const auto& e : biased.events) {
    if (e.kind == EventKind::Exercise) {
      CHECK(e.announced_grams == 0.0);
      continue;
    }
    CHECK(e.announced_grams >= 0.0);
    ratio_sum += e.announced_grams / e.true_grams;
    ++n;
  }
  CHECK(ratio_sum / n == doctest::Approx(1.0).epsilon(0.02));

  // heavily negative multiplier clamps to zero rather than un-eating the meal
  auto clamped = p;
  apply_announcement_policy(
      clamped, announcement_policy_from_string("multiplicative:-5.0,0.1"), rng);
  for (const auto& e : clamped.events) CHECK(e.announced_grams == 0.0);
}

TEST_CASE("calendars are a pure function of weight and seed") {
  const auto a = build_year(70.0, 3);
  const auto b = build_year(70.0, 3);
  CHECK(protocol_to_string(a) == protocol_to_string(b));
  const auto c = build_year(70.0, 4);
  CHECK(protocol_to_string(a) != protocol_to_string(c));

  const auto heavy = build_year(80.0, 3);
  REQUIRE(heavy.events.size() == a.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(heavy.events[i].start == a.events[i].start);
    CHECK(heavy.events[i].kind == a.events[i].kind);
    if (a.events[i].kind != EventKind::Exercise)
      CHECK(heavy.events[i].true_grams ==
            doctest::Approx(a.events[i].true_grams * 80.0 / 70.0).epsilon(1e-12));
  }
}

TEST_CASE("protocol files round-trip exactly") {
  const auto path = temp_path("vct_test_protocol.tsv");
  const auto p = build_year(72.0, 13);
  save_protocol(p, path);
  const auto back = load_protocol(path);
  CHECK(protocol_to_string(back) == protocol_to_string(p));
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_protocol(temp_path("vct_no_such_protocol.tsv")), IoError);

  const auto bad = temp_path("vct_bad_protocol.tsv");
  {
    std::ofstream f(bad);
    f << "# vct-protocol v1\n";
    f << "event_id\tkind\tstart\tend\ttrue_grams\tannounced_grams\tsize_class\n";
    f << "1\tmeal\t100\t100\t60\t60\tmedium\n"; // zero-length window
  }
  CHECK_THROWS_AS(load_protocol(bad), IoError);
  std::remove(bad.c_str());
}
