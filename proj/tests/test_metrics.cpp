#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "vct/metrics.hpp"
#include "vct/rng.hpp"
#include "vct/units.hpp"

using namespace vct;

namespace {

ParticipantStats fed_with(const std::vector<double>& ys, double titration_end = 0.0,
                          const DoseRecord& dose = {}) {
  auto s = make_stats(1, ModelKind::Hovorka, titration_end);
  double t = titration_end;
  for (double y : ys) {
    update(s, y, dose, t);
    t += 5.0;
  }
  return s;
}

} // namespace

TEST_CASE("range boundaries classify exactly") {
  CHECK(classify(0.0) == GlycemicRange::L2Hypo);
  CHECK(classify(2.999) == GlycemicRange::L2Hypo);
  CHECK(classify(3.0) == GlycemicRange::L1Hypo);
  CHECK(classify(3.8999) == GlycemicRange::L1Hypo);
  CHECK(classify(3.9) == GlycemicRange::Target);
  CHECK(classify(6.0) == GlycemicRange::Target);
  CHECK(classify(10.0) == GlycemicRange::Target);
  CHECK(classify(10.0001) == GlycemicRange::L1Hyper);
  CHECK(classify(13.9) == GlycemicRange::L1Hyper);
  CHECK(classify(13.9001) == GlycemicRange::L2Hyper);
  CHECK(classify(25.0) == GlycemicRange::L2Hyper);
}

TEST_CASE("streaming moments match a direct pass") {
  NoiseStream rng(5, 0, StreamPurpose::Sampling);
  for (int rep = 0; rep < 3; ++rep) {
    std::vector<double> ys;
    for (int i = 0; i < 2000; ++i) ys.push_back(std::abs(rng.normal(6.0, 2.5)));
    const auto s = fed_with(ys);

    double sum = 0.0;
    for (double y : ys) sum += y;
    const double mean = sum / ys.size();
    double ss = 0.0;
    for (double y : ys) ss += (y - mean) * (y - mean);
    const double sd = std::sqrt(ss / (ys.size() - 1));

    CHECK(s.mean == doctest::Approx(mean).epsilon(1e-10));
    CHECK(sample_sd(s) == doctest::Approx(sd).epsilon(1e-10));
    CHECK(cv_percent(s) == doctest::Approx(100.0 * sd / mean).epsilon(1e-10));

    std::uint64_t counts[5] = {};
    double lo = ys[0], hi = ys[0];
    for (double y : ys) {
      ++counts[static_cast<int>(classify(y))];
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    for (int i = 0; i < 5; ++i) {
      CHECK(s.range_counts[i] == counts[i]);
      CHECK(time_fractions(s)[i] ==
            doctest::Approx(double(counts[i]) / ys.size()).epsilon(1e-12));
    }
    CHECK(s.min_cgm == lo);
    CHECK(s.max_cgm == hi);
    std::uint64_t hist_total = 0;
    for (auto c : s.histogram) hist_total += c;
    CHECK(hist_total == ys.size());
  }
}

TEST_CASE("merging is exact wherever the stream is cut") {
  NoiseStream rng(6, 0, StreamPurpose::Sampling);
  std::vector<double> ys;
  for (int i = 0; i < 500; ++i) ys.push_back(std::abs(rng.normal(7.0, 3.0)));
  const auto whole = fed_with(ys);

  for (std::size_t cut : {std::size_t{0}, std::size_t{1}, std::size_t{250},
                          std::size_t{499}, std::size_t{500}}) {
    const auto head = fed_with({ys.begin(), ys.begin() + cut});
    const auto tail = fed_with({ys.begin() + cut, ys.end()});
    const auto m = merge(head, tail);
    CHECK(m.n_samples == whole.n_samples);
    CHECK(m.mean == doctest::Approx(whole.mean).epsilon(1e-12));
    CHECK(m.m2 == doctest::Approx(whole.m2).epsilon(1e-10));
    CHECK(m.min_cgm == whole.min_cgm);
    CHECK(m.max_cgm == whole.max_cgm);
    for (int i = 0; i < 5; ++i) CHECK(m.range_counts[i] == whole.range_counts[i]);
    for (int i = 0; i <= kHistogramBins; ++i)
      CHECK(m.histogram[i] == whole.histogram[i]);
  }

  // three-way associativity
  const auto a = fed_with({ys.begin(), ys.begin() + 100});
  const auto b = fed_with({ys.begin() + 100, ys.begin() + 350});
  const auto c = fed_with({ys.begin() + 350, ys.end()});
  const auto left = merge(merge(a, b), c);
  const auto right = merge(a, merge(b, c));
  CHECK(left.mean == doctest::Approx(right.mean).epsilon(1e-12));
  CHECK(left.m2 == doctest::Approx(right.m2).epsilon(1e-10));
  CHECK(left.n_samples == right.n_samples);
}

TEST_CASE("an empty accumulator is a merge identity that still carries doses") {
  auto loaded = fed_with({5.0, 6.0, 7.0});
  auto empty = make_stats(2, ModelKind::Hovorka, 0.0);
  empty.basal_total = 2.5;
  empty.bolus_total = 1.0;
  empty.days_counted = 0.25;

  const auto m1 = merge(loaded, empty);
  CHECK(m1.n_samples == 3);
  CHECK(m1.mean == loaded.mean);
  CHECK(m1.m2 == loaded.m2);
  CHECK(m1.basal_total == loaded.basal_total + 2.5);
  CHECK(m1.bolus_total == loaded.bolus_total + 1.0);
  CHECK(m1.days_counted == loaded.days_counted + 0.25);

  const auto m2v = merge(empty, loaded);
  CHECK(m2v.n_samples == 3);
  CHECK(m2v.mean == loaded.mean);
  CHECK(m2v.participant_id == 2);
  CHECK(m2v.basal_total == loaded.basal_total + 2.5);
}

TEST_CASE("risk index anchors at 154 mg/dL") {
  const double boundary_mmol = 8.547957371225579;
  const auto s = fed_with({boundary_mmol});
  CHECK(mean_mg_per_dl(s) == 154.0); // exact in floating point
  CHECK(gmi_percent(s) == doctest::Approx(6.9936799999999995).epsilon(1e-14));
  CHECK(gmi_percent(s) < 7.0);
}

TEST_CASE("degenerate statistics are explicit") {
  const auto zero = fed_with({0.0, 0.0});
  CHECK_THROWS_AS(cv_percent(zero), std::domain_error);
  const auto one = fed_with({6.0});
  CHECK(sample_sd(one) == 0.0);
  const auto none = make_stats(1, ModelKind::Hovorka, 0.0);
  CHECK(sample_sd(none) == 0.0);
  for (double f : time_fractions(none)) CHECK(f == 0.0);
}

TEST_CASE("the run-in period is excluded entirely") {
  auto s = make_stats(1, ModelKind::Hovorka, 1000.0);
  update(s, 20.0, {5.0, 3.0, 5.0}, 999.9);
  CHECK(s.n_samples == 0);
  CHECK(s.basal_total == 0.0);
  CHECK(s.bolus_total == 0.0);
  CHECK(s.days_counted == 0.0);
  update(s, 6.0, {1.0, 0.5, 5.0}, 1000.0);
  CHECK(s.n_samples == 1);
  CHECK(s.bolus_total == 0.5);
}

TEST_CASE("daily dose totals average over counted days") {
  auto s = make_stats(1, ModelKind::Hovorka, 0.0);
  update(s, 6.0, {2.0, 1.5, 720.0}, 0.0);
  update(s, 6.0, {2.0, 1.5, 720.0}, 720.0);
  const auto row = summarize(s);
  CHECK(s.days_counted == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(row.tdd_basal == doctest::Approx(48.0).epsilon(1e-12)); // 2 U/h all day
  CHECK(row.tdd_bolus == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("target cuts are strict or inclusive exactly as published") {
  SummaryRow row;
  row.mean_mmol = 6.0;
  row.gmi = 6.5;
  row.cv = 30.0;
  row.fractions = {0.005, 0.03, 0.705, 0.19, 0.045};
  auto t = evaluate_targets(row);
  CHECK(t.mean_under_154);
  CHECK(t.gmi_under_7);
  CHECK(t.cv_at_most_36);
  CHECK(t.tar2_under_5);
  CHECK(t.tar_under_25);
  CHECK(t.tir_over_70);
  CHECK(t.tbr_under_4);
  CHECK(t.tbr2_under_1);
  CHECK(t.all);

  // sitting exactly on a strict cut fails it
  row.mean_mmol = 8.547957371225579; // 154 mg/dL on the nose
  row.gmi = 7.0;
  row.fractions = {0.04, 0.0, 0.70, 0.25, 0.05};
  t = evaluate_targets(row);
  CHECK_FALSE(t.mean_under_154);
  CHECK_FALSE(t.gmi_under_7);
  CHECK_FALSE(t.tar2_under_5);
  CHECK_FALSE(t.tar_under_25);
  CHECK_FALSE(t.tir_over_70);
  CHECK_FALSE(t.tbr_under_4);
  CHECK_FALSE(t.tbr2_under_1);
  CHECK_FALSE(t.all);

  // the variability cut is inclusive
  row.cv = 36.0;
  CHECK(evaluate_targets(row).cv_at_most_36);
  row.cv = 36.0001;
  CHECK_FALSE(evaluate_targets(row).cv_at_most_36);
}

TEST_CASE("box plot uses interpolated quartiles and fenced whiskers") {
  const auto b = box_plot({1.0, 2.0, 3.0, 4.0, 100.0});
  CHECK(b.min == 1.0);
  CHECK(b.whisker_low == 1.0);
  CHECK(b.q1 == 2.0);
  CHECK(b.median == 3.0);
  CHECK(b.q3 == 4.0);
  CHECK(b.whisker_high == 4.0); // 100 lies beyond the upper fence
  CHECK(b.max == 100.0);

  const auto q = box_plot({1.0, 2.0, 3.0, 4.0});
  CHECK(q.q1 == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(q.median == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(q.q3 == doctest::Approx(3.25).epsilon(1e-12));

  const auto single = box_plot({5.0});
  CHECK(single.min == 5.0);
  CHECK(single.median == 5.0);
  CHECK(single.whisker_high == 5.0);

  const auto empty = box_plot({});
  CHECK(empty.min == 0.0);
  CHECK(empty.max == 0.0);
}

TEST_CASE("cohort report aggregates participants") {
  std::vector<ParticipantStats> stats;
  {
    auto s = make_stats(1, ModelKind::Hovorka, 0.0);
    for (int i = 0; i < 100; ++i) update(s, 5.0, {1.0, 0.0, 5.0}, i * 5.0);
    stats.push_back(s);
  }
  {
    auto s = make_stats(2, ModelKind::Hovorka, 0.0);
    for (int i = 0; i < 50; ++i) update(s, 2.0, {0.0, 0.0, 5.0}, i * 5.0);
    stats.push_back(s);
  }
  {
    auto s = make_stats(3, ModelKind::Hovorka, 0.0);
    for (int i = 0; i < 50; ++i) update(s, 12.0, {0.0, 0.0, 5.0}, i * 5.0);
    stats.push_back(s);
  }
  const auto rep = cohort_report(stats);
  CHECK(rep.participants == 3);
  CHECK(rep.mean_fractions[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(rep.mean_fractions[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(rep.mean_fractions[3] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(rep.mean_fractions[1] == 0.0);
  CHECK(rep.worst_case_id == 2);
  CHECK(rep.worst_case_min_cgm == 2.0);
  CHECK(rep.worst_case_fractions[0] == 1.0);

  // attainment order: mean, risk index, variability, severe-high, high,
  // in-range, low, severe-low, composite
  CHECK(rep.attainment[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(rep.attainment[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(rep.attainment[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.attainment[3] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.attainment[4] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(rep.attainment[5] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(rep.attainment[6] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(rep.attainment[7] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(rep.attainment[8] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // 24 U/day of basal for the first participant, none for the others
  const auto top_bin =
      static_cast<std::size_t>(summarize(stats[0]).tdd_basal / kTddHistogramBinWidth);
  REQUIRE(rep.tdd_basal_histogram.size() == top_bin + 1);
  CHECK(rep.tdd_basal_histogram[0] == 2);
  CHECK(rep.tdd_basal_histogram[top_bin] == 1);

  std::uint64_t merged_total = 0;
  for (auto c : rep.merged_histogram) merged_total += c;
  CHECK(merged_total == 200);
  REQUIRE(rep.glucose_cdf.size() == kHistogramBins + 1);
  for (std::size_t i = 1; i < rep.glucose_cdf.size(); ++i)
    CHECK(rep.glucose_cdf[i] >= rep.glucose_cdf[i - 1]);
  CHECK(rep.glucose_cdf.back() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(cohort_report({}).participants == 0);
}
