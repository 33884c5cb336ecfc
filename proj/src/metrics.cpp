#include "vct/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vct/units.hpp"

namespace vct {

GlycemicRange classify(double y) {
  if (y < 3.0) return GlycemicRange::L2Hypo;
  if (y < 3.9) return GlycemicRange::L1Hypo;
  if (y <= 10.0) return GlycemicRange::Target;
  if (y <= 13.9) return GlycemicRange::L1Hyper;
  return GlycemicRange::L2Hyper;
}

ParticipantStats make_stats(std::uint64_t participant_id, ModelKind model,
                            double titration_end) {
  ParticipantStats s;
  s.participant_id = participant_id;
  s.model = model;
  s.titration_end = titration_end;
  return s;
}

void update(ParticipantStats& s, double y, const DoseRecord& dose, double t) {
  if (t < s.titration_end) return; // run-in period is never counted
  ++s.n_samples;
  const double d = y - s.mean;
  s.mean += d / static_cast<double>(s.n_samples);
  s.m2 += d * (y - s.mean);
  if (s.n_samples == 1) {
    s.min_cgm = y;
    s.max_cgm = y;
  } else {
    s.min_cgm = std::min(s.min_cgm, y);
    s.max_cgm = std::max(s.max_cgm, y);
  }
  ++s.range_counts[static_cast<int>(classify(y))];
  int bin = static_cast<int>(y / kHistogramBinWidth);
  if (bin < 0) bin = 0;
  if (bin > kHistogramBins) bin = kHistogramBins;
  ++s.histogram[bin];
  s.basal_total += dose.basal_rate * dose.interval / 60.0;
  s.bolus_total += dose.bolus;
  s.days_counted += dose.interval / 1440.0;
}

ParticipantStats merge(const ParticipantStats& a, const ParticipantStats& b) {
  if (b.n_samples == 0) {
    ParticipantStats out = a;
    out.basal_total += b.basal_total;
    out.bolus_total += b.bolus_total;
    out.days_counted += b.days_counted;
    return out;
  }
  if (a.n_samples == 0) {
    ParticipantStats out = b;
    out.participant_id = a.participant_id ? a.participant_id : b.participant_id;
    out.basal_total += a.basal_total;
    out.bolus_total += a.bolus_total;
    out.days_counted += a.days_counted;
    return out;
  }
  ParticipantStats out = a;
  const double na = static_cast<double>(a.n_samples);
  const double nb = static_cast<double>(b.n_samples);
  const double n = na + nb;
  const double delta = b.mean - a.mean;
  out.n_samples = a.n_samples + b.n_samples;
  out.mean = a.mean + delta * nb / n;
  out.m2 = a.m2 + b.m2 + delta * delta * na * nb / n;
  out.min_cgm = std::min(a.min_cgm, b.min_cgm);
  out.max_cgm = std::max(a.max_cgm, b.max_cgm);
  for (int i = 0; i < 5; ++i) out.range_counts[i] = a.range_counts[i] + b.range_counts[i];
  for (int i = 0; i <= kHistogramBins; ++i)
    out.histogram[i] = a.histogram[i] + b.histogram[i];
  out.basal_total = a.basal_total + b.basal_total;
  out.bolus_total = a.bolus_total + b.bolus_total;
  out.days_counted = a.days_counted + b.days_counted;
  return out;
}

double mean_mg_per_dl(const ParticipantStats& s) {
  return mmol_per_l_to_mg_per_dl(s.mean);
}

double gmi_percent(const ParticipantStats& s) {
  return 3.31 + 0.02392 * mean_mg_per_dl(s);
}

double sample_sd(const ParticipantStats& s) {
  if (s.n_samples < 2) return 0.0;
  return std::sqrt(s.m2 / static_cast<double>(s.n_samples - 1));
}

double cv_percent(const ParticipantStats& s) {
  if (s.mean == 0.0) throw std::domain_error("CV undefined for zero mean");
  return 100.0 * sample_sd(s) / s.mean;
}

std::array<double, 5> time_fractions(const ParticipantStats& s) {
  std::array<double, 5> f{};
  if (s.n_samples == 0) return f;
  const double n = static_cast<double>(s.n_samples);
  for (int i = 0; i < 5; ++i) f[i] = static_cast<double>(s.range_counts[i]) / n;
  return f;
}

SummaryRow summarize(const ParticipantStats& s) {
  SummaryRow row;
  row.id = s.participant_id;
  row.model = s.model;
  row.mean_mmol = s.mean;
  row.gmi = gmi_percent(s);
  row.cv = s.n_samples > 0 ? cv_percent(s) : 0.0;
  row.fractions = time_fractions(s);
  row.tdd_basal = s.days_counted > 0 ? s.basal_total / s.days_counted : 0.0;
  row.tdd_bolus = s.days_counted > 0 ? s.bolus_total / s.days_counted : 0.0;
  row.min_cgm = s.min_cgm;
  return row;
}

TargetResults evaluate_targets(const SummaryRow& r) {
  TargetResults t;
  const double tbr2 = r.fractions[0], tbr1 = r.fractions[1], tir = r.fractions[2],
               tar1 = r.fractions[3], tar2 = r.fractions[4];
  t.mean_under_154 = mmol_per_l_to_mg_per_dl(r.mean_mmol) < 154.0;
  t.gmi_under_7 = r.gmi < 7.0;
  t.cv_at_most_36 = r.cv <= 36.0;
  t.tar2_under_5 = tar2 < 0.05;
  t.tar_under_25 = tar1 + tar2 < 0.25;
  t.tir_over_70 = tir > 0.70;
  t.tbr_under_4 = tbr1 + tbr2 < 0.04;
  t.tbr2_under_1 = tbr2 < 0.01;
  t.all = t.mean_under_154 && t.gmi_under_7 && t.cv_at_most_36 && t.tar2_under_5 &&
          t.tar_under_25 && t.tir_over_70 && t.tbr_under_4 && t.tbr2_under_1;
  return t;
}

namespace {

// linear-interpolation quantile on sorted data
double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.empty()) return 0.0;
  if (v.size() == 1) return v[0];
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

} // namespace

BoxPlot box_plot(std::vector<double> values) {
  BoxPlot b;
  if (values.empty()) return b;
  std::sort(values.begin(), values.end());
  b.min = values.front();
  b.max = values.back();
  b.q1 = quantile_sorted(values, 0.25);
  b.median = quantile_sorted(values, 0.5);
  b.q3 = quantile_sorted(values, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_low = b.max;
  b.whisker_high = b.min;
  for (double v : values) {
    if (v >= lo_fence) {
      b.whisker_low = v;
      break;
    }
  }
  for (auto it = values.rbegin(); it != values.rend(); ++it) {
    if (*it <= hi_fence) {
      b.whisker_high = *it;
      break;
    }
  }
  return b;
}

CohortReport cohort_report(const std::vector<ParticipantStats>& stats) {
  CohortReport rep;
  rep.participants = stats.size();
  if (stats.empty()) return rep;

  std::array<std::vector<double>, 5> fraction_samples;
  std::uint64_t total_samples = 0;
  bool have_worst = false;
  const ParticipantStats* worst = nullptr;
  std::vector<double> tdd_basal, tdd_bolus;
  for (const auto& s : stats) {
    const auto f = time_fractions(s);
    for (int i = 0; i < 5; ++i) {
      rep.mean_fractions[i] += f[i];
      fraction_samples[i].push_back(f[i]);
    }
    for (int i = 0; i <= kHistogramBins; ++i) rep.merged_histogram[i] += s.histogram[i];
    total_samples += s.n_samples;
    const auto row = summarize(s);
    tdd_basal.push_back(row.tdd_basal);
    tdd_bolus.push_back(row.tdd_bolus);
    const auto t = evaluate_targets(row);
    const bool oks[9] = {t.mean_under_154, t.gmi_under_7, t.cv_at_most_36,
                         t.tar2_under_5, t.tar_under_25, t.tir_over_70,
                         t.tbr_under_4, t.tbr2_under_1, t.all};
    for (int i = 0; i < 9; ++i) rep.attainment[i] += oks[i] ? 1.0 : 0.0;
    if (s.n_samples > 0 && (!have_worst || s.min_cgm < worst->min_cgm)) {
      worst = &s;
      have_worst = true;
    }
  }
  const double n = static_cast<double>(stats.size());
  for (int i = 0; i < 5; ++i) rep.mean_fractions[i] /= n;
  for (int i = 0; i < 9; ++i) rep.attainment[i] /= n;
  if (have_worst) {
    rep.worst_case_id = worst->participant_id;
    rep.worst_case_min_cgm = worst->min_cgm;
    rep.worst_case_fractions = time_fractions(*worst);
  }
  for (int i = 0; i < 5; ++i) rep.fraction_box[i] = box_plot(fraction_samples[i]);

  const auto fill_tdd = [](const std::vector<double>& vals,
                           std::vector<std::uint64_t>& hist) {
    double top = 0.0;
    for (double v : vals) top = std::max(top, v);
    hist.assign(static_cast<std::size_t>(top / kTddHistogramBinWidth) + 1, 0);
    for (double v : vals) {
      auto bin = static_cast<std::size_t>(v / kTddHistogramBinWidth);
      if (bin >= hist.size()) bin = hist.size() - 1;
      ++hist[bin];
    }
  };
  fill_tdd(tdd_basal, rep.tdd_basal_histogram);
  fill_tdd(tdd_bolus, rep.tdd_bolus_histogram);

  rep.glucose_cdf.assign(kHistogramBins + 1, 0.0);
  if (total_samples > 0) {
    std::uint64_t run = 0;
    for (int i = 0; i <= kHistogramBins; ++i) {
      run += rep.merged_histogram[i];
      rep.glucose_cdf[i] =
          static_cast<double>(run) / static_cast<double>(total_samples);
    }
  }
  return rep;
}

} // namespace vct
