#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "vct/population.hpp"

// Streaming glycemic statistics: single-pass mean/variance, range
// occupancy, a fixed-bin histogram, dose totals. Participant
// accumulators merge exactly, so cohort reduction order is free to the
// caller (the trial runner still reduces in id order for bit-stable
// output). Glucose in mmol/L throughout.

namespace vct {

enum class GlycemicRange : int {
  L2Hypo = 0,  // [0, 3.0)
  L1Hypo = 1,  // [3.0, 3.9)
  Target = 2,  // [3.9, 10.0]
  L1Hyper = 3, // (10.0, 13.9]
  L2Hyper = 4, // (13.9, inf)
};

GlycemicRange classify(double y_mmol_per_l);

inline constexpr int kHistogramBins = 300;   // 0..30 mmol/L
inline constexpr double kHistogramBinWidth = 0.1;
inline constexpr double kTddHistogramBinWidth = 2.0; // U/day

struct DoseRecord {
  double basal_rate = 0.0; // U/h held over the interval
  double bolus = 0.0;      // U delivered in the interval
  double interval = 0.0;   // min
};

struct ParticipantStats {
  std::uint64_t participant_id = 0;
  ModelKind model = ModelKind::Hovorka;
  double titration_end = 0.0; // min; samples before this are not counted

  std::uint64_t n_samples = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double min_cgm = 0.0; // valid when n_samples > 0
  double max_cgm = 0.0;
  std::array<std::uint64_t, 5> range_counts{};
  std::array<std::uint64_t, kHistogramBins + 1> histogram{}; // +overflow
  double basal_total = 0.0;  // U
  double bolus_total = 0.0;  // U
  double days_counted = 0.0;
};

ParticipantStats make_stats(std::uint64_t participant_id, ModelKind model,
                            double titration_end);

// fold one CGM sample and the dose command applied at the same tick
void update(ParticipantStats& s, double y_mmol_per_l, const DoseRecord& dose,
            double t);

// exact pairwise combination (empty operand is the identity)
ParticipantStats merge(const ParticipantStats& a, const ParticipantStats& b);

double mean_mg_per_dl(const ParticipantStats& s);
double gmi_percent(const ParticipantStats& s);
double cv_percent(const ParticipantStats& s); // throws on zero mean
double sample_sd(const ParticipantStats& s);

// (TBR2, TBR1, TIR, TAR1, TAR2) as fractions of counted samples
std::array<double, 5> time_fractions(const ParticipantStats& s);

struct SummaryRow {
  std::uint64_t id = 0;
  ModelKind model = ModelKind::Hovorka;
  double mean_mmol = 0.0;
  double gmi = 0.0;
  double cv = 0.0;
  std::array<double, 5> fractions{}; // TBR2, TBR1, TIR, TAR1, TAR2
  double tdd_basal = 0.0; // U/day
  double tdd_bolus = 0.0; // U/day
  double min_cgm = 0.0;   // mmol/L
};

SummaryRow summarize(const ParticipantStats& s);

// consensus glycemic targets; strictness follows the published cuts
struct TargetResults {
  bool mean_under_154 = false;
  bool gmi_under_7 = false;
  bool cv_at_most_36 = false;
  bool tar2_under_5 = false;
  bool tar_under_25 = false;
  bool tir_over_70 = false;
  bool tbr_under_4 = false;
  bool tbr2_under_1 = false;
  bool all = false;
};

TargetResults evaluate_targets(const SummaryRow& row);

struct BoxPlot {
  double min = 0.0, whisker_low = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0,
         whisker_high = 0.0, max = 0.0;
};

BoxPlot box_plot(std::vector<double> values); // Tukey 1.5 IQR whiskers

struct CohortReport {
  std::uint64_t participants = 0;
  std::array<double, 5> mean_fractions{};        // averaged across participants
  std::uint64_t worst_case_id = 0;               // lowest observed CGM
  double worst_case_min_cgm = 0.0;
  std::array<double, 5> worst_case_fractions{};
  std::array<BoxPlot, 5> fraction_box{};
  std::vector<std::uint64_t> tdd_basal_histogram; // 2 U/day bins
  std::vector<std::uint64_t> tdd_bolus_histogram;
  std::array<std::uint64_t, kHistogramBins + 1> merged_histogram{};
  std::vector<double> glucose_cdf; // per histogram bin, of counted samples
  std::array<double, 9> attainment{}; // 8 targets + all, participant fractions
};

CohortReport cohort_report(const std::vector<ParticipantStats>& stats);

} // namespace vct
