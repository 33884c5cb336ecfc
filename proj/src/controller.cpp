#include "vct/controller.hpp"

#include <algorithm>
#include <cmath>

namespace vct {

ReferenceController::ReferenceController(const ControllerHyperparams& p) : p_(p) {}

ReferenceController::State ReferenceController::init() const {
  State s;
  s.basal_estimate = std::clamp(p_.initial_basal, 0.0, p_.max_basal);
  s.carb_ratio_estimate =
      std::clamp(p_.initial_carb_ratio, p_.carb_ratio_min, p_.carb_ratio_max);
  return s;
}

double ReferenceController::shaped_error(double y) const {
  const double e = y - p_.y_bar;
  double m = std::abs(e) - p_.deadband_halfwidth;
  if (m <= 0.0) return 0.0;
  m = std::min(m, p_.error_truncation);
  return e < 0.0 ? -m * p_.hypo_gain : m;
}

double ReferenceController::ring_slope(const State& s) {
  const int n = s.ring_count;
  if (n < 2) return 0.0;
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (int i = 0; i < n; ++i) {
    st += s.ring_t[i];
    sy += s.ring_y[i];
    stt += s.ring_t[i] * s.ring_t[i];
    sty += s.ring_t[i] * s.ring_y[i];
  }
  const double denom = n * stt - st * st;
  if (denom == 0.0) return 0.0;
  return (n * sty - st * sy) / denom;
}

void ReferenceController::close_window(State& s, bool full_length) const {
  // an undosed meal says nothing about the carb ratio
  if (s.window_open && s.window_dosed) {
    double err = 0.0;
    if (s.window_suspended) {
      // the pump cut out after a real dose: treat as an overdose and
      // back off by one full step, whatever glucose shows now
      err = -p_.error_truncation;
    } else if (full_length && s.ring_count > 0) {
      // judge the bolus by where glucose settled, not by the excursion
      // itself: even a well-sized dose rides high mid-window. The ring
      // average smooths sensor noise so a settled window adjusts
      // nothing. A window preempted by the next meal never settled, so
      // it carries no reading at all.
      double settle = 0.0;
      for (int i = 0; i < s.ring_count; ++i) settle += s.ring_y[i];
      settle /= s.ring_count;
      err = shaped_error(settle);
    }
    s.carb_ratio_estimate =
        std::clamp(s.carb_ratio_estimate - p_.Ki_bolus * err,
                   p_.carb_ratio_min, p_.carb_ratio_max);
  }
  s.window_open = false;
  s.window_dosed = false;
  s.window_suspended = false;
}

void ReferenceController::update(State& s, double t, double y,
                                 double announced_grams) const {
  const int w = std::clamp(p_.derivative_filter_window, 1, kMaxWindow);
  double dt = 0.0;
  if (s.ring_count > 0) dt = t - s.ring_t[s.ring_count - 1];
  if (s.ring_count == w) {
    for (int i = 1; i < w; ++i) {
      s.ring_t[i - 1] = s.ring_t[i];
      s.ring_y[i - 1] = s.ring_y[i];
    }
    --s.ring_count;
  }
  s.ring_t[s.ring_count] = t;
  s.ring_y[s.ring_count] = y;
  ++s.ring_count;

  // pump suspension with hysteresis and short-horizon prediction
  const bool was_suspended = s.suspended;
  const double slope = ring_slope(s);
  if (y < p_.suspend_threshold ||
      y + slope * p_.predictive_suspend_horizon < p_.suspend_threshold)
    s.suspended = true;
  else if (y > p_.resume_threshold)
    s.suspended = false;

  // each suspension that begins away from a meal response is evidence
  // of basal excess the frozen integrator would otherwise never see:
  // debit one lookahead's worth of maximal low-side error
  if (s.suspended && !was_suspended && !s.window_open) {
    const double debit = p_.Ki_basal * p_.hypo_gain * p_.error_truncation *
                         p_.predictive_suspend_horizon;
    double lo = 0.0;
    if (p_.basal_band_factor > 1.0 && p_.initial_basal > 0.0)
      lo = p_.initial_basal / p_.basal_band_factor;
    s.basal_estimate = std::max(s.basal_estimate - debit, lo);
  }

  // postprandial bookkeeping: close an expired window, then open on a
  // fresh announcement (closing any partial window first)
  if (s.window_open && s.suspended) s.window_suspended = true;
  if (s.window_open && t - s.meal_time >= p_.postprandial_window)
    close_window(s, true);
  if (announced_grams > 0.0) {
    if (s.window_open) close_window(s, false);
    s.window_open = true;
    s.meal_time = t;
    // mirror of the output-side bolus condition
    s.window_dosed = !s.suspended && y > p_.suspend_threshold;
    s.window_suspended = s.suspended;
  }

  // slow basal trim, frozen while a meal response is in flight or the
  // pump is suspended. The screening basal is trusted: the estimate may
  // not wander more than a fixed factor from where it started, which
  // bounds integrator windup during suspend/rebound cycling.
  if (!s.window_open && !s.suspended && dt > 0.0) {
    double lo = 0.0, hi = p_.max_basal;
    if (p_.basal_band_factor > 1.0 && p_.initial_basal > 0.0) {
      lo = p_.initial_basal / p_.basal_band_factor;
      hi = std::min(hi, p_.initial_basal * p_.basal_band_factor);
    }
    s.basal_estimate =
        std::clamp(s.basal_estimate + p_.Ki_basal * shaped_error(y) * dt, lo, hi);
  }
}

DoseCommand ReferenceController::output(const State& s, double /*t*/, double y,
                                        double announced_grams) const {
  if (s.suspended) return {0.0, 0.0};
  DoseCommand cmd;
  const double e = shaped_error(y);
  const double slope = ring_slope(s);
  cmd.basal_rate =
      std::clamp(s.basal_estimate + p_.Kp * e + p_.Kd * slope, 0.0, p_.max_basal);
  if (announced_grams > 0.0 && y > p_.suspend_threshold)
    cmd.bolus =
        std::min(announced_grams / s.carb_ratio_estimate, p_.max_bolus);
  return cmd;
}

} // namespace vct
