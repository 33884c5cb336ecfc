#pragma once

#include <array>
#include <concepts>
#include <cstddef>

// Closed-loop dose policy interface and the reference controller: dual
// slow integrators (basal estimate, carb-ratio estimate) under a
// proportional-derivative correction, with deadband, error truncation,
// hypoglycemia asymmetry, and threshold/predictive pump suspension.
// Glucose everywhere in mmol/L, time in minutes, doses in U and U/h.

namespace vct {

struct DoseCommand {
  double basal_rate = 0.0; // U/h over the coming control interval
  double bolus = 0.0;      // U delivered over the coming interval
};

template <class C>
concept ApController = requires(const C c, typename C::State& s, double t,
                                double y, double announced_grams) {
  { c.init() } -> std::same_as<typename C::State>;
  { c.update(s, t, y, announced_grams) } -> std::same_as<void>;
  { c.output(std::as_const(s), t, y, announced_grams) } -> std::same_as<DoseCommand>;
};

struct ControllerHyperparams {
  double y_bar = 6.0;               // mmol/L set point
  double deadband_halfwidth = 0.3;  // mmol/L
  double error_truncation = 3.0;    // mmol/L cap on the shaped error
  double hypo_gain = 3.0;           // multiplier on low-side errors
  double Kp = 0.05;                 // (U/h) per mmol/L
  double Kd = 2.0;                  // (U/h) per (mmol/L)/min
  double Ki_basal = 1e-4;           // (U/h) per mmol/L per min
  double Ki_bolus = 0.5;            // (g/U) per mmol/L of postprandial error
  double initial_basal = 0.0;       // U/h, set to the screening basal
  double initial_carb_ratio = 30.0; // g/U, starts undersized on purpose
  double basal_band_factor = 3.0;   // estimate stays within this factor of
                                    // its start (0 or 1 disables the band)
  double carb_ratio_min = 3.0;      // g/U
  double carb_ratio_max = 30.0;     // g/U
  double max_basal = 5.0;           // U/h
  double max_bolus = 15.0;          // U
  double suspend_threshold = 3.9;   // mmol/L
  double resume_threshold = 5.0;    // mmol/L
  double predictive_suspend_horizon = 20.0; // min
  double postprandial_window = 180.0;       // min
  int derivative_filter_window = 4;         // CGM samples in the slope fit
};

class ReferenceController {
public:
  static constexpr int kMaxWindow = 16;

  struct State {
    double basal_estimate = 0.0;
    double carb_ratio_estimate = 0.0;
    std::array<double, kMaxWindow> ring_t{};
    std::array<double, kMaxWindow> ring_y{};
    int ring_count = 0;
    bool suspended = false;
    double meal_time = -1.0e18; // last announced meal
    bool window_open = false;
    bool window_dosed = false;     // a bolus actually went out for it
    bool window_suspended = false; // the pump cut out somewhere inside
  };

  explicit ReferenceController(const ControllerHyperparams& p);

  State init() const;
  void update(State& s, double t, double y, double announced_grams) const;
  DoseCommand output(const State& s, double t, double y,
                     double announced_grams) const;

  const ControllerHyperparams& hyperparams() const { return p_; }

  // deadband-softened, truncated, hypo-amplified error
  double shaped_error(double y) const;
  // least-squares CGM slope over the ring, (mmol/L)/min; 0 below 2 samples
  static double ring_slope(const State& s);

private:
  void close_window(State& s, bool full_length) const;

  ControllerHyperparams p_;
};

// trivial policies used by tests and open-loop baselines
class ConstantRateController {
public:
  struct State {};
  explicit ConstantRateController(double basal_rate) : rate_(basal_rate) {}
  State init() const { return {}; }
  void update(State&, double, double, double) const {}
  DoseCommand output(const State&, double, double, double) const {
    return {rate_, 0.0};
  }

private:
  double rate_;
};

class ZeroController {
public:
  struct State {};
  State init() const { return {}; }
  void update(State&, double, double, double) const {}
  DoseCommand output(const State&, double, double, double) const { return {}; }
};

static_assert(ApController<ReferenceController>);
static_assert(ApController<ConstantRateController>);
static_assert(ApController<ZeroController>);

} // namespace vct
