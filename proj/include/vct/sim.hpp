#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "vct/errors.hpp"
#include "vct/rng.hpp"

// Fixed-step Euler-Maruyama driver for small stiff-free physiological
// systems with diagonal, state-independent diffusion and non-negative
// states (selected coordinates may be exempt from the clamp).

namespace vct {

template <std::size_t N>
using Vec = std::array<double, N>;

// Anything the integrator can drive: constant-size state, drift as a
// function of (t, x, insulin rate, carb rate), constant diffusion
// vector, plasma output and sensor-compartment observation maps, and a
// clamp mask marking coordinates that must stay non-negative.
template <class S>
concept SdeSystem = requires(const S s, double t, const typename S::State& x,
                             typename S::State& out, double u, double d) {
  { S::state_dim } -> std::convertible_to<std::size_t>;
  { s.drift(t, x, u, d, out) } -> std::same_as<void>;
  { s.diffusion() } -> std::convertible_to<const typename S::State&>;
  { s.output(x) } -> std::convertible_to<double>;
  { s.observe(x) } -> std::convertible_to<double>;
  { s.nonneg_mask() } -> std::convertible_to<const std::array<bool, S::state_dim>&>;
};

struct SimConfig {
  double step_size = 0.5;   // min
  double cgm_period = 5.0;  // min
  double titration_duration = 4.0 * 7 * 24 * 60; // min, excluded from stats
  double trial_duration = 52.0 * 7 * 24 * 60;    // min
  bool deterministic = false; // forces zero process and measurement noise

  int steps_per_interval() const {
    return static_cast<int>(std::llround(cgm_period / step_size));
  }

  void validate() const {
    if (!(step_size > 0)) throw std::invalid_argument("step_size must be positive");
    if (!(cgm_period > 0)) throw std::invalid_argument("cgm_period must be positive");
    const double k = cgm_period / step_size;
    if (std::abs(k - std::llround(k)) > 1e-9)
      throw std::invalid_argument("cgm_period must be an integer multiple of step_size");
    if (titration_duration < 0) throw std::invalid_argument("titration_duration must be >= 0");
    if (trial_duration < 0) throw std::invalid_argument("trial_duration must be >= 0");
    if (trial_duration > 0 && titration_duration >= trial_duration)
      throw std::invalid_argument("titration_duration must be below trial_duration");
  }
};

struct ObservationNoise {
  double variance = 0.0; // squared model glucose units
};

// dim independent N(0, dt) increments
inline std::vector<double> wiener_increments(std::size_t dim, double dt,
                                             NoiseStream& rng) {
  if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
  std::vector<double> dw(dim);
  const double sd = std::sqrt(dt);
  for (std::size_t i = 0; i < dim; ++i) dw[i] = rng.normal() * sd;
  return dw;
}

namespace detail {

template <std::size_t N>
inline void check_finite(const Vec<N>& x, double t) {
  for (std::size_t i = 0; i < N; ++i)
    if (!std::isfinite(x[i])) throw NumericalBlowupError(t, i);
}

} // namespace detail

// One explicit step x' = x + f dt + sigma .* dw, followed by the
// non-negativity clamp. Noise is drawn only for coordinates with a
// nonzero diffusion entry, in ascending index order; rng == nullptr
// integrates the drift alone. Returns the clamped state; *clamp_count
// (if given) is incremented once per clamped coordinate.
template <SdeSystem S>
typename S::State em_step(const S& sys, double t, const typename S::State& x,
                          double u, double d, double dt, NoiseStream* rng,
                          std::uint64_t* clamp_count = nullptr) {
  if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
  constexpr std::size_t n = S::state_dim;
  typename S::State f;
  sys.drift(t, x, u, d, f);
  typename S::State next;
  for (std::size_t i = 0; i < n; ++i) next[i] = x[i] + dt * f[i];
  if (rng != nullptr) {
    const auto& sigma = sys.diffusion();
    const double sd = std::sqrt(dt);
    for (std::size_t i = 0; i < n; ++i)
      if (sigma[i] != 0.0) next[i] += sigma[i] * rng->normal() * sd;
  }
  detail::check_finite(next, t + dt);
  const auto& mask = sys.nonneg_mask();
  for (std::size_t i = 0; i < n; ++i) {
    if (mask[i] && next[i] < 0.0) {
      next[i] = 0.0;
      if (clamp_count != nullptr) ++*clamp_count;
    }
  }
  return next;
}

struct NullSink {
  void operator()(double, double) const {}
};

// Integrate one control interval [t_k, t_k + cgm_period) under constant
// inputs, invoking sink(t, z) after every internal step.
template <SdeSystem S, class Sink = NullSink>
typename S::State simulate_control_interval(const S& sys, double t_k,
                                            typename S::State x, double u_k,
                                            double d_k, const SimConfig& cfg,
                                            NoiseStream* rng, Sink&& sink = {},
                                            std::uint64_t* clamp_count = nullptr) {
  const int n = cfg.steps_per_interval();
  const double dt = cfg.step_size;
  for (int i = 0; i < n; ++i) {
    const double t = t_k + i * dt;
    x = em_step(sys, t, x, u_k, d_k, dt, cfg.deterministic ? nullptr : rng,
                clamp_count);
    sink(t + dt, sys.output(x));
  }
  return x;
}

// Sensor reading: observation map plus N(0, R) noise, floored at zero
// (a glucose sensor cannot report a negative concentration).
template <SdeSystem S>
double observe(const S& sys, double t_k, const typename S::State& x,
               const ObservationNoise& noise, NoiseStream* rng) {
  detail::check_finite<S::state_dim>(x, t_k);
  double y = sys.observe(x);
  if (rng != nullptr && noise.variance > 0.0)
    y += rng->normal() * std::sqrt(noise.variance);
  return y < 0.0 ? 0.0 : y;
}

} // namespace vct
