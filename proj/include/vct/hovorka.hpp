#pragma once

#include <array>

#include "vct/sim.hpp"

// Two-compartment glucose / three-action insulin model (Hovorka
// formulation) in mmol and mU, with a first-order interstitial sensor
// compartment. Insulin input in mU/min, carbohydrate input in mmol/min.

namespace vct {

struct HovorkaParams {
  double tau_S;  // min, subcutaneous insulin absorption time constant
  double V_I;    // L, insulin distribution volume (absolute)
  double k_e;    // 1/min, insulin elimination
  double k_a1;   // 1/min, deactivation of transport action
  double k_a2;   // 1/min, deactivation of disposal action
  double k_a3;   // 1/min, deactivation of endogenous-production action
  double S_IT;   // insulin sensitivity of transport, appendix scaling
  double S_ID;   // insulin sensitivity of disposal
  double S_IE;   // insulin sensitivity of endogenous production
  double A_G;    // dimensionless carbohydrate bioavailability
  double tau_D;  // min, meal absorption time constant
  double k_12;   // 1/min, inter-compartment glucose transfer
  double EGP_0;  // mmol/min, endogenous production extrapolated to zero action (absolute)
  double F_01;   // mmol/min, non-insulin-dependent consumption (absolute)
  double V_G;    // L, glucose distribution volume (absolute)
  double tau_IG; // min, sensor lag
  double BW;     // kg
};

// nominal published means scaled to a given body weight
HovorkaParams nominal_hovorka_params(double bw);

// activation gains k_b_i = S_i * k_a_i * 1e-4
std::array<double, 3> derive_kb(const HovorkaParams& p);

struct HovorkaSteadyState;

class Hovorka {
public:
  static constexpr std::size_t state_dim = 11;
  using State = Vec<state_dim>;

  enum Index : std::size_t {
    iS1 = 0, // mU, subcutaneous insulin depot
    iS2 = 1, // mU
    iI = 2,  // mU/L, plasma insulin
    iX1 = 3, // 1/min, transport action
    iX2 = 4, // 1/min, disposal action
    iX3 = 5, // dimensionless, endogenous-production action
    iD1 = 6, // mmol, gut carbohydrate
    iD2 = 7, // mmol
    iQ1 = 8, // mmol, accessible glucose mass
    iQ2 = 9, // mmol, non-accessible glucose mass
    iGI = 10 // mmol/L, interstitial (sensor) glucose
  };

  explicit Hovorka(const HovorkaParams& p, bool deterministic = false);

  void drift(double t, const State& x, double u, double d, State& out) const;
  const State& diffusion() const { return sigma_; }
  double output(const State& x) const { return x[iQ1] / p_.V_G; }
  double observe(const State& x) const { return x[iGI]; }
  const std::array<bool, state_dim>& nonneg_mask() const { return mask_; }

  const HovorkaParams& params() const { return p_; }

private:
  HovorkaParams p_;
  double k_b1_, k_b2_, k_b3_;
  State sigma_{};
  std::array<bool, state_dim> mask_{};
};

struct HovorkaSteadyState {
  Hovorka::State state;
  double u_ss; // mU/min
};

// Constant-infusion equilibrium holding plasma glucose at target:
// insulin chain in closed form, then bisection on the infusion rate so
// the accessible-compartment balance closes. Throws SteadyStateError if
// no rate in [0, u_max] works.
HovorkaSteadyState hovorka_steady_state(const HovorkaParams& p, double target_mmol_per_l,
                                        double u_max_mU_per_min = 100.0);

} // namespace vct
