#pragma once

#include <array>

#include "vct/sim.hpp"

// Glucose-insulin model in the UVA/Padova tradition (mg/kg and pmol/kg
// masses, mg/dL and pmol/L concentrations) with a Hovorka-style
// two-compartment gut, two-compartment subcutaneous insulin transport,
// and a first-order subcutaneous glucose sensor compartment. Insulin
// input in pmol/min, carbohydrate input in mg/min.

namespace vct {

struct UvaPadovaParams {
  double BW;    // kg
  double k_1;   // 1/min, plasma -> tissue glucose transfer
  double k_2;   // 1/min, tissue -> plasma glucose transfer
  double V_g;   // dL/kg, glucose distribution volume
  double G_b;   // mg/kg, basal plasma glucose mass
  double HE_b;  // dimensionless, basal hepatic extraction
  double CL;    // L/min, insulin clearance
  double m_1;   // 1/min, liver insulin transfer
  double V_i;   // L/kg, insulin distribution volume
  double I_b;   // pmol/L, basal plasma insulin concentration
  double tau_D; // min, meal absorption time constant
  double A_G;   // dimensionless, carbohydrate bioavailability
  double EGP_b; // (mg/kg)/min, basal endogenous glucose production
  double k_p2;  // 1/min, EGP glucose feedback gain
  double k_p3;  // (mg/kg)/min per pmol/L, EGP insulin feedback gain
  double k_i;   // 1/min, delayed insulin signal rate
  double F_cns; // (mg/kg)/min, insulin-independent utilization
  double V_mx;  // per pmol/L, insulin-dependent utilization gain
  double K_m0;  // mg/kg, Michaelis constant
  double p_2U;  // 1/min, remote insulin action rate
  double k_e1;  // 1/min, renal clearance slope
  double k_e2;  // mg/kg, renal threshold
  double k_a1;  // 1/min, subcutaneous depot 1 absorption
  double k_a2;  // 1/min, subcutaneous depot 2 absorption
  double k_d;   // 1/min, depot 1 -> depot 2 transfer
  double k_sc;  // 1/min, sensor compartment rate
};

// nominal published means
UvaPadovaParams nominal_uvapadova_params();

struct UvaPadovaDerived {
  double m_2; // 1/min
  double m_3; // 1/min
  double m_4; // 1/min
  double G_tb; // mg/kg, basal tissue glucose
  double V_m0; // (mg/kg)/min, utilization capacity at zero action
};

// Closed-form derived constants; throws DerivationError when the raw
// values make them infeasible (HE_b outside (0,1), G_tb or V_m0 <= 0).
UvaPadovaDerived derive_uvp(const UvaPadovaParams& p);

struct UvaPadovaSteadyState;

class UvaPadova {
public:
  static constexpr std::size_t state_dim = 12;
  using State = Vec<state_dim>;

  enum Index : std::size_t {
    iGp = 0,   // mg/kg, plasma glucose mass
    iGt = 1,   // mg/kg, tissue glucose mass
    iIl = 2,   // pmol/kg, liver insulin
    iIp = 3,   // pmol/kg, plasma insulin
    iX = 4,    // pmol/L, remote insulin action (may be negative)
    iD1 = 5,   // mg, gut carbohydrate
    iD2 = 6,   // mg
    iId = 7,   // pmol/L, delayed insulin signal
    iI1 = 8,   // pmol/L, intermediate insulin signal
    iIsc1 = 9, // pmol/kg, subcutaneous depot 1
    iIsc2 = 10,// pmol/kg, subcutaneous depot 2
    iGsc = 11  // mg/dL, sensor glucose
  };

  // literal_depot_sign reproduces the unstable textbook transcription
  // of the first subcutaneous depot (positive k_a1 feedback); the
  // default negated form is the physically meaningful one.
  explicit UvaPadova(const UvaPadovaParams& p, bool deterministic = false,
                     bool literal_depot_sign = false);

  void drift(double t, const State& x, double u, double d, State& out) const;
  const State& diffusion() const { return sigma_; }
  double output(const State& x) const { return x[iGp] / p_.V_g; }
  double observe(const State& x) const { return x[iGsc]; }
  const std::array<bool, state_dim>& nonneg_mask() const { return mask_; }

  const UvaPadovaParams& params() const { return p_; }
  const UvaPadovaDerived& derived() const { return d_; }

private:
  UvaPadovaParams p_;
  UvaPadovaDerived d_;
  State sigma_{};
  std::array<bool, state_dim> mask_{};
  double depot1_sign_;
};

struct UvaPadovaSteadyState {
  UvaPadova::State state;
  double u_ss; // pmol/min
};

// Constant-infusion equilibrium holding plasma glucose concentration at
// target (mg/dL): insulin chain closed-form, tissue glucose from the
// Michaelis-Menten balance (quadratic), bisection on the infusion rate.
UvaPadovaSteadyState uvapadova_steady_state(const UvaPadovaParams& p,
                                            double target_mg_per_dl,
                                            double u_max_pmol_per_min = 600.0);

} // namespace vct
