#include "vct/hovorka.hpp"

#include <cmath>

namespace vct {

namespace {

constexpr double kDiffusionQ1 = 1.5;       // mmol/min^(1/2) noise intensity on Q1
constexpr double kGlucoseKink = 4.5;       // mmol/L, consumption saturation knee
constexpr double kRenalThreshold = 9.0;    // mmol/L
constexpr double kRenalSlope = 0.003;      // 1/min per mmol/L excess

double f01_consumption(double g, double f01) {
  return g >= kGlucoseKink ? f01 : f01 * g / kGlucoseKink;
}

double renal_clearance(double g, double vg) {
  return g >= kRenalThreshold ? kRenalSlope * (g - kRenalThreshold) * vg : 0.0;
}

} // namespace

HovorkaParams nominal_hovorka_params(double bw) {
  HovorkaParams p{};
  p.tau_S = 1.0 / 0.018;
  p.V_I = 0.12 * bw;
  p.k_e = 0.14;
  p.k_a1 = 0.0055;
  p.k_a2 = 0.0683;
  p.k_a3 = 0.0304;
  p.S_IT = 51.2;
  p.S_ID = 8.2;
  p.S_IE = 520.0;
  p.A_G = 0.95;
  p.tau_D = std::exp(3.689);
  p.k_12 = 0.0649;
  p.EGP_0 = 0.0161 * bw;
  p.F_01 = 0.0097 * bw;
  p.V_G = 0.15 * bw;
  p.tau_IG = 15.0;
  p.BW = bw;
  return p;
}

std::array<double, 3> derive_kb(const HovorkaParams& p) {
  return {p.S_IT * p.k_a1 * 1e-4, p.S_ID * p.k_a2 * 1e-4, p.S_IE * p.k_a3 * 1e-4};
}

Hovorka::Hovorka(const HovorkaParams& p, bool deterministic) : p_(p) {
  const auto kb = derive_kb(p_);
  k_b1_ = kb[0];
  k_b2_ = kb[1];
  k_b3_ = kb[2];
  sigma_.fill(0.0);
  if (!deterministic) sigma_[iQ1] = kDiffusionQ1;
  mask_.fill(true);
}

void Hovorka::drift(double /*t*/, const State& x, double u, double d,
                    State& out) const {
  const double g = x[iQ1] / p_.V_G;
  out[iS1] = u - x[iS1] / p_.tau_S;
  out[iS2] = (x[iS1] - x[iS2]) / p_.tau_S;
  out[iI] = x[iS2] / (p_.tau_S * p_.V_I) - p_.k_e * x[iI];
  out[iX1] = k_b1_ * x[iI] - p_.k_a1 * x[iX1];
  out[iX2] = k_b2_ * x[iI] - p_.k_a2 * x[iX2];
  out[iX3] = k_b3_ * x[iI] - p_.k_a3 * x[iX3];
  out[iD1] = p_.A_G * d - x[iD1] / p_.tau_D;
  out[iD2] = (x[iD1] - x[iD2]) / p_.tau_D;
  out[iQ1] = x[iD2] / p_.tau_D - f01_consumption(g, p_.F_01) -
             renal_clearance(g, p_.V_G) - x[iX1] * x[iQ1] + p_.k_12 * x[iQ2] +
             p_.EGP_0 * (1.0 - x[iX3]);
  out[iQ2] = x[iX1] * x[iQ1] - p_.k_12 * x[iQ2] - x[iX2] * x[iQ2];
  out[iGI] = (g - x[iGI]) / p_.tau_IG;
}

HovorkaSteadyState hovorka_steady_state(const HovorkaParams& p,
                                        double target_mmol_per_l,
                                        double u_max_mU_per_min) {
  const auto kb = derive_kb(p);
  const double q1 = target_mmol_per_l * p.V_G;
  const double consumption = f01_consumption(target_mmol_per_l, p.F_01) +
                             renal_clearance(target_mmol_per_l, p.V_G);

  // accessible-compartment balance as a function of the infusion rate
  const auto residual = [&](double u) {
    const double i = u / (p.V_I * p.k_e);
    const double x1 = kb[0] / p.k_a1 * i;
    const double x2 = kb[1] / p.k_a2 * i;
    const double x3 = kb[2] / p.k_a3 * i;
    const double q2 = x1 * q1 / (p.k_12 + x2);
    return -consumption - x1 * q1 + p.k_12 * q2 + p.EGP_0 * (1.0 - x3);
  };

  double lo = 0.0, hi = u_max_mU_per_min;
  double flo = residual(lo);
  if (!(flo > 0.0) || !(residual(hi) < 0.0))
    throw SteadyStateError("no basal rate holds the requested glucose target");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double u = 0.5 * (lo + hi);

  HovorkaSteadyState ss{};
  ss.u_ss = u;
  auto& x = ss.state;
  x[Hovorka::iS1] = u * p.tau_S;
  x[Hovorka::iS2] = u * p.tau_S;
  x[Hovorka::iI] = u / (p.V_I * p.k_e);
  x[Hovorka::iX1] = kb[0] / p.k_a1 * x[Hovorka::iI];
  x[Hovorka::iX2] = kb[1] / p.k_a2 * x[Hovorka::iI];
  x[Hovorka::iX3] = kb[2] / p.k_a3 * x[Hovorka::iI];
  x[Hovorka::iD1] = 0.0;
  x[Hovorka::iD2] = 0.0;
  x[Hovorka::iQ1] = q1;
  x[Hovorka::iQ2] = x[Hovorka::iX1] * q1 / (p.k_12 + x[Hovorka::iX2]);
  x[Hovorka::iGI] = target_mmol_per_l;

  Hovorka sys(p, true);
  Hovorka::State f;
  sys.drift(0.0, x, u, 0.0, f);
  double norm = 0.0;
  for (double v : f) norm += v * v;
  if (std::sqrt(norm) >= 1e-9)
    throw SteadyStateError("steady-state residual did not converge");
  return ss;
}

} // namespace vct
