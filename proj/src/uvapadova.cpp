#include "vct/uvapadova.hpp"

#include <algorithm>
#include <cmath>

namespace vct {

namespace {

constexpr double kDiffusionGpScale = 270.24; // (mg/min^(1/2)); divided by BW

// positive root of a x^2 + b x + c with a > 0, c < 0, numerically stable
double positive_quadratic_root(double a, double b, double c) {
  const double disc = b * b - 4.0 * a * c;
  const double s = std::sqrt(disc);
  const double q = b >= 0.0 ? -0.5 * (b + s) : -0.5 * (b - s);
  const double r1 = q / a;
  const double r2 = c / q;
  return std::max(r1, r2);
}

} // namespace

UvaPadovaParams nominal_uvapadova_params() {
  UvaPadovaParams p{};
  p.BW = 70.492;
  p.k_1 = 0.081;
  p.k_2 = 0.137;
  p.V_g = 1.87;
  p.G_b = 147.41;
  p.HE_b = 0.6;
  p.CL = 1.021;
  p.m_1 = 0.2109;
  p.V_i = 0.0646;
  p.I_b = 92.747;
  p.tau_D = std::exp(3.689);
  p.A_G = 0.95;
  p.EGP_b = 2.504;
  p.k_p2 = 0.005;
  p.k_p3 = 0.0106;
  p.k_i = 0.0069;
  p.F_cns = 1.0;
  p.V_mx = 0.081;
  p.K_m0 = 224.281;
  p.p_2U = 0.0246;
  p.k_e1 = 0.0005;
  p.k_e2 = 339.0;
  p.k_a1 = 0.0016;
  p.k_a2 = 0.0149;
  p.k_d = 0.0161;
  p.k_sc = 0.1033;
  return p;
}

UvaPadovaDerived derive_uvp(const UvaPadovaParams& p) {
  if (!(p.HE_b > 0.0) || !(p.HE_b < 1.0))
    throw DerivationError("basal hepatic extraction must lie in (0,1)");
  UvaPadovaDerived d{};
  d.m_2 = 3.0 * p.CL / (5.0 * p.HE_b * p.V_i * p.BW);
  d.m_3 = p.HE_b * p.m_1 / (1.0 - p.HE_b);
  d.m_4 = 2.0 * p.CL / (5.0 * p.V_i * p.BW);
  d.G_tb = (p.F_cns - p.EGP_b + p.k_1 * p.G_b) / p.k_2;
  if (!(d.G_tb > 0.0))
    throw DerivationError("basal tissue glucose is not positive");
  d.V_m0 = (p.EGP_b - p.F_cns) * (p.K_m0 + d.G_tb) / d.G_tb;
  if (!(d.V_m0 > 0.0))
    throw DerivationError("utilization capacity is not positive");
  return d;
}

UvaPadova::UvaPadova(const UvaPadovaParams& p, bool deterministic,
                     bool literal_depot_sign)
    : p_(p), d_(derive_uvp(p)),
      depot1_sign_(literal_depot_sign ? 1.0 : -1.0) {
  sigma_.fill(0.0);
  if (!deterministic) sigma_[iGp] = kDiffusionGpScale / p_.BW;
  mask_.fill(true);
  mask_[iX] = false; // remote action swings below zero when insulin is under basal
}

void UvaPadova::drift(double /*t*/, const State& x, double u, double d,
                      State& out) const {
  const double i_conc = x[iIp] / p_.V_i; // pmol/L
  const double g_conc = x[iGp] / p_.V_g; // mg/dL
  const double egp = std::max(
      0.0, p_.EGP_b - p_.k_p2 * (x[iGp] - p_.G_b) - p_.k_p3 * (x[iId] - p_.I_b));
  const double ra_meal = x[iD2] / (p_.BW * p_.tau_D);
  const double u_id =
      (d_.V_m0 + p_.V_mx * x[iX]) * x[iGt] / (p_.K_m0 + x[iGt]);
  const double renal = std::max(0.0, p_.k_e1 * (x[iGp] - p_.k_e2));
  const double ra_sc = p_.k_a1 * x[iIsc1] + p_.k_a2 * x[iIsc2];

  out[iGp] = egp + ra_meal - p_.F_cns - renal - p_.k_1 * x[iGp] + p_.k_2 * x[iGt];
  out[iGt] = -u_id + p_.k_1 * x[iGp] - p_.k_2 * x[iGt];
  out[iIl] = -(p_.m_1 + d_.m_3) * x[iIl] + d_.m_2 * x[iIp];
  out[iIp] = -(d_.m_2 + d_.m_4) * x[iIp] + p_.m_1 * x[iIl] + ra_sc;
  out[iX] = -p_.p_2U * x[iX] + p_.p_2U * (i_conc - p_.I_b);
  out[iD1] = p_.A_G * d - x[iD1] / p_.tau_D;
  out[iD2] = (x[iD1] - x[iD2]) / p_.tau_D;
  out[iId] = -p_.k_i * (x[iId] - x[iI1]);
  out[iI1] = -p_.k_i * (x[iI1] - i_conc);
  out[iIsc1] = depot1_sign_ * (p_.k_d + p_.k_a1) * x[iIsc1] + u / p_.BW;
  out[iIsc2] = p_.k_d * x[iIsc1] - p_.k_a2 * x[iIsc2];
  out[iGsc] = -p_.k_sc * x[iGsc] + p_.k_sc * g_conc;
}

UvaPadovaSteadyState uvapadova_steady_state(const UvaPadovaParams& p,
                                            double target_mg_per_dl,
                                            double u_max_pmol_per_min) {
  const UvaPadovaDerived d = derive_uvp(p);
  const double gp = target_mg_per_dl * p.V_g;
  const double renal = std::max(0.0, p.k_e1 * (gp - p.k_e2));
  // plasma insulin mass per unit of subcutaneous delivery rate
  const double ip_gain =
      1.0 / ((d.m_2 + d.m_4) - p.m_1 * d.m_2 / (p.m_1 + d.m_3));

  const auto tissue_glucose = [&](double x_action) {
    const double b = d.V_m0 + p.V_mx * x_action + p.k_2 * p.K_m0 - p.k_1 * gp;
    return positive_quadratic_root(p.k_2, b, -p.k_1 * gp * p.K_m0);
  };
  const auto residual = [&](double u) {
    const double i = u / p.BW * ip_gain / p.V_i;
    const double egp =
        std::max(0.0, p.EGP_b - p.k_p2 * (gp - p.G_b) - p.k_p3 * (i - p.I_b));
    const double gt = tissue_glucose(i - p.I_b);
    return egp - p.F_cns - renal - p.k_1 * gp + p.k_2 * gt;
  };

  double lo = 0.0, hi = u_max_pmol_per_min;
  if (!(residual(lo) > 0.0) || !(residual(hi) < 0.0))
    throw SteadyStateError("no basal rate holds the requested glucose target");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double u = 0.5 * (lo + hi);

  UvaPadovaSteadyState ss{};
  ss.u_ss = u;
  auto& x = ss.state;
  const double isc1 = u / (p.BW * (p.k_d + p.k_a1));
  const double isc2 = p.k_d * isc1 / p.k_a2;
  const double ra_sc = p.k_a1 * isc1 + p.k_a2 * isc2;
  const double ip = ra_sc * ip_gain;
  const double i = ip / p.V_i;
  x[UvaPadova::iGp] = gp;
  x[UvaPadova::iGt] = tissue_glucose(i - p.I_b);
  x[UvaPadova::iIl] = d.m_2 * ip / (p.m_1 + d.m_3);
  x[UvaPadova::iIp] = ip;
  x[UvaPadova::iX] = i - p.I_b;
  x[UvaPadova::iD1] = 0.0;
  x[UvaPadova::iD2] = 0.0;
  x[UvaPadova::iId] = i;
  x[UvaPadova::iI1] = i;
  x[UvaPadova::iIsc1] = isc1;
  x[UvaPadova::iIsc2] = isc2;
  x[UvaPadova::iGsc] = target_mg_per_dl;

  UvaPadova sys(p, true);
  UvaPadova::State f;
  sys.drift(0.0, x, u, 0.0, f);
  double norm = 0.0;
  for (double v : f) norm += v * v;
  if (std::sqrt(norm) >= 1e-9)
    throw SteadyStateError("steady-state residual did not converge");
  return ss;
}

} // namespace vct
