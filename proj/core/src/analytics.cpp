#include "mblotto/analytics.hpp"

#include "mblotto/errors.hpp"
#include "mblotto/sector_basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace mblotto::analytics {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kPi = std::numbers::pi;
constexpr double kJoulePerEv = 1.602176634e-19;

void require_positive(double x, const char* what) {
    if (!(x > 0.0)) throw ParameterError(std::string(what) + " must be positive");
}

// 1 / beta with 1 / inf = 0
double temperature(double beta) { return std::isinf(beta) ? 0.0 : 1.0 / beta; }

} // namespace

GapDensities gap_densities(double delta, double mean_gap) {
    if (!(mean_gap > 0.0)) throw ParameterError("mean gap must be positive");
    if (!(delta >= 0.0)) throw ParameterError("gap must be nonnegative");
    const double x = delta / mean_gap;
    return {std::exp(-x) / mean_gap, (kPi / 2.0) * (x / mean_gap) * std::exp(-kPi * x * x / 4.0)};
}

ClassicalEfficiencies classical_efficiencies(double r, double gamma, double omega, double Omega,
                                             double d_goe, double d_mbl) {
    if (!(r > 1.0)) throw ParameterError("compression ratio must exceed 1");
    if (!(gamma > 1.0)) throw ParameterError("heat-capacity ratio must exceed 1");
    if (!(Omega > omega && omega > 0.0)) throw ParameterError("need Omega > omega > 0");
    if (!(d_goe > d_mbl && d_mbl > 0.0)) throw ParameterError("need d_goe > d_mbl > 0");
    return {1.0 - std::pow(r, 1.0 - gamma), 1.0 - omega / Omega, 1.0 - d_mbl / d_goe, (d_goe - d_mbl) / 2.0};
}

EnginePrediction predicted_cycle(double wb, double beta_c, double beta_h, double mean_gap, int sites,
                                 double eps) {
    if (!(wb >= 0.0)) throw ParameterError("bandwidth must be nonnegative");
    require_positive(mean_gap, "mean gap");
    if (!(beta_c > 0.0)) throw ParameterError("beta_c must be positive");
    if (!(beta_h >= 0.0)) throw ParameterError("beta_h must be nonnegative");
    const double tc = temperature(beta_c);
    const double n = sites;
    const double hot = std::exp(-n * (beta_h * eps) * (beta_h * eps) / 4.0);

    EnginePrediction p;
    p.q2 = -(wb * wb / (2.0 * mean_gap)) * hot;
    p.q2_full = (-wb * wb / (2.0 * mean_gap) + kPi * kPi * tc * tc / (6.0 * mean_gap)) * hot;
    p.q4 = wb - 2.0 * kLn2 * tc + wb * wb / (2.0 * mean_gap) + 4.0 * kLn2 * wb * tc / mean_gap;
    p.w_tot = p.q2 + p.q4;
    p.w_tot_leading = wb - 2.0 * kLn2 * tc + 4.0 * kLn2 * wb * tc / mean_gap;
    p.phi_prime = wb / (2.0 * mean_gap) + kLn2 * tc / mean_gap - 2.0 * kLn2 * wb * tc / (mean_gap * mean_gap);
    p.eta = 1.0 - p.phi_prime;

    if (wb > 0.0 && tc / wb >= 0.3) p.violations.emplace_back("T_C/W_b");
    if (wb == 0.0 && tc > 0.0) p.violations.emplace_back("T_C/W_b");
    if (wb / mean_gap >= 0.3) p.violations.emplace_back("W_b/mean_gap");
    if (std::sqrt(n) * beta_h * eps >= 0.3) p.violations.emplace_back("sqrt(N) beta_H eps");
    p.regime_ok = p.violations.empty();
    return p;
}

ColdBathProbabilities cold_bath_probabilities(double wb, double beta_c, double mean_gap) {
    require_positive(mean_gap, "mean gap");
    const double tc = temperature(beta_c);
    return {(wb - tc * kLn2) / mean_gap, tc * kLn2 / mean_gap};
}

double p_frac_lz(double v, double delta_minus, double delta, double Delta) {
    if (delta == 0.0 || Delta == 0.0)
        throw SingularityError("fractional Landau-Zener probability diverges at zero gap");
    const double a = 1.0 / std::pow(delta, 6);
    const double b = 1.0 / std::pow(Delta, 6);
    return v * v * delta_minus * delta_minus * (a + b) / 16.0;
}

double subsystem_min_gap(double l, double xi, double eps) {
    return eps * std::exp(-l / xi) * std::exp2(-l);
}

DiabaticPredictions diabatic_predictions(const DiabaticModel& m, double eps) {
    if (!(m.v >= 0.0)) throw ParameterError("speed must be nonnegative");
    require_positive(m.delta_minus, "delta_minus");
    require_positive(m.wb, "W_b");
    require_positive(m.xi_deep, "xi_deep");
    require_positive(m.xi_shallow, "xi_shallow");
    if (!(m.theta >= 0.0 && m.theta <= 1.0)) throw ParameterError("theta must lie in [0, 1]");
    if (!(m.xi_deep < m.xi_shallow)) throw ParameterError("need xi_deep < xi_shallow");

    DiabaticPredictions d;
    d.w_diab_frac_lz = std::cbrt(m.v * m.delta_minus);
    d.v_max_frac_lz = m.wb * m.wb * m.wb / m.delta_minus;
    d.v_max_apt = m.mean_gap * m.mean_gap;
    d.v_min_communication = eps * eps * std::exp2(-2.0 * (m.sites + 1.0)) *
                            std::exp(-2.0 * (m.sites + 1.0) / m.xi_shallow);
    if (m.v > 0.0) {
        d.l_v = std::log(eps * eps / m.v) / (2.0 * (kLn2 + 1.0 / m.xi_deep));
        d.lz_applies = d.l_v < m.sites;
    } else {
        d.l_v = std::numeric_limits<double>::infinity();
    }
    d.lz_correction = d.lz_applies ? (1.0 - m.theta) * m.wb : 0.0;
    return d;
}

double xi_from_zeta(double zeta) {
    require_positive(zeta, "zeta");
    if (zeta >= 1.0 / kLn2) throw DomainError("zeta must stay below 1/ln2 for a stable localized phase");
    return 1.0 / (1.0 / zeta - kLn2);
}

double zeta_from_xi(double xi) {
    require_positive(xi, "xi");
    if (std::isinf(xi)) return 1.0 / kLn2;
    return 1.0 / (1.0 / xi + kLn2);
}

double xi_anderson(double h) {
    if (!(h > 1.0)) throw DomainError("Anderson length 1/ln h needs h > 1");
    return 1.0 / std::log(h);
}

LocalizationScales localization_scales(double xi, double zeta, double L, double eps, double h) {
    require_positive(xi, "xi");
    require_positive(L, "L");
    require_positive(eps, "eps");
    LocalizationScales s;
    s.j_near = eps * std::exp2(-L);
    s.j_far = s.j_near * std::exp(-L / xi);
    s.zeta_from_xi = zeta_from_xi(xi);
    if (zeta > 0.0) s.xi_from_zeta = xi_from_zeta(zeta);
    if (h > 1.0) s.xi_anderson = xi_anderson(h);
    return s;
}

double thermalization_time(double wb, double delta_minus, double eps, double g) {
    const double r = eps / (g * delta_minus);
    return wb * r * r;
}

TimeBounds time_bounds(double wb, double delta_minus, double eps, double mean_gap, double xi_shallow,
                       double xi_deep) {
    require_positive(wb, "W_b");
    require_positive(delta_minus, "delta_minus");
    require_positive(eps, "eps");
    require_positive(mean_gap, "mean gap");
    require_positive(xi_shallow, "xi_shallow");
    require_positive(xi_deep, "xi_deep");

    TimeBounds t;
    t.length_scale = std::max(mean_gap / wb, xi_shallow);
    const double expo = t.length_scale > 1.0 ? 1.0 / (t.length_scale - 1.0) : 1.0;
    t.g_max = eps * std::pow(delta_minus / eps, expo);
    t.tau_th = thermalization_time(wb, delta_minus, eps, std::min(wb, t.g_max));
    t.tau_markov = eps * eps / (wb * delta_minus * delta_minus);
    t.tau_high_order = wb / (delta_minus * delta_minus) * std::pow(eps / delta_minus, expo);
    const double growth = std::exp(2.0 * xi_shallow / xi_deep);
    t.tau_deep = (10.0 / eps) * growth * std::exp2(3.0 * xi_shallow);
    t.tau_c5 = (1.0 / (10.0 * eps)) * growth * std::exp2(2.0 * xi_shallow);
    return t;
}

std::vector<std::string> power_presets() { return {"si-p"}; }

PowerInputs power_preset(const std::string& name) {
    if (name == "si-p") return {1.0, 10, 100.0, 0.1};
    throw ParameterError("unknown preset '" + name + "'");
}

PowerEstimate power_estimate(const PowerInputs& in) {
    require_positive(in.eps_ev, "eps");
    require_positive(in.spacing_nm, "spacing");
    if (in.subengine_sites < 2 || in.subengine_sites % 2 != 0 || in.subengine_sites > 60)
        throw ParameterError("subengine sites must be even and in [2, 60]");
    if (!(in.wb_fraction >= 0.0)) throw ParameterError("bandwidth fraction must be nonnegative");
    PowerEstimate p;
    const double dim = static_cast<double>(binomial(in.subengine_sites, in.subengine_sites / 2));
    p.mean_gap_ev = in.eps_ev * std::sqrt(static_cast<double>(in.subengine_sites)) / dim;
    p.wb_ev = in.wb_fraction * p.mean_gap_ev;
    if (p.wb_ev == 0.0) {
        p.tau_cycle_s = std::numeric_limits<double>::infinity();
        return p;
    }
    p.tau_cycle_s = kHbarEvSeconds * in.eps_ev * in.eps_ev / (p.wb_ev * p.wb_ev * p.wb_ev);
    p.power_w = p.wb_ev * kJoulePerEv / p.tau_cycle_s;
    const double pitch_m = in.spacing_nm * 1e-9;
    p.power_density_w_m3 = p.power_w / (pitch_m * pitch_m * pitch_m);
    return p;
}

WorstCase worst_case_analytic(double wb, double mean_gap) {
    require_positive(mean_gap, "mean gap");
    if (!(wb >= 0.0 && wb < mean_gap)) throw ParameterError("need 0 <= W_b < mean gap");
    const double x = wb / mean_gap;
    return {x * x * x, x * x};
}

} // namespace mblotto::analytics
