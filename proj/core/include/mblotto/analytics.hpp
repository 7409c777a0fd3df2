#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

// Closed-form predictions, bounds and scale estimates for the localized engine.
// Quantities documented as scale estimates ("~") are meaningful only to order of magnitude.
// Units: hbar = k_B = 1 except in power_estimate.
namespace mblotto::analytics {

inline constexpr double kHbarEvSeconds = 6.582e-16;

struct GapDensities {
    double p_mbl = 0.0;
    double p_goe = 0.0;
};
GapDensities gap_densities(double delta, double mean_gap);

struct ClassicalEfficiencies {
    double eta_otto = 0.0;
    double eta_qho = 0.0;
    double eta_qubit = 0.0;
    double w_qubit = 0.0;
};
ClassicalEfficiencies classical_efficiencies(double r, double gamma, double omega, double Omega,
                                             double d_goe, double d_mbl);

struct EnginePrediction {
    double q2 = 0.0;       // lowest order, -W_b^2 / (2 <delta>) damped by the hot-bath factor
    double q2_full = 0.0;  // q2 plus the finite-T_C correction
    double q4 = 0.0;
    double w_tot = 0.0;    // q2 + q4
    double w_tot_leading = 0.0;
    double phi_prime = 0.0;
    double eta = 0.0;
    bool regime_ok = true;
    std::vector<std::string> violations;
};

// beta_c may be +inf.
EnginePrediction predicted_cycle(double wb, double beta_c, double beta_h, double mean_gap, int sites,
                                 double eps);

struct ColdBathProbabilities {
    double p_cold = 0.0;
    double p_bar_cold = 0.0;
};
ColdBathProbabilities cold_bath_probabilities(double wb, double beta_c, double mean_gap);

struct DiabaticModel {
    double v = 0.0;
    double delta_minus = 0.0;
    double wb = 0.0;
    double theta = 0.5;
    double xi_deep = 0.0;     // localization length deep in the MBL phase
    double xi_shallow = 0.0;  // localization length near the transition
    double sites = 0.0;
    double mean_gap = 0.0;
};

struct DiabaticPredictions {
    double w_diab_frac_lz = 0.0;     // ~ (v delta_-)^{1/3}
    double v_max_frac_lz = 0.0;      // W_b^3 / delta_-
    double l_v = 0.0;
    bool lz_applies = false;         // v > 0 and l_v < sites
    double lz_correction = 0.0;      // (1 - theta) W_b when lz_applies
    double v_max_apt = 0.0;          // <delta>^2
    double v_min_communication = 0.0;
};
DiabaticPredictions diabatic_predictions(const DiabaticModel& m, double eps);

// Fractional Landau-Zener probability for gaps delta and Delta; diverges at zero gap.
double p_frac_lz(double v, double delta_minus, double delta, double Delta);

// Minimum gap of a length-l subsystem, eps e^{-l/xi} 2^{-l}.
double subsystem_min_gap(double l, double xi, double eps);

struct LocalizationScales {
    double j_far = 0.0;
    double j_near = 0.0;
    std::optional<double> xi_from_zeta;
    double zeta_from_xi = 0.0;
    std::optional<double> xi_anderson;
};
double xi_from_zeta(double zeta);
double zeta_from_xi(double xi);
double xi_anderson(double h);
LocalizationScales localization_scales(double xi, double zeta, double L, double eps, double h);

struct TimeBounds {
    double length_scale = 0.0;  // max(<delta>/W_b, xi_shallow)
    double g_max = 0.0;
    double tau_th = 0.0;        // evaluated at g = min(W_b, g_max)
    double tau_markov = 0.0;
    double tau_high_order = 0.0;
    double tau_deep = 0.0;      // deeply localized limit
    double tau_c5 = 0.0;
};
double thermalization_time(double wb, double delta_minus, double eps, double g);
TimeBounds time_bounds(double wb, double delta_minus, double eps, double mean_gap, double xi_shallow,
                       double xi_deep);

struct PowerInputs {
    double eps_ev = 1.0;
    int subengine_sites = 10;
    double spacing_nm = 100.0;
    double wb_fraction = 0.1;
};
struct PowerEstimate {
    double mean_gap_ev = 0.0;
    double wb_ev = 0.0;
    double tau_cycle_s = 0.0;
    double power_w = 0.0;
    double power_density_w_m3 = 0.0;
};
PowerInputs power_preset(const std::string& name);
std::vector<std::string> power_presets();
PowerEstimate power_estimate(const PowerInputs& in);

struct WorstCase {
    double p_worst = 0.0;
    double p_worst_tilde = 0.0;
};
WorstCase worst_case_analytic(double wb, double mean_gap);

} // namespace mblotto::analytics
