#pragma once

#include "mblotto/cycle.hpp"
#include "mblotto/ensemble.hpp"
#include "mblotto/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mblotto {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Wilson score interval for k successes in n trials.
Interval wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054);

struct EngineStats {
    std::string label;
    std::size_t samples = 0;
    std::size_t negatives = 0;
    double p_worst = 0.0;  // fraction of trials with W_tot < 0
    Interval p_worst_ci;
    double mean = 0.0;
    double variance = 0.0;
};

struct ComparisonReport {
    EngineStats standard;
    EngineStats tilde;
    bool ordered = false;             // p_worst(standard) < p_worst(tilde)
    bool intervals_disjoint = false;  // standard interval entirely below the tilde one
    Interval variance_diff_ci;        // bootstrap interval for var(standard) - var(tilde)
    bool variance_ordered = false;    // interval entirely below zero
    std::size_t resamples = 0;
};

inline constexpr std::size_t kMinComparisonSamples = 10'000;

// Trials of the engine whose endpoints are two independent realizations at the same strength.
std::vector<double> run_equal_disorder(const SectorBasis& basis, const DisorderRealization& a,
                                       const DisorderRealization& b, const CycleParams& params,
                                       std::size_t n_trials, RngCursor& rng);

ComparisonReport compare_worst_case(const std::vector<double>& standard, const std::vector<double>& tilde,
                                    std::uint64_t bootstrap_seed = 1, std::size_t resamples = 1000,
                                    double confidence = 0.95);

struct TrialConfig {
    int sites = 10;
    double h_eth = 2.0;
    double h_mbl = 20.0;
    std::size_t realizations = 100;
    std::size_t trials_per_realization = 1000;
    std::uint64_t master_seed = 1;
    CycleParams cycle;
    bool wb_is_fraction = true;
    unsigned threads = 1;
};

struct TrialEnsemble {
    std::vector<double> samples;       // realization-major order
    std::vector<double> exact_means;   // density-matrix W_tot per realization
    double mean_gap = 0.0;
    double wb = 0.0;
};

// Per-trial work samples for one engine variant. The mean gap comes from the
// standard (h_eth, h_mbl) ensemble so both variants run at the same W_b.
TrialEnsemble sample_engine(const TrialConfig& cfg, EngineVariant variant);

// Stream used for the trial draws of realization k.
CounterRng trial_stream(std::uint64_t master_seed, std::uint64_t k, EngineVariant variant);

struct BandwidthEstimate {
    double q2 = 0.0;
    double q4 = 0.0;
    double w_tot = 0.0;
};

// Scale estimate for the unrescaled (bandwidth-tuned) engine with N sites.
BandwidthEstimate bandwidth_engine_estimate(double sites_macro, double hop_fraction = 0.02);

} // namespace mblotto
