#pragma once

#include "mblotto/cycle.hpp"
#include "mblotto/sector_basis.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mblotto {

enum class EngineVariant { standard, equal_disorder, bandwidth };
enum class SweepParam { wb, beta_c, beta_h, speed };

std::string to_string(EngineVariant v);
std::string to_string(SweepParam p);
EngineVariant parse_variant(const std::string& s);
SweepParam parse_sweep_param(const std::string& s);

struct Sweep {
    SweepParam param = SweepParam::wb;
    std::vector<double> grid;
};

struct RunConfig {
    int sites = 10;
    double h_eth = 2.0;
    double h_mbl = 20.0;
    std::size_t realizations = 100;
    std::uint64_t master_seed = 1;
    CycleParams cycle;
    bool wb_is_fraction = true;  // cycle.wb (and wb grids) in units of the mean gap
    std::optional<Sweep> sweep;
    EngineVariant variant = EngineVariant::standard;
    double window = 0.5;         // central spectral fraction used for level statistics
    unsigned threads = 1;        // never affects results

    void validate() const;
};

struct Stat {
    double mean = 0.0;
    double err = 0.0;  // standard error: sample standard deviation / sqrt(count)
};

struct GridPoint {
    double value = 0.0;  // swept parameter (as given), or 0 without a sweep
    CycleParams params;  // resolved, with absolute W_b
    Stat w1, q2, w3, q4, w_tot;
    std::optional<double> eta;
    std::size_t used = 0;
    std::vector<CycleRecord> records;  // index order
};

struct RealizationFailure {
    std::uint64_t realization = 0;
    std::uint64_t seed_tag = 0;
    std::string what;
};

struct EnsembleSummary {
    RunConfig config;
    std::vector<GridPoint> points;
    double mean_gap = 0.0;
    std::optional<double> delta_minus;
    std::size_t excluded = 0;
    std::vector<RealizationFailure> failures;
    std::string version;
    std::string rng_algorithm;
};

// Runs fn(i) for i in [0, n) on up to `threads` workers. Exceptions are rethrown
// for the lowest failing index after all workers finish.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

std::vector<DisorderRealization> make_realizations(std::uint64_t master_seed, std::size_t n, int sites,
                                                   double h_eth = 2.0, double h_mbl = 20.0);

// Second, independent field draw on the same substream as realization k.
DisorderRealization partner_realization(std::uint64_t master_seed, std::uint64_t k, int sites,
                                        double h_eth, double h_mbl);

EndpointPair make_endpoints(const RunConfig& cfg, const DisorderRealization& dr);

Stat mean_and_stderr(const std::vector<double>& x);

// Fraction of excluded realizations above which run_ensemble gives up.
inline constexpr double kMaxFailureFraction = 0.01;

EnsembleSummary run_ensemble(const RunConfig& config);

struct DiabaticFit {
    double w0 = 0.0;
    double w1 = 0.0;
    double exponent = 0.0;
    double w0_third = 0.0;  // coefficients with the exponent fixed at 1/3
    double w1_third = 0.0;
    double rss = 0.0;
};

// Least squares of W = W0 - W1 (v delta_minus)^p / W_b, p free.
DiabaticFit fit_diabatic(const std::vector<double>& speeds, const std::vector<double>& w_tot,
                         double delta_minus, double wb);
DiabaticFit fit_diabatic(const EnsembleSummary& summary);

const char* version_string();

} // namespace mblotto
