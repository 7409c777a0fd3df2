#include "mblotto/competitors.hpp"

#include "mblotto/errors.hpp"
#include "mblotto/spectra.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mblotto {

Interval wilson_interval(std::size_t k, std::size_t n, double z) {
    if (n == 0) throw StatisticsError("Wilson interval needs at least one trial");
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::vector<double> run_equal_disorder(const SectorBasis& basis, const DisorderRealization& a,
                                       const DisorderRealization& b, const CycleParams& params,
                                       std::size_t n_trials, RngCursor& rng) {
    if (a.h_mbl != b.h_mbl) throw ParameterError("both realizations must share the disorder strength");
    DisorderRealization x = a;
    DisorderRealization y = b;
    x.h_eth = x.h_mbl;
    y.h_eth = y.h_mbl;
    return sample_trials(basis, EndpointPair{x, y, false}, params, n_trials, rng);
}

namespace {

double variance(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / (n - 1.0);
}

EngineStats describe(const std::string& label, const std::vector<double>& x) {
    EngineStats s;
    s.label = label;
    s.samples = x.size();
    s.negatives = static_cast<std::size_t>(std::count_if(x.begin(), x.end(), [](double w) { return w < 0.0; }));
    s.p_worst = static_cast<double>(s.negatives) / static_cast<double>(x.size());
    s.p_worst_ci = wilson_interval(s.negatives, x.size());
    s.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    s.variance = variance(x);
    return s;
}

std::size_t bounded(std::uint64_t bits, std::size_t n) {
    // modulo bias is below n / 2^64
    return static_cast<std::size_t>(bits % n);
}

double resampled_variance(const std::vector<double>& x, RngCursor& rng) {
    const std::size_t n = x.size();
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = x[bounded(rng.bits(), n)];
        sum += v;
        sum2 += v * v;
    }
    const double nn = static_cast<double>(n);
    const double m = sum / nn;
    return (sum2 - nn * m * m) / (nn - 1.0);
}

} // namespace

ComparisonReport compare_worst_case(const std::vector<double>& standard, const std::vector<double>& tilde,
                                    std::uint64_t seed, std::size_t resamples, double confidence) {
    if (standard.size() < kMinComparisonSamples || tilde.size() < kMinComparisonSamples)
        throw StatisticsError("worst-case comparison needs at least 10^4 samples per engine");
    if (resamples < 100) throw ParameterError("need at least 100 bootstrap resamples");
    if (!(confidence > 0.0 && confidence < 1.0)) throw ParameterError("confidence must lie in (0, 1)");

    ComparisonReport r;
    r.standard = describe("standard", standard);
    r.tilde = describe("equal_disorder", tilde);
    r.ordered = r.standard.p_worst < r.tilde.p_worst;
    r.intervals_disjoint = r.standard.p_worst_ci.hi < r.tilde.p_worst_ci.lo;

    // Samples are centred on their means so the bootstrap variance is well conditioned.
    std::vector<double> a(standard), b(tilde);
    for (auto& v : a) v -= r.standard.mean;
    for (auto& v : b) v -= r.tilde.mean;
    RngCursor rng(CounterRng(seed, 0xb007));
    std::vector<double> diffs(resamples);
    for (auto& d : diffs) d = resampled_variance(a, rng) - resampled_variance(b, rng);
    std::sort(diffs.begin(), diffs.end());
    const double tail = (1.0 - confidence) / 2.0;
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(resamples - 1);
        const auto i = static_cast<std::size_t>(std::floor(pos));
        const double f = pos - static_cast<double>(i);
        return i + 1 < resamples ? diffs[i] * (1.0 - f) + diffs[i + 1] * f : diffs[i];
    };
    r.variance_diff_ci = {quantile(tail), quantile(1.0 - tail)};
    r.variance_ordered = r.variance_diff_ci.hi < 0.0;
    r.resamples = resamples;
    return r;
}

CounterRng trial_stream(std::uint64_t master_seed, std::uint64_t k, EngineVariant variant) {
    const std::uint64_t tag = variant == EngineVariant::equal_disorder ? 0x7e00000000000000ULL : 0x5a00000000000000ULL;
    return CounterRng(master_seed, tag | k);
}

TrialEnsemble sample_engine(const TrialConfig& cfg, EngineVariant variant) {
    if (cfg.trials_per_realization < 1) throw ParameterError("need at least one trial per realization");
    if (variant == EngineVariant::bandwidth) throw ParameterError("trial sampling covers the standard and equal-disorder engines");
    cfg.cycle.validate();
    if (cfg.cycle.mode != TuningMode::adiabatic) throw ParameterError("trial sampling needs adiabatic tuning");

    RunConfig rc;
    rc.sites = cfg.sites;
    rc.h_eth = cfg.h_eth;
    rc.h_mbl = cfg.h_mbl;
    rc.realizations = cfg.realizations;
    rc.master_seed = cfg.master_seed;
    rc.cycle = cfg.cycle;
    rc.variant = variant;
    rc.threads = cfg.threads;
    rc.validate();

    const auto basis = enumerate_basis(cfg.sites);
    const auto reals = make_realizations(cfg.master_seed, cfg.realizations, cfg.sites, cfg.h_eth, cfg.h_mbl);

    // mean gap of the standard ensemble fixes W_b for both engines
    std::vector<Vector> standard(2 * reals.size());
    parallel_for(reals.size(), cfg.threads, [&](std::size_t k) {
        const auto pair = EndpointPair::standard(reals[k]);
        standard[2 * k] = endpoint_spectrum(basis, pair, 0, cfg.cycle, false).energies;
        standard[2 * k + 1] = endpoint_spectrum(basis, pair, 1, cfg.cycle, false).energies;
    });

    TrialEnsemble out;
    out.mean_gap = mean_gap(standard);
    CycleParams params = cfg.cycle;
    if (cfg.wb_is_fraction) params.wb *= out.mean_gap;
    out.wb = params.wb;

    const std::size_t per = cfg.trials_per_realization;
    out.samples.resize(reals.size() * per);
    out.exact_means.resize(reals.size());
    parallel_for(reals.size(), cfg.threads, [&](std::size_t k) {
        Vector e0, e1;
        if (variant == EngineVariant::standard) {
            e0 = standard[2 * k];
            e1 = standard[2 * k + 1];
        } else {
            const auto pair = make_endpoints(rc, reals[k]);
            e0 = endpoint_spectrum(basis, pair, 0, params, false).energies;
            e1 = endpoint_spectrum(basis, pair, 1, params, false).energies;
        }
        RngCursor rng(trial_stream(cfg.master_seed, k, variant));
        const auto w = sample_trials(e0, e1, params, per, rng);
        std::copy(w.begin(), w.end(), out.samples.begin() + static_cast<std::ptrdiff_t>(k * per));
        out.exact_means[k] = run_cycle_adiabatic(e0, e1, params, k).w_tot;
    });
    return out;
}

BandwidthEstimate bandwidth_engine_estimate(double n, double hop_fraction) {
    if (!(n >= 1.0)) throw ParameterError("need at least one site");
    if (!(hop_fraction >= 0.0 && hop_fraction <= 1.0)) throw ParameterError("hop fraction must lie in [0, 1]");
    const boost::math::normal unit;
    // standard deviations below the band centre at which the given fraction of levels sits
    const double reference = -boost::math::quantile(unit, 0.02);
    double depth;
    if (hop_fraction == 0.0)
        depth = std::numeric_limits<double>::infinity();
    else if (hop_fraction == 1.0)
        depth = -std::numeric_limits<double>::infinity();
    else
        depth = -boost::math::quantile(unit, hop_fraction);
    BandwidthEstimate e;
    e.q2 = -n;
    e.q4 = std::clamp(std::sqrt(n) * depth / reference, -n, n);
    e.w_tot = e.q2 + e.q4;
    return e;
}

} // namespace mblotto
