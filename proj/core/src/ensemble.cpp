#include "mblotto/ensemble.hpp"

#include "mblotto/errors.hpp"
#include "mblotto/rng.hpp"
#include "mblotto/spectra.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

namespace mblotto {

const char* version_string() { return MBLOTTO_VERSION_STRING; }

std::string to_string(EngineVariant v) {
    switch (v) {
    case EngineVariant::standard: return "standard";
    case EngineVariant::equal_disorder: return "equal_disorder";
    case EngineVariant::bandwidth: return "bandwidth";
    }
    return "standard";
}

std::string to_string(SweepParam p) {
    switch (p) {
    case SweepParam::wb: return "wb";
    case SweepParam::beta_c: return "beta_c";
    case SweepParam::beta_h: return "beta_h";
    case SweepParam::speed: return "speed";
    }
    return "wb";
}

EngineVariant parse_variant(const std::string& s) {
    if (s == "standard") return EngineVariant::standard;
    if (s == "equal_disorder" || s == "equal-disorder") return EngineVariant::equal_disorder;
    if (s == "bandwidth") return EngineVariant::bandwidth;
    throw ParameterError("unknown engine variant '" + s + "'");
}

SweepParam parse_sweep_param(const std::string& s) {
    if (s == "wb") return SweepParam::wb;
    if (s == "beta_c" || s == "beta-c") return SweepParam::beta_c;
    if (s == "beta_h" || s == "beta-h") return SweepParam::beta_h;
    if (s == "speed") return SweepParam::speed;
    throw ParameterError("unknown sweep parameter '" + s + "'");
}

void RunConfig::validate() const {
    if (sites < 2 || sites > kMaxSites || sites % 2 != 0) throw ParameterError("sites must be even and in [2, 16]");
    if (realizations < 1) throw ParameterError("need at least one realization");
    if (!(h_eth >= 0.0 && h_mbl >= h_eth)) throw ParameterError("need 0 <= h_eth <= h_mbl");
    if (!(window > 0.0 && window <= 1.0)) throw ParameterError("window must lie in (0, 1]");
    if (sweep && sweep->grid.empty()) throw ParameterError("sweep grid is empty");
    if (variant == EngineVariant::equal_disorder && cycle.mode == TuningMode::diabatic)
        throw ParameterError("the equal-disorder engine supports adiabatic tuning only");
    if (sweep && sweep->param == SweepParam::speed && variant == EngineVariant::equal_disorder)
        throw ParameterError("the equal-disorder engine supports adiabatic tuning only");
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned t = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (t == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < t; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

namespace {

DisorderRealization draw_fields(std::uint64_t seed, std::uint64_t k, int sites, double h_eth, double h_mbl,
                                std::uint64_t offset) {
    const CounterRng rng(seed, k);
    DisorderRealization dr;
    dr.fields.resize(static_cast<std::size_t>(sites));
    for (int j = 0; j < sites; ++j) dr.fields[j] = rng.uniform(offset + j, -1.0, 1.0);
    dr.h_eth = h_eth;
    dr.h_mbl = h_mbl;
    dr.seed_tag = k;
    return dr;
}

} // namespace

std::vector<DisorderRealization> make_realizations(std::uint64_t master_seed, std::size_t n, int sites,
                                                   double h_eth, double h_mbl) {
    if (n < 1) throw ParameterError("need at least one realization");
    std::vector<DisorderRealization> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) out.push_back(draw_fields(master_seed, k, sites, h_eth, h_mbl, 0));
    return out;
}

DisorderRealization partner_realization(std::uint64_t master_seed, std::uint64_t k, int sites, double h_eth,
                                        double h_mbl) {
    return draw_fields(master_seed, k, sites, h_eth, h_mbl, static_cast<std::uint64_t>(sites));
}

EndpointPair make_endpoints(const RunConfig& cfg, const DisorderRealization& dr) {
    if (cfg.variant != EngineVariant::equal_disorder) return EndpointPair::standard(dr);
    // Both endpoints at the strong-disorder strength, distinct field draws.
    DisorderRealization a = dr;
    a.h_eth = a.h_mbl = cfg.h_mbl;
    DisorderRealization b = partner_realization(cfg.master_seed, dr.seed_tag, cfg.sites, cfg.h_mbl, cfg.h_mbl);
    return {a, b, false};
}

Stat mean_and_stderr(const std::vector<double>& x) {
    Stat s;
    if (x.empty()) return s;
    const double n = static_cast<double>(x.size());
    s.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    if (x.size() > 1) {
        double ss = 0.0;
        for (double v : x) ss += (v - s.mean) * (v - s.mean);
        s.err = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return s;
}

namespace {

struct Endpoints {
    Vector e0;
    Vector e1;
    bool ok = false;
    std::uint64_t seed_tag = 0;
    std::string error;
};

CycleParams resolve(const RunConfig& cfg, double value, double mean_gap) {
    CycleParams p = cfg.cycle;
    p.rescale = cfg.variant != EngineVariant::bandwidth;
    if (cfg.sweep) {
        switch (cfg.sweep->param) {
        case SweepParam::wb: p.wb = value; break;
        case SweepParam::beta_c: p.beta_c = value; break;
        case SweepParam::beta_h: p.beta_h = value; break;
        case SweepParam::speed:
            p.speed = value;
            p.mode = value > 0.0 ? TuningMode::diabatic : TuningMode::adiabatic;
            break;
        }
    }
    if (cfg.wb_is_fraction) p.wb *= mean_gap;
    p.validate();
    return p;
}

void aggregate(GridPoint& pt) {
    std::vector<double> w1, q2, w3, q4, wt;
    for (const auto& r : pt.records) {
        w1.push_back(r.w1);
        q2.push_back(r.q2);
        w3.push_back(r.w3);
        q4.push_back(r.q4);
        wt.push_back(r.w_tot);
    }
    pt.w1 = mean_and_stderr(w1);
    pt.q2 = mean_and_stderr(q2);
    pt.w3 = mean_and_stderr(w3);
    pt.q4 = mean_and_stderr(q4);
    pt.w_tot = mean_and_stderr(wt);
    pt.used = pt.records.size();
    // ratio of means
    if (pt.q4.mean > 0.0 && pt.w_tot.mean != 0.0) pt.eta = pt.w_tot.mean / pt.q4.mean;
}

} // namespace

EnsembleSummary run_ensemble(const RunConfig& cfg) {
    cfg.validate();
    cfg.cycle.validate();
    const auto basis = enumerate_basis(cfg.sites);
    const auto reals = make_realizations(cfg.master_seed, cfg.realizations, cfg.sites, cfg.h_eth, cfg.h_mbl);

    CycleParams spectral = cfg.cycle;
    spectral.rescale = cfg.variant != EngineVariant::bandwidth;

    std::vector<Endpoints> ends(reals.size());
    parallel_for(reals.size(), cfg.threads, [&](std::size_t k) {
        auto& out = ends[k];
        out.seed_tag = reals[k].seed_tag;
        try {
            const auto pair = make_endpoints(cfg, reals[k]);
            out.e0 = endpoint_spectrum(basis, pair, 0, spectral, false).energies;
            out.e1 = endpoint_spectrum(basis, pair, 1, spectral, false).energies;
            out.ok = true;
        } catch (const NumericError& e) {
            out.error = e.what();
        }
    });

    EnsembleSummary sum;
    sum.config = cfg;
    sum.version = version_string();
    sum.rng_algorithm = CounterRng::algorithm;

    std::vector<char> excluded(reals.size(), 0);
    auto exclude = [&](std::size_t k, const std::string& what) {
        if (excluded[k]) return;
        excluded[k] = 1;
        sum.failures.push_back({k, reals[k].seed_tag, what});
    };
    for (std::size_t k = 0; k < reals.size(); ++k)
        if (!ends[k].ok) exclude(k, ends[k].error);

    std::vector<Vector> energies;
    for (const auto& e : ends)
        if (e.ok) {
            energies.push_back(e.e0);
            energies.push_back(e.e1);
        }
    if (energies.empty()) throw NumericError("every realization failed to diagonalize");
    sum.mean_gap = mean_gap(energies);

    std::vector<double> strong;
    for (const auto& e : ends)
        if (e.ok) {
            auto s = central_spacings(e.e1, cfg.window);
            strong.insert(strong.end(), s.begin(), s.end());
        }
    if (strong.size() >= kDeltaMinusMinSamples) sum.delta_minus = estimate_delta_minus(strong, sum.mean_gap);

    const std::vector<double> values = cfg.sweep ? cfg.sweep->grid : std::vector<double>{0.0};
    sum.points.resize(values.size());
    std::vector<std::size_t> diabatic_points;
    for (std::size_t i = 0; i < values.size(); ++i) {
        sum.points[i].value = values[i];
        sum.points[i].params = resolve(cfg, values[i], sum.mean_gap);
        if (sum.points[i].params.mode == TuningMode::diabatic) diabatic_points.push_back(i);
    }

    // per-realization records for every grid point
    std::vector<std::vector<CycleRecord>> recs(reals.size(), std::vector<CycleRecord>(values.size()));
    std::vector<std::string> errs(reals.size());
    const double dt = cfg.cycle.dt_factor / sum.mean_gap;

    parallel_for(reals.size(), cfg.threads, [&](std::size_t k) {
        if (!ends[k].ok) return;
        try {
            for (std::size_t i = 0; i < values.size(); ++i)
                if (sum.points[i].params.mode == TuningMode::adiabatic)
                    recs[k][i] = run_cycle_adiabatic(ends[k].e0, ends[k].e1, sum.points[i].params, k);
            if (diabatic_points.empty()) return;
            const auto pair = make_endpoints(cfg, reals[k]);
            const auto s0 = endpoint_spectrum(basis, pair, 0, spectral, true);
            const auto s1 = endpoint_spectrum(basis, pair, 1, spectral, true);
            std::vector<double> speeds;
            for (auto i : diabatic_points) speeds.push_back(sum.points[i].params.speed);
            const HamiltonianParams hp{spectral.energy_unit, 0.0, spectral.rescale};
            const auto us = diabatic_unitaries(basis, pair.eth, hp, speeds, dt);
            for (std::size_t d = 0; d < diabatic_points.size(); ++d) {
                const auto i = diabatic_points[d];
                recs[k][i] = run_cycle_transitions(s0.energies, s1.energies, transition_matrix(s0, s1, us[d].forward),
                                                   transition_matrix(s1, s0, us[d].reverse), sum.points[i].params, k);
            }
        } catch (const NumericError& e) {
            errs[k] = e.what();
        }
    });

    for (std::size_t k = 0; k < reals.size(); ++k)
        if (!errs[k].empty()) exclude(k, errs[k]);
    std::sort(sum.failures.begin(), sum.failures.end(),
              [](const auto& a, const auto& b) { return a.realization < b.realization; });
    sum.excluded = sum.failures.size();
    if (static_cast<double>(sum.excluded) > kMaxFailureFraction * static_cast<double>(reals.size()))
        throw NumericError(std::to_string(sum.excluded) + " of " + std::to_string(reals.size()) +
                           " realizations failed");

    for (std::size_t i = 0; i < values.size(); ++i) {
        auto& pt = sum.points[i];
        for (std::size_t k = 0; k < reals.size(); ++k)
            if (!excluded[k]) pt.records.push_back(recs[k][i]);
        aggregate(pt);
    }
    return sum;
}

namespace {

struct LinearFit {
    double w0 = 0.0;
    double w1 = 0.0;
    double rss = 0.0;
};

LinearFit fit_at(const std::vector<double>& v, const std::vector<double>& w, double dm, double wb, double p) {
    const auto n = static_cast<Eigen::Index>(v.size());
    Matrix A(n, 2);
    Vector b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = v[i] > 0.0 ? -std::pow(v[i] * dm, p) / wb : 0.0;
        b(i) = w[i];
    }
    // equilibrate columns so the rank test is scale free
    Vector scale(2);
    for (int c = 0; c < 2; ++c) scale(c) = A.col(c).norm() > 0.0 ? A.col(c).norm() : 1.0;
    const Matrix As = A * scale.cwiseInverse().asDiagonal();
    Eigen::ColPivHouseholderQR<Matrix> qr(As);
    qr.setThreshold(1e-10);
    if (qr.rank() < 2) throw StatisticsError("singular design matrix");
    const Vector x = qr.solve(b).cwiseQuotient(scale);
    return {x(0), x(1), (A * x - b).squaredNorm()};
}

} // namespace

DiabaticFit fit_diabatic(const std::vector<double>& speeds, const std::vector<double>& w, double dm, double wb) {
    if (speeds.size() != w.size()) throw ParameterError("speed and work vectors differ in length");
    if (!(dm > 0.0) || !(wb > 0.0)) throw ParameterError("delta_minus and W_b must be positive");
    std::vector<double> distinct;
    for (double v : speeds)
        if (v > 0.0) distinct.push_back(v);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 4) throw StatisticsError("need at least four distinct positive speeds");

    // coarse scan then golden-section refinement of the exponent
    double best_p = 0.01;
    double best = fit_at(speeds, w, dm, wb, best_p).rss;
    for (double p = 0.01; p <= 2.0 + 1e-12; p += 0.01) {
        const double r = fit_at(speeds, w, dm, wb, p).rss;
        if (r < best) {
            best = r;
            best_p = p;
        }
    }
    double lo = std::max(1e-3, best_p - 0.01);
    double hi = best_p + 0.01;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 80; ++it) {
        const double a = hi - g * (hi - lo);
        const double b = lo + g * (hi - lo);
        if (fit_at(speeds, w, dm, wb, a).rss < fit_at(speeds, w, dm, wb, b).rss)
            hi = b;
        else
            lo = a;
    }
    DiabaticFit f;
    f.exponent = 0.5 * (lo + hi);
    const auto free = fit_at(speeds, w, dm, wb, f.exponent);
    f.w0 = free.w0;
    f.w1 = free.w1;
    f.rss = free.rss;
    const auto third = fit_at(speeds, w, dm, wb, 1.0 / 3.0);
    f.w0_third = third.w0;
    f.w1_third = third.w1;
    return f;
}

DiabaticFit fit_diabatic(const EnsembleSummary& s) {
    if (!s.delta_minus) throw StatisticsError("summary carries no delta_minus estimate");
    std::vector<double> v, w;
    double wb = 0.0;
    for (const auto& pt : s.points) {
        v.push_back(pt.params.speed);
        w.push_back(pt.w_tot.mean);
        wb = pt.params.wb;
    }
    return fit_diabatic(v, w, *s.delta_minus, wb);
}

} // namespace mblotto
