#include "mblotto_cli/cli.hpp"

#include "mblotto/analytics.hpp"
#include "mblotto/competitors.hpp"
#include "mblotto/ensemble.hpp"
#include "mblotto/errors.hpp"
#include "mblotto/rng.hpp"
#include "mblotto/serialization.hpp"
#include "mblotto/spectra.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace mblotto::cli {

using nlohmann::ordered_json;
using json = ordered_json;

namespace {

// Doubles that may be infinite are written as strings so they survive the round trip.
json num(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

double get_num(const json& j) {
    if (j.is_string()) return parse_double(j.get<std::string>());
    return j.get<double>();
}

json opt_num(const std::optional<double>& x) { return x ? num(*x) : json(nullptr); }

std::optional<double> get_opt(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return get_num(j.at(key));
}

std::string strip_extension(const std::string& path) {
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
    return path.substr(0, dot);
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParameterError("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw ParameterError("failed writing '" + path + "'");
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

// ---- options shared by ensemble-driven commands

struct EnsembleOptions {
    int sites = 10;
    double h_eth = 2.0;
    double h_mbl = 20.0;
    double wb_frac = 0.0625;
    std::optional<double> wb;  // absolute override
    double beta_c = kInf;
    double beta_h = 0.0;
    std::size_t realizations = 100;
    std::uint64_t seed = 1;
    double speed = 0.0;
    double dt_factor = 0.405;
    std::string variant = "standard";
    double window = 0.5;
};

json to_json(const EnsembleOptions& o) {
    return {{"sites", o.sites},         {"h_eth", num(o.h_eth)},   {"h_mbl", num(o.h_mbl)},
            {"wb_frac", num(o.wb_frac)}, {"wb", opt_num(o.wb)},     {"beta_c", num(o.beta_c)},
            {"beta_h", num(o.beta_h)},   {"realizations", o.realizations},
            {"seed", o.seed},            {"speed", num(o.speed)},   {"dt_factor", num(o.dt_factor)},
            {"variant", o.variant},      {"window", num(o.window)}};
}

EnsembleOptions ensemble_from_json(const json& j) {
    EnsembleOptions o;
    o.sites = j.at("sites").get<int>();
    o.h_eth = get_num(j.at("h_eth"));
    o.h_mbl = get_num(j.at("h_mbl"));
    o.wb_frac = get_num(j.at("wb_frac"));
    o.wb = get_opt(j, "wb");
    o.beta_c = get_num(j.at("beta_c"));
    o.beta_h = get_num(j.at("beta_h"));
    o.realizations = j.at("realizations").get<std::size_t>();
    o.seed = j.at("seed").get<std::uint64_t>();
    o.speed = get_num(j.at("speed"));
    o.dt_factor = get_num(j.at("dt_factor"));
    o.variant = j.at("variant").get<std::string>();
    o.window = get_num(j.at("window"));
    return o;
}

RunConfig to_run_config(const EnsembleOptions& o, unsigned threads) {
    RunConfig c;
    c.sites = o.sites;
    c.h_eth = o.h_eth;
    c.h_mbl = o.h_mbl;
    c.realizations = o.realizations;
    c.master_seed = o.seed;
    c.cycle.beta_c = o.beta_c;
    c.cycle.beta_h = o.beta_h;
    c.cycle.speed = o.speed;
    c.cycle.mode = o.speed > 0.0 ? TuningMode::diabatic : TuningMode::adiabatic;
    c.cycle.dt_factor = o.dt_factor;
    c.wb_is_fraction = !o.wb.has_value();
    c.cycle.wb = o.wb ? *o.wb : o.wb_frac;
    c.variant = parse_variant(o.variant);
    c.window = o.window;
    c.threads = threads;
    return c;
}

json stat_json(const Stat& s) { return {{"mean", num(s.mean)}, {"stderr", num(s.err)}}; }

json summary_json(const EnsembleSummary& s) {
    json points = json::array();
    for (const auto& p : s.points) {
        points.push_back({{"value", num(p.value)},
                          {"wb", num(p.params.wb)},
                          {"beta_c", num(p.params.beta_c)},
                          {"beta_h", num(p.params.beta_h)},
                          {"speed", num(p.params.speed)},
                          {"mode", p.params.mode == TuningMode::adiabatic ? "adiabatic" : "diabatic"},
                          {"W1", stat_json(p.w1)},
                          {"Q2", stat_json(p.q2)},
                          {"W3", stat_json(p.w3)},
                          {"Q4", stat_json(p.q4)},
                          {"Wtot", stat_json(p.w_tot)},
                          {"eta", opt_num(p.eta)},
                          {"used", p.used}});
    }
    json failures = json::array();
    for (const auto& f : s.failures)
        failures.push_back({{"realization", f.realization}, {"seed_tag", f.seed_tag}, {"what", f.what}});
    return {{"mean_gap", num(s.mean_gap)},
            {"delta_minus", opt_num(s.delta_minus)},
            {"excluded", s.excluded},
            {"failures", failures},
            {"points", points}};
}

// ---- artifact plumbing

struct Output {
    std::string out;  // JSON path, empty = stdout
    unsigned threads = 1;
};

struct Artifact {
    std::string command;
    json config;
    json results;
    std::uint64_t seed = 0;
};

std::string render(const Artifact& a) {
    json j = {{"artifact", "mblotto"},
              {"command", a.command},
              {"config", a.config},
              {"results", a.results},
              {"provenance", {{"seed", a.seed}, {"version", version_string()}, {"rng", CounterRng::algorithm}}}};
    return j.dump(2) + "\n";
}

// Timestamps and wall time live beside the artifact so the artifact itself stays reproducible.
void emit(const Artifact& a, const Output& o, double wall_seconds, std::ostream& out) {
    const auto text = render(a);
    if (o.out.empty()) {
        out << text;
        return;
    }
    write_file(o.out, text);
    json timing = {{"timestamp", utc_timestamp()}, {"wall_seconds", wall_seconds}, {"threads", o.threads}};
    write_file(o.out + ".timing.json", timing.dump(2) + "\n");
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---- commands

struct CycleCommand {
    EnsembleOptions ens;
    std::string records;  // per-realization CSV path

    json config() const {
        return to_json(ens);
    }
    static CycleCommand from(const json& j) {
        CycleCommand c;
        c.ens = ensemble_from_json(j);
        return c;
    }
    Artifact run(unsigned threads) const {
        const auto cfg = to_run_config(ens, threads);
        const auto s = run_ensemble(cfg);
        if (!records.empty()) {
            std::ostringstream os;
            write_records_csv(os, s.points.front().records,
                              {{"command", "cycle"}, {"seed", std::to_string(ens.seed)},
                               {"mean_gap", format_double(s.mean_gap)}});
            write_file(records, os.str());
        }
        return {"cycle", config(), summary_json(s), ens.seed};
    }
};

struct SweepCommand {
    EnsembleOptions ens;
    std::string param = "wb";
    std::string grid;
    bool grid_absolute = false;  // wb grid in energy units instead of mean-gap fractions
    std::string csv;

    json config() const {
        json j = to_json(ens);
        j["param"] = param;
        j["grid"] = grid;
        j["grid_absolute"] = grid_absolute;
        return j;
    }
    static SweepCommand from(const json& j) {
        SweepCommand c;
        c.ens = ensemble_from_json(j);
        c.param = j.at("param").get<std::string>();
        c.grid = j.at("grid").get<std::string>();
        c.grid_absolute = j.value("grid_absolute", false);
        return c;
    }
    Artifact run(unsigned threads, const std::string& out_path) const {
        auto cfg = to_run_config(ens, threads);
        const auto p = parse_sweep_param(param);
        cfg.sweep = Sweep{p, parse_grid(grid)};
        if (p == SweepParam::wb) {
            cfg.wb_is_fraction = !grid_absolute;
        } else if (ens.wb) {
            cfg.wb_is_fraction = false;
        }
        if (p == SweepParam::wb && grid_absolute && ens.wb) throw ParameterError("--wb conflicts with a wb sweep");
        const auto s = run_ensemble(cfg);
        std::string csv_path = csv;
        if (csv_path.empty() && !out_path.empty()) csv_path = strip_extension(out_path) + ".csv";
        if (!csv_path.empty()) {
            std::ostringstream os;
            write_grid_csv(os, s, {{"command", "sweep"}, {"param", param}, {"grid", grid},
                                   {"seed", std::to_string(ens.seed)}, {"sites", std::to_string(ens.sites)}});
            write_file(csv_path, os.str());
        }
        json r = summary_json(s);
        if (p == SweepParam::speed && s.delta_minus) {
            try {
                const auto f = fit_diabatic(s);
                r["diabatic_fit"] = {{"W0", num(f.w0)}, {"W1", num(f.w1)}, {"exponent", num(f.exponent)},
                                     {"W0_third", num(f.w0_third)}, {"W1_third", num(f.w1_third)}};
            } catch (const StatisticsError& e) {
                r["diabatic_fit"] = nullptr;
            }
        }
        return {"sweep", config(), r, ens.seed};
    }
};

struct SpacingsCommand {
    int sites = 8;
    double h = 20.0;
    std::size_t realizations = 1000;
    std::uint64_t seed = 1;
    double window = 0.5;
    int bins = 50;
    std::string csv;

    json config() const {
        return {{"sites", sites}, {"h", num(h)}, {"realizations", realizations}, {"seed", seed},
                {"window", num(window)}, {"bins", bins}};
    }
    static SpacingsCommand from(const json& j) {
        SpacingsCommand c;
        c.sites = j.at("sites").get<int>();
        c.h = get_num(j.at("h"));
        c.realizations = j.at("realizations").get<std::size_t>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.window = get_num(j.at("window"));
        c.bins = j.at("bins").get<int>();
        return c;
    }
};

std::vector<Vector> ensemble_energies(int sites, double h, std::size_t n, std::uint64_t seed, unsigned threads) {
    const auto basis = enumerate_basis(sites);
    const auto reals = make_realizations(seed, n, sites, h, h);
    std::vector<Vector> out(n);
    parallel_for(n, threads, [&](std::size_t k) {
        out[k] = diagonalize(build_hamiltonian(basis, reals[k], {1.0, 0.0, true}), {false, reals[k].seed_tag, 0.0})
                     .energies;
    });
    return out;
}

Artifact run_spacings(const SpacingsCommand& c, unsigned threads) {
    if (c.bins < 1) throw ParameterError("--bins must be positive");
    const auto energies = ensemble_energies(c.sites, c.h, c.realizations, c.seed, threads);
    const auto s = unfolded_spacings(energies, c.window);
    const auto d = spacing_distances(s);
    if (!c.csv.empty()) {
        std::ostringstream os;
        write_histogram_csv(os, linear_histogram(s, 0.0, 4.0, c.bins),
                            {{"command", "spacings"}, {"units", "unfolded spacing (unit mean)"},
                             {"seed", std::to_string(c.seed)}});
        write_file(c.csv, os.str());
    }
    json r = {{"spacings", s.size()},
              {"mean_gap", num(mean_gap(energies))},
              {"ks_poisson", num(d.ks_poisson)},
              {"ks_wigner", num(d.ks_wigner)},
              {"closer_to", d.ks_poisson < d.ks_wigner ? "poisson" : "wigner"}};
    return {"spacings", c.config(), r, c.seed};
}

Artifact run_delta_minus(const SpacingsCommand& c, unsigned threads) {
    const auto energies = ensemble_energies(c.sites, c.h, c.realizations, c.seed, threads);
    const double mg = mean_gap(energies);
    std::vector<double> raw;
    for (const auto& e : energies) {
        auto s = central_spacings(e, c.window);
        raw.insert(raw.end(), s.begin(), s.end());
    }
    const double dm = estimate_delta_minus(raw, mg, c.bins);
    if (!c.csv.empty()) {
        std::ostringstream os;
        write_histogram_csv(os, log_histogram(raw, 1e-4 * mg, mg, c.bins),
                            {{"command", "delta-minus"}, {"units", "raw spacing (energy)"},
                             {"mean_gap", format_double(mg)}, {"delta_minus", format_double(dm)},
                             {"seed", std::to_string(c.seed)}});
        write_file(c.csv, os.str());
    }
    json r = {{"spacings", raw.size()}, {"mean_gap", num(mg)}, {"delta_minus", num(dm)}, {"ratio", num(dm / mg)}};
    return {"delta-minus", c.config(), r, c.seed};
}

struct PredictCommand {
    double wb = 0.0;
    double beta_c = kInf;
    double beta_h = 0.0;
    double mean_gap = 0.0;
    int sites = 12;
    double eps = 1.0;
    std::optional<double> speed, delta_minus, xi_deep, xi_shallow, xi, zeta, h;
    double theta = 0.5;

    json config() const {
        return {{"wb", num(wb)}, {"beta_c", num(beta_c)}, {"beta_h", num(beta_h)}, {"mean_gap", num(mean_gap)},
                {"sites", sites}, {"eps", num(eps)}, {"speed", opt_num(speed)}, {"delta_minus", opt_num(delta_minus)},
                {"xi_deep", opt_num(xi_deep)}, {"xi_shallow", opt_num(xi_shallow)}, {"xi", opt_num(xi)},
                {"zeta", opt_num(zeta)}, {"h", opt_num(h)}, {"theta", num(theta)}};
    }
    static PredictCommand from(const json& j) {
        PredictCommand c;
        c.wb = get_num(j.at("wb"));
        c.beta_c = get_num(j.at("beta_c"));
        c.beta_h = get_num(j.at("beta_h"));
        c.mean_gap = get_num(j.at("mean_gap"));
        c.sites = j.at("sites").get<int>();
        c.eps = get_num(j.at("eps"));
        c.speed = get_opt(j, "speed");
        c.delta_minus = get_opt(j, "delta_minus");
        c.xi_deep = get_opt(j, "xi_deep");
        c.xi_shallow = get_opt(j, "xi_shallow");
        c.xi = get_opt(j, "xi");
        c.zeta = get_opt(j, "zeta");
        c.h = get_opt(j, "h");
        c.theta = get_num(j.at("theta"));
        return c;
    }
};

Artifact run_predict(const PredictCommand& c) {
    namespace an = analytics;
    json r;
    const auto p = an::predicted_cycle(c.wb, c.beta_c, c.beta_h, c.mean_gap, c.sites, c.eps);
    r["q2"] = num(p.q2);
    r["q2_full"] = num(p.q2_full);
    r["q4"] = num(p.q4);
    r["w_tot"] = num(p.w_tot);
    r["w_tot_leading"] = num(p.w_tot_leading);
    r["phi_prime"] = num(p.phi_prime);
    r["eta"] = num(p.eta);
    r["regime_ok"] = p.regime_ok;
    r["regime_violations"] = p.violations;
    const auto cb = an::cold_bath_probabilities(c.wb, c.beta_c, c.mean_gap);
    r["p_cold"] = num(cb.p_cold);
    r["p_bar_cold"] = num(cb.p_bar_cold);
    const auto g = an::gap_densities(c.wb, c.mean_gap);
    r["p_mbl_at_wb"] = num(g.p_mbl);
    r["p_goe_at_wb"] = num(g.p_goe);
    if (c.wb < c.mean_gap) {
        const auto w = an::worst_case_analytic(c.wb, c.mean_gap);
        r["p_worst"] = num(w.p_worst);
        r["p_worst_tilde"] = num(w.p_worst_tilde);
    }
    r["analytic_mean_gap"] = num(analytic_mean_gap(c.sites, c.eps));
    if (c.delta_minus && c.xi_deep && c.xi_shallow) {
        an::DiabaticModel m;
        m.v = c.speed.value_or(0.0);
        m.delta_minus = *c.delta_minus;
        m.wb = c.wb;
        m.theta = c.theta;
        m.xi_deep = *c.xi_deep;
        m.xi_shallow = *c.xi_shallow;
        m.sites = c.sites;
        m.mean_gap = c.mean_gap;
        const auto d = an::diabatic_predictions(m, c.eps);
        r["w_diab_frac_lz"] = num(d.w_diab_frac_lz);
        r["v_max_frac_lz"] = num(d.v_max_frac_lz);
        r["l_v"] = num(d.l_v);
        r["lz_applies"] = d.lz_applies;
        r["lz_correction"] = num(d.lz_correction);
        r["v_max_apt"] = num(d.v_max_apt);
        r["v_min_communication"] = num(d.v_min_communication);
        if (c.wb > 0.0) {
            const auto t = an::time_bounds(c.wb, *c.delta_minus, c.eps, c.mean_gap, *c.xi_shallow, *c.xi_deep);
            r["length_scale"] = num(t.length_scale);
            r["g_max"] = num(t.g_max);
            r["tau_th"] = num(t.tau_th);
            r["tau_markov"] = num(t.tau_markov);
            r["tau_high_order"] = num(t.tau_high_order);
            r["tau_deep"] = num(t.tau_deep);
            r["tau_c5"] = num(t.tau_c5);
        }
    }
    if (c.xi) {
        const auto l = an::localization_scales(*c.xi, c.zeta.value_or(0.0), c.sites, c.eps, c.h.value_or(0.0));
        r["j_far"] = num(l.j_far);
        r["j_near"] = num(l.j_near);
        r["zeta_from_xi"] = num(l.zeta_from_xi);
        r["xi_from_zeta"] = opt_num(l.xi_from_zeta);
        r["xi_anderson"] = opt_num(l.xi_anderson);
    }
    return {"predict", c.config(), r, 0};
}

struct EstimateCommand {
    std::string preset;
    analytics::PowerInputs in;

    json config() const {
        return {{"preset", preset}, {"eps_ev", num(in.eps_ev)}, {"subengine_sites", in.subengine_sites},
                {"spacing_nm", num(in.spacing_nm)}, {"wb_fraction", num(in.wb_fraction)}};
    }
    static EstimateCommand from(const json& j) {
        EstimateCommand c;
        c.preset = j.at("preset").get<std::string>();
        c.in.eps_ev = get_num(j.at("eps_ev"));
        c.in.subengine_sites = j.at("subengine_sites").get<int>();
        c.in.spacing_nm = get_num(j.at("spacing_nm"));
        c.in.wb_fraction = get_num(j.at("wb_fraction"));
        return c;
    }
};

Artifact run_estimate(const EstimateCommand& c) {
    const auto p = analytics::power_estimate(c.in);
    json r = {{"mean_gap_ev", num(p.mean_gap_ev)},     {"wb_ev", num(p.wb_ev)},
              {"tau_cycle_s", num(p.tau_cycle_s)},     {"power_w", num(p.power_w)},
              {"power_density_w_m3", num(p.power_density_w_m3)}};
    return {"estimate", c.config(), r, 0};
}

struct CompareCommand {
    int sites = 10;
    double h_eth = 2.0;
    double h_mbl = 20.0;
    double wb_frac = 0.125;
    double beta_c = kInf;
    double beta_h = 0.0;
    std::size_t realizations = 100;
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    std::size_t resamples = 1000;
    std::string samples;

    json config() const {
        return {{"sites", sites}, {"h_eth", num(h_eth)}, {"h_mbl", num(h_mbl)}, {"wb_frac", num(wb_frac)},
                {"beta_c", num(beta_c)}, {"beta_h", num(beta_h)}, {"realizations", realizations},
                {"trials", trials}, {"seed", seed}, {"resamples", resamples}};
    }
    static CompareCommand from(const json& j) {
        CompareCommand c;
        c.sites = j.at("sites").get<int>();
        c.h_eth = get_num(j.at("h_eth"));
        c.h_mbl = get_num(j.at("h_mbl"));
        c.wb_frac = get_num(j.at("wb_frac"));
        c.beta_c = get_num(j.at("beta_c"));
        c.beta_h = get_num(j.at("beta_h"));
        c.realizations = j.at("realizations").get<std::size_t>();
        c.trials = j.at("trials").get<std::size_t>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.resamples = j.at("resamples").get<std::size_t>();
        return c;
    }
};

json engine_json(const EngineStats& e) {
    return {{"label", e.label},
            {"samples", e.samples},
            {"negatives", e.negatives},
            {"p_worst", num(e.p_worst)},
            {"p_worst_ci", {num(e.p_worst_ci.lo), num(e.p_worst_ci.hi)}},
            {"mean", num(e.mean)},
            {"variance", num(e.variance)}};
}

Artifact run_compare(const CompareCommand& c, unsigned threads) {
    TrialConfig t;
    t.sites = c.sites;
    t.h_eth = c.h_eth;
    t.h_mbl = c.h_mbl;
    t.realizations = c.realizations;
    t.trials_per_realization = c.trials;
    t.master_seed = c.seed;
    t.cycle.wb = c.wb_frac;
    t.cycle.beta_c = c.beta_c;
    t.cycle.beta_h = c.beta_h;
    t.threads = threads;
    const auto std_run = sample_engine(t, EngineVariant::standard);
    const auto tilde_run = sample_engine(t, EngineVariant::equal_disorder);
    const auto rep = compare_worst_case(std_run.samples, tilde_run.samples, c.seed, c.resamples);
    if (!c.samples.empty()) {
        std::ostringstream os;
        write_samples_csv(os, {{"standard", &std_run.samples}, {"equal_disorder", &tilde_run.samples}},
                          {{"command", "compare"}, {"wb", format_double(std_run.wb)},
                           {"seed", std::to_string(c.seed)}});
        write_file(c.samples, os.str());
    }
    const auto bw = bandwidth_engine_estimate(c.sites);
    json r = {{"mean_gap", num(std_run.mean_gap)},
              {"wb", num(std_run.wb)},
              {"standard", engine_json(rep.standard)},
              {"equal_disorder", engine_json(rep.tilde)},
              {"ordered", rep.ordered},
              {"intervals_disjoint", rep.intervals_disjoint},
              {"variance_diff_ci", {num(rep.variance_diff_ci.lo), num(rep.variance_diff_ci.hi)}},
              {"variance_ordered", rep.variance_ordered},
              {"bootstrap_resamples", rep.resamples},
              {"bandwidth_engine_estimate", {{"q2", num(bw.q2)}, {"q4", num(bw.q4)}, {"w_tot", num(bw.w_tot)}}}};
    return {"compare", c.config(), r, c.seed};
}

// CLI11 validator accepting finite numbers and "inf".
double to_double(const std::string& s, const char* flag) {
    try {
        return parse_double(s);
    } catch (const ParameterError&) {
        throw CLI::ValidationError(flag, "expected a number or 'inf', got '" + s + "'");
    }
}

void add_ensemble_flags(CLI::App* app, EnsembleOptions& o, std::string& beta_c, std::optional<double>& wb) {
    app->add_option("--sites", o.sites, "Chain length L (even, 2..16)")->capture_default_str();
    app->add_option("--h-eth", o.h_eth, "Disorder strength at the thermalizing endpoint")->capture_default_str();
    app->add_option("--h-mbl", o.h_mbl, "Disorder strength at the localized endpoint")->capture_default_str();
    app->add_option("--wb-frac", o.wb_frac, "Cold-bath bandwidth as a fraction of the mean gap")->capture_default_str();
    app->add_option("--wb", wb, "Absolute cold-bath bandwidth (overrides --wb-frac)");
    app->add_option("--beta-c", beta_c, "Cold inverse temperature, or 'inf'")->capture_default_str();
    app->add_option("--beta-h", o.beta_h, "Hot inverse temperature")->capture_default_str();
    app->add_option("--realizations", o.realizations, "Disorder realizations")->capture_default_str();
    app->add_option("--seed", o.seed, "Master seed")->capture_default_str();
    app->add_option("--speed", o.speed, "Tuning speed v (0 = adiabatic)")->capture_default_str();
    app->add_option("--dt-factor", o.dt_factor, "Time step in units of 1/mean gap")->capture_default_str();
    app->add_option("--variant", o.variant, "standard | equal_disorder | bandwidth")->capture_default_str();
    app->add_option("--window", o.window, "Central spectral fraction for level statistics")->capture_default_str();
}

} // namespace

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    auto split = [](const std::string& s, char sep) {
        std::vector<std::string> parts;
        std::string cur;
        std::istringstream is(s);
        while (std::getline(is, cur, sep)) parts.push_back(cur);
        return parts;
    };
    for (const char* kind : {"logspace:", "linspace:"}) {
        if (text.rfind(kind, 0) == 0) {
            const auto parts = split(text.substr(std::string(kind).size()), ':');
            if (parts.size() != 3) throw ParameterError("grid '" + text + "' needs lo:hi:n");
            const double lo = parse_double(parts[0]);
            const double hi = parse_double(parts[1]);
            int n = 0;
            try {
                n = std::stoi(parts[2]);
            } catch (const std::exception&) {
                throw ParameterError("grid point count must be an integer");
            }
            if (n < 1) throw ParameterError("grid needs at least one point");
            for (int i = 0; i < n; ++i) {
                const double t = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
                out.push_back(kind[1] == 'o' ? std::pow(10.0, t) : t);
            }
            return out;
        }
    }
    for (const auto& p : split(text, ',')) {
        if (p.empty()) continue;
        out.push_back(parse_double(p));
    }
    if (out.empty()) throw ParameterError("empty grid");
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulator and analytics for a many-body-localized Otto engine", "mblotto"};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(0, 1);

    Output top;
    std::string replay;
    app.add_option("--replay", replay, "Re-run the command recorded in an artifact");
    app.add_option("--out", top.out, "Output path when replaying");
    app.add_option("--threads", top.threads, "Worker threads (never changes results)")->capture_default_str();

    Output o;
    o.threads = 1;

    // cycle
    CycleCommand cyc;
    std::string cyc_bc = "inf";
    auto* c_cycle = app.add_subcommand("cycle", "Run an ensemble of engine cycles");
    add_ensemble_flags(c_cycle, cyc.ens, cyc_bc, cyc.ens.wb);
    c_cycle->add_option("--records", cyc.records, "Per-realization CSV path");
    c_cycle->add_option("--out", o.out, "Summary JSON path (stdout if omitted)");
    c_cycle->add_option("--threads", o.threads, "Worker threads");

    // sweep
    SweepCommand sw;
    std::string sw_bc = "inf";
    auto* c_sweep = app.add_subcommand("sweep", "Sweep one cycle parameter over a grid");
    add_ensemble_flags(c_sweep, sw.ens, sw_bc, sw.ens.wb);
    c_sweep->add_option("--param", sw.param, "wb | beta_c | beta_h | speed")->capture_default_str();
    c_sweep->add_option("--grid", sw.grid, "Comma list, logspace:lo:hi:n or linspace:lo:hi:n")->required();
    c_sweep->add_flag("--grid-absolute", sw.grid_absolute, "Read a wb grid in energy units");
    c_sweep->add_option("--csv", sw.csv, "Grid CSV path (defaults next to --out)");
    c_sweep->add_option("--out", o.out, "Summary JSON path");
    c_sweep->add_option("--threads", o.threads, "Worker threads");

    // spacings and delta-minus
    SpacingsCommand sp;
    auto* c_spac = app.add_subcommand("spacings", "Level-spacing statistics against Poisson and Wigner");
    SpacingsCommand dm;
    dm.bins = 40;
    auto* c_dm = app.add_subcommand("delta-minus", "Estimate the level-repulsion scale");
    for (auto [c, s] : {std::pair{c_spac, &sp}, std::pair{c_dm, &dm}}) {
        c->add_option("--sites", s->sites, "Chain length")->capture_default_str();
        c->add_option("--disorder", s->h, "Disorder strength")->capture_default_str();
        c->add_option("--realizations", s->realizations, "Disorder realizations")->capture_default_str();
        c->add_option("--seed", s->seed, "Master seed")->capture_default_str();
        c->add_option("--window", s->window, "Central spectral fraction")->capture_default_str();
        c->add_option("--bins", s->bins, "Histogram bins")->capture_default_str();
        c->add_option("--csv", s->csv, "Histogram CSV path");
        c->add_option("--out", o.out, "Report JSON path");
        c->add_option("--threads", o.threads, "Worker threads");
    }

    // predict
    PredictCommand pr;
    std::string pr_bc = "inf";
    auto* c_pred = app.add_subcommand("predict", "Evaluate closed-form predictions and bounds");
    c_pred->add_option("--wb", pr.wb, "Cold-bath bandwidth")->required();
    c_pred->add_option("--beta-c", pr_bc, "Cold inverse temperature, or 'inf'")->capture_default_str();
    c_pred->add_option("--beta-h", pr.beta_h, "Hot inverse temperature")->capture_default_str();
    c_pred->add_option("--mean-gap", pr.mean_gap, "Mean gap")->required();
    c_pred->add_option("--sites", pr.sites, "Chain length")->capture_default_str();
    c_pred->add_option("--eps", pr.eps, "Energy unit")->capture_default_str();
    c_pred->add_option("--speed", pr.speed, "Tuning speed for diabatic estimates");
    c_pred->add_option("--delta-minus", pr.delta_minus, "Level-repulsion scale");
    c_pred->add_option("--theta", pr.theta, "Short-gap fraction")->capture_default_str();
    c_pred->add_option("--xi-deep", pr.xi_deep, "Localization length deep in the localized phase");
    c_pred->add_option("--xi-shallow", pr.xi_shallow, "Localization length near the transition");
    c_pred->add_option("--xi", pr.xi, "Localization length for coupling scales");
    c_pred->add_option("--zeta", pr.zeta, "Decay length of effective couplings");
    c_pred->add_option("--disorder", pr.h, "Disorder strength for the single-particle length");
    c_pred->add_option("--out", o.out, "Report JSON path");

    // estimate
    EstimateCommand est;
    auto* c_est = app.add_subcommand("estimate", "Order-of-magnitude power estimate");
    c_est->add_option("--preset", est.preset, "Named preset (si-p)");
    c_est->add_option("--eps-ev", est.in.eps_ev, "Energy unit in eV");
    c_est->add_option("--sub-sites", est.in.subengine_sites, "Subengine length");
    c_est->add_option("--spacing-nm", est.in.spacing_nm, "Subengine pitch in nm");
    c_est->add_option("--wb-fraction", est.in.wb_fraction, "Bandwidth as a fraction of the mean gap");
    c_est->add_option("--out", o.out, "Report JSON path");

    // compare
    CompareCommand cmp;
    std::string cmp_bc = "inf";
    auto* c_cmp = app.add_subcommand("compare", "Worst-case statistics of the standard and equal-disorder engines");
    c_cmp->add_option("--sites", cmp.sites, "Chain length")->capture_default_str();
    c_cmp->add_option("--h-eth", cmp.h_eth, "Thermalizing-side disorder strength")->capture_default_str();
    c_cmp->add_option("--h-mbl", cmp.h_mbl, "Localized-side disorder strength")->capture_default_str();
    c_cmp->add_option("--wb-frac", cmp.wb_frac, "Bandwidth as a fraction of the mean gap")->capture_default_str();
    c_cmp->add_option("--beta-c", cmp_bc, "Cold inverse temperature, or 'inf'")->capture_default_str();
    c_cmp->add_option("--beta-h", cmp.beta_h, "Hot inverse temperature")->capture_default_str();
    c_cmp->add_option("--realizations", cmp.realizations, "Disorder realizations")->capture_default_str();
    c_cmp->add_option("--trials", cmp.trials, "Trials per realization")->capture_default_str();
    c_cmp->add_option("--seed", cmp.seed, "Master seed")->capture_default_str();
    c_cmp->add_option("--resamples", cmp.resamples, "Bootstrap resamples")->capture_default_str();
    c_cmp->add_option("--samples", cmp.samples, "Per-trial CSV path");
    c_cmp->add_option("--out", o.out, "Report JSON path");
    c_cmp->add_option("--threads", o.threads, "Worker threads");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForVersion& e) {
        out << version_string() << '\n';
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        std::ostringstream msg;
        app.exit(e, out, msg);
        err << msg.str();
        return e.get_exit_code() == 0 ? kSuccess : kUsage;
    }

    const auto t0 = Clock::now();
    try {
        Artifact a;
        if (!replay.empty()) {
            if (!app.get_subcommands().empty()) throw ParameterError("--replay takes no subcommand");
            std::ifstream f(replay);
            if (!f) throw ParameterError("cannot read '" + replay + "'");
            json j;
            try {
                j = json::parse(f);
            } catch (const json::exception& e) {
                throw ParameterError(std::string("artifact is not valid JSON: ") + e.what());
            }
            const auto cmd = j.at("command").get<std::string>();
            const auto& cfg = j.at("config");
            o = top;
            if (cmd == "cycle") a = CycleCommand::from(cfg).run(o.threads);
            else if (cmd == "sweep") a = SweepCommand::from(cfg).run(o.threads, o.out);
            else if (cmd == "spacings") a = run_spacings(SpacingsCommand::from(cfg), o.threads);
            else if (cmd == "delta-minus") a = run_delta_minus(SpacingsCommand::from(cfg), o.threads);
            else if (cmd == "predict") a = run_predict(PredictCommand::from(cfg));
            else if (cmd == "estimate") a = run_estimate(EstimateCommand::from(cfg));
            else if (cmd == "compare") a = run_compare(CompareCommand::from(cfg), o.threads);
            else throw ParameterError("unknown command '" + cmd + "' in artifact");
        } else if (c_cycle->parsed()) {
            cyc.ens.beta_c = to_double(cyc_bc, "--beta-c");
            a = cyc.run(o.threads);
        } else if (c_sweep->parsed()) {
            sw.ens.beta_c = to_double(sw_bc, "--beta-c");
            a = sw.run(o.threads, o.out);
        } else if (c_spac->parsed()) {
            a = run_spacings(sp, o.threads);
        } else if (c_dm->parsed()) {
            a = run_delta_minus(dm, o.threads);
        } else if (c_pred->parsed()) {
            pr.beta_c = to_double(pr_bc, "--beta-c");
            a = run_predict(pr);
        } else if (c_est->parsed()) {
            const bool custom = c_est->count("--eps-ev") + c_est->count("--sub-sites") + c_est->count("--spacing-nm") +
                                    c_est->count("--wb-fraction") > 0;
            if (!est.preset.empty()) {
                if (custom) throw ParameterError("--preset cannot be combined with custom inputs");
                est.in = analytics::power_preset(est.preset);
            }
            a = run_estimate(est);
        } else if (c_cmp->parsed()) {
            cmp.beta_c = to_double(cmp_bc, "--beta-c");
            a = run_compare(cmp, o.threads);
        } else {
            err << app.help();
            return kUsage;
        }
        emit(a, o, seconds_since(t0), out);
        return kSuccess;
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ResourceError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumeric;
    } catch (const json::exception& e) {
        err << "error: malformed artifact: " << e.what() << '\n';
        return kUsage;
    }
}

} // namespace mblotto::cli
