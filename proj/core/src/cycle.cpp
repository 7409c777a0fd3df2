#include "mblotto/cycle.hpp"

#include "mblotto/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace mblotto {

namespace {

using cd = std::complex<double>;

double expectation(const Vector& p, const Vector& e) { return p.dot(e); }

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
    if (a != b) throw ParameterError(std::string(what) + ": dimension mismatch");
}

double trace_real(const CMatrix& rho) { return rho.trace().real(); }

void require_unit_trace(const CMatrix& rho, const char* what) {
    if (std::abs(trace_real(rho) - 1.0) > 1e-6) throw StateError(std::string(what) + ": trace deviates from 1");
}

bool bitwise_equal(const Spectrum& a, const Spectrum& b) {
    return a.energies.size() == b.energies.size() && a.energies == b.energies &&
           a.eigenvectors.rows() == b.eigenvectors.rows() && a.eigenvectors == b.eigenvectors;
}

void require_vectors(const Spectrum& s, const char* what) {
    if (!s.has_vectors()) throw ParameterError(std::string(what) + " needs eigenvectors");
}

// Complex matrix kept as separate real and imaginary parts, so every product
// against the real eigenvectors is a real gemm.
struct SplitMatrix {
    Matrix re;
    Matrix im;
    CMatrix complex() const {
        CMatrix c(re.rows(), re.cols());
        c.real() = re;
        c.imag() = im;
        return c;
    }
};

SplitMatrix split_identity(Eigen::Index n) { return {Matrix::Identity(n, n), Matrix::Zero(n, n)}; }

// U <- exp(-i H dt) U with H = V diag(E) V^T
void left_step(SplitMatrix& U, const Spectrum& s, double dt, Matrix& a, Matrix& b) {
    const auto& V = s.eigenvectors;
    a.noalias() = V.transpose() * U.re;
    b.noalias() = V.transpose() * U.im;
    for (Eigen::Index j = 0; j < a.rows(); ++j) {
        const double c = std::cos(s.energies(j) * dt);
        const double sn = -std::sin(s.energies(j) * dt);
        const Eigen::RowVectorXd ar = a.row(j);
        a.row(j) = c * ar - sn * b.row(j);
        b.row(j) = sn * ar + c * b.row(j);
    }
    U.re.noalias() = V * a;
    U.im.noalias() = V * b;
}

// U <- U exp(-i H dt)
void right_step(SplitMatrix& U, const Spectrum& s, double dt, Matrix& a, Matrix& b) {
    const auto& V = s.eigenvectors;
    a.noalias() = U.re * V;
    b.noalias() = U.im * V;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        const double c = std::cos(s.energies(j) * dt);
        const double sn = -std::sin(s.energies(j) * dt);
        const Eigen::VectorXd ac = a.col(j);
        a.col(j) = c * ac - sn * b.col(j);
        b.col(j) = sn * ac + c * b.col(j);
    }
    U.re.noalias() = a * V.transpose();
    U.im.noalias() = b * V.transpose();
}

} // namespace

void CycleParams::validate() const {
    if (!(wb >= 0.0)) throw ParameterError("cold-bath bandwidth must be nonnegative");
    if (!(beta_c >= 0.0)) throw ParameterError("beta_c must be nonnegative");
    if (!(beta_h >= 0.0) || std::isinf(beta_h)) throw ParameterError("beta_h must be finite and nonnegative");
    if (!(dt_factor > 0.0)) throw ParameterError("dt_factor must be positive");
    if (!(speed >= 0.0)) throw ParameterError("speed must be nonnegative");
    if ((speed == 0.0) != (mode == TuningMode::adiabatic))
        throw ParameterError("speed must be zero exactly when tuning adiabatically");
    if (!(energy_unit > 0.0)) throw ParameterError("energy unit must be positive");
}

Vector gibbs_populations(const Vector& e, double beta) {
    const auto n = e.size();
    if (n == 0) throw ParameterError("empty spectrum");
    if (!(beta >= 0.0)) throw ParameterError("inverse temperature must be nonnegative");
    if (beta == 0.0) return Vector::Constant(n, 1.0 / static_cast<double>(n));
    Vector g(n);
    if (std::isinf(beta)) {
        g.setZero();
        g(std::min_element(e.data(), e.data() + n) - e.data()) = 1.0;
        return g;
    }
    const double emin = e.minCoeff();
    for (Eigen::Index j = 0; j < n; ++j) g(j) = std::exp(-beta * (e(j) - emin));
    return g / g.sum();
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> cluster_ranges(const Vector& e, double wb) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
    const auto n = e.size();
    Eigen::Index first = 0;
    for (Eigen::Index j = 1; j <= n; ++j) {
        if (j == n || !(e(j) - e(j - 1) < wb)) {
            out.emplace_back(first, j - 1);
            first = j;
        }
    }
    return out;
}

Vector cold_populations(const Vector& p, const Vector& e, double wb, double beta_c) {
    require_same_dim(p.size(), e.size(), "cold_populations");
    if (!(beta_c >= 0.0)) throw ParameterError("beta_c must be nonnegative");
    Vector out = p;
    for (auto [a, b] : cluster_ranges(e, wb)) {
        if (a == b) continue;
        const auto len = b - a + 1;
        const double w = p.segment(a, len).sum();
        if (std::isinf(beta_c)) {
            out.segment(a, len).setZero();
            out(a) = w;
        } else {
            out.segment(a, len) = w * gibbs_populations(e.segment(a, len), beta_c);
        }
    }
    return out;
}

Matrix transition_matrix(const Spectrum& from, const Spectrum& to, const CMatrix& U) {
    require_vectors(from, "transition_matrix");
    require_vectors(to, "transition_matrix");
    require_same_dim(from.dim(), to.dim(), "transition_matrix");
    require_same_dim(U.rows(), static_cast<Eigen::Index>(from.dim()), "transition_matrix");
    const CMatrix w = to.eigenvectors.transpose().cast<cd>() * U * from.eigenvectors.cast<cd>();
    return w.cwiseAbs2();
}

CMatrix adiabatic_map(const CMatrix& rho, const Spectrum& from, const Spectrum& to) {
    require_vectors(from, "adiabatic_map");
    require_vectors(to, "adiabatic_map");
    require_same_dim(from.dim(), to.dim(), "adiabatic_map");
    require_same_dim(rho.rows(), static_cast<Eigen::Index>(from.dim()), "adiabatic_map");
    require_unit_trace(rho, "adiabatic_map");
    if (bitwise_equal(from, to)) return rho;
    const CMatrix U = (to.eigenvectors * from.eigenvectors.transpose()).cast<cd>();
    return U * rho * U.adjoint();
}

Vector populations(const CMatrix& rho, const Spectrum& s) {
    require_vectors(s, "populations");
    require_same_dim(rho.rows(), static_cast<Eigen::Index>(s.dim()), "populations");
    const Eigen::MatrixXcd v = s.eigenvectors.cast<cd>();
    const CMatrix rv = rho * v;
    Vector p(s.dim());
    for (Eigen::Index j = 0; j < p.size(); ++j) p(j) = v.col(j).dot(rv.col(j)).real();
    return p;
}

CMatrix from_populations(const Vector& p, const Spectrum& s) {
    require_vectors(s, "from_populations");
    require_same_dim(p.size(), static_cast<Eigen::Index>(s.dim()), "from_populations");
    const Matrix r = s.eigenvectors * p.asDiagonal() * s.eigenvectors.transpose();
    return r.cast<cd>();
}

CMatrix dephase(const CMatrix& rho, const Spectrum& s) {
    return from_populations(populations(rho, s), s);
}

CMatrix cold_thermalize(const CMatrix& rho_diag, const Spectrum& s, double wb, double beta_c) {
    require_vectors(s, "cold_thermalize");
    require_same_dim(rho_diag.rows(), static_cast<Eigen::Index>(s.dim()), "cold_thermalize");
    const Eigen::MatrixXcd v = s.eigenvectors.cast<cd>();
    CMatrix in_eig = v.transpose() * rho_diag * v;
    const double off = (in_eig - CMatrix(in_eig.diagonal().asDiagonal())).cwiseAbs().maxCoeff();
    if (off > 1e-9) throw StateError("cold_thermalize needs a state diagonal in the eigenbasis; dephase first");
    const Vector p = in_eig.diagonal().real();
    return from_populations(cold_populations(p, s.energies, wb, beta_c), s);
}

CMatrix hot_thermalize(const Spectrum& s, double beta_h) {
    if (beta_h == 0.0) {
        const auto n = static_cast<Eigen::Index>(s.dim());
        return CMatrix::Identity(n, n) / static_cast<double>(n);
    }
    return from_populations(gibbs_populations(s.energies, beta_h), s);
}

Matrix partial_swap(double p, const Vector& g) {
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("swap probability must lie in [0, 1]");
    if (g.size() == 0 || (g.array() <= 0.0).any()) throw ParameterError("Gibbs vector must be positive");
    if (std::abs(g.sum() - 1.0) > 1e-12) throw ParameterError("Gibbs vector must be normalized");
    const auto n = g.size();
    Matrix m = p * g * Vector::Ones(n).transpose();
    m.diagonal().array() += 1.0 - p;
    return m;
}

double ramp_duration(const DisorderRealization& dr, double speed, double eps) {
    if (!(speed > 0.0)) throw ParameterError("diabatic tuning needs a positive speed");
    return eps * (dr.h_mbl - dr.h_eth) / speed;
}

std::uint64_t diabatic_steps(const DisorderRealization& dr, double speed, double dt, double eps) {
    if (!(dt > 0.0)) throw ParameterError("time step must be positive");
    const double T = ramp_duration(dr, speed, eps);
    if (T < 0.0) throw ParameterError("h_mbl must not be below h_eth");
    const double n = std::ceil(T / dt);
    if (!(n <= static_cast<double>(kMaxDiabaticSteps)))
        throw ResourceError("diabatic tuning would need " + std::to_string(n) +
                            " steps; lower the resolution or use adiabatic mode");
    return static_cast<std::uint64_t>(n);
}

std::vector<StrokeUnitaries> diabatic_unitaries(const SectorBasis& basis, const DisorderRealization& dr,
                                                const HamiltonianParams& hp,
                                                const std::vector<double>& speeds, double dt) {
    struct Use {
        std::size_t speed;
        Direction dir;
    };
    std::vector<std::pair<double, Use>> plan;
    for (std::size_t i = 0; i < speeds.size(); ++i) {
        const auto n = diabatic_steps(dr, speeds[i], dt, hp.energy_unit);
        const double T = ramp_duration(dr, speeds[i], hp.energy_unit);
        for (std::uint64_t k = 0; k < n; ++k) {
            const double a = std::min(1.0, static_cast<double>(k) * dt / T);
            plan.push_back({a, {i, Direction::forward}});
            plan.push_back({1.0 - a, {i, Direction::reverse}});
        }
    }
    // Ascending alpha: forward strokes meet their steps in time order (left products),
    // reverse strokes in reverse time order (right products). Ties keep insertion order.
    std::stable_sort(plan.begin(), plan.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

    const auto n = static_cast<Eigen::Index>(basis.dim);
    std::vector<SplitMatrix> fwd(speeds.size(), split_identity(n));
    std::vector<SplitMatrix> rev(speeds.size(), split_identity(n));
    const auto parts = hamiltonian_parts(basis, dr);
    Matrix wa(n, n), wb(n, n);

    Spectrum cur;
    double cur_alpha = -1.0;
    for (const auto& [a, use] : plan) {
        if (cur_alpha < 0.0 || std::abs(a - cur_alpha) > 1e-12) {
            HamiltonianParams p = hp;
            p.alpha = std::clamp(a, 0.0, 1.0);
            cur = diagonalize(assemble(parts, disorder_strength(dr, p.alpha), basis.sites, p),
                              {true, dr.seed_tag, p.alpha});
            cur_alpha = a;
        }
        if (use.dir == Direction::forward)
            left_step(fwd[use.speed], cur, dt, wa, wb);
        else
            right_step(rev[use.speed], cur, dt, wa, wb);
    }
    std::vector<StrokeUnitaries> out;
    out.reserve(speeds.size());
    for (std::size_t i = 0; i < speeds.size(); ++i) out.push_back({fwd[i].complex(), rev[i].complex()});
    return out;
}

CMatrix diabatic_unitary(const SectorBasis& basis, const DisorderRealization& dr, const HamiltonianParams& hp,
                         Direction direction, double speed, double dt) {
    auto u = diabatic_unitaries(basis, dr, hp, {speed}, dt);
    return direction == Direction::forward ? std::move(u[0].forward) : std::move(u[0].reverse);
}

namespace {

CycleRecord account(const Vector& e0, const Vector& e1, const Vector& p0, const Vector& p1,
                    const Vector& p2, const Vector& p3, std::uint64_t id) {
    CycleRecord r;
    r.realization_id = id;
    r.boundary_energies = {expectation(p0, e0), expectation(p1, e1), expectation(p2, e1),
                           expectation(p3, e0), expectation(p0, e0)};
    const auto& E = r.boundary_energies;
    r.w1 = E[0] - E[1];
    r.q2 = E[2] - E[1];
    r.w3 = E[2] - E[3];
    r.q4 = E[4] - E[3];
    r.w_tot = r.w1 + r.w3;
    return r;
}

} // namespace

CycleRecord run_cycle_adiabatic(const Vector& e0, const Vector& e1, const CycleParams& params,
                                std::uint64_t id) {
    params.validate();
    require_same_dim(e0.size(), e1.size(), "run_cycle");
    const Vector p0 = gibbs_populations(e0, params.beta_h);
    // adiabatic strokes carry level occupations index by index
    const Vector& p1 = p0;
    const Vector p2 = cold_populations(p1, e1, params.wb, params.beta_c);
    const Vector& p3 = p2;
    return account(e0, e1, p0, p1, p2, p3, id);
}

CycleRecord run_cycle_transitions(const Vector& e0, const Vector& e1, const Matrix& forward,
                                  const Matrix& reverse, const CycleParams& params, std::uint64_t id) {
    require_same_dim(e0.size(), e1.size(), "run_cycle");
    require_same_dim(forward.rows(), e0.size(), "run_cycle");
    require_same_dim(reverse.rows(), e0.size(), "run_cycle");
    const Vector p0 = gibbs_populations(e0, params.beta_h);
    // the maximally mixed state is invariant under any unitary
    const Vector p1 = params.beta_h == 0.0 ? p0 : Vector(forward * p0);
    const Vector p2 = cold_populations(p1, e1, params.wb, params.beta_c);
    const Vector p3 = reverse * p2;
    auto r = account(e0, e1, p0, p1, p2, p3, id);
    const double tr = p3.sum();
    if (std::abs(tr - 1.0) > 1e-9) throw NumericError("trace drifted during diabatic strokes", id);
    return r;
}

Spectrum endpoint_spectrum(const SectorBasis& basis, const EndpointPair& pair, int endpoint,
                           const CycleParams& params, bool vectors) {
    const auto& dr = endpoint == 0 ? pair.eth : pair.mbl;
    HamiltonianParams hp{params.energy_unit, endpoint == 0 ? 0.0 : 1.0, params.rescale};
    return diagonalize(build_hamiltonian(basis, dr, hp), {vectors, dr.seed_tag, hp.alpha});
}

CycleRecord run_cycle(const SectorBasis& basis, const EndpointPair& pair, const CycleParams& params,
                      double mean_gap, std::uint64_t id) {
    params.validate();
    if (params.mode == TuningMode::adiabatic) {
        const auto s0 = endpoint_spectrum(basis, pair, 0, params, false);
        const auto s1 = endpoint_spectrum(basis, pair, 1, params, false);
        return run_cycle_adiabatic(s0.energies, s1.energies, params, id);
    }
    if (!pair.shared) throw ParameterError("diabatic tuning needs a shared realization");
    if (!(mean_gap > 0.0)) throw ParameterError("diabatic tuning needs a positive mean gap");
    const auto s0 = endpoint_spectrum(basis, pair, 0, params, true);
    const auto s1 = endpoint_spectrum(basis, pair, 1, params, true);
    const double dt = params.dt_factor / mean_gap;
    HamiltonianParams hp{params.energy_unit, 0.0, params.rescale};
    auto u = diabatic_unitaries(basis, pair.eth, hp, {params.speed}, dt);
    return run_cycle_transitions(s0.energies, s1.energies, transition_matrix(s0, s1, u[0].forward),
                                 transition_matrix(s1, s0, u[0].reverse), params, id);
}

namespace {

Eigen::Index draw(const Vector& weights, Eigen::Index first, Eigen::Index len, double total, double u) {
    double acc = 0.0;
    const double target = u * total;
    for (Eigen::Index k = 0; k < len; ++k) {
        acc += weights(first + k);
        if (target < acc) return first + k;
    }
    return first + len - 1;
}

} // namespace

std::vector<double> sample_trials(const Vector& e0, const Vector& e1, const CycleParams& params,
                                  std::size_t n_trials, RngCursor& rng) {
    params.validate();
    if (n_trials < 1) throw ParameterError("need at least one trial");
    if (params.mode != TuningMode::adiabatic) throw ParameterError("trial sampling needs adiabatic tuning");
    require_same_dim(e0.size(), e1.size(), "sample_trials");
    const auto n = e0.size();

    const Vector g = gibbs_populations(e0, params.beta_h);
    const auto clusters = cluster_ranges(e1, params.wb);
    std::vector<std::size_t> owner(static_cast<std::size_t>(n));
    for (std::size_t c = 0; c < clusters.size(); ++c)
        for (auto j = clusters[c].first; j <= clusters[c].second; ++j) owner[j] = c;
    std::vector<Vector> cluster_gibbs(clusters.size());
    if (!std::isinf(params.beta_c))
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            const auto [a, b] = clusters[c];
            if (b > a) cluster_gibbs[c] = gibbs_populations(e1.segment(a, b - a + 1), params.beta_c);
        }

    std::vector<double> w(n_trials);
    for (auto& out : w) {
        const double u = rng.uniform();
        const Eigen::Index j = params.beta_h == 0.0
                                   ? std::min<Eigen::Index>(static_cast<Eigen::Index>(u * n), n - 1)
                                   : draw(g, 0, n, 1.0, u);
        const auto [a, b] = clusters[owner[j]];
        Eigen::Index m = j;
        if (b > a) {
            if (std::isinf(params.beta_c))
                m = a;
            else
                m = a + draw(cluster_gibbs[owner[j]], 0, b - a + 1, 1.0, rng.uniform());
        }
        out = (e0(j) - e1(j)) + (e1(m) - e0(m));
    }
    return w;
}

std::vector<double> sample_trials(const SectorBasis& basis, const EndpointPair& pair, const CycleParams& params,
                                  std::size_t n_trials, RngCursor& rng) {
    const auto s0 = endpoint_spectrum(basis, pair, 0, params, false);
    const auto s1 = endpoint_spectrum(basis, pair, 1, params, false);
    return sample_trials(s0.energies, s1.energies, params, n_trials, rng);
}

} // namespace mblotto
