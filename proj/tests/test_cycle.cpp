#include "mblotto/cycle.hpp"
#include "mblotto/ensemble.hpp"
#include "mblotto/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>

using namespace mblotto;

namespace {

Spectrum two_level(double a, double b, double angle) {
    Spectrum s;
    s.energies = Vector(2);
    s.energies << a, b;
    s.eigenvectors = Matrix(2, 2);
    s.eigenvectors << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return s;
}

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

} // namespace

TEST(Cycle, GibbsPopulations) {
    const auto g = gibbs_populations(vec({-1, 1}), 1.0);
    EXPECT_NEAR(g(0), 0.88080, 5e-6);
    EXPECT_NEAR(g(1), 0.11920, 5e-6);
    const auto u = gibbs_populations(vec({-3, 0.5, 7}), 0.0);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(u(i), 1.0 / 3.0);
}

TEST(Cycle, ClusterRanges) {
    const auto e = vec({0.0, 0.1, 0.15, 1.0, 1.05, 3.0});
    const auto c = cluster_ranges(e, 0.2);
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(c[0], std::make_pair(Eigen::Index(0), Eigen::Index(2)));
    EXPECT_EQ(c[1], std::make_pair(Eigen::Index(3), Eigen::Index(4)));
    EXPECT_EQ(c[2], std::make_pair(Eigen::Index(5), Eigen::Index(5)));
}

TEST(Cycle, SixLevelColdThermalization) {
    const auto e = vec({0.0, 0.1, 0.15, 1.0, 1.05, 3.0});
    const auto p = vec({0.1, 0.2, 0.3, 0.15, 0.05, 0.2});
    const auto q = cold_populations(p, e, 0.2, kInf);
    const auto want = vec({0.6, 0, 0, 0.2, 0, 0.2});
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(q(i), want(i), 1e-15) << i;
    const auto same = cold_populations(p, e, 0.0, kInf);
    EXPECT_EQ(same, p);
    const auto flat = cold_populations(p, e, 0.2, 0.0);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(flat(i), 0.2, 1e-15);
    EXPECT_NEAR(flat(3), 0.1, 1e-15);
}

TEST(Cycle, ThreeLevelGibbsCluster) {
    const auto q = cold_populations(vec({0.2, 0.3, 0.5}), vec({0.0, 0.3, 0.5}), 0.35, 2.0);
    const double z = 1.0 + std::exp(-0.6) + std::exp(-1.0);
    EXPECT_NEAR(q(0), 1.0 / z, 1e-15);
    EXPECT_NEAR(q(1), std::exp(-0.6) / z, 1e-15);
    EXPECT_NEAR(q(2), std::exp(-1.0) / z, 1e-15);
    EXPECT_NEAR(q(0), 0.52173, 5e-6);
}

TEST(Cycle, AdiabaticMapTwoLevel) {
    const auto from = two_level(-1, 1, 0.0);
    const auto to = two_level(-2, 3, 0.4);
    const auto rho = from_populations(vec({0.7, 0.3}), from);
    const auto out = adiabatic_map(rho, from, to);
    const auto p = populations(out, to);
    EXPECT_NEAR(p(0), 0.7, 1e-14);
    EXPECT_NEAR(p(1), 0.3, 1e-14);
    EXPECT_LT((dephase(out, to) - out).norm(), 1e-14);
    EXPECT_EQ(adiabatic_map(rho, from, from), rho);
    const CMatrix mixed = CMatrix::Identity(2, 2) / 2.0;
    EXPECT_LT((adiabatic_map(mixed, from, to) - mixed).norm(), 1e-15);
}

TEST(Cycle, DephaseRemovesCoherence) {
    const auto s = two_level(0, 1, 0.0);
    CMatrix plus(2, 2);
    plus.setConstant(0.5);
    const auto d = dephase(plus, s);
    EXPECT_NEAR(d(0, 0).real(), 0.5, 1e-15);
    EXPECT_NEAR(std::abs(d(0, 1)), 0.0, 1e-15);
    EXPECT_THROW(cold_thermalize(plus, s, 2.0, kInf), StateError);
    const auto t = cold_thermalize(d, s, 2.0, kInf);
    EXPECT_NEAR(populations(t, s)(0), 1.0, 1e-15);
}

TEST(Cycle, HotThermalize) {
    const auto s = two_level(-1, 1, 0.3);
    const auto rho = hot_thermalize(s, 1.0);
    const auto p = populations(rho, s);
    EXPECT_NEAR(p(0), 0.88080, 5e-6);
    EXPECT_LT((hot_thermalize(s, 0.0) - CMatrix::Identity(2, 2) / 2.0).norm(), 1e-15);
}

TEST(Cycle, PartialSwap) {
    const auto g = gibbs_populations(vec({0.0, 0.4, 1.1}), 1.3);
    EXPECT_EQ(partial_swap(0.0, g), Matrix::Identity(3, 3));
    const Matrix full = partial_swap(1.0, g);
    const auto v = vec({0.5, 0.25, 0.25});
    EXPECT_LT((full * v - g).norm(), 1e-15);
    for (double p : {0.1, 0.6}) {
        const Matrix M = partial_swap(p, g);
        EXPECT_LT((M * g - g).norm(), 1e-12);
        EXPECT_NEAR(M(1, 0) / M(0, 1), std::exp(-1.3 * 0.4), 1e-12);
        EXPECT_NEAR(M(2, 1) / M(1, 2), std::exp(-1.3 * 0.7), 1e-12);
    }
    EXPECT_THROW(partial_swap(0.5, vec({0.5, 0.6})), ParameterError);
}

TEST(Cycle, EqualEndpointsGiveNoWork) {
    const auto b = enumerate_basis(6);
    auto dr = make_realizations(2, 1, 6, 5.0, 5.0)[0];
    CycleParams p;
    p.wb = 0.05;
    p.beta_h = 0.3;
    const auto r = run_cycle(b, EndpointPair::standard(dr), p, 0.1);
    EXPECT_EQ(r.w1, 0.0);
    EXPECT_EQ(r.w3, 0.0);
    EXPECT_EQ(r.w_tot, 0.0);
    EXPECT_EQ(r.q4, -r.q2);
}

TEST(Cycle, FirstLawOnAdiabaticCycles) {
    const auto b = enumerate_basis(8);
    for (const auto& dr : make_realizations(5, 10, 8)) {
        for (double beta_h : {0.0, 0.5}) {
            CycleParams p;
            p.wb = 0.01;
            p.beta_c = 30.0;
            p.beta_h = beta_h;
            const auto r = run_cycle(b, EndpointPair::standard(dr), p, 0.05);
            EXPECT_LT(std::abs((r.w1 + r.w3) - (r.q2 + r.q4)), 1e-9);
        }
    }
}

TEST(Cycle, DiabaticSingleStep) {
    const auto b = enumerate_basis(4);
    auto dr = make_realizations(8, 1, 4)[0];
    const HamiltonianParams hp{1.0, 0.0, true};
    const double dt = 0.7;
    // T = eps (h_mbl - h_eth) / v = dt
    const double v = (dr.h_mbl - dr.h_eth) / dt;
    ASSERT_EQ(diabatic_steps(dr, v, dt, 1.0), 1u);
    const CMatrix U = diabatic_unitary(b, dr, hp, Direction::forward, v, dt);
    const auto s = diagonalize(build_hamiltonian(b, dr, hp));
    const Eigen::VectorXcd phases = (s.energies * std::complex<double>(0.0, -dt)).array().exp();
    const CMatrix V = s.eigenvectors.cast<std::complex<double>>();
    const CMatrix want = V * phases.asDiagonal() * V.adjoint();
    EXPECT_LT((U - want).norm(), 1e-12);
}

TEST(Cycle, DiabaticUnitarity) {
    const auto b = enumerate_basis(6);
    auto dr = make_realizations(3, 1, 6)[0];
    const auto us = diabatic_unitaries(b, dr, {1.0, 0.0, true}, {0.5, 2.0}, 0.3);
    for (const auto& u : us) {
        const auto n = u.forward.rows();
        EXPECT_LT((u.forward.adjoint() * u.forward - CMatrix::Identity(n, n)).norm(), 1e-10);
        EXPECT_LT((u.reverse.adjoint() * u.reverse - CMatrix::Identity(n, n)).norm(), 1e-10);
    }
    EXPECT_THROW(diabatic_steps(dr, 1e-9, 0.1, 1.0), ResourceError);
}

TEST(Cycle, SharedEigendecompositionsMatchDirectProducts) {
    const auto b = enumerate_basis(4);
    auto dr = make_realizations(4, 1, 4)[0];
    const HamiltonianParams hp{1.0, 0.0, true};
    const double dt = 0.5;
    const double v = (dr.h_mbl - dr.h_eth) / (8 * dt);
    const auto both = diabatic_unitaries(b, dr, hp, {v, 2 * v}, dt);
    const auto single = diabatic_unitary(b, dr, hp, Direction::reverse, 2 * v, dt);
    EXPECT_LT((both[1].reverse - single).norm(), 1e-12);
}

TEST(Cycle, SlowRampApproachesAdiabaticMap) {
    const auto b = enumerate_basis(6);
    auto dr = make_realizations(12, 1, 6)[0];
    const HamiltonianParams hp{1.0, 0.0, true};
    CycleParams cp;
    const auto pair = EndpointPair::standard(dr);
    const auto s0 = endpoint_spectrum(b, pair, 0, cp, true);
    const auto s1 = endpoint_spectrum(b, pair, 1, cp, true);
    const double mg = mean_gap(std::vector<Spectrum>{s0, s1});
    const double dt = 0.405 / mg;
    const Vector p0 = gibbs_populations(s0.energies, 2.0);
    double last = 1.0;
    for (double f : {1e-1, 1e-2, 1e-3}) {
        const double v = f * mg * mg;
        const auto u = diabatic_unitaries(b, dr, hp, {v}, dt);
        const Vector p1 = transition_matrix(s0, s1, u[0].forward) * p0;
        const double dist = 0.5 * (p1 - p0).cwiseAbs().sum();
        EXPECT_LE(dist, last + 1e-3) << f;
        last = dist;
    }
    EXPECT_LT(last, 0.05);
}

TEST(Cycle, TrialsOnSingletonClustersDoNoWork) {
    const auto e0 = vec({-1.0, 0.0, 1.0});
    const auto e1 = vec({-2.0, 0.0, 2.0});
    CycleParams p;
    p.wb = 0.5;
    RngCursor cur(CounterRng(1, 1), 0);
    for (double w : sample_trials(e0, e1, p, 100, cur)) EXPECT_EQ(w, 0.0);
    EXPECT_THROW(sample_trials(e0, e1, p, 0, cur), ParameterError);
}

TEST(Cycle, TrialMeanMatchesDensityMatrix) {
    const auto b = enumerate_basis(8);
    auto dr = make_realizations(21, 1, 8)[0];
    CycleParams p;
    p.wb = 0.02;
    const auto pair = EndpointPair::standard(dr);
    const auto exact = run_cycle(b, pair, p, 0.05);
    RngCursor cur(CounterRng(3, 0), 0);
    const auto w = sample_trials(b, pair, p, 200000, cur);
    const auto st = mean_and_stderr(w);
    EXPECT_LT(std::abs(st.mean - exact.w_tot), 4.0 * st.err + 1e-15);
}

TEST(Cycle, ParamValidation) {
    CycleParams p;
    p.wb = -1;
    EXPECT_THROW(p.validate(), ParameterError);
    p = {};
    p.beta_h = kInf;
    EXPECT_THROW(p.validate(), ParameterError);
}
