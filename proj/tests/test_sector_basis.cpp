#include "mblotto/errors.hpp"
#include "mblotto/ensemble.hpp"
#include "mblotto/sector_basis.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>

using namespace mblotto;

namespace {

// Brute force over every half-filled pattern, with sz = +-1 per site.
struct BruteTraces {
    std::int64_t zz = 0, flip = 0, four = 0;
};

BruteTraces brute(int L) {
    BruteTraces t;
    for (std::uint32_t s = 0; s < (1u << L); ++s) {
        if (std::popcount(s) != L / 2) continue;
        auto sz = [&](int j) { return (s >> j) & 1u ? 1 : -1; };
        t.zz += sz(0) * sz(1);
        t.flip += ((s & 1u) && !(s & 2u)) ? 1 : 0;
        if (L >= 4) t.four += sz(0) * sz(1) * sz(2) * sz(3);
    }
    return t;
}

DisorderRealization fixed_realization(int L, double h_eth, double h_mbl) {
    DisorderRealization dr;
    dr.h_eth = h_eth;
    dr.h_mbl = h_mbl;
    for (int j = 0; j < L; ++j) dr.fields.push_back(std::sin(1.7 * j + 0.3));
    return dr;
}

} // namespace

TEST(SectorBasis, DimensionsAndOrdering) {
    EXPECT_EQ(enumerate_basis(2).dim, 2u);
    EXPECT_EQ(enumerate_basis(2).states, (std::vector<std::uint32_t>{0b01, 0b10}));
    EXPECT_EQ(enumerate_basis(4).dim, 6u);
    EXPECT_EQ(enumerate_basis(12).dim, 924u);
    const auto b = enumerate_basis(8);
    for (std::size_t i = 0; i < b.dim; ++i) {
        EXPECT_EQ(b.index_of(b.states[i]), static_cast<std::int64_t>(i));
        if (i) EXPECT_LT(b.states[i - 1], b.states[i]);
    }
    EXPECT_EQ(b.index_of(0b111), -1);
}

TEST(SectorBasis, RejectsBadLengths) {
    EXPECT_THROW(enumerate_basis(3), ParameterError);
    EXPECT_THROW(enumerate_basis(0), ParameterError);
    EXPECT_THROW(enumerate_basis(18), ParameterError);
}

TEST(SectorBasis, RescaleFactor) {
    EXPECT_NEAR(rescale_factor(20.0, 12), 40.434, 5e-4);
    EXPECT_NEAR(rescale_factor(2.0, 12), 7.1351, 5e-5);
    EXPECT_NEAR(std::pow(rescale_factor(20.0, 12), 2), 1634.0 + 10.0 / 11.0, 1e-9);
    EXPECT_NEAR(std::pow(rescale_factor(0.0, 6), 2), 16.0 + 4.0 / 5.0, 1e-12);
    EXPECT_THROW(rescale_factor(1.0, 1), ParameterError);
}

TEST(SectorBasis, TracesMatchBruteForce) {
    for (int L : {4, 6, 8, 10, 12}) {
        const auto t = sector_traces(L);
        const auto b = brute(L);
        EXPECT_EQ(t.zz, b.zz) << L;
        EXPECT_EQ(t.flip, b.flip) << L;
        ASSERT_TRUE(t.four_point.has_value());
        EXPECT_EQ(*t.four_point, b.four) << L;
    }
    EXPECT_FALSE(sector_traces(2).four_point.has_value());
    EXPECT_THROW(sector_traces(3), ParameterError);
}

TEST(SectorBasis, TwoSiteHamiltonian) {
    const auto b = enumerate_basis(2);
    DisorderRealization dr{{0.5, -0.25}, 0.0, 0.0, 1};
    const Matrix H = build_hamiltonian(b, dr, {1.0, 0.0, false});
    // |01> has site 1 up: zz = -1, field h_1 - h_2 scaled by h = 0.
    EXPECT_DOUBLE_EQ(H(0, 0), -1.0);
    EXPECT_DOUBLE_EQ(H(1, 1), -1.0);
    EXPECT_DOUBLE_EQ(H(0, 1), 2.0);
    EXPECT_DOUBLE_EQ(H(1, 0), 2.0);
}

TEST(SectorBasis, FieldTermSigns) {
    const auto b = enumerate_basis(2);
    DisorderRealization dr{{0.5, -0.25}, 4.0, 4.0, 1};
    const Matrix H = build_hamiltonian(b, dr, {1.0, 0.0, false});
    EXPECT_DOUBLE_EQ(H(0, 0), -1.0 + 4.0 * (0.5 + 0.25));
    EXPECT_DOUBLE_EQ(H(1, 1), -1.0 + 4.0 * (-0.5 - 0.25));
}

TEST(SectorBasis, TraceIsMinusDimensionPerRealization) {
    const auto b = enumerate_basis(8);
    const auto reals = make_realizations(3, 20, 8);
    for (const auto& dr : reals) {
        for (double a : {0.0, 0.5, 1.0}) {
            const double q = rescale_factor(disorder_strength(dr, a), 8);
            const Matrix H = build_hamiltonian(b, dr, {1.0, a, true});
            EXPECT_NEAR(H.trace() * q, -static_cast<double>(b.dim), 1e-9);
        }
    }
}

TEST(SectorBasis, SymmetricAndAlphaIndependentForEqualStrengths) {
    const auto b = enumerate_basis(6);
    const auto dr = fixed_realization(6, 5.0, 5.0);
    const Matrix H0 = build_hamiltonian(b, dr, {1.0, 0.0, true});
    const Matrix H1 = build_hamiltonian(b, dr, {1.0, 0.7, true});
    EXPECT_EQ((H0 - H0.transpose()).norm(), 0.0);
    EXPECT_EQ((H0 - H1).norm(), 0.0);
}

TEST(SectorBasis, PartsReassemble) {
    const auto b = enumerate_basis(6);
    const auto dr = fixed_realization(6, 2.0, 20.0);
    const auto parts = hamiltonian_parts(b, dr);
    for (double a : {0.0, 0.3, 1.0}) {
        const HamiltonianParams p{1.5, a, true};
        const Matrix direct = build_hamiltonian(b, dr, p);
        const Matrix re = assemble(parts, disorder_strength(dr, a), 6, p);
        EXPECT_LT((direct - re).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(SectorBasis, DimensionMismatch) {
    const auto b = enumerate_basis(6);
    const auto dr = fixed_realization(4, 2.0, 20.0);
    EXPECT_THROW(build_hamiltonian(b, dr, {}), ParameterError);
}
