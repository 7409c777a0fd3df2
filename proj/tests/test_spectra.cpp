#include "mblotto/errors.hpp"
#include "mblotto/rng.hpp"
#include "mblotto/spectra.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace mblotto;

TEST(Spectra, TwoByTwo) {
    Matrix H(2, 2);
    H << -1, 2, 2, -1;
    const auto s = diagonalize(H);
    EXPECT_NEAR(s.energies(0), -3.0, 1e-14);
    EXPECT_NEAR(s.energies(1), 1.0, 1e-14);
    const Matrix V = s.eigenvectors;
    EXPECT_LT((H * V - V * s.energies.asDiagonal()).norm(), 1e-13);
}

TEST(Spectra, IdentityAndValuesOnly) {
    const auto s = diagonalize(Matrix::Identity(6, 6), {false, 0, 0.0});
    EXPECT_FALSE(s.has_vectors());
    for (int i = 0; i < 6; ++i) EXPECT_DOUBLE_EQ(s.energies(i), 1.0);
}

TEST(Spectra, RejectsAsymmetric) {
    Matrix H(2, 2);
    H << 0, 1, 0.5, 0;
    EXPECT_THROW(diagonalize(H), ParameterError);
}

TEST(Spectra, MeanGapOracle) {
    // Spectra with unit population variance give 2 sqrt(pi) / N.
    auto unit_variance = [](int n) {
        Vector e(n);
        for (int i = 0; i < n; ++i) e(i) = (i % 2 ? 1.0 : -1.0);
        return e;
    };
    const double two_root_pi = 2.0 * std::sqrt(std::numbers::pi);
    EXPECT_NEAR(mean_gap(std::vector<Vector>{unit_variance(924)}), two_root_pi / 924.0, 1e-15);
    EXPECT_NEAR(mean_gap(std::vector<Vector>{unit_variance(924)}), 0.0038364, 1e-7);
    EXPECT_NEAR(mean_gap(std::vector<Vector>{unit_variance(252)}), 0.014067, 1e-6);
    EXPECT_THROW(mean_gap(std::vector<Vector>{}), ParameterError);
}

TEST(Spectra, SpectralVariance) {
    Vector e(4);
    e << 1, 2, 3, 4;
    EXPECT_DOUBLE_EQ(spectral_variance(e), 1.25);
}

TEST(Spectra, CentralWindow) {
    Vector e(9);
    for (int i = 0; i < 9; ++i) e(i) = i * i;
    const auto s = central_spacings(e, 1.0);
    EXPECT_EQ(s.size(), 8u);
    const auto c = central_spacings(e, 0.5);
    EXPECT_GE(c.size(), 3u);
    EXPECT_LE(c.size(), 5u);
}

TEST(Spectra, UnfoldedHasUnitMean) {
    std::vector<Vector> es;
    CounterRng rng(4, 0);
    for (int k = 0; k < 10; ++k) {
        Vector e(50);
        for (int i = 0; i < 50; ++i) e(i) = rng.uniform(k * 50 + i);
        std::sort(e.data(), e.data() + e.size());
        es.push_back(e);
    }
    const auto u = unfolded_spacings(es, 0.5);
    double m = 0.0;
    for (double x : u) m += x;
    EXPECT_NEAR(m / u.size(), 1.0, 1e-12);
}

TEST(Spectra, KsAgainstExactPoisson) {
    std::vector<double> s;
    CounterRng rng(9, 1);
    for (std::uint64_t i = 0; i < 100000; ++i) s.push_back(-std::log1p(-rng.uniform(i)));
    const auto d = spacing_distances(s);
    EXPECT_LT(d.ks_poisson, 0.01);
    EXPECT_GT(d.ks_wigner, d.ks_poisson);
    EXPECT_THROW(spacing_distances(std::vector<double>(99, 1.0)), StatisticsError);
}

TEST(Spectra, Cdfs) {
    EXPECT_DOUBLE_EQ(poisson_cdf(0.0), 0.0);
    EXPECT_NEAR(poisson_cdf(1.0), 1.0 - std::exp(-1.0), 1e-15);
    EXPECT_NEAR(wigner_cdf(1.0), 1.0 - std::exp(-std::numbers::pi / 4), 1e-15);
}

TEST(Spectra, Histograms) {
    std::vector<double> x{0.5, 1.5, 1.6, 3.9, 10.0};
    const auto h = linear_histogram(x, 0.0, 4.0, 4);
    ASSERT_EQ(h.size(), 4u);
    EXPECT_EQ(h[0].count, 1u);
    EXPECT_EQ(h[1].count, 2u);
    EXPECT_EQ(h[3].count, 1u);
    EXPECT_DOUBLE_EQ(h[1].density, 2.0 / 5.0);
    const auto g = log_histogram(x, 0.1, 10.0, 2);
    EXPECT_NEAR(g[0].right, 1.0, 1e-12);
}

TEST(Spectra, DeltaMinusPoissonHitsSmallestEdge) {
    std::vector<double> s;
    CounterRng rng(5, 2);
    for (std::uint64_t i = 0; i < 200000; ++i) s.push_back(-std::log1p(-rng.uniform(i)));
    EXPECT_NEAR(estimate_delta_minus(s, 1.0), 1e-4, 1e-12);
}

TEST(Spectra, DeltaMinusBracketsSuppressionScale) {
    // Density proportional to s below s0, exponential beyond: rejection sample with a uniform cap.
    for (double s0 : {1e-3, 1e-2, 5e-2}) {
        std::vector<double> s;
        CounterRng rng(6, 3);
        std::uint64_t i = 0;
        while (s.size() < 200000) {
            const double x = -std::log1p(-rng.uniform(i++));
            const double accept = x < s0 ? x / s0 : 1.0;
            if (rng.uniform(i++) < accept) s.push_back(x);
        }
        const double d = estimate_delta_minus(s, 1.0);
        EXPECT_GE(d, 0.5 * s0) << s0;
        EXPECT_LE(d, 2.0 * s0) << s0;
    }
}

TEST(Spectra, DeltaMinusNeedsSamples) {
    EXPECT_THROW(estimate_delta_minus(std::vector<double>(999, 0.5), 1.0), StatisticsError);
}
