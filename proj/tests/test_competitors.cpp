#include "mblotto/competitors.hpp"
#include "mblotto/ensemble.hpp"
#include "mblotto/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mblotto;

TEST(Competitors, WilsonInterval) {
    // k = 10, n = 100, z = 1.96: closed form
    const double z = 1.959963984540054, n = 100, ph = 0.1;
    const double c = (ph + z * z / (2 * n)) / (1 + z * z / n);
    const double h = z / (1 + z * z / n) * std::sqrt(ph * (1 - ph) / n + z * z / (4 * n * n));
    const auto w = wilson_interval(10, 100);
    EXPECT_NEAR(w.lo, c - h, 1e-14);
    EXPECT_NEAR(w.hi, c + h, 1e-14);
    EXPECT_NEAR(wilson_interval(0, 50).lo, 0.0, 1e-15);
    EXPECT_THROW(wilson_interval(0, 0), StatisticsError);
}

TEST(Competitors, IdenticalEndpointsDoNoWork) {
    const auto b = enumerate_basis(6);
    const auto dr = make_realizations(5, 1, 6, 20.0, 20.0)[0];
    CycleParams p;
    p.wb = 0.05;
    RngCursor cur(CounterRng(1, 0), 0);
    for (double w : run_equal_disorder(b, dr, dr, p, 500, cur)) EXPECT_EQ(w, 0.0);
}

TEST(Competitors, ComparisonOrdersSeparatedSamples) {
    std::vector<double> a, b;
    CounterRng r(2, 0);
    for (std::uint64_t i = 0; i < 20000; ++i) {
        const double u = r.uniform(i);
        a.push_back(u < 0.01 ? -0.1 : 0.1 * u);
        b.push_back(u < 0.05 ? -1.0 : u);
    }
    const auto rep = compare_worst_case(a, b, 3, 200);
    EXPECT_TRUE(rep.ordered);
    EXPECT_TRUE(rep.intervals_disjoint);
    EXPECT_TRUE(rep.variance_ordered);
    EXPECT_LT(rep.variance_diff_ci.hi, 0.0);
    EXPECT_THROW(compare_worst_case({1.0}, {1.0}), StatisticsError);
}

TEST(Competitors, TrialStreamsDiffer) {
    EXPECT_NE(trial_stream(1, 0, EngineVariant::standard).bits(0),
              trial_stream(1, 0, EngineVariant::equal_disorder).bits(0));
}

TEST(Competitors, SampleEngineMatchesExactMeans) {
    TrialConfig t;
    t.sites = 6;
    t.realizations = 5;
    t.trials_per_realization = 20000;
    t.cycle.wb = 0.25;
    const auto e = sample_engine(t, EngineVariant::standard);
    ASSERT_EQ(e.samples.size(), 100000u);
    for (std::size_t k = 0; k < 5; ++k) {
        std::vector<double> part(e.samples.begin() + k * 20000, e.samples.begin() + (k + 1) * 20000);
        const auto st = mean_and_stderr(part);
        EXPECT_LT(std::abs(st.mean - e.exact_means[k]), 4.0 * st.err + 1e-15) << k;
    }
}

TEST(Competitors, BandwidthEstimateDecreasesWithSize) {
    double last = bandwidth_engine_estimate(2).w_tot;
    for (int n = 3; n <= 400; ++n) {
        const double w = bandwidth_engine_estimate(n).w_tot;
        EXPECT_LT(w, last) << n;
        last = w;
    }
}
