#include "mblotto/ensemble.hpp"
#include "mblotto/errors.hpp"
#include "mblotto/serialization.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace mblotto;

TEST(Ensemble, RealizationsAreDeterministicAndInRange) {
    const auto a = make_realizations(42, 1000, 12);
    const auto b = make_realizations(42, 1000, 12);
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].fields, b[k].fields);
        for (double h : a[k].fields) {
            EXPECT_GE(h, -1.0);
            EXPECT_LE(h, 1.0);
            sum += h;
        }
    }
    EXPECT_LT(std::abs(sum / 12000.0), 3.0 / std::sqrt(3.0) / std::sqrt(12000.0));
    EXPECT_NE(make_realizations(43, 1, 12)[0].fields, a[0].fields);
    // realization k does not depend on how many were requested
    EXPECT_EQ(make_realizations(42, 5, 12)[4].fields, a[4].fields);
}

TEST(Ensemble, PartnerIsIndependentDraw) {
    const auto dr = make_realizations(9, 3, 8, 20.0, 20.0)[2];
    const auto partner = partner_realization(9, 2, 8, 20.0, 20.0);
    EXPECT_NE(dr.fields, partner.fields);
    EXPECT_EQ(partner.fields, partner_realization(9, 2, 8, 20.0, 20.0).fields);
}

TEST(Ensemble, MeanAndStderr) {
    const auto s = mean_and_stderr({1.0, 2.0, 3.0, 4.0});
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_NEAR(s.err, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
}

TEST(Ensemble, EqualEndpointsGiveNullEfficiency) {
    RunConfig c;
    c.sites = 4;
    c.h_eth = 5.0;
    c.h_mbl = 5.0;
    c.realizations = 1;
    const auto s = run_ensemble(c);
    ASSERT_EQ(s.points.size(), 1u);
    EXPECT_EQ(s.points[0].w_tot.mean, 0.0);
    EXPECT_FALSE(s.points[0].eta.has_value());
    EXPECT_EQ(s.points[0].q4.mean, -s.points[0].q2.mean);
}

TEST(Ensemble, SummaryIsMeanOfRecords) {
    RunConfig c;
    c.sites = 8;
    c.realizations = 30;
    c.cycle.wb = 0.125;
    const auto s = run_ensemble(c);
    const auto& pt = s.points[0];
    double m = 0.0;
    for (const auto& r : pt.records) m += r.w_tot;
    EXPECT_NEAR(pt.w_tot.mean, m / pt.records.size(), 1e-15);
    EXPECT_EQ(pt.used, 30u);
    EXPECT_EQ(s.excluded, 0u);
    ASSERT_TRUE(pt.eta.has_value());
    EXPECT_DOUBLE_EQ(*pt.eta, pt.w_tot.mean / pt.q4.mean);
    EXPECT_DOUBLE_EQ(pt.params.wb, 0.125 * s.mean_gap);
}

TEST(Ensemble, ThreadCountDoesNotChangeResults) {
    RunConfig c;
    c.sites = 8;
    c.realizations = 24;
    c.sweep = Sweep{SweepParam::wb, {1.0 / 32, 1.0 / 8}};
    c.threads = 1;
    const auto a = run_ensemble(c);
    c.threads = 4;
    const auto b = run_ensemble(c);
    std::ostringstream sa, sb;
    write_grid_csv(sa, a);
    write_grid_csv(sb, b);
    EXPECT_EQ(sa.str(), sb.str());
}

TEST(Ensemble, SpeedSweepSharesEigendecompositions) {
    RunConfig c;
    c.sites = 4;
    c.realizations = 3;
    c.sweep = Sweep{SweepParam::speed, {0.0, 0.5, 2.0}};
    const auto s = run_ensemble(c);
    ASSERT_EQ(s.points.size(), 3u);
    EXPECT_EQ(s.points[0].params.mode, TuningMode::adiabatic);
    EXPECT_EQ(s.points[1].params.mode, TuningMode::diabatic);
    RunConfig one = c;
    one.sweep.reset();
    one.cycle.speed = 2.0;
    one.cycle.mode = TuningMode::diabatic;
    const auto single = run_ensemble(one);
    EXPECT_NEAR(single.points[0].w_tot.mean, s.points[2].w_tot.mean, 1e-12);
}

TEST(Ensemble, ConfigValidation) {
    RunConfig c;
    c.sites = 5;
    EXPECT_THROW(run_ensemble(c), ParameterError);
    c = {};
    c.sweep = Sweep{SweepParam::wb, {}};
    EXPECT_THROW(run_ensemble(c), ParameterError);
    EXPECT_THROW(parse_variant("other"), ParameterError);
    EXPECT_EQ(parse_sweep_param("beta_c"), SweepParam::beta_c);
}

TEST(Ensemble, FitRecoversCubeRootExponent) {
    const double dm = 1e-3, wb = 0.01;
    std::vector<double> v, w;
    for (double x : {0.0, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1}) {
        v.push_back(x);
        w.push_back(0.02 - 0.5 * std::cbrt(x * dm) / wb * 1e-3);
    }
    const auto f = fit_diabatic(v, w, dm, wb);
    EXPECT_NEAR(f.exponent, 1.0 / 3.0, 0.02);
    EXPECT_NEAR(f.w0, 0.02, 1e-9);
    EXPECT_NEAR(f.w0_third, 0.02, 1e-12);
    EXPECT_NEAR(f.w1_third, 0.5e-3, 1e-12);
}

TEST(Ensemble, FitNeedsDistinctSpeeds) {
    EXPECT_THROW(fit_diabatic({0.0, 1e-3, 1e-3, 2e-3}, {1, 1, 1, 1}, 1e-3, 0.01), StatisticsError);
}
