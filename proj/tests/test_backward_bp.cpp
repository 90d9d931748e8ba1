#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "erw/backward_bp.hpp"
#include "erw/samplers.hpp"
#include "erw/stats.hpp"
#include "oracles.hpp"

using erw::CookieEnvironment;
using erw::TrialField;

namespace {

CookieEnvironment env(const char* s) { return CookieEnvironment::parse(s); }

oracle::Probs probs(const CookieEnvironment& e) { return {e.probs().begin(), e.probs().end()}; }

const char* kSixNines = "0.9,0.9,0.9,0.9,0.9,0.9";  // drift 4.8: finite stationary variance

}  // namespace

TEST(BackwardStep, ScriptedExamples) {
    oracle::ScriptedField f;
    f.bits[1] = {false, false, true};
    EXPECT_EQ(erw::failures_before_kth_success(f, 1, 0), 0U);
    EXPECT_EQ(erw::failures_before_kth_success(f, 1, 1), 2U);
}

TEST(BackwardStep, FairGeometricLaw) {
    const TrialField f(env("0.5"), 18);
    std::map<std::uint64_t, std::uint64_t> obs;
    for (std::int64_t i = 0; i < 100000; ++i) ++obs[erw::failures_before_kth_success(f, i, 1)];
    std::map<std::uint64_t, double> geo;
    for (std::uint64_t m = 0; m < 60; ++m) geo[m] = std::ldexp(1.0, -static_cast<int>(m + 1));
    EXPECT_GT(erw::stats::goodness_of_fit(obs, geo).p_value, 0.001);
}

TEST(BackwardChain, AllSuccessesGiveZero) {
    oracle::ScriptedField f;
    f.m = 0;
    f.bits[1] = std::vector<bool>(10, true);
    const auto t = erw::run_backward(f, 1);
    EXPECT_EQ(t.values, (std::vector<std::uint64_t>{0, 0}));
    EXPECT_THROW(erw::run_backward(f, 0), std::invalid_argument);
}

TEST(BackwardChain, RecursionWithImmigrant) {
    const TrialField f(env("0.9,0.8"), 4);
    const auto t = erw::run_backward(f, 200);
    ASSERT_EQ(t.values.size(), 201U);
    EXPECT_EQ(t.values[0], 0U);
    for (std::size_t i = 1; i < t.values.size(); ++i)
        EXPECT_EQ(t.values[i], erw::failures_before_kth_success(f, static_cast<std::int64_t>(i), t.values[i - 1] + 1));
}

TEST(BackwardChain, LongRunAverageSettles) {
    const TrialField f(env("0.9,0.9"), 5);
    const auto t = erw::run_backward(f, 100000);
    double first = 0, second = 0;
    for (std::size_t i = 1; i <= 50000; ++i) first += static_cast<double>(t.values[i]);
    for (std::size_t i = 50001; i <= 100000; ++i) second += static_cast<double>(t.values[i]);
    EXPECT_TRUE(std::isfinite(first) && std::isfinite(second));
    // drift 1.6: positive recurrent, so the chain keeps coming back to 0
    std::size_t zeros = 0;
    for (auto z : t.values) zeros += z == 0;
    EXPECT_GT(zeros, 1000U);
}

TEST(Kernel, SmallExamples) {
    const double p1 = 0.35;
    const auto row = erw::exact_kernel_row(env("0.35"), 0, 50);
    EXPECT_NEAR(row.masses[0], p1, 1e-15);
    for (std::size_t m = 1; m <= 50; ++m) EXPECT_NEAR(row.masses[m], (1 - p1) * std::ldexp(1.0, -static_cast<int>(m)), 1e-15);
    EXPECT_NEAR(row.total(), 1.0, 1e-14);
    const auto fair = erw::exact_kernel_row(CookieEnvironment{}, 0, 30);
    for (std::size_t m = 0; m <= 30; ++m) EXPECT_NEAR(fair.masses[m], std::ldexp(1.0, -static_cast<int>(m + 1)), 1e-15);
}

TEST(Kernel, RowsSumToOne) {
    for (const char* e : {"0.5", "0.9,0.8", "0.7,0.8,0.9", "0.01,0.99,0.3"})
        for (std::uint64_t k = 0; k <= 50; ++k) {
            const auto row = erw::exact_kernel_row(env(e), k, 200);
            ASSERT_NEAR(row.total(), 1.0, 1e-12) << e << " k=" << k;
            for (double w : row.masses) ASSERT_GE(w, 0.0);
        }
}

TEST(Kernel, MatchesStringEnumeration) {
    for (const char* e : {"0.9,0.8", "0.7,0.8,0.9"})
        for (std::uint64_t k : {0, 1, 4, 20, 49}) {
            const auto row = erw::exact_kernel_row(env(e), k, 40);
            const auto ref = oracle::stopped_count_by_strings(probs(env(e)), k + 1, true, 40);
            for (std::size_t m = 0; m <= 40; ++m) ASSERT_NEAR(row.masses[m], static_cast<double>(ref[m]), 1e-12);
        }
}

TEST(Kernel, FieldTransitionsMatchRows) {
    for (std::uint64_t k : {0, 1, 3, 8}) {
        const TrialField f(env("0.9,0.8"), 50 + k);
        std::map<std::uint64_t, std::uint64_t> obs;
        for (std::int64_t i = 0; i < 100000; ++i) ++obs[erw::failures_before_kth_success(f, i, k + 1)];
        const auto row = erw::exact_kernel_row(env("0.9,0.8"), k, obs.rbegin()->first + 80);
        std::map<std::uint64_t, double> pr;
        for (std::size_t m = 0; m < row.masses.size(); ++m) pr[m] = row.masses[m];
        EXPECT_GT(erw::stats::goodness_of_fit(obs, pr).p_value, 0.001) << "k=" << k;
    }
}

TEST(Kernel, RegularRowMoments) {
    // for k >= M - 1 the step has mean k + 1 - delta and second moment
    // k^2 + (4 - 2 delta) k + beta
    for (const char* e : {"0.9,0.8", "0.7,0.8,0.9", "0.3,0.95,0.6,0.9"}) {
        const auto p = env(e);
        const double delta = p.drift();
        double es = 0, var = 0;
        for (double x : p.probs()) {
            es += x;
            var += x * (1 - x);
        }
        const double beta = 2 - 2 * es + 4 * var + (1 - delta) * (1 - delta);
        for (std::uint64_t k = p.size() - 1; k < 40; ++k) {
            const auto row = erw::exact_kernel_row(p, k, 3000);
            double m1 = 0, m2 = 0;
            for (std::size_t m = 0; m < row.masses.size(); ++m) {
                m1 += m * row.masses[m];
                m2 += double(m) * m * row.masses[m];
            }
            const double kd = static_cast<double>(k);
            EXPECT_NEAR(m1, kd + 1 - delta, 1e-9) << e << " k=" << k;
            EXPECT_NEAR(m2, kd * kd + (4 - 2 * delta) * kd + beta, 1e-7) << e << " k=" << k;
        }
    }
}

TEST(Stationary, NormalisedWithSmallResidual) {
    for (const char* e : {"0.9,0.9,0.9", "0.9,0.8,0.9,0.6", "0.9,0.9"}) {
        const auto pi = erw::stationary_distribution(env(e), 1e-8);
        double total = 0;
        for (double w : pi.masses) {
            ASSERT_GE(w, 0.0);
            total += w;
        }
        EXPECT_NEAR(total, 1.0, 1e-10) << e;
        EXPECT_LE(pi.residual, 1e-10) << e;
    }
}

TEST(Stationary, MeanFiniteOnlyAboveTwo) {
    const auto a = erw::stationary_distribution(env("0.9,0.9,0.9"), 1e-8);
    EXPECT_TRUE(std::isfinite(a.mean));
    EXPECT_LE(a.mean_error, 1e-8 * a.mean);
    EXPECT_NEAR(a.mean, 0.18615454653275751, 1e-8);
    const auto b = erw::stationary_distribution(env("0.9,0.9"), 1e-8);
    EXPECT_TRUE(std::isinf(b.mean));
    EXPECT_THROW(erw::stationary_distribution(env("0.6,0.6"), 1e-8), std::invalid_argument);
    EXPECT_THROW(erw::stationary_distribution(env("0.75,0.75"), 1e-8), std::invalid_argument);
}

TEST(Stationary, MeanAgreesWithErgodicAverage) {
    const auto e = env(kSixNines);
    const auto pi = erw::stationary_distribution(e, 1e-10);
    const erw::StoppedCountSampler step(e, erw::StopOn::Success);
    erw::Rng rng(77);
    std::uint64_t z = 0;
    for (int i = 0; i < 10000; ++i) z = step(z + 1, rng);
    // batch means over 200 batches of 50000 steps
    erw::stats::RunningMean batches;
    for (int b = 0; b < 200; ++b) {
        double s = 0;
        for (int i = 0; i < 50000; ++i) s += static_cast<double>(z = step(z + 1, rng));
        batches.add(s / 50000);
    }
    EXPECT_NEAR(batches.mean(), pi.mean, 4 * batches.standard_error() + 1e-9)
        << "exact " << pi.mean << " ergodic " << batches.mean() << " se " << batches.standard_error();
}

TEST(Stationary, EmpiricalLawOfLateGenerationMatches) {
    const auto e = env("0.9,0.9,0.9");
    const auto pi = erw::stationary_distribution(e, 1e-8);
    const erw::StoppedCountSampler step(e, erw::StopOn::Success);
    const std::uint64_t runs = 100000, generations = 10000;
    auto blocks = erw::run_blocks<std::vector<double>>(runs, 5000, [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
        erw::Rng rng(erw::derive_seed(31, b));
        std::vector<double> counts(pi.masses.size(), 0.0);
        for (auto r = begin; r < end; ++r) {
            std::uint64_t z = 0;
            for (std::uint64_t g = 0; g < generations; ++g) z = step(z + 1, rng);
            if (z < counts.size()) counts[z] += 1;
        }
        return counts;
    });
    std::vector<double> freq(pi.masses.size(), 0.0);
    for (const auto& c : blocks)
        for (std::size_t i = 0; i < c.size(); ++i) freq[i] += c[i] / runs;
    EXPECT_LE(erw::stats::total_variation(freq, pi.masses), 0.01);
}

TEST(Speed, ZeroRegimes) {
    EXPECT_EQ(erw::speed(env("0.5,0.5")).v, 0.0);
    EXPECT_EQ(erw::speed(env("0.9,0.9")).v, 0.0);
    EXPECT_EQ(erw::speed(env("0.7,0.9,0.9")).v, 0.0);  // drift exactly 2
    EXPECT_EQ(erw::speed(env("0.9,0.9")).method, "zero_by_classification");
}

TEST(Speed, SignRangeAndMirror) {
    for (const char* e : {"0.9,0.9,0.9", "0.8,0.95,0.95", "0.95,0.8,0.95", "0.9,0.8,0.9,0.6", "0.5", "0.9,0.9", kSixNines}) {
        const auto p = env(e);
        const auto s = erw::speed(p, 1e-10), m = erw::speed(p.mirror(), 1e-10);
        EXPECT_GT(s.v, -1.0);
        EXPECT_LT(s.v, 1.0);
        EXPECT_EQ(m.v, -s.v) << e;
        const auto sign = erw::classify(p).speed_sign;
        if (sign == erw::SpeedSign::Positive) EXPECT_GT(s.v, 0.0);
        if (sign == erw::SpeedSign::Zero) EXPECT_EQ(s.v, 0.0);
        if (sign == erw::SpeedSign::Negative) EXPECT_LT(s.v, 0.0);
    }
    EXPECT_EQ(erw::speed(env("0.1,0.1,0.1")).method, "mirror_stationary_mean");
}

TEST(Speed, MonteCarloAgreesAtLargeDrift) {
    // drift 4.8: Gaussian fluctuations, so a short run is enough
    const auto e = env(kSixNines);
    const auto exact = erw::speed(e, 1e-10);
    const auto mc = erw::speed_monte_carlo(e, 100000, 60, 9);
    EXPECT_NEAR(mc.mean, exact.v, 3 * mc.standard_error + exact.error_estimate)
        << exact.v << " vs " << mc.mean << " se " << mc.standard_error;
}

TEST(Dz, SmallCheckPasses) {
    const auto r = erw::dz_distribution_check(env("0.9,0.8"), 2, 20000, 5);
    EXPECT_EQ(r.censored, 0U);
    EXPECT_TRUE(r.passed(0.001)) << r.joint.p_value << " " << r.time_nonneg.p_value;
    EXPECT_THROW(erw::dz_distribution_check(env("0.1,0.1"), 2, 10, 1), std::invalid_argument);
    EXPECT_THROW(erw::dz_distribution_check(env("0.9"), 0, 10, 1), std::invalid_argument);
}

TEST(Dz, TopCoordinateIsAlwaysZero) {
    // D_n^n and Z_0 both vanish identically
    for (std::uint64_t s = 0; s < 500; ++s) {
        const auto h = erw::walk_to_level(TrialField(env("0.6"), s), 3, 1000000);
        if (h.hitting_time) EXPECT_EQ(h.left_jumps_at(3), 0U);
    }
}
