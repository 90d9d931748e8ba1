#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "erw/coupled_field.hpp"
#include "erw/coupling.hpp"
#include "erw/samplers.hpp"
#include "oracles.hpp"

using erw::CookieEnvironment;
using erw::Order;

namespace {

CookieEnvironment env(const char* s) { return CookieEnvironment::parse(s); }

oracle::Probs probs(const CookieEnvironment& e) { return {e.probs().begin(), e.probs().end()}; }

// the five-row table for (p1, p2) against (p2, p1), p1 < p2; bit j-1 is trial j
erw::CouplingTable example_table(double p1, double p2) {
    return {2,
            {{0b00, 0b00, (1 - p1) * (1 - p2)},
             {0b10, 0b10, p1 * (1 - p2)},  // (0,1) -> (0,1)
             {0b01, 0b01, p1 * (1 - p2)},  // (1,0) -> (1,0)
             {0b10, 0b01, p2 - p1},        // (0,1) -> (1,0)
             {0b11, 0b11, p1 * p2}}};
}

void expect_valid(const erw::CouplingTable& t, const CookieEnvironment& p, const CookieEnvironment& q) {
    const auto bad = erw::coupling_violation(t, p, q);
    EXPECT_FALSE(bad) << *bad;
    double total = 0;
    std::map<std::uint32_t, double> first, second;
    for (const auto& e : t.support) {
        EXPECT_GT(e.mass, 0.0);
        EXPECT_TRUE(oracle::dominated(e.y, e.z, static_cast<unsigned>(t.length)));
        first[e.y] += e.mass;
        second[e.z] += e.mass;
        total += e.mass;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    for (std::uint32_t x = 0; x < (1U << t.length); ++x) {
        EXPECT_NEAR(first[x], oracle::outcome_mass(probs(p), x), 1e-10);
        EXPECT_NEAR(second[x], oracle::outcome_mass(probs(q), x), 1e-10);
    }
}

}  // namespace

TEST(Order, Examples) {
    EXPECT_EQ(erw::decide_order(env("0.7,0.2"), env("0.7,0.2")).order, Order::Equal);
    const auto v = erw::decide_order(env("0.5,0.9"), env("0.9,0.5"));
    EXPECT_EQ(v.order, Order::Strict);
    EXPECT_EQ(v.witness, 1U);
    ASSERT_TRUE(v.certificate);
    expect_valid(*v.certificate, env("0.5,0.9"), env("0.9,0.5"));
    const auto w = erw::decide_order(env("0.9,0.5"), env("0.5,0.9"));
    EXPECT_EQ(w.order, Order::Incomparable);
    EXPECT_EQ(w.failed_prefix, 1U);
    EXPECT_FALSE(w.certificate);
}

TEST(Order, ExampleTableIsACertificate) {
    const auto t = example_table(0.5, 0.9);
    EXPECT_NEAR(t.support[0].mass, 0.05, 1e-15);
    EXPECT_NEAR(t.support[3].mass, 0.4, 1e-15);
    EXPECT_NEAR(t.support[4].mass, 0.45, 1e-15);
    expect_valid(t, env("0.5,0.9"), env("0.9,0.5"));
}

TEST(Order, CorruptedTablesRejected) {
    auto t = example_table(0.5, 0.9);
    t.support[3] = {0b01, 0b10, 0.4};  // (1,0) over (0,1)
    EXPECT_TRUE(erw::coupling_violation(t, env("0.5,0.9"), env("0.9,0.5")));
    auto u = example_table(0.5, 0.9);
    u.support[4].mass = 0.5;
    EXPECT_TRUE(erw::coupling_violation(u, env("0.5,0.9"), env("0.9,0.5")));
    EXPECT_THROW(erw::CoupledStoppedCountSampler(env("0.5,0.9"), env("0.9,0.5"), u, erw::StopOn::Failure),
                 erw::CorruptedCouplingTable);
}

TEST(Order, DiagonalTable) {
    const auto t = erw::build_coupling_table(env("0.7"), env("0.7"));
    ASSERT_EQ(t.support.size(), 2U);
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> m;
    for (const auto& e : t.support) m[{e.y, e.z}] = e.mass;
    EXPECT_NEAR((m[{0, 0}]), 0.3, 1e-12);
    EXPECT_NEAR((m[{1, 1}]), 0.7, 1e-12);
    EXPECT_THROW(erw::build_coupling_table(env("0.9,0.5"), env("0.5,0.9")), std::invalid_argument);
}

TEST(Order, MinimalStrictIndex) {
    EXPECT_EQ(erw::minimal_strict_index(env("0.5,0.9"), env("0.9,0.5")), 1U);
    EXPECT_EQ(erw::minimal_strict_index(env("0.7,0.5,0.9"), env("0.7,0.9,0.5")), 2U);
    EXPECT_EQ(erw::minimal_strict_index(env("0.7,0.9,0.9"), env("0.9,0.7,0.9")), 1U);
    EXPECT_THROW(erw::minimal_strict_index(env("0.7"), env("0.7")), std::invalid_argument);
    EXPECT_THROW(erw::minimal_strict_index(env("0.9,0.5"), env("0.5,0.9")), std::invalid_argument);
}

TEST(Order, StrictGapValue) {
    EXPECT_NEAR(erw::strict_gap_value(env("0.5,0.9"), env("0.9,0.5"), 1), 0.4, 1e-15);
    EXPECT_EQ(erw::strict_gap_value(env("0.3,0.6"), env("0.3,0.6"), 2), 0.0);
    EXPECT_GT(erw::strict_gap_value(env("0.7,0.5,0.9"), env("0.7,0.9,0.5"), 2), 0.0);
    EXPECT_THROW(erw::strict_gap_value(env("0.7"), env("0.8"), 2), std::invalid_argument);
}

TEST(Order, PadsShorterEnvironment) {
    const auto v = erw::decide_order(env("0.6"), env("0.6,0.7"));
    EXPECT_EQ(v.order, Order::Strict);
    EXPECT_EQ(v.witness, 2U);
    EXPECT_EQ(erw::decide_order(env("0.6"), env("0.6,0.5")).order, Order::Equal);
    EXPECT_THROW(erw::decide_order(env("0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5"), env("0.5")),
                 std::invalid_argument);
}

TEST(OrderProperty, AgreesWithUpSetSearch) {
    std::mt19937_64 rng(2025);
    std::uniform_int_distribution<int> len(1, 4);
    std::uniform_real_distribution<double> unit(0.02, 0.98);
    std::map<unsigned, std::vector<std::uint64_t>> ups;
    for (unsigned m = 1; m <= 4; ++m) ups[m] = oracle::up_sets(m);
    int comparable = 0;
    for (int t = 0; t < 1000; ++t) {
        const unsigned m = static_cast<unsigned>(len(rng));
        std::vector<double> a(m), b(m);
        for (unsigned j = 0; j < m; ++j) {
            a[j] = unit(rng);
            // bias towards comparable pairs: q usually a small upward shift of p
            b[j] = t % 2 ? unit(rng) : std::clamp(a[j] + 0.3 * (unit(rng) - 0.3), 0.01, 0.99);
        }
        const CookieEnvironment p(a), q(b);
        const double gap = oracle::strassen_violation(a, b, ups[m]);
        const auto v = erw::decide_order(p, q);
        const bool feasible = v.order != Order::Incomparable;
        if (gap > 1e-9) EXPECT_FALSE(feasible) << p.to_string() << " vs " << q.to_string() << " gap " << gap;
        if (gap == 0.0) EXPECT_TRUE(feasible) << p.to_string() << " vs " << q.to_string();
        if (feasible) {
            ++comparable;
            expect_valid(*v.certificate, p, q);
            // feasibility implies the cumulative condition
            for (std::size_t k = 1; k <= m; ++k) EXPECT_LE(CookieEnvironment::compare_prefix(p, q, k), 0);
            if (!(p == q)) EXPECT_EQ(v.order, Order::Strict);
        }
    }
    EXPECT_GT(comparable, 100);
}

TEST(OrderProperty, ReflexiveAndAntisymmetric) {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> digit(1, 9);
    for (int t = 0; t < 300; ++t) {
        std::string a, b;
        for (int j = 0; j < 3; ++j) {
            a += (j ? ",0." : "0.") + std::to_string(digit(rng));
            b += (j ? ",0." : "0.") + std::to_string(digit(rng));
        }
        const auto p = env(a.c_str()), q = env(b.c_str());
        EXPECT_EQ(erw::decide_order(p, p).order, Order::Equal);
        const auto pq = erw::decide_order(p, q).order, qp = erw::decide_order(q, p).order;
        if (pq != Order::Incomparable && qp != Order::Incomparable) {
            EXPECT_TRUE(p == q) << a << " " << b;
        }
        EXPECT_NE(pq, Order::WeakOnly);
    }
}

TEST(OrderProperty, SampledPairsKeepMarginalsAndDominance) {
    const auto p = env("0.3,0.8,0.6"), q = env("0.6,0.7,0.7");
    const auto sampler = erw::CoupledStoppedCountSampler(p, q, erw::build_coupling_table(p, q), erw::StopOn::Failure);
    erw::Rng rng(8);
    const int n = 100000;
    std::vector<double> y(3), z(3);
    for (int i = 0; i < n; ++i) {
        const auto& e = sampler.draw_joint(rng);
        ASSERT_TRUE(oracle::dominated(e.y, e.z, 3));
        for (unsigned j = 0; j < 3; ++j) {
            y[j] += (e.y >> j) & 1U;
            z[j] += (e.z >> j) & 1U;
        }
    }
    for (std::size_t j = 0; j < 3; ++j) {
        const double pj = p.probs()[j], qj = q.probs()[j];
        EXPECT_NEAR(y[j] / n, pj, 4 * std::sqrt(pj * (1 - pj) / n));
        EXPECT_NEAR(z[j] / n, qj, 4 * std::sqrt(qj * (1 - qj) / n));
    }
}

TEST(OrderProperty, CoupledCountsAreOrdered) {
    // S <= S' and F >= F' for every k on a coupled site
    const auto p = env("0.5,0.9"), q = env("0.9,0.5");
    const auto cf = erw::CoupledTrialField::from_order(p, q, 12);
    for (std::int64_t i = 0; i < 20000; ++i)
        for (std::uint64_t k = 0; k <= 10; ++k) {
            ASSERT_LE(erw::stopped_count(cf.first(), i, k, erw::StopOn::Failure),
                      erw::stopped_count(cf.second(), i, k, erw::StopOn::Failure));
            ASSERT_GE(erw::stopped_count(cf.first(), i, k, erw::StopOn::Success),
                      erw::stopped_count(cf.second(), i, k, erw::StopOn::Success));
        }
}
