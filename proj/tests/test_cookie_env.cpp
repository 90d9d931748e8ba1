#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <random>
#include <string>

#include "erw/cookie_env.hpp"

using erw::CookieEnvironment;
using erw::Recurrence;
using erw::SpeedSign;

namespace {

CookieEnvironment env(const std::string& s) { return CookieEnvironment::parse(s); }

// two-digit decimals "0.01" .. "0.99"
std::string join(const std::vector<int>& units) {
    std::string s;
    char buf[8];
    for (std::size_t j = 0; j < units.size(); ++j) {
        std::snprintf(buf, sizeof buf, "0.%02d", units[j]);
        s += (j ? "," : "") + std::string(buf);
    }
    return s;
}

}  // namespace

TEST(CookieEnv, DriftExamples) {
    EXPECT_EQ(env("0.5,0.5").drift(), 0.0);
    EXPECT_EQ(CookieEnvironment{}.drift(), 0.0);
    EXPECT_NEAR(env("0.7,0.8,0.9").drift(), 1.8, 1e-15);
    EXPECT_EQ(erw::total_drift(env("0.9,0.8")), env("0.9,0.8").drift());
}

TEST(CookieEnv, ClassifyExamples) {
    auto r = erw::classify(env("0.9,0.9,0.9"));
    EXPECT_EQ(r.recurrence, Recurrence::TransientRight);
    EXPECT_EQ(r.speed_sign, SpeedSign::Positive);

    r = erw::classify(env("0.5,0.5"));
    EXPECT_EQ(r.recurrence, Recurrence::RecurrentOscillating);
    EXPECT_EQ(r.speed_sign, SpeedSign::Zero);

    r = erw::classify(env("0.9,0.9"));
    EXPECT_EQ(r.recurrence, Recurrence::TransientRight);
    EXPECT_EQ(r.speed_sign, SpeedSign::Zero);

    r = erw::classify(CookieEnvironment{});
    EXPECT_EQ(r.recurrence, Recurrence::RecurrentOscillating);
}

TEST(CookieEnv, BoundaryDecimalsAreExact) {
    // drift exactly 2.0; summed in doubles it comes out as 1.9999999999999998
    const auto e = env("0.57,0.94,0.99");
    EXPECT_LT(e.drift(), 2.0);
    EXPECT_TRUE(e.exact());
    EXPECT_EQ(e.compare_drift(2), 0);
    EXPECT_EQ(erw::classify(e).speed_sign, SpeedSign::Zero);
    EXPECT_EQ(erw::classify(e).recurrence, Recurrence::TransientRight);
    EXPECT_EQ(env("0.7,0.9,0.9").compare_drift(2), 0);

    EXPECT_EQ(env("0.6,0.4,0.5,0.5").compare_drift(0), 0);
    EXPECT_EQ(erw::classify(env("1e-1,0.9,0.5")).recurrence, Recurrence::RecurrentOscillating);  // floating path
    EXPECT_EQ(env("0.75,0.75").compare_drift(1), 0);
    EXPECT_EQ(erw::classify(env("0.75,0.75")).recurrence, Recurrence::RecurrentOscillating);
    EXPECT_EQ(erw::classify(env("0.25,0.25")).recurrence, Recurrence::RecurrentOscillating);
    EXPECT_EQ(erw::classify(env("0.1,0.1,0.3")).speed_sign, SpeedSign::Zero);  // drift -2.0
    EXPECT_EQ(erw::classify(env("0.1,0.1,0.29")).speed_sign, SpeedSign::Negative);
}

TEST(CookieEnv, MirrorExamples) {
    EXPECT_EQ(env("0.9,0.8").mirror(), env("0.1,0.2"));
    EXPECT_EQ(env("0.5").mirror(), env("0.5"));
    const auto m = erw::mirror(env("0.7,0.8,0.9"));
    EXPECT_EQ(m, env("0.3,0.2,0.1"));
    EXPECT_NEAR(m.drift(), -1.8, 1e-15);
}

TEST(CookieEnv, RejectsClosedEndpoints) {
    EXPECT_THROW(env("0.5,1.0"), std::invalid_argument);
    EXPECT_THROW(env("0"), std::invalid_argument);
    EXPECT_THROW(env("-0.2"), std::invalid_argument);
    EXPECT_THROW(CookieEnvironment(std::vector<double>{0.3, 1.0}), std::invalid_argument);
    EXPECT_THROW(CookieEnvironment(std::vector<double>{std::nan("")}), std::invalid_argument);
    EXPECT_THROW(env("0.5,,0.5"), std::invalid_argument);
    EXPECT_THROW(env("abc"), std::invalid_argument);
}

TEST(CookieEnv, ParseForms) {
    EXPECT_EQ(env("").size(), 0U);
    EXPECT_EQ(env("(0.9, 0.8)"), env("0.9,0.8"));
    EXPECT_EQ(env("0.90"), env("0.9"));
    EXPECT_EQ(env("0.9,0.8").to_string(), "0.9,0.8");
    EXPECT_EQ(env("0.9").padded(3), env("0.9,0.5,0.5"));
}

TEST(CookieEnvProperty, MirrorNegatesDriftAndSwapsRegime) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> len(0, 6), digit(1, 99);
    for (int t = 0; t < 2000; ++t) {
        std::vector<int> units(static_cast<std::size_t>(len(rng)));
        for (auto& u : units) u = digit(rng);
        const auto s = join(units);
        const auto e = env(s);
        const auto r = erw::classify(e), rm = erw::classify(e.mirror());
        EXPECT_NEAR(e.mirror().drift(), -e.drift(), 1e-12);
        const auto swap_rec = [](Recurrence x) {
            return x == Recurrence::TransientRight ? Recurrence::TransientLeft
                   : x == Recurrence::TransientLeft ? Recurrence::TransientRight
                                                     : x;
        };
        const auto swap_sign = [](SpeedSign x) {
            return x == SpeedSign::Positive ? SpeedSign::Negative : x == SpeedSign::Negative ? SpeedSign::Positive : x;
        };
        EXPECT_EQ(rm.recurrence, swap_rec(r.recurrence)) << s;
        EXPECT_EQ(rm.speed_sign, swap_sign(r.speed_sign)) << s;
        if (r.speed_sign == SpeedSign::Positive) EXPECT_EQ(r.recurrence, Recurrence::TransientRight);
        if (r.speed_sign == SpeedSign::Negative) EXPECT_EQ(r.recurrence, Recurrence::TransientLeft);
    }
}

TEST(CookieEnvProperty, ClassifyDependsOnDriftOnly) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> digit(1, 99);
    for (int t = 0; t < 1000; ++t) {
        std::vector<int> units(4);
        for (auto& u : units) u = digit(rng);
        auto perm = units;
        std::shuffle(perm.begin(), perm.end(), rng);
        const auto a = env(join(units)), b = env(join(perm));
        EXPECT_EQ(erw::classify(a), erw::classify(b));
    }
}
