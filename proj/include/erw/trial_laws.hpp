// Exact laws of stopped counts on one site's trial sequence: the number of
// "other" outcomes seen before the k-th stopping outcome. The M cookie trials
// are handled by dynamic programming over (stops, counted); the fair tail is
// completed in closed form by the negative binomial law with parameter 1/2.

#ifndef ERW_TRIAL_LAWS_HPP
#define ERW_TRIAL_LAWS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/distributions/negative_binomial.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "erw/cookie_env.hpp"
#include "erw/trial_field.hpp"

namespace erw {

/// P(G = g), g = 0..g_max, where G counts failures before the r-th success of
/// fair coin flips. Evaluated from the mode outwards by ratio recurrences, so
/// large r neither underflows nor loses relative accuracy.
inline std::vector<double> fair_negative_binomial_pmf(std::uint64_t r, std::uint64_t g_max) {
    std::vector<double> out(g_max + 1, 0.0);
    if (r == 0) {
        out[0] = 1.0;
        return out;
    }
    const std::uint64_t mode = std::min<std::uint64_t>(r - 1, g_max);
    const boost::math::negative_binomial_distribution<double> nb(static_cast<double>(r), 0.5);
    out[mode] = boost::math::pdf(nb, static_cast<double>(mode));
    // P(g) / P(g-1) = (g + r - 1) / (2 g)
    for (std::uint64_t g = mode + 1; g <= g_max; ++g) {
        out[g] = out[g - 1] * static_cast<double>(g + r - 1) / (2.0 * static_cast<double>(g));
        if (out[g] == 0.0) break;
    }
    for (std::uint64_t g = mode; g > 0; --g) {
        out[g - 1] = out[g] * 2.0 * static_cast<double>(g) / static_cast<double>(g + r - 1);
        if (out[g - 1] == 0.0) break;
    }
    return out;
}

/// P(G > t) for the same G; t < 0 gives 1.
inline double fair_negative_binomial_sf(std::uint64_t r, std::int64_t t) {
    if (t < 0) return 1.0;
    if (r == 0) return 0.0;
    return boost::math::ibetac(static_cast<double>(r), static_cast<double>(t) + 1.0, 0.5);
}

/// Law of a stopped count, truncated at m_max with the exact remaining mass.
struct StoppedLaw {
    std::vector<double> mass;  // P(count = m), m = 0..m_max
    double tail = 0.0;         // P(count > m_max)
    double mean = 0.0;         // E[count], exact
    double second_moment = 0.0;  // E[count^2], exact

    double total() const {
        double t = tail;
        for (double w : mass) t += w;
        return t;
    }
};

/// Distribution of the cookie phase: weight of each (stops, counted) state after
/// the M cookie trials, split into finished (stops == k) and live states.
struct CookiePhase {
    struct State {
        std::uint64_t stops;
        std::uint64_t counted;
        double weight;
    };
    std::vector<State> finished;
    std::vector<State> live;
};

inline CookiePhase cookie_phase(const CookieEnvironment& env, std::uint64_t k, StopOn stop) {
    const std::size_t m = env.size();
    // weight[s][c] over states still running; s < k
    std::vector<std::vector<double>> weight(std::min<std::uint64_t>(k, m + 1), std::vector<double>(m + 1, 0.0));
    CookiePhase out;
    if (k == 0) {
        out.finished.push_back({0, 0, 1.0});
        return out;
    }
    weight[0][0] = 1.0;
    for (std::size_t j = 1; j <= m; ++j) {
        const double p = env.cookie(j);
        const double p_stop = stop == StopOn::Success ? p : 1.0 - p;
        std::vector<std::vector<double>> next(weight.size(), std::vector<double>(m + 1, 0.0));
        for (std::size_t s = 0; s < weight.size(); ++s) {
            for (std::size_t c = 0; c + s < j; ++c) {
                const double w = weight[s][c];
                if (w == 0.0) continue;
                if (s + 1 == k)
                    out.finished.push_back({s + 1, c, w * p_stop});
                else
                    next[s + 1][c] += w * p_stop;
                next[s][c + 1] += w * (1.0 - p_stop);
            }
        }
        weight.swap(next);
    }
    for (std::size_t s = 0; s < weight.size(); ++s)
        for (std::size_t c = 0; c <= m; ++c)
            if (weight[s][c] != 0.0) out.live.push_back({s, c, weight[s][c]});
    return out;
}

/// Exact law of the count of non-stopping outcomes before the k-th stopping
/// outcome: StopOn::Failure gives S_{.,k}, StopOn::Success gives F_{.,k}.
inline StoppedLaw stopped_count_law(const CookieEnvironment& env, std::uint64_t k, StopOn stop, std::uint64_t m_max) {
    StoppedLaw law;
    law.mass.assign(m_max + 1, 0.0);
    const auto phase = cookie_phase(env, k, stop);
    for (const auto& st : phase.finished) {
        if (st.counted <= m_max)
            law.mass[st.counted] += st.weight;
        else
            law.tail += st.weight;
        const auto c = static_cast<double>(st.counted);
        law.mean += st.weight * c;
        law.second_moment += st.weight * c * c;
    }
    for (const auto& st : phase.live) {
        const std::uint64_t r = k - st.stops;
        const auto c = static_cast<double>(st.counted);
        const auto rd = static_cast<double>(r);
        law.mean += st.weight * (c + rd);
        law.second_moment += st.weight * (c * c + 2.0 * c * rd + 2.0 * rd + rd * rd);
        law.tail += st.weight * fair_negative_binomial_sf(r, static_cast<std::int64_t>(m_max) - static_cast<std::int64_t>(st.counted));
        if (st.counted > m_max) continue;
        const auto pmf = fair_negative_binomial_pmf(r, m_max - st.counted);
        for (std::uint64_t g = 0; g < pmf.size(); ++g) law.mass[st.counted + g] += st.weight * pmf[g];
    }
    return law;
}

}  // namespace erw

#endif  // ERW_TRIAL_LAWS_HPP
