// Independent reference computations used only by the tests. Nothing here
// calls into the library's exact-law code.

#ifndef ERW_TESTS_ORACLES_HPP
#define ERW_TESTS_ORACLES_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

namespace oracle {

using Probs = std::vector<double>;

/// Binomial coefficients C(n, k) for n <= 127 as exact 128-bit integers.
inline const std::vector<std::vector<unsigned __int128>>& pascal() {
    static const auto table = [] {
        std::vector<std::vector<unsigned __int128>> t(128);
        for (std::size_t n = 0; n < t.size(); ++n) {
            t[n].assign(n + 1, 1);
            for (std::size_t k = 1; k < n; ++k) t[n][k] = t[n - 1][k - 1] + t[n - 1][k];
        }
        return t;
    }();
    return table;
}

inline long double choose(std::size_t n, std::size_t k) {
    if (k > n) return 0.0L;
    return static_cast<long double>(pascal().at(n).at(k));
}

/// Success probability of trial j (1-based).
inline double trial_p(const Probs& p, std::size_t j) { return j <= p.size() ? p[j - 1] : 0.5; }

/// Law of the count of non-stopping outcomes before the k-th stopping outcome,
/// for counts 0..m_max. Every binary string of the cookie prefix is visited
/// one by one; strings in the fair tail all have probability 2^-length, so
/// they are counted by class with exact binomial coefficients.
inline std::vector<long double> stopped_count_by_strings(const Probs& p, std::uint64_t k, bool stop_on_success,
                                                         std::uint64_t m_max) {
    std::vector<long double> out(m_max + 1, 0.0L);
    const std::size_t m = p.size();
    for (std::uint32_t y = 0; y < (1U << m); ++y) {
        long double w = 1.0L;
        std::uint64_t stops = 0, counted = 0;
        bool finished = false;
        for (std::size_t j = 0; j < m; ++j) {
            const bool bit = (y >> j) & 1U;
            w *= bit ? p[j] : 1.0 - p[j];
            if (finished) continue;  // later prefix bits are marginalised out
            if (bit == stop_on_success) {
                if (++stops == k) finished = true;
            } else {
                ++counted;
            }
        }
        if (finished) {
            if (counted <= m_max) out[counted] += w;
            continue;
        }
        const std::uint64_t r = k - stops;
        for (std::uint64_t g = 0; counted + g <= m_max; ++g) {
            // g non-stopping and r stopping outcomes, the last one stopping
            const long double strings = choose(g + r - 1, g);
            out[counted + g] += w * strings * std::ldexp(1.0L, -static_cast<int>(g + r));
        }
    }
    return out;
}

/// Same law by brute force over every binary string of length `len`:
/// exact for counts with count + k <= len.
inline std::map<std::uint64_t, std::vector<long double>> stopped_count_brute_force(const Probs& p, std::uint64_t k_max,
                                                                                    bool stop_on_success, unsigned len) {
    std::map<std::uint64_t, std::vector<long double>> out;
    for (std::uint64_t k = 1; k <= k_max; ++k) out[k].assign(len + 1, 0.0L);
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << len); ++s) {
        long double w = 1.0L;
        for (unsigned j = 0; j < len; ++j) w *= ((s >> j) & 1U) ? trial_p(p, j + 1) : 1.0 - trial_p(p, j + 1);
        std::uint64_t stops = 0;
        for (unsigned j = 0; j < len; ++j) {
            const bool bit = (s >> j) & 1U;
            if (bit == stop_on_success) {
                ++stops;
                if (stops <= k_max) out[stops][j + 1 - stops] += w;
            }
        }
    }
    return out;
}

/// P(X_1 = 1, T_0^+ = 2k) by brute force over all 2^{2k} step strings.
inline double excursion_by_strings(const Probs& p, unsigned k) {
    const unsigned len = 2 * k;
    double total = 0.0;
    for (std::uint32_t s = 0; s < (1U << len); ++s) {
        std::map<int, unsigned> visits;
        int x = 0;
        double w = 1.0;
        bool ok = true;
        visits[0] = 1;
        for (unsigned t = 0; t < len && ok; ++t) {
            const bool up = (s >> t) & 1U;
            const double right = trial_p(p, visits[x]);
            w *= up ? right : 1.0 - right;
            x += up ? 1 : -1;
            ++visits[x];
            if (t + 1 < len && x <= 0) ok = false;
        }
        if (ok && x == 0) total += w;
    }
    return total;
}

/// Prefix-sum dominance on {0,1}^m.
inline bool dominated(std::uint32_t y, std::uint32_t z, unsigned m) {
    int a = 0, b = 0;
    for (unsigned j = 0; j < m; ++j) {
        a += (y >> j) & 1U;
        b += (z >> j) & 1U;
        if (a > b) return false;
    }
    return true;
}

/// Every up-set of the dominance order on {0,1}^m, as bitmasks over outcomes.
inline std::vector<std::uint64_t> up_sets(unsigned m) {
    const unsigned n = 1U << m;
    std::vector<std::uint64_t> out;
    for (std::uint64_t set = 0; set < (std::uint64_t{1} << n); ++set) {
        bool closed = true;
        for (unsigned y = 0; y < n && closed; ++y) {
            if (!((set >> y) & 1U)) continue;
            for (unsigned z = 0; z < n && closed; ++z)
                if (dominated(y, z, m) && !((set >> z) & 1U)) closed = false;
        }
        if (closed) out.push_back(set);
    }
    return out;
}

inline double outcome_mass(const Probs& p, std::uint32_t x) {
    double w = 1.0;
    for (std::size_t j = 0; j < p.size(); ++j) w *= ((x >> j) & 1U) ? p[j] : 1.0 - p[j];
    return w;
}

/// A dominating coupling exists iff P_p(U) <= P_q(U) for every up-set U.
/// Returns the largest violation max_U (P_p(U) - P_q(U)), 0 when none.
inline double strassen_violation(const Probs& p, const Probs& q, const std::vector<std::uint64_t>& ups) {
    const unsigned m = static_cast<unsigned>(p.size());
    double worst = 0.0;
    for (auto set : ups) {
        double a = 0.0, b = 0.0;
        for (std::uint32_t x = 0; x < (1U << m); ++x) {
            if ((set >> x) & 1U) {
                a += outcome_mass(p, x);
                b += outcome_mass(q, x);
            }
        }
        worst = std::max(worst, a - b);
    }
    return worst;
}

/// Hand-written trial source: site -> explicit bits xi_1, xi_2, ...; bits past
/// the script alternate 1,0,1,0 so every stopped count terminates.
struct ScriptedField {
    std::size_t m = 0;
    std::unordered_map<std::int64_t, std::vector<bool>> bits;

    bool bit(std::int64_t site, std::uint64_t j) const {
        const auto it = bits.find(site);
        if (it != bits.end() && j <= it->second.size()) return it->second[j - 1];
        return j % 2 == 1;
    }
    std::size_t cookie_count() const { return m; }
    bool cookie_trial(std::int64_t site, std::uint64_t j) const { return bit(site, j); }
    std::uint64_t fair_word(std::int64_t site, std::uint64_t w) const {
        std::uint64_t out = 0;
        for (unsigned b = 0; b < 64; ++b)
            if (bit(site, m + 1 + 64 * w + b)) out |= std::uint64_t{1} << b;
        return out;
    }
};

/// Stopped count by stepping through the trials one at a time.
template <class F, class TrialAt>
std::uint64_t naive_stopped_count(const F& f, std::int64_t site, std::uint64_t k, bool stop_on_success, TrialAt trial_at) {
    std::uint64_t stops = 0, counted = 0;
    for (std::uint64_t j = 1; stops < k; ++j) {
        if (trial_at(f, site, j) == stop_on_success)
            ++stops;
        else
            ++counted;
    }
    return counted;
}

}  // namespace oracle

#endif  // ERW_TESTS_ORACLES_HPP
