// Direct samplers for the laws of S_{.,k} and F_{.,k}. They draw the M cookie
// trials one by one and finish with a single negative binomial variate for
// the fair tail, so a chain step costs O(M) regardless of k. Used for bulk
// Monte Carlo where only the law (not a shared field) matters.

#ifndef ERW_SAMPLERS_HPP
#define ERW_SAMPLERS_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <boost/random/poisson_distribution.hpp>

#include "erw/coupling.hpp"
#include "erw/trial_field.hpp"

namespace erw {

using Rng = std::mt19937_64;

/// Other outcomes seen before r stopping outcomes of a fair coin. Small r
/// scans raw generator words as 64 coin flips at a time; large r uses the
/// gamma-Poisson mixture.
inline std::uint64_t fair_negative_binomial(std::uint64_t r, Rng& rng) {
    if (r == 0) return 0;
    if (r <= 128) {
        std::uint64_t need = r, other = 0;
        while (true) {
            std::uint64_t w = rng();
            const auto ones = static_cast<std::uint64_t>(std::popcount(w));
            if (ones < need) {
                need -= ones;
                other += 64 - ones;
                continue;
            }
            for (std::uint64_t i = 1; i < need; ++i) w &= w - 1;
            return other + static_cast<std::uint64_t>(std::countr_zero(w)) - (need - 1);
        }
    }
    std::gamma_distribution<double> gamma(static_cast<double>(r), 1.0);
    boost::random::poisson_distribution<std::uint64_t, double> poisson(gamma(rng));
    return poisson(rng);
}

namespace detail {

/// State after the cookie trials of one site.
struct CookieOutcome {
    bool done = false;
    std::uint64_t counted = 0;
    std::uint64_t remaining = 0;  // stopping outcomes still needed in the fair tail
};

/// `bits` holds the cookie trials (bit j-1 = trial j).
inline CookieOutcome run_cookies(std::uint32_t bits, std::size_t m, std::uint64_t k, StopOn stop) {
    CookieOutcome out;
    if (k == 0) {
        out.done = true;
        return out;
    }
    const bool stop_value = stop == StopOn::Success;
    std::uint64_t stops = 0;
    for (std::size_t j = 0; j < m; ++j) {
        if ((((bits >> j) & 1U) != 0) == stop_value) {
            if (++stops == k) {
                out.done = true;
                return out;
            }
        } else {
            ++out.counted;
        }
    }
    out.remaining = k - stops;
    return out;
}

}  // namespace detail

class StoppedCountSampler {
public:
    StoppedCountSampler(CookieEnvironment env, StopOn stop) : env_(std::move(env)), stop_(stop) {
        if (env_.size() > 32) throw std::invalid_argument("sampler supports at most 32 cookies");
    }

    const CookieEnvironment& env() const { return env_; }

    std::uint64_t operator()(std::uint64_t k, Rng& rng) const {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::uint32_t bits = 0;
        for (std::size_t j = 0; j < env_.size(); ++j)
            if (unit(rng) < env_.probs()[j]) bits |= std::uint32_t{1} << j;
        const auto c = detail::run_cookies(bits, env_.size(), k, stop_);
        return c.done ? c.counted : c.counted + fair_negative_binomial(c.remaining, rng);
    }

private:
    CookieEnvironment env_;
    StopOn stop_;
};

/// Joint law of (count for p, count for q) at one site of a coupled field:
/// one joint cookie draw from the coupling table and a shared fair tail. The
/// tail shared by both counts is drawn once; the count needing more stopping
/// outcomes gets an independent negative binomial increment on top.
class CoupledStoppedCountSampler {
public:
    CoupledStoppedCountSampler(const CookieEnvironment& p, const CookieEnvironment& q, CouplingTable table, StopOn stop)
        : table_(std::move(table)), stop_(stop) {
        auto [pp, qq] = common_length(p, q);
        if (table_.length != pp.size()) throw CorruptedCouplingTable("coupling table length mismatch");
        if (auto bad = coupling_violation(table_, pp, qq)) throw CorruptedCouplingTable(*bad);
        double acc = 0.0;
        for (const auto& e : table_.support) cumulative_.push_back(acc += e.mass);
    }

    const CouplingEntry& draw_joint(Rng& rng) const {
        std::uniform_real_distribution<double> unit(0.0, cumulative_.back());
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), unit(rng));
        if (it == cumulative_.end()) --it;
        return table_.support[static_cast<std::size_t>(it - cumulative_.begin())];
    }

    std::pair<std::uint64_t, std::uint64_t> operator()(std::uint64_t k, std::uint64_t k2, Rng& rng) const {
        const auto& e = draw_joint(rng);
        const auto a = detail::run_cookies(e.y, table_.length, k, stop_);
        const auto b = detail::run_cookies(e.z, table_.length, k2, stop_);
        const std::uint64_t ra = a.done ? 0 : a.remaining;
        const std::uint64_t rb = b.done ? 0 : b.remaining;
        const std::uint64_t shared = fair_negative_binomial(std::min(ra, rb), rng);
        const std::uint64_t extra = fair_negative_binomial(ra > rb ? ra - rb : rb - ra, rng);
        return {a.counted + (ra == 0 ? 0 : shared + (ra > rb ? extra : 0)),
                b.counted + (rb == 0 ? 0 : shared + (rb > ra ? extra : 0))};
    }

private:
    CouplingTable table_;
    StopOn stop_;
    std::vector<double> cumulative_;
};

}  // namespace erw

#endif  // ERW_SAMPLERS_HPP
