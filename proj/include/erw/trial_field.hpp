// Seeded lazy fields of Bernoulli trials xi_{i,j}: the j-th trial at site i is
// Bernoulli(p_j) for j <= M and a fair coin afterwards.

#ifndef ERW_TRIAL_FIELD_HPP
#define ERW_TRIAL_FIELD_HPP

#include <bit>
#include <concepts>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

#include "erw/cookie_env.hpp"
#include "erw/rng.hpp"

namespace erw {

/// Anything that exposes per-site cookie trials (j = 1..M) and a packed fair
/// tail. Bit b of fair_word(site, w) is the trial j = M + 1 + 64 w + b.
template <class F>
concept TrialSource = requires(const F& f, std::int64_t site, std::uint64_t j) {
    { f.cookie_count() } -> std::convertible_to<std::size_t>;
    { f.cookie_trial(site, j) } -> std::same_as<bool>;
    { f.fair_word(site, j) } -> std::same_as<std::uint64_t>;
};

/// Random access to a trial of any TrialSource.
template <TrialSource F>
bool trial_at(const F& f, std::int64_t site, std::uint64_t j) {
    if (j == 0) throw std::invalid_argument("trial index starts at 1");
    const std::size_t m = f.cookie_count();
    if (j <= m) return f.cookie_trial(site, j);
    const std::uint64_t t = j - m - 1;
    return (f.fair_word(site, t / 64) >> (t % 64)) & 1U;
}

class TrialField {
public:
    TrialField(CookieEnvironment env, std::uint64_t seed) : env_(std::move(env)), seed_(seed) {}

    const CookieEnvironment& env() const { return env_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t cookie_count() const { return env_.size(); }

    bool cookie_trial(std::int64_t site, std::uint64_t j) const {
        return to_unit(counter_hash(seed_, site, StreamTag::Cookie, j)) < env_.cookie(j);
    }

    std::uint64_t fair_word(std::int64_t site, std::uint64_t w) const {
        return counter_hash(seed_, site, StreamTag::FairWord, w);
    }

    /// xi_{site, j}; j >= 1. Pure: does not touch the consumption counters.
    bool trial(std::int64_t site, std::uint64_t j) const { return trial_at(*this, site, j); }

    /// Next unconsumed trial at `site`; advances that site's counter.
    bool next(std::int64_t site) {
        auto& used = counters_[site];
        return trial(site, ++used);
    }

    std::uint64_t consumed(std::int64_t site) const {
        const auto it = counters_.find(site);
        return it == counters_.end() ? 0 : it->second;
    }

private:
    CookieEnvironment env_;
    std::uint64_t seed_;
    std::unordered_map<std::int64_t, std::uint64_t> counters_;
};

static_assert(TrialSource<TrialField>);

class TrialCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Which outcome terminates a stopped count.
enum class StopOn { Failure, Success };

/// Number of trials with the non-stopping outcome seen before the k-th
/// stopping outcome at `site`. StopOn::Failure gives S_{i,k}, StopOn::Success
/// gives F_{i,k}. k = 0 returns 0. The fair tail is scanned 64 trials at a time.
template <TrialSource F>
std::uint64_t stopped_count(const F& f, std::int64_t site, std::uint64_t k, StopOn stop) {
    if (k == 0) return 0;
    constexpr std::uint64_t kTrialCap = std::uint64_t{1} << 32;
    const bool stop_value = stop == StopOn::Success;
    const std::size_t m = f.cookie_count();
    std::uint64_t stops = 0;
    std::uint64_t counted = 0;
    for (std::size_t j = 1; j <= m; ++j) {
        if (f.cookie_trial(site, j) == stop_value) {
            if (++stops == k) return counted;
        } else {
            ++counted;
        }
    }
    for (std::uint64_t w = 0;; ++w) {
        if (64 * w > kTrialCap)
            throw TrialCapExceeded("more than 2^32 trials consumed at site " + std::to_string(site));
        const std::uint64_t word = f.fair_word(site, w);
        std::uint64_t stop_bits = stop_value ? word : ~word;
        const auto n_stop = static_cast<std::uint64_t>(std::popcount(stop_bits));
        if (stops + n_stop < k) {
            stops += n_stop;
            counted += 64 - n_stop;
            continue;
        }
        for (std::uint64_t need = k - stops; need > 1; --need) stop_bits &= stop_bits - 1;
        const auto pos = static_cast<std::uint64_t>(std::countr_zero(stop_bits));
        return counted + pos - (k - stops - 1);
    }
}

}  // namespace erw

#endif  // ERW_TRIAL_FIELD_HPP
