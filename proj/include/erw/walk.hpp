// Excited random walk driven by a trial field: on the j-th visit to site i the
// walk steps right iff xi_{i,j} = 1. Path statistics for the excursion and
// hitting-time decompositions are extracted from the trace.

#ifndef ERW_WALK_HPP
#define ERW_WALK_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "erw/trial_field.hpp"

namespace erw {

/// Per-site counters on Z, stored densely on both half-lines.
class SiteCounter {
public:
    std::uint64_t get(std::int64_t x) const {
        const auto& v = x >= 0 ? nonneg_ : neg_;
        const auto i = index(x);
        return i < v.size() ? v[i] : 0;
    }

    /// Increments the counter at x and returns the new value.
    std::uint64_t bump(std::int64_t x) {
        auto& v = x >= 0 ? nonneg_ : neg_;
        const auto i = index(x);
        if (i >= v.size()) v.resize(std::max<std::size_t>(i + 1, 2 * v.size()), 0);
        return ++v[i];
    }

    void clear() {
        nonneg_.clear();
        neg_.clear();
    }

private:
    static std::size_t index(std::int64_t x) { return x >= 0 ? static_cast<std::size_t>(x) : static_cast<std::size_t>(-x - 1); }

    std::vector<std::uint64_t> nonneg_, neg_;
};

struct WalkTrace {
    /// X_0 = 0, X_1, ..., X_H.
    std::vector<std::int64_t> positions;
    /// Visits to each site among X_0..X_H.
    SiteCounter visits;

    std::size_t horizon() const { return positions.empty() ? 0 : positions.size() - 1; }
};

/// Runs the walk for exactly `horizon` steps.
template <TrialSource F>
WalkTrace run_walk(const F& field, std::size_t horizon) {
    if (horizon == 0) throw std::invalid_argument("run_walk: horizon must be positive");
    WalkTrace trace;
    trace.positions.reserve(horizon + 1);
    std::int64_t x = 0;
    trace.positions.push_back(x);
    for (std::size_t n = 0; n < horizon; ++n) {
        const auto visit = trace.visits.bump(x);
        x += trial_at(field, x, visit) ? 1 : -1;
        trace.positions.push_back(x);
    }
    trace.visits.bump(x);
    return trace;
}

struct ExcursionStats {
    /// T_0^+, nullopt when censored at the horizon.
    std::optional<std::int64_t> first_return;
    bool first_step_right = false;
    /// U_i for i = 0..size-1; U_i = 0 beyond.
    std::vector<std::uint64_t> right_crossings;

    std::uint64_t total_right_crossings() const {
        std::uint64_t s = 0;
        for (auto u : right_crossings) s += u;
        return s;
    }
};

class PathIdentityViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

namespace detail {

inline void check_excursion_identities(const ExcursionStats& s) {
    const auto twice = 2 * s.total_right_crossings();
    if (!s.first_step_right && twice != 0) throw PathIdentityViolation("U_i nonzero although X_1 = -1");
    if (s.first_step_right && s.first_return && static_cast<std::int64_t>(twice) != *s.first_return)
        throw PathIdentityViolation("T_0^+ != 2 sum U_i on a finite right excursion");
}

}  // namespace detail

inline ExcursionStats excursion_stats(const WalkTrace& trace) {
    if (trace.positions.size() < 2) throw std::invalid_argument("excursion_stats: trace has no steps");
    ExcursionStats out;
    const auto& x = trace.positions;
    out.first_step_right = x[1] == 1;
    for (std::size_t n = 0; n + 1 < x.size(); ++n) {
        if (n > 0 && x[n] == 0) {
            out.first_return = static_cast<std::int64_t>(n);
            break;
        }
        if (x[n] >= 0 && x[n + 1] == x[n] + 1) {
            const auto i = static_cast<std::size_t>(x[n]);
            if (i >= out.right_crossings.size()) out.right_crossings.resize(i + 1, 0);
            ++out.right_crossings[i];
        }
    }
    if (!out.first_return && x.back() == 0) out.first_return = static_cast<std::int64_t>(x.size() - 1);
    detail::check_excursion_identities(out);
    return out;
}

/// Same statistics as excursion_stats, computed while walking: the walk stops
/// at its first return to 0 or after `horizon` steps.
template <TrialSource F>
ExcursionStats run_excursion(const F& field, std::uint64_t horizon, SiteCounter& scratch) {
    if (horizon == 0) throw std::invalid_argument("run_excursion: horizon must be positive");
    scratch.clear();
    ExcursionStats out;
    std::int64_t x = 0;
    for (std::uint64_t k = 0; k < horizon; ++k) {
        const auto next = x + (trial_at(field, x, scratch.bump(x)) ? 1 : -1);
        if (k == 0) out.first_step_right = next == 1;
        if (x >= 0 && next == x + 1) {
            const auto i = static_cast<std::size_t>(x);
            if (i >= out.right_crossings.size()) out.right_crossings.resize(i + 1, 0);
            ++out.right_crossings[i];
        }
        x = next;
        if (x == 0) {
            out.first_return = static_cast<std::int64_t>(k + 1);
            break;
        }
    }
    detail::check_excursion_identities(out);
    return out;
}

struct HittingStats {
    std::int64_t level = 0;
    /// T_n, nullopt when censored.
    std::optional<std::int64_t> hitting_time;
    /// #{k < T_n : X_k >= 0} (counted up to the horizon when censored).
    std::int64_t time_nonneg = 0;
    /// D_x^n for x from the lowest visited site up to n.
    std::map<std::int64_t, std::uint64_t> left_jumps;

    std::uint64_t left_jumps_at(std::int64_t x) const {
        const auto it = left_jumps.find(x);
        return it == left_jumps.end() ? 0 : it->second;
    }
};

namespace detail {

inline void check_hitting_identities(const HittingStats& h) {
    if (!h.hitting_time) return;
    std::int64_t all = 0, pos = 0;
    for (const auto& [x, d] : h.left_jumps) {
        all += static_cast<std::int64_t>(d);
        if (x >= 1) pos += static_cast<std::int64_t>(d);
    }
    if (*h.hitting_time != h.level + 2 * all) throw PathIdentityViolation("T_n != n + 2 sum_x D_x^n");
    if (h.time_nonneg != h.level + 2 * pos + static_cast<std::int64_t>(h.left_jumps_at(0)))
        throw PathIdentityViolation("time at nonnegative sites != n + 2 sum_{x>=1} D_x^n + D_0^n");
}

class HittingAccumulator {
public:
    explicit HittingAccumulator(std::int64_t n) : level_(n) {}

    /// Records the step x -> next taken at time k; returns true once n is hit.
    bool step(std::int64_t k, std::int64_t x, std::int64_t next) {
        if (x >= 0) ++time_nonneg_;
        if (next == x - 1) {
            left_.bump(x);
            lowest_ = std::min(lowest_, x);
        }
        if (next == level_) {
            hitting_time_ = k + 1;
            return true;
        }
        return false;
    }

    HittingStats finish() const {
        HittingStats out;
        out.level = level_;
        out.hitting_time = hitting_time_;
        out.time_nonneg = time_nonneg_;
        for (std::int64_t x = std::min<std::int64_t>(lowest_, 0); x <= level_; ++x) out.left_jumps[x] = left_.get(x);
        check_hitting_identities(out);
        return out;
    }

private:
    std::int64_t level_;
    std::optional<std::int64_t> hitting_time_;
    std::int64_t time_nonneg_ = 0;
    std::int64_t lowest_ = 0;
    SiteCounter left_;
};

}  // namespace detail

inline HittingStats hitting_stats(const WalkTrace& trace, std::int64_t n) {
    if (n < 1) throw std::invalid_argument("hitting_stats: level must be >= 1");
    detail::HittingAccumulator acc(n);
    const auto& x = trace.positions;
    for (std::size_t k = 0; k + 1 < x.size(); ++k)
        if (acc.step(static_cast<std::int64_t>(k), x[k], x[k + 1])) break;
    return acc.finish();
}

/// Runs the walk until it first hits n (or `max_steps` steps) without storing the path.
template <TrialSource F>
HittingStats walk_to_level(const F& field, std::int64_t n, std::uint64_t max_steps) {
    if (n < 1) throw std::invalid_argument("walk_to_level: level must be >= 1");
    detail::HittingAccumulator acc(n);
    SiteCounter visits;
    std::int64_t x = 0;
    for (std::uint64_t k = 0; k < max_steps; ++k) {
        const auto next = x + (trial_at(field, x, visits.bump(x)) ? 1 : -1);
        if (acc.step(static_cast<std::int64_t>(k), x, next)) break;
        x = next;
    }
    return acc.finish();
}

/// First step and first return time to 0 (nullopt if none within `horizon`
/// steps), without storing the path.
struct ReturnObservation {
    bool first_step_right = false;
    std::optional<std::int64_t> first_return;
};

template <TrialSource F>
ReturnObservation observe_return(const F& field, std::uint64_t horizon, SiteCounter& scratch) {
    scratch.clear();
    ReturnObservation out;
    std::int64_t x = 0;
    for (std::uint64_t k = 0; k < horizon; ++k) {
        x += trial_at(field, x, scratch.bump(x)) ? 1 : -1;
        if (k == 0) out.first_step_right = x == 1;
        if (x == 0) {
            out.first_return = static_cast<std::int64_t>(k + 1);
            break;
        }
    }
    return out;
}

}  // namespace erw

#endif  // ERW_WALK_HPP
