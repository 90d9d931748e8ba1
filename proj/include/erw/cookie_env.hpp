// Cookie environments: the vector of cookie strengths, its total drift and the
// recurrence/ballisticity classification that depends on the drift alone.

#ifndef ERW_COOKIE_ENV_HPP
#define ERW_COOKIE_ENV_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace erw {

/// Exact decimal fraction `units * 10^-scale`, used to classify user-entered
/// environments without floating ambiguity at the thresholds.
struct Decimal {
    std::int64_t units = 0;
    int scale = 0;

    static constexpr int kMaxScale = 18;

    double value() const { return static_cast<double>(units) / std::pow(10.0, scale); }

    /// Accepts `[+-]digits[.digits]` or `.digits`; anything else (exponents,
    /// more than 18 fractional digits) yields nullopt.
    static std::optional<Decimal> parse(std::string_view s) {
        bool negative = false;
        if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
            negative = s.front() == '-';
            s.remove_prefix(1);
        }
        if (s.empty()) return std::nullopt;
        const auto dot = s.find('.');
        std::string_view whole = s.substr(0, dot);
        std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
        if (whole.empty() && frac.empty()) return std::nullopt;
        if (frac.size() > static_cast<std::size_t>(kMaxScale)) return std::nullopt;
        auto all_digits = [](std::string_view t) {
            return std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; });
        };
        if (!all_digits(whole) || !all_digits(frac)) return std::nullopt;
        __int128 acc = 0;
        for (char c : whole) {
            acc = acc * 10 + (c - '0');
            if (acc > INT64_MAX) return std::nullopt;
        }
        for (char c : frac) {
            acc = acc * 10 + (c - '0');
            if (acc > INT64_MAX) return std::nullopt;
        }
        Decimal d;
        d.units = static_cast<std::int64_t>(negative ? -acc : acc);
        d.scale = static_cast<int>(frac.size());
        return d;
    }

    std::string to_string() const {
        std::string digits = std::to_string(units < 0 ? -units : units);
        if (scale > 0) {
            if (digits.size() <= static_cast<std::size_t>(scale))
                digits.insert(0, static_cast<std::size_t>(scale) + 1 - digits.size(), '0');
            digits.insert(digits.size() - static_cast<std::size_t>(scale), ".");
        }
        return units < 0 ? "-" + digits : digits;
    }
};

inline __int128 pow10_i128(int e) {
    __int128 r = 1;
    for (int i = 0; i < e; ++i) r *= 10;
    return r;
}

enum class Recurrence { TransientRight, TransientLeft, RecurrentOscillating };
enum class SpeedSign { Positive, Zero, Negative };

struct Regime {
    Recurrence recurrence = Recurrence::RecurrentOscillating;
    SpeedSign speed_sign = SpeedSign::Zero;

    friend bool operator==(const Regime&, const Regime&) = default;
};

inline std::string to_string(Recurrence r) {
    switch (r) {
        case Recurrence::TransientRight: return "TransientRight";
        case Recurrence::TransientLeft: return "TransientLeft";
        case Recurrence::RecurrentOscillating: return "RecurrentOscillating";
    }
    return "?";
}

inline std::string to_string(SpeedSign s) {
    switch (s) {
        case SpeedSign::Positive: return "Positive";
        case SpeedSign::Zero: return "Zero";
        case SpeedSign::Negative: return "Negative";
    }
    return "?";
}

class CookieEnvironment {
public:
    /// M = 0: simple symmetric random walk.
    CookieEnvironment() = default;

    /// Environment from floating values. Drift comparisons are then done in
    /// double arithmetic.
    explicit CookieEnvironment(std::vector<double> probs) : probs_(std::move(probs)) { validate(); }

    static CookieEnvironment from_decimals(std::vector<Decimal> decimals) {
        CookieEnvironment env;
        env.probs_.reserve(decimals.size());
        for (const auto& d : decimals) env.probs_.push_back(d.value());
        env.decimals_ = std::move(decimals);
        env.validate();
        return env;
    }

    /// Comma-separated list such as "0.9,0.8,0.7". The empty string (or "-")
    /// is the empty environment.
    static CookieEnvironment parse(std::string_view text) {
        auto trim = [](std::string_view t) {
            while (!t.empty() && (t.front() == ' ' || t.front() == '\t')) t.remove_prefix(1);
            while (!t.empty() && (t.back() == ' ' || t.back() == '\t')) t.remove_suffix(1);
            return t;
        };
        text = trim(text);
        if (text.empty() || text == "-" || text == "()") return CookieEnvironment{};
        if (text.front() == '(' && text.back() == ')') text = trim(text.substr(1, text.size() - 2));
        std::vector<Decimal> exact;
        std::vector<double> approx;
        bool all_exact = true;
        std::size_t start = 0;
        while (true) {
            const auto comma = text.find(',', start);
            const auto token = trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
            if (token.empty()) throw std::invalid_argument("empty entry in cookie environment \"" + std::string(text) + "\"");
            if (auto d = Decimal::parse(token)) {
                exact.push_back(*d);
                approx.push_back(d->value());
            } else {
                double v = 0.0;
                const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
                if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
                    throw std::invalid_argument("cannot parse cookie strength \"" + std::string(token) + "\"");
                approx.push_back(v);
                all_exact = false;
            }
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (all_exact) return from_decimals(std::move(exact));
        return CookieEnvironment(std::move(approx));
    }

    std::size_t size() const { return probs_.size(); }
    bool empty() const { return probs_.empty(); }

    /// Strength of the j-th cookie, j = 1..M.
    double cookie(std::size_t j) const { return probs_.at(j - 1); }
    std::span<const double> probs() const { return probs_; }

    bool exact() const { return decimals_.has_value(); }
    const std::optional<std::vector<Decimal>>& decimals() const { return decimals_; }

    double drift() const {
        double d = 0.0;
        for (double p : probs_) d += 2.0 * p - 1.0;
        return d;
    }

    /// Sign of (drift - threshold), exact for decimal environments.
    int compare_drift(int threshold) const {
        if (decimals_) {
            int scale = 0;
            for (const auto& d : *decimals_) scale = std::max(scale, d.scale);
            const __int128 one = pow10_i128(scale);
            __int128 sum = 0;
            for (const auto& d : *decimals_) sum += 2 * (static_cast<__int128>(d.units) * pow10_i128(scale - d.scale)) - one;
            const __int128 target = static_cast<__int128>(threshold) * one;
            return sum < target ? -1 : (sum > target ? 1 : 0);
        }
        const double d = drift();
        return d < threshold ? -1 : (d > threshold ? 1 : 0);
    }

    /// Sign of (sum_{j<=m} p_j - sum_{j<=m} q_j), exact when both are decimal.
    static int compare_prefix(const CookieEnvironment& p, const CookieEnvironment& q, std::size_t m) {
        if (p.decimals_ && q.decimals_) {
            int scale = 0;
            for (std::size_t j = 0; j < m; ++j) scale = std::max({scale, (*p.decimals_)[j].scale, (*q.decimals_)[j].scale});
            __int128 diff = 0;
            for (std::size_t j = 0; j < m; ++j) {
                const auto& a = (*p.decimals_)[j];
                const auto& b = (*q.decimals_)[j];
                diff += static_cast<__int128>(a.units) * pow10_i128(scale - a.scale);
                diff -= static_cast<__int128>(b.units) * pow10_i128(scale - b.scale);
            }
            return diff < 0 ? -1 : (diff > 0 ? 1 : 0);
        }
        double sp = 0.0, sq = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            sp += p.probs_[j];
            sq += q.probs_[j];
        }
        return sp < sq ? -1 : (sp > sq ? 1 : 0);
    }

    /// Entries 1 - p_j in the same order.
    CookieEnvironment mirror() const {
        if (decimals_) {
            std::vector<Decimal> out;
            out.reserve(decimals_->size());
            for (const auto& d : *decimals_) out.push_back({static_cast<std::int64_t>(pow10_i128(d.scale)) - d.units, d.scale});
            return from_decimals(std::move(out));
        }
        std::vector<double> out;
        out.reserve(probs_.size());
        for (double p : probs_) out.push_back(1.0 - p);
        return CookieEnvironment(std::move(out));
    }

    /// Appends strength-1/2 cookies up to length m (no-op when already long enough).
    CookieEnvironment padded(std::size_t m) const {
        if (m <= size()) return *this;
        if (decimals_) {
            auto out = *decimals_;
            out.resize(m, Decimal{5, 1});
            return from_decimals(std::move(out));
        }
        auto out = probs_;
        out.resize(m, 0.5);
        return CookieEnvironment(std::move(out));
    }

    std::string to_string() const {
        std::ostringstream os;
        for (std::size_t j = 0; j < size(); ++j) {
            if (j) os << ',';
            if (decimals_) {
                os << (*decimals_)[j].to_string();
            } else {
                os.precision(17);
                os << probs_[j];
            }
        }
        return os.str();
    }

    friend bool operator==(const CookieEnvironment& a, const CookieEnvironment& b) {
        if (a.size() != b.size()) return false;
        if (a.decimals_ && b.decimals_) {
            for (std::size_t j = 0; j < a.size(); ++j)
                if (compare_prefix_entry(a, b, j) != 0) return false;
            return true;
        }
        return a.probs_ == b.probs_;
    }

private:
    static int compare_prefix_entry(const CookieEnvironment& a, const CookieEnvironment& b, std::size_t j) {
        const auto& x = (*a.decimals_)[j];
        const auto& y = (*b.decimals_)[j];
        const int scale = std::max(x.scale, y.scale);
        const __int128 l = static_cast<__int128>(x.units) * pow10_i128(scale - x.scale);
        const __int128 r = static_cast<__int128>(y.units) * pow10_i128(scale - y.scale);
        return l < r ? -1 : (l > r ? 1 : 0);
    }

    void validate() const {
        for (std::size_t j = 0; j < probs_.size(); ++j) {
            const double p = probs_[j];
            bool ok = std::isfinite(p) && p > 0.0 && p < 1.0;
            if (decimals_) {
                const auto& d = (*decimals_)[j];
                ok = d.units > 0 && static_cast<__int128>(d.units) < pow10_i128(d.scale);
            }
            if (!ok)
                throw std::invalid_argument("cookie strength p_" + std::to_string(j + 1) + " = " +
                                            std::to_string(p) + " is outside the open interval (0,1)");
        }
    }

    std::vector<double> probs_;
    std::optional<std::vector<Decimal>> decimals_;
};

inline double total_drift(const CookieEnvironment& env) { return env.drift(); }

inline Regime classify(const CookieEnvironment& env) {
    Regime r;
    if (env.compare_drift(1) > 0)
        r.recurrence = Recurrence::TransientRight;
    else if (env.compare_drift(-1) < 0)
        r.recurrence = Recurrence::TransientLeft;
    else
        r.recurrence = Recurrence::RecurrentOscillating;

    if (env.compare_drift(2) > 0)
        r.speed_sign = SpeedSign::Positive;
    else if (env.compare_drift(-2) < 0)
        r.speed_sign = SpeedSign::Negative;
    else
        r.speed_sign = SpeedSign::Zero;
    return r;
}

inline CookieEnvironment mirror(const CookieEnvironment& env) { return env.mirror(); }

}  // namespace erw

#endif  // ERW_COOKIE_ENV_HPP
