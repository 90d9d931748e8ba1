// Forward branching process: V_0 = 1, V_{i+1} = S_{i+1, V_i}, where S_{i,k}
// counts successes before the k-th failure at site i. Exact one-step law,
// survival probability (truncated linear solve or Monte Carlo) and the exact
// excursion identity check between walk paths and chain trajectories.

#ifndef ERW_FORWARD_BP_HPP
#define ERW_FORWARD_BP_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "erw/cookie_env.hpp"
#include "erw/parallel.hpp"
#include "erw/rng.hpp"
#include "erw/samplers.hpp"
#include "erw/stats.hpp"
#include "erw/trial_field.hpp"
#include "erw/trial_laws.hpp"

namespace erw {

/// S_{site,k}; S_{site,0} = 0.
template <TrialSource F>
std::uint64_t successes_before_kth_failure(const F& field, std::int64_t site, std::uint64_t k) {
    return stopped_count(field, site, k, StopOn::Failure);
}

struct ForwardTrajectory {
    /// V_0, V_1, ... up to extinction or the generation cap.
    std::vector<std::uint64_t> values;
    /// sigma_V, nullopt when censored.
    std::optional<std::uint64_t> lifetime;

    bool censored() const { return !lifetime; }
};

struct ForwardOptions {
    std::uint64_t start = 1;
    /// When set, each step uses min(V_i, cap) as the number of failures to
    /// wait for. The result never exceeds the uncapped chain on the same field
    /// and coincides with it while V_i <= cap.
    std::optional<std::uint64_t> population_cap;
};

/// Iterates V for at most `max_generations` steps using sites 1, 2, ...
template <TrialSource F>
ForwardTrajectory run_forward(const F& field, std::uint64_t max_generations, ForwardOptions options = {}) {
    if (max_generations == 0) throw std::invalid_argument("run_forward: max_generations must be positive");
    ForwardTrajectory t;
    t.values.push_back(options.start);
    if (options.start == 0) {
        t.lifetime = 0;
        return t;
    }
    std::uint64_t v = options.start;
    for (std::uint64_t i = 1; i <= max_generations; ++i) {
        const auto k = options.population_cap ? std::min(v, *options.population_cap) : v;
        v = successes_before_kth_failure(field, static_cast<std::int64_t>(i), k);
        t.values.push_back(v);
        if (v == 0) {
            t.lifetime = i;
            break;
        }
    }
    return t;
}

/// P(S = m) for m = 0..m_max and the exact tail P(S > m_max).
inline StoppedLaw exact_step_distribution(const CookieEnvironment& env, std::uint64_t k, std::uint64_t m_max) {
    if (k == 0) throw std::invalid_argument("exact_step_distribution: k must be positive");
    return stopped_count_law(env, k, StopOn::Failure, m_max);
}

// ---------------------------------------------------------------------------
// Survival probability

enum class SurvivalMethod { TruncatedSolve, MonteCarlo };

inline std::string to_string(SurvivalMethod m) {
    return m == SurvivalMethod::TruncatedSolve ? "truncated_solve" : "monte_carlo";
}

struct SurvivalOptions {
    // truncated solve
    std::size_t initial_states = 64;
    std::size_t max_states = 2048;
    double tolerance = 1e-5;
    // monte carlo
    std::uint64_t episodes = 100000;
    std::uint64_t seed = 1;
    std::uint64_t threshold = 10000;
    std::uint64_t generation_cap = 1000000;
    bool bias_correction = true;
    std::size_t threads = default_thread_count();
};

struct SurvivalEstimate {
    SurvivalMethod method = SurvivalMethod::TruncatedSolve;
    double value = 0.0;
    /// Half-width of the reported error band around `value`.
    double radius = 0.0;
    /// Rigorous range known for the truncated solve ([0, u(N)] at worst).
    double lower = 0.0;
    double upper = 1.0;
    // truncated solve
    std::size_t states = 0;
    /// Survival from V_0 = m on the last truncation, m = 0..N. Each entry is
    /// an upper bound for the true value.
    std::vector<double> by_initial_state;
    // monte carlo
    double standard_error = 0.0;
    std::uint64_t episodes = 0;
    std::uint64_t reached = 0;        // population reached the threshold K
    std::uint64_t reached_early = 0;  // population reached K / 10
    double raw_frequency = 0.0;
    double correction = 0.0;
};

class SurvivalNotConverged : public std::runtime_error {
public:
    SurvivalNotConverged(const std::string& what, double lower, double upper)
        : std::runtime_error(what), lower(lower), upper(upper) {}
    double lower, upper;
};

namespace detail {

/// Probability of reaching a state above N before 0, from each m = 0..N.
inline std::vector<double> escape_above(const CookieEnvironment& env, std::size_t n) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::VectorXd b(static_cast<Eigen::Index>(n));
    for (std::size_t k = 1; k <= n; ++k) {
        const auto law = exact_step_distribution(env, k, n);
        const auto r = static_cast<Eigen::Index>(k - 1);
        b(r) = law.mass[0];
        for (std::size_t m = 1; m <= n; ++m) a(r, static_cast<Eigen::Index>(m - 1)) -= law.mass[m];
    }
    const Eigen::VectorXd extinct = a.partialPivLu().solve(b);
    std::vector<double> out(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k) out[k] = std::clamp(1.0 - extinct(static_cast<Eigen::Index>(k - 1)), 0.0, 1.0);
    return out;
}

/// Least-squares fit of u(N) = s + sum_e c_e N^{-e} through the last points;
/// returns s.
inline double extrapolate(const std::vector<double>& ns, const std::vector<double>& us, const std::vector<double>& exps) {
    const std::size_t n = exps.size() + 1;
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src = ns.size() - n + i;
        const auto r = static_cast<Eigen::Index>(i);
        x(r, 0) = 1.0;
        for (std::size_t e = 0; e < exps.size(); ++e) x(r, static_cast<Eigen::Index>(e + 1)) = std::pow(ns[src], -exps[e]);
        y(r) = us[src];
    }
    return x.colPivHouseholderQr().solve(y)(0);
}

}  // namespace detail

/// Survival probability P(sigma_V = infinity) from V_0 = 1.
///
/// truncated_solve: exact extinction-before-exceeding-N solve for N = 64, 128,
/// ...; the resulting u(N) decrease to the answer like N^{1-delta}, and the
/// limit is read off by extrapolation in N. monte_carlo: fraction of chains
/// reaching K, with a first-order correction for chains that die after K.
inline SurvivalEstimate survival_probability(const CookieEnvironment& env, SurvivalMethod method,
                                             const SurvivalOptions& options = {}) {
    SurvivalEstimate est;
    est.method = method;
    const bool transient = env.compare_drift(1) > 0;
    const double a = env.drift() - 1.0;

    if (method == SurvivalMethod::TruncatedSolve) {
        std::vector<double> ns, us;
        for (std::size_t n = options.initial_states; n <= options.max_states; n *= 2) {
            est.by_initial_state = detail::escape_above(env, n);
            est.states = n;
            ns.push_back(static_cast<double>(n));
            us.push_back(est.by_initial_state[1]);
            est.upper = us.back();
            if (!transient) {
                // survival is 0; u(N) only says how fast the truncation closes in
                est.value = 0.0;
                est.radius = est.upper;
                est.lower = 0.0;
                if (est.upper < options.tolerance || n * 2 > options.max_states) return est;
                continue;
            }
            if (ns.size() < 4) continue;
            const double s4 = detail::extrapolate(ns, us, {a, a + 0.5, a + 1.0});
            const double s3a = detail::extrapolate(ns, us, {a, a + 0.5});
            const double s3b = detail::extrapolate(ns, us, {a, a + 1.0});
            est.value = std::clamp(s4, 0.0, est.upper);
            est.radius = std::max(std::abs(s4 - s3a), std::abs(s4 - s3b));
            est.lower = std::max(0.0, est.value - est.radius);
            if (est.radius < options.tolerance) return est;
        }
        if (!transient) return est;
        throw SurvivalNotConverged("survival solve did not reach tolerance " + std::to_string(options.tolerance) +
                                       " within " + std::to_string(options.max_states) + " states",
                                   est.lower, est.upper);
    }

    // monte carlo
    if (options.threshold < 10) throw std::invalid_argument("survival threshold must be at least 10");
    const StoppedCountSampler sampler(env, StopOn::Failure);
    const std::uint64_t k_hi = options.threshold, k_lo = options.threshold / 10;
    struct Block {
        stats::RunningMean values;
        std::uint64_t hi = 0, lo = 0;
    };
    const bool correct = options.bias_correction && transient;
    const double factor = correct ? 1.0 / (std::pow(10.0, a) - 1.0) : 0.0;
    auto blocks = run_blocks<Block>(
        options.episodes, 1000,
        [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
            Block out;
            Rng rng(derive_seed(options.seed, b));
            for (auto e = begin; e < end; ++e) {
                std::uint64_t v = 1;
                bool hi = false, lo = false;
                for (std::uint64_t g = 0; g < options.generation_cap && v > 0; ++g) {
                    v = sampler(v, rng);
                    if (v >= k_lo) lo = true;
                    if (v >= k_hi) {
                        hi = true;
                        break;
                    }
                }
                out.hi += hi;
                out.lo += lo;
                out.values.add(static_cast<double>(hi) - factor * (static_cast<double>(lo) - static_cast<double>(hi)));
            }
            return out;
        },
        options.threads);
    stats::RunningMean all;
    for (const auto& b : blocks) {
        all.merge(b.values);
        est.reached += b.hi;
        est.reached_early += b.lo;
    }
    est.episodes = options.episodes;
    est.raw_frequency = static_cast<double>(est.reached) / static_cast<double>(options.episodes);
    est.value = all.mean();
    est.correction = est.value - est.raw_frequency;
    est.standard_error = all.standard_error();
    // the next term of the overshoot expansion is smaller by about (K/10)^{-1/2}
    est.radius = 3.0 * est.standard_error + std::abs(est.correction) / std::sqrt(static_cast<double>(k_lo));
    est.lower = std::max(0.0, est.value - est.radius);
    est.upper = std::min(1.0, est.value + est.radius);
    return est;
}

// ---------------------------------------------------------------------------
// Excursion identity: P(X_1 = 1, T_0^+ = 2k) = p_1 P(sum_i V_i = k)

struct ExcursionIdentity {
    std::uint64_t k = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_diff = 0.0;
};

inline constexpr std::uint64_t kExcursionBudget = 6;

namespace detail {

inline double step_right_probability(const CookieEnvironment& env, std::uint64_t visit) {
    return visit <= env.size() ? env.cookie(visit) : 0.5;
}

/// Sum of path probabilities of right excursions of length exactly 2k.
inline double excursion_paths(const CookieEnvironment& env, std::uint64_t k) {
    const auto len = static_cast<std::int64_t>(2 * k);
    std::vector<std::uint64_t> visits(k + 2, 0);
    double total = 0.0;
    // position x at time t, probability w so far; visits counts X_0..X_t
    auto walk = [&](auto&& self, std::int64_t t, std::int64_t x, double w) -> void {
        if (t == len) {
            if (x == 0) total += w;
            return;
        }
        const auto here = static_cast<std::size_t>(x);
        const double right = step_right_probability(env, visits[here]);
        for (int dir : {+1, -1}) {
            const std::int64_t y = x + dir;
            // stay positive before time 2k and be able to come back in time
            if (y < 0 || (y == 0 && t + 1 < len) || y > len - t - 1) continue;
            const double pw = w * (dir > 0 ? right : 1.0 - right);
            if (pw == 0.0) continue;
            ++visits[static_cast<std::size_t>(y)];
            self(self, t + 1, y, pw);
            --visits[static_cast<std::size_t>(y)];
        }
    };
    visits[0] = 1;
    const double first = step_right_probability(env, 1);
    visits[1] = 1;
    walk(walk, 1, 1, first);
    return total;
}

/// P(sum_{i>=0} V_i = k) by enumerating trajectories in lexicographic order.
inline double total_progeny(const CookieEnvironment& env, std::uint64_t k) {
    std::map<std::uint64_t, StoppedLaw> rows;
    auto row = [&](std::uint64_t v) -> const StoppedLaw& {
        auto it = rows.find(v);
        if (it == rows.end()) it = rows.emplace(v, exact_step_distribution(env, v, k)).first;
        return it->second;
    };
    double total = 0.0;
    auto extend = [&](auto&& self, std::uint64_t v, std::uint64_t sum, double w) -> void {
        const auto& law = row(v);
        if (sum == k) {
            total += w * law.mass[0];  // next generation empty
            return;
        }
        for (std::uint64_t next = 1; sum + next <= k; ++next) self(self, next, sum + next, w * law.mass[next]);
    };
    extend(extend, 1, 1, 1.0);
    return total;
}

}  // namespace detail

inline ExcursionIdentity excursion_identity_oracle(const CookieEnvironment& env, std::uint64_t k) {
    if (k == 0) throw std::invalid_argument("excursion_identity_oracle: k must be positive");
    if (k > kExcursionBudget)
        throw std::invalid_argument("excursion_identity_oracle: k = " + std::to_string(k) +
                                    " exceeds the enumeration budget of " + std::to_string(kExcursionBudget));
    ExcursionIdentity out;
    out.k = k;
    out.lhs = detail::excursion_paths(env, k);
    out.rhs = detail::step_right_probability(env, 1) * detail::total_progeny(env, k);
    out.abs_diff = std::abs(out.lhs - out.rhs);
    return out;
}

}  // namespace erw

#endif  // ERW_FORWARD_BP_HPP
