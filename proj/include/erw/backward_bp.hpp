// Backward branching process with one immigrant per generation:
// Z_0 = 0, Z_{i+1} = F_{i+1, Z_i + 1}, where F_{i,k} counts failures before the
// k-th success at site i. Exact kernel rows, the stationary law and its mean,
// the limiting speed, and a Monte Carlo check of the D <-> Z identity in law.

#ifndef ERW_BACKWARD_BP_HPP
#define ERW_BACKWARD_BP_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "erw/cookie_env.hpp"
#include "erw/parallel.hpp"
#include "erw/rng.hpp"
#include "erw/stats.hpp"
#include "erw/trial_field.hpp"
#include "erw/trial_laws.hpp"
#include "erw/walk.hpp"

namespace erw {

/// F_{site,k}; F_{site,0} = 0.
template <TrialSource F>
std::uint64_t failures_before_kth_success(const F& field, std::int64_t site, std::uint64_t k) {
    return stopped_count(field, site, k, StopOn::Success);
}

struct BackwardTrajectory {
    /// Z_0 = 0, Z_1, ..., Z_G.
    std::vector<std::uint64_t> values;
};

/// Iterates Z for `generations` steps using sites 1, 2, ...
template <TrialSource F>
BackwardTrajectory run_backward(const F& field, std::uint64_t generations) {
    if (generations == 0) throw std::invalid_argument("run_backward: generations must be positive");
    BackwardTrajectory t;
    t.values.reserve(generations + 1);
    std::uint64_t z = 0;
    t.values.push_back(z);
    for (std::uint64_t i = 1; i <= generations; ++i) {
        z = failures_before_kth_success(field, static_cast<std::int64_t>(i), z + 1);
        t.values.push_back(z);
    }
    return t;
}

struct KernelRow {
    std::uint64_t from = 0;
    std::vector<double> masses;  // P(Z' = m | Z = from), m = 0..m_max
    double tail = 0.0;           // P(Z' > m_max | Z = from)

    double total() const {
        double t = tail;
        for (double w : masses) t += w;
        return t;
    }
};

/// Law of F_{.,k+1}.
inline KernelRow exact_kernel_row(const CookieEnvironment& env, std::uint64_t k, std::uint64_t m_max) {
    auto law = stopped_count_law(env, k + 1, StopOn::Success, m_max);
    return {k, std::move(law.mass), law.tail};
}

// ---------------------------------------------------------------------------
// Stationary law

struct StationaryOptions {
    std::size_t initial_states = 64;
    std::size_t max_states = 4096;
};

struct StationaryDistribution {
    /// Truncation level: masses live on 0..N.
    std::size_t states = 0;
    std::vector<double> masses;
    /// Estimated stationary mass beyond N.
    double tail_mass = 0.0;
    /// E[Z_0] under the stationary law; +infinity when the drift is at most 2.
    double mean = 0.0;
    double mean_error = 0.0;
    /// max_m |(pi K)(m) - pi(m)| for the truncated, row-renormalised kernel.
    double residual = 0.0;
};

class StationaryNotConverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Grassmann-Taksar-Heyman state reduction; `p` is overwritten.
inline std::vector<double> gth_stationary(Eigen::MatrixXd& p) {
    const Eigen::Index n = p.rows();
    for (Eigen::Index k = n - 1; k > 0; --k) {
        const double s = p.row(k).head(k).sum();
        p.col(k).head(k) /= s;
        p.topLeftCorner(k, k).noalias() += p.col(k).head(k) * p.row(k).head(k);
    }
    std::vector<double> pi(static_cast<std::size_t>(n), 0.0);
    pi[0] = 1.0;
    double total = 1.0;
    for (Eigen::Index j = 1; j < n; ++j) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < j; ++i) s += pi[static_cast<std::size_t>(i)] * p(i, j);
        pi[static_cast<std::size_t>(j)] = s;
        total += s;
    }
    for (double& x : pi) x /= total;
    return pi;
}

struct TruncatedSolve {
    std::vector<double> pi;
    double residual = 0.0;
};

/// Stationary law of the kernel restricted to 0..N with every row
/// renormalised over 0..N.
inline TruncatedSolve truncated_stationary(const CookieEnvironment& env, std::size_t n) {
    const auto size = static_cast<Eigen::Index>(n + 1);
    Eigen::MatrixXd k(size, size);
    for (std::size_t i = 0; i <= n; ++i) {
        const auto row = exact_kernel_row(env, i, n);
        double kept = 0.0;
        for (double w : row.masses) kept += w;
        for (std::size_t m = 0; m <= n; ++m)
            k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = row.masses[m] / kept;
    }
    Eigen::MatrixXd work = k;
    TruncatedSolve out;
    out.pi = gth_stationary(work);
    const Eigen::Map<const Eigen::RowVectorXd> pi(out.pi.data(), size);
    out.residual = (pi * k - pi).cwiseAbs().maxCoeff();
    return out;
}

/// First and second moment increments E[Z'|k] - k and E[Z'^2|k] - k^2.
struct MomentIncrements {
    double first = 0.0;
    double second = 0.0;
};

inline MomentIncrements moment_increments(const CookieEnvironment& env, std::uint64_t k) {
    const auto law = stopped_count_law(env, k + 1, StopOn::Success, 0);
    const auto kd = static_cast<double>(k);
    return {law.mean - kd, law.second_moment - kd * kd};
}

}  // namespace detail

/// Stationary law of Z on a truncation 0..N and its mean.
///
/// For k >= M - 1 a step from k has mean k + 1 - delta and second moment
/// k^2 + (4 - 2 delta) k + beta, with beta depending on p only. Balancing the
/// first two moments under the stationary law then gives the mass at 0 and
/// E[Z_0] in terms of the masses at the M - 1 states below M - 1, whose ratios
/// converge very fast in N. The truncated solve supplies those ratios.
inline StationaryDistribution stationary_distribution(const CookieEnvironment& env, double rel_tol,
                                                      const StationaryOptions& options = {}) {
    if (env.compare_drift(1) <= 0)
        throw std::invalid_argument("stationary_distribution needs total drift > 1, got " + std::to_string(env.drift()));
    const double delta = env.drift();
    const bool finite_mean = env.compare_drift(2) > 0;
    const std::size_t m = env.size();
    const std::size_t small = m >= 2 ? m - 1 : 0;  // states 0..M-2

    double es = 0.0, var_s = 0.0;
    for (double p : env.probs()) {
        es += p;
        var_s += p * (1.0 - p);
    }
    const double beta = 2.0 - 2.0 * es + 4.0 * var_s + (1.0 - delta) * (1.0 - delta);
    std::vector<detail::MomentIncrements> inc;
    for (std::size_t k = 0; k < small; ++k) inc.push_back(detail::moment_increments(env, k));

    StationaryDistribution out;
    std::optional<double> previous;
    for (std::size_t n = options.initial_states; n <= options.max_states; n *= 2) {
        const auto solve = detail::truncated_stationary(env, n);
        // pi_0 from the first-moment balance
        double denom = 0.0;
        for (std::size_t k = 0; k < small; ++k) denom += solve.pi[k] / solve.pi[0] * (inc[k].first - (1.0 - delta));
        const double pi0 = (delta - 1.0) / denom;
        out.states = n;
        out.masses = solve.pi;
        out.residual = solve.residual;
        out.tail_mass = std::max(0.0, 1.0 - pi0 / solve.pi[0]);
        if (!finite_mean) {
            out.mean = std::numeric_limits<double>::infinity();
            out.mean_error = std::numeric_limits<double>::infinity();
            return out;
        }
        double mass_small = 0.0, mean_small = 0.0, second = 0.0;
        for (std::size_t k = 0; k < small; ++k) {
            const double pk = pi0 * solve.pi[k] / solve.pi[0];
            mass_small += pk;
            mean_small += static_cast<double>(k) * pk;
            second += pk * inc[k].second;
        }
        const double mean = mean_small + (second + beta * (1.0 - mass_small)) / (2.0 * delta - 4.0);
        out.mean = mean;
        if (previous) {
            out.mean_error = std::max(std::abs(mean - *previous), 1e-15 * std::abs(mean));
            if (out.mean_error <= rel_tol * std::abs(mean)) return out;
        }
        previous = mean;
    }
    throw StationaryNotConverged("stationary mean did not settle to relative tolerance " + std::to_string(rel_tol) +
                                 " within " + std::to_string(options.max_states) + " states");
}

// ---------------------------------------------------------------------------
// Speed

struct SpeedReport {
    double delta = 0.0;
    Regime regime;
    double v = 0.0;
    std::string method;
    double error_estimate = 0.0;
    /// E[Z_0] under the stationary law of the environment actually solved.
    std::optional<double> stationary_mean;
};

/// lim X_n / n = 1 / (1 + 2 E[Z_0]) for delta > 2, 0 for |delta| <= 2, and
/// the mirrored value for delta < -2.
inline SpeedReport speed(const CookieEnvironment& env, double rel_tol = 1e-10, const StationaryOptions& options = {}) {
    SpeedReport r;
    r.delta = env.drift();
    r.regime = classify(env);
    switch (r.regime.speed_sign) {
        case SpeedSign::Zero:
            r.method = "zero_by_classification";
            return r;
        case SpeedSign::Negative: {
            auto m = speed(env.mirror(), rel_tol, options);
            r.v = -m.v;
            r.error_estimate = m.error_estimate;
            r.stationary_mean = m.stationary_mean;
            r.method = "mirror_stationary_mean";
            return r;
        }
        case SpeedSign::Positive: break;
    }
    const auto pi = stationary_distribution(env, rel_tol, options);
    const double denom = 1.0 + 2.0 * pi.mean;
    r.v = 1.0 / denom;
    r.error_estimate = 2.0 * pi.mean_error / (denom * denom);
    r.stationary_mean = pi.mean;
    r.method = "stationary_mean";
    return r;
}

struct SpeedSample {
    double mean = 0.0;
    double standard_error = 0.0;
    std::uint64_t reps = 0;
    std::uint64_t steps = 0;
};

/// Monte Carlo estimate of lim X_n / n from `reps` independent walks of
/// `steps` steps.
inline SpeedSample speed_monte_carlo(const CookieEnvironment& env, std::uint64_t steps, std::uint64_t reps,
                                     std::uint64_t seed, std::size_t threads = default_thread_count()) {
    auto blocks = run_blocks<stats::RunningMean>(
        reps, 1,
        [&](std::uint64_t b, std::uint64_t, std::uint64_t) {
            const TrialField field(env, derive_seed(seed, b));
            SiteCounter visits;
            std::int64_t x = 0;
            for (std::uint64_t k = 0; k < steps; ++k) x += trial_at(field, x, visits.bump(x)) ? 1 : -1;
            stats::RunningMean r;
            r.add(static_cast<double>(x) / static_cast<double>(steps));
            return r;
        },
        threads);
    stats::RunningMean all;
    for (const auto& b : blocks) all.merge(b);
    return {all.mean(), all.standard_error(), reps, steps};
}

// ---------------------------------------------------------------------------
// (D_n^n, ..., D_0^n) versus (Z_0, ..., Z_n)

struct DzOptions {
    std::uint64_t max_steps = 1000000000;
    double min_cell = 20.0;
    std::size_t threads = default_thread_count();
};

struct DzReport {
    std::int64_t n = 0;
    std::uint64_t samples = 0;
    /// Walks that did not reach n within max_steps (excluded).
    std::uint64_t censored = 0;
    stats::ChiSquareResult joint;
    stats::ChiSquareResult time_nonneg;
    double mean_d0 = 0.0, se_d0 = 0.0;
    double mean_zn = 0.0, se_zn = 0.0;

    bool passed(double alpha) const {
        const double se = std::hypot(se_d0, se_zn);
        return joint.p_value > alpha && time_nonneg.p_value > alpha && std::abs(mean_d0 - mean_zn) <= 3.0 * se;
    }
};

/// Walk run to T_n on one seeded field against the backward chain run for n
/// generations on another; compares the joint laws of the reversed left-jump
/// vector and of Z, and T~_n against n + 2 (Z_0 + ... + Z_{n-1}) + Z_n.
inline DzReport dz_distribution_check(const CookieEnvironment& env, std::int64_t n, std::uint64_t samples,
                                      std::uint64_t seed, const DzOptions& options = {}) {
    if (env.compare_drift(-1) < 0)
        throw std::invalid_argument("dz_distribution_check needs total drift >= -1, got " + std::to_string(env.drift()));
    if (n < 1) throw std::invalid_argument("dz_distribution_check: n must be positive");
    using Key = std::vector<std::uint64_t>;
    struct Block {
        std::map<Key, std::uint64_t> d, z;
        std::map<std::uint64_t, std::uint64_t> t_walk, t_chain;
        stats::RunningMean d0, zn;
        std::uint64_t censored = 0;
    };
    auto blocks = run_blocks<Block>(
        samples, 1000,
        [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
            Block out;
            for (auto s = begin; s < end; ++s) {
                const TrialField walk_field(env, derive_seed(seed, 2 * s));
                const auto h = walk_to_level(walk_field, n, options.max_steps);
                const TrialField chain_field(env, derive_seed(seed, 2 * s + 1));
                const auto z = run_backward(chain_field, static_cast<std::uint64_t>(n));
                Key zk(z.values.begin(), z.values.end());
                std::uint64_t tz = static_cast<std::uint64_t>(n) + z.values.back();
                for (std::int64_t i = 0; i < n; ++i) tz += 2 * z.values[static_cast<std::size_t>(i)];
                ++out.z[zk];
                ++out.t_chain[tz];
                out.zn.add(static_cast<double>(z.values.back()));
                if (!h.hitting_time) {
                    ++out.censored;
                    continue;
                }
                Key dk;
                for (std::int64_t x = n; x >= 0; --x) dk.push_back(h.left_jumps_at(x));
                ++out.d[dk];
                ++out.t_walk[static_cast<std::uint64_t>(h.time_nonneg)];
                out.d0.add(static_cast<double>(h.left_jumps_at(0)));
            }
            return out;
        },
        options.threads);
    Block all;
    for (const auto& b : blocks) {
        for (const auto& [k, c] : b.d) all.d[k] += c;
        for (const auto& [k, c] : b.z) all.z[k] += c;
        for (const auto& [k, c] : b.t_walk) all.t_walk[k] += c;
        for (const auto& [k, c] : b.t_chain) all.t_chain[k] += c;
        all.d0.merge(b.d0);
        all.zn.merge(b.zn);
        all.censored += b.censored;
    }
    DzReport r;
    r.n = n;
    r.samples = samples;
    r.censored = all.censored;
    r.joint = stats::two_sample_chi_square(all.d, all.z, options.min_cell);
    r.time_nonneg = stats::two_sample_chi_square(all.t_walk, all.t_chain, options.min_cell);
    r.mean_d0 = all.d0.mean();
    r.se_d0 = all.d0.standard_error();
    r.mean_zn = all.zn.mean();
    r.se_zn = all.zn.standard_error();
    return r;
}

}  // namespace erw

#endif  // ERW_BACKWARD_BP_HPP
