// End-to-end experiments: pathwise U <= V, domination of coupled chains,
// escape probability and speed gaps between ordered environments.

#ifndef ERW_HARNESS_HPP
#define ERW_HARNESS_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "erw/backward_bp.hpp"
#include "erw/coupled_field.hpp"
#include "erw/coupling.hpp"
#include "erw/forward_bp.hpp"
#include "erw/parallel.hpp"
#include "erw/samplers.hpp"
#include "erw/stats.hpp"
#include "erw/walk.hpp"

namespace erw {

struct Estimate {
    std::string name;
    std::string method;
    double value = 0.0;
    /// Half-width of the error band (3 standard errors unless stated).
    double radius = 0.0;
    double standard_error = 0.0;
};

struct Claim {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ExperimentReport {
    std::string experiment;
    std::vector<CookieEnvironment> environments;
    std::uint64_t seed = 0;
    std::uint64_t episodes = 0;
    std::vector<Claim> claims;
    std::vector<Estimate> estimates;
    std::map<std::string, std::uint64_t> counts;
    /// Wall time; filled by callers that ask for it, never by default, so
    /// reports are byte-identical across runs.
    std::optional<double> runtime_seconds;

    bool passed() const {
        return std::all_of(claims.begin(), claims.end(), [](const Claim& c) { return c.passed; });
    }

    const Claim* claim(const std::string& name) const {
        for (const auto& c : claims)
            if (c.name == name) return &c;
        return nullptr;
    }

    const Estimate* estimate(const std::string& name) const {
        for (const auto& e : estimates)
            if (e.name == name) return &e;
        return nullptr;
    }
};

namespace detail {

inline std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

inline void add_counts(std::map<std::string, std::uint64_t>& into, const std::map<std::string, std::uint64_t>& from) {
    for (const auto& [k, v] : from) into[k] += v;
}

inline OrderVerdict require_ordered(const CookieEnvironment& p, const CookieEnvironment& q, bool allow_equal,
                                    const char* who) {
    auto verdict = decide_order(p, q);
    const bool ok = verdict.order == Order::Strict || (allow_equal && verdict.order == Order::Equal);
    if (!ok)
        throw std::invalid_argument(std::string(who) + ": needs p " + (allow_equal ? "<=" : "<") + " q, got verdict " +
                                    to_string(verdict.order) + " for p = (" + p.to_string() + "), q = (" +
                                    q.to_string() + ")");
    return verdict;
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// Walk and forward chain driven by the same field: U_i <= V_i always, and
/// U = V on right excursions that return before the horizon.
inline ExperimentReport verify_pathwise_UV(const CookieEnvironment& env, std::uint64_t episodes, std::uint64_t horizon,
                                           std::uint64_t seed, std::size_t threads = default_thread_count()) {
    using Counts = std::map<std::string, std::uint64_t>;
    auto blocks = run_blocks<Counts>(
        episodes, 1000,
        [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
            Counts c{{"violations", 0}, {"equality_candidates", 0}, {"equality_holds", 0},
                     {"first_step_left", 0}, {"censored", 0}};
            SiteCounter scratch;
            for (auto e = begin; e < end; ++e) {
                const TrialField field(env, derive_seed(seed, e));
                const auto u = run_excursion(field, horizon, scratch);
                const auto& uv = u.right_crossings;
                if (!u.first_step_right) ++c["first_step_left"];
                if (!u.first_return) ++c["censored"];
                std::uint64_t cap = 0;
                for (auto x : uv) cap = std::max(cap, x);
                // The capped chain stays below V and equals it while V <= max U,
                // which is all that U_i <= V_i and the equality clause need.
                ForwardOptions opt;
                opt.population_cap = std::max<std::uint64_t>(cap, 1);
                auto check = [&](const ForwardTrajectory& v) {
                    for (std::size_t i = 0; i < uv.size(); ++i)
                        if (i >= v.values.size() || uv[i] > v.values[i]) return false;
                    return true;
                };
                const std::uint64_t gens = uv.size() + 1;
                auto v = run_forward(field, gens, opt);
                bool ok = check(v);
                if (!ok) {
                    v = run_forward(field, gens);
                    ok = check(v);
                }
                if (!ok) ++c["violations"];
                if (u.first_step_right && u.first_return) {
                    ++c["equality_candidates"];
                    bool equal = v.values.size() == uv.size() + 1 && v.values.back() == 0;
                    for (std::size_t i = 0; equal && i < uv.size(); ++i) equal = uv[i] == v.values[i];
                    if (equal) ++c["equality_holds"];
                }
            }
            return c;
        },
        threads);
    ExperimentReport r;
    r.experiment = "pathwise_uv";
    r.environments = {env};
    r.seed = seed;
    r.episodes = episodes;
    for (const auto& b : blocks) detail::add_counts(r.counts, b);
    r.counts["horizon"] = horizon;
    r.claims.push_back({"U_le_V", r.counts["violations"] == 0,
                        std::to_string(r.counts["violations"]) + " episodes with some U_i > V_i"});
    r.claims.push_back({"U_eq_V_on_returned_right_excursions",
                        r.counts["equality_holds"] == r.counts["equality_candidates"],
                        std::to_string(r.counts["equality_holds"]) + " of " +
                            std::to_string(r.counts["equality_candidates"]) + " returned right excursions"});
    return r;
}

// ---------------------------------------------------------------------------

/// Coupled fields for p <= q: V <= V' for the forward pair, Z >= Z' for the
/// backward pair, plus S_{1,k} <= S'_{1,k} and F_{1,k} >= F'_{1,k} for k <= 10.
inline ExperimentReport verify_coupled_domination(const CookieEnvironment& p, const CookieEnvironment& q,
                                                  std::uint64_t episodes, std::uint64_t generations, std::uint64_t seed,
                                                  std::size_t threads = default_thread_count()) {
    const auto verdict = detail::require_ordered(p, q, true, "verify_coupled_domination");
    const auto& table = *verdict.certificate;
    using Counts = std::map<std::string, std::uint64_t>;
    auto blocks = run_blocks<Counts>(
        episodes, 500,
        [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
            Counts c{{"forward_violations", 0}, {"backward_violations", 0}, {"spot_violations", 0},
                     {"forward_identical", 0}, {"backward_identical", 0}};
            for (auto e = begin; e < end; ++e) {
                const CoupledTrialField field(p, q, table, derive_seed(seed, e));
                const auto a = field.first();
                const auto b = field.second();
                std::uint64_t v = 1, v2 = 1, z = 0, z2 = 0;
                bool fwd_ok = true, bwd_ok = true, fwd_same = true, bwd_same = true;
                for (std::uint64_t i = 1; i <= generations; ++i) {
                    const auto site = static_cast<std::int64_t>(i);
                    if (v2 > 0) {
                        v = successes_before_kth_failure(a, site, v);
                        v2 = successes_before_kth_failure(b, site, v2);
                        fwd_ok = fwd_ok && v <= v2;
                        fwd_same = fwd_same && v == v2;
                    }
                    z = failures_before_kth_success(a, site, z + 1);
                    z2 = failures_before_kth_success(b, site, z2 + 1);
                    bwd_ok = bwd_ok && z >= z2;
                    bwd_same = bwd_same && z == z2;
                }
                bool spot_ok = true;
                for (std::uint64_t k = 1; k <= 10; ++k) {
                    spot_ok = spot_ok && successes_before_kth_failure(a, 1, k) <= successes_before_kth_failure(b, 1, k);
                    spot_ok = spot_ok && failures_before_kth_success(a, 1, k) >= failures_before_kth_success(b, 1, k);
                }
                c["forward_violations"] += !fwd_ok;
                c["backward_violations"] += !bwd_ok;
                c["spot_violations"] += !spot_ok;
                c["forward_identical"] += fwd_same;
                c["backward_identical"] += bwd_same;
            }
            return c;
        },
        threads);
    ExperimentReport r;
    r.experiment = "coupled_domination";
    r.environments = {p, q};
    r.seed = seed;
    r.episodes = episodes;
    for (const auto& b : blocks) detail::add_counts(r.counts, b);
    r.counts["generations"] = generations;
    r.claims.push_back({"V_le_Vprime", r.counts["forward_violations"] == 0,
                        std::to_string(r.counts["forward_violations"]) + " episodes with some V_i > V'_i"});
    r.claims.push_back({"Z_ge_Zprime", r.counts["backward_violations"] == 0,
                        std::to_string(r.counts["backward_violations"]) + " episodes with some Z_i < Z'_i"});
    r.claims.push_back({"S_and_F_spot_checks", r.counts["spot_violations"] == 0,
                        std::to_string(r.counts["spot_violations"]) + " episodes failing a k <= 10 check"});
    if (verdict.order == Order::Equal)
        r.claims.push_back({"identical_chains_for_equal_environments",
                            r.counts["forward_identical"] == episodes && r.counts["backward_identical"] == episodes,
                            "diagonal coupling"});
    return r;
}

// ---------------------------------------------------------------------------

struct EscapeOptions {
    std::uint64_t episodes = 100000;
    std::uint64_t seed = 1;
    std::uint64_t threshold = 10000;
    std::uint64_t generation_cap = 1000000;
    /// Direct walk estimator; 0 episodes disables it.
    std::uint64_t direct_episodes = 10000;
    std::uint64_t direct_horizon = 100000;
    std::uint64_t direct_checkpoint = 10000;
    std::size_t threads = default_thread_count();
};

struct DirectEscape {
    double value = 0.0;
    double radius = 0.0;
    double standard_error = 0.0;
    double at_horizon = 0.0;
    double at_checkpoint = 0.0;
};

/// Fraction of walks that step right and stay positive up to the horizon,
/// extrapolated in the horizon with exponent (delta - 1) / 2; the size of the
/// extrapolation step is added to the radius.
inline DirectEscape direct_escape_probability(const CookieEnvironment& env, const EscapeOptions& o) {
    struct Block {
        std::uint64_t hi = 0, lo = 0;
        stats::RunningMean values;
    };
    const double a = std::max(env.drift() - 1.0, 0.0) / 2.0;
    const double ratio = static_cast<double>(o.direct_horizon) / static_cast<double>(o.direct_checkpoint);
    const double factor = a > 0.0 ? 1.0 / (std::pow(ratio, a) - 1.0) : 0.0;
    auto blocks = run_blocks<Block>(
        o.direct_episodes, 500,
        [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
            Block out;
            SiteCounter scratch;
            for (auto e = begin; e < end; ++e) {
                const TrialField field(env, derive_seed(derive_seed(o.seed, 0xD1EC7), e));
                const auto obs = observe_return(field, o.direct_horizon, scratch);
                const bool hi = obs.first_step_right && !obs.first_return;
                const bool lo = obs.first_step_right &&
                                (!obs.first_return || *obs.first_return > static_cast<std::int64_t>(o.direct_checkpoint));
                out.hi += hi;
                out.lo += lo;
                out.values.add(static_cast<double>(hi) - factor * (static_cast<double>(lo) - static_cast<double>(hi)));
            }
            return out;
        },
        o.threads);
    Block all;
    for (const auto& b : blocks) {
        all.hi += b.hi;
        all.lo += b.lo;
        all.values.merge(b.values);
    }
    DirectEscape d;
    const auto n = static_cast<double>(o.direct_episodes);
    d.at_horizon = static_cast<double>(all.hi) / n;
    d.at_checkpoint = static_cast<double>(all.lo) / n;
    d.value = all.values.mean();
    d.standard_error = all.values.standard_error();
    d.radius = 3.0 * d.standard_error + std::abs(d.value - d.at_horizon);
    return d;
}

struct CoupledEscape {
    std::uint64_t episodes = 0;
    /// p-chain died while the q-chain reached the threshold.
    std::uint64_t events = 0;
    stats::Interval interval;
};

/// Coupled forward chains from V_0 = V'_0 = 1, each run until it dies or
/// reaches the threshold; counts {V dies, V' reaches K}.
inline CoupledEscape coupled_escape_event(const CookieEnvironment& p, const CookieEnvironment& q,
                                          const CouplingTable& table, const EscapeOptions& o) {
    const CoupledStoppedCountSampler joint(p, q, table, StopOn::Failure);
    const StoppedCountSampler alone_p(p, StopOn::Failure), alone_q(q, StopOn::Failure);
    const std::uint64_t k = o.threshold;
    auto blocks = run_blocks<std::uint64_t>(
        o.episodes, 1000,
        [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
            Rng rng(derive_seed(derive_seed(o.seed, 0xC0DE), b));
            std::uint64_t events = 0;
            for (auto e = begin; e < end; ++e) {
                std::uint64_t v = 1, v2 = 1;
                for (std::uint64_t g = 0; g < o.generation_cap; ++g) {
                    const bool open_p = v > 0 && v < k, open_q = v2 > 0 && v2 < k;
                    if (open_p && open_q) {
                        std::tie(v, v2) = joint(v, v2, rng);
                    } else if (open_p) {
                        v = alone_p(v, rng);
                    } else if (open_q) {
                        v2 = alone_q(v2, rng);
                    } else {
                        break;
                    }
                }
                events += v == 0 && v2 >= k;
            }
            return events;
        },
        o.threads);
    CoupledEscape c;
    c.episodes = o.episodes;
    for (auto b : blocks) c.events += b;
    c.interval = stats::clopper_pearson(c.events, c.episodes, 0.95);
    return c;
}

/// Escape probabilities P(X_n > 0 for all n > 0) for p < q, with drift of p above 1.
inline ExperimentReport escape_probability_gap(const CookieEnvironment& p, const CookieEnvironment& q,
                                               const EscapeOptions& o = {}) {
    const auto verdict = detail::require_ordered(p, q, false, "escape_probability_gap");
    if (p.compare_drift(1) <= 0)
        throw std::invalid_argument("escape_probability_gap: needs total drift of p above 1, got " +
                                    std::to_string(p.drift()));
    ExperimentReport r;
    r.experiment = "escape_gap";
    r.environments = {p, q};
    r.seed = o.seed;
    r.episodes = o.episodes;

    SurvivalOptions so;
    so.episodes = o.episodes;
    so.threshold = o.threshold;
    so.generation_cap = o.generation_cap;
    so.threads = o.threads;
    struct Side {
        std::string tag;
        const CookieEnvironment* env;
        SurvivalEstimate mc;
        double p1 = 0.5;
    };
    std::vector<Side> sides{{"p", &p, {}, 0.5}, {"q", &q, {}, 0.5}};
    for (std::size_t s = 0; s < sides.size(); ++s) {
        auto& side = sides[s];
        side.p1 = side.env->size() > 0 ? side.env->cookie(1) : 0.5;
        so.seed = derive_seed(o.seed, s + 1);
        side.mc = survival_probability(*side.env, SurvivalMethod::MonteCarlo, so);
        r.estimates.push_back({"survival_" + side.tag, "monte_carlo", side.mc.value, side.mc.radius,
                               side.mc.standard_error});
        r.estimates.push_back({"escape_" + side.tag, "p1_times_survival_monte_carlo", side.p1 * side.mc.value,
                               side.p1 * side.mc.radius, side.p1 * side.mc.standard_error});
        r.counts["reached_threshold_" + side.tag] = side.mc.reached;
        try {
            const auto exact = survival_probability(*side.env, SurvivalMethod::TruncatedSolve);
            r.estimates.push_back({"escape_" + side.tag + "_solve", "p1_times_survival_truncated_solve",
                                   side.p1 * exact.value, side.p1 * exact.radius, 0.0});
        } catch (const SurvivalNotConverged&) {
        }
    }
    const auto& ep = *r.estimate("escape_p");
    const auto& eq = *r.estimate("escape_q");
    const double combined = std::hypot(ep.standard_error, eq.standard_error);
    r.claims.push_back({"escape_q_exceeds_escape_p", eq.value - ep.value > 3.0 * combined,
                        "gap " + detail::fmt(eq.value - ep.value) + " vs 3 combined SE " + detail::fmt(3.0 * combined)});

    if (o.direct_episodes > 0) {
        for (const auto& side : sides) {
            const auto d = direct_escape_probability(*side.env, o);
            r.estimates.push_back({"escape_" + side.tag + "_direct", "walk_positive_to_horizon_extrapolated", d.value,
                                   d.radius, d.standard_error});
            const auto& via = *r.estimate("escape_" + side.tag);
            const double diff = std::abs(d.value - via.value);
            r.claims.push_back({"direct_agrees_with_survival_route_" + side.tag, diff <= d.radius + via.radius,
                                "difference " + detail::fmt(diff) + " vs combined radius " +
                                    detail::fmt(d.radius + via.radius)});
        }
        r.counts["direct_episodes"] = o.direct_episodes;
        r.counts["direct_horizon"] = o.direct_horizon;
    }

    const auto coupled = coupled_escape_event(p, q, *verdict.certificate, o);
    r.counts["coupled_events"] = coupled.events;
    // chains of q counted as surviving at K may still die; remove that share
    const double misclassified = std::abs(sides[1].mc.correction);
    const double lower = coupled.interval.lower - misclassified;
    r.estimates.push_back({"coupled_event", "coupled_chains_frequency",
                           static_cast<double>(coupled.events) / static_cast<double>(coupled.episodes),
                           0.5 * (coupled.interval.upper - coupled.interval.lower), 0.0});
    r.claims.push_back({"coupled_event_positive", lower > 0.0,
                        "Clopper-Pearson 95% lower bound " + detail::fmt(coupled.interval.lower) +
                            " minus overshoot share " + detail::fmt(misclassified)});
    return r;
}

// ---------------------------------------------------------------------------

struct SpeedGapOptions {
    double rel_tol = 1e-8;
    std::uint64_t seed = 1;
    std::uint64_t burn_in = 10000;
    std::uint64_t run_length = 1000000;
    std::uint64_t batches = 1000;
};

/// P(F_{1,k} > F'_{1,k}) under the coupled field, exactly.
inline double coupled_failure_excess(const CookieEnvironment& p_in, const CookieEnvironment& q_in,
                                     const CouplingTable& table, std::uint64_t k) {
    if (auto bad = coupling_violation(table, p_in.padded(table.length), q_in.padded(table.length)))
        throw CorruptedCouplingTable(*bad);
    double total = 0.0;
    for (const auto& e : table.support) {
        const auto a = detail::run_cookies(e.y, table.length, k, StopOn::Success);
        const auto b = detail::run_cookies(e.z, table.length, k, StopOn::Success);
        const auto ra = static_cast<std::int64_t>(a.done ? 0 : a.remaining);
        const auto rb = static_cast<std::int64_t>(b.done ? 0 : b.remaining);
        const auto ca = static_cast<std::int64_t>(a.counted), cb = static_cast<std::int64_t>(b.counted);
        // F - F' = ca - cb + X or ca - cb - X with X ~ NB(|ra - rb|) on top of a shared tail
        double prob = 0.0;
        if (ra == rb) {
            prob = ca > cb ? 1.0 : 0.0;
        } else if (ra > rb) {
            prob = fair_negative_binomial_sf(static_cast<std::uint64_t>(ra - rb), cb - ca);
        } else {
            const auto r = static_cast<std::uint64_t>(rb - ra);
            // P(X < ca - cb) = 1 - P(X > ca - cb - 1)
            prob = ca - cb <= 0 ? 0.0 : 1.0 - fair_negative_binomial_sf(r, ca - cb - 1);
        }
        total += e.mass * prob;
    }
    return total;
}

/// Speeds of p < q: either both vanish or v(p) < v(q). When both are positive
/// the stationary mean gap is also compared with P(Z_0 > Z'_0) from one long
/// coupled run and with the exact witness bound at the minimal strict index.
inline ExperimentReport speed_gap(const CookieEnvironment& p, const CookieEnvironment& q,
                                  const SpeedGapOptions& o = {}) {
    const auto verdict = detail::require_ordered(p, q, false, "speed_gap");
    ExperimentReport r;
    r.experiment = "speed_gap";
    r.environments = {p, q};
    r.seed = o.seed;
    const auto vp = speed(p, o.rel_tol);
    const auto vq = speed(q, o.rel_tol);
    r.estimates.push_back({"speed_p", vp.method, vp.v, vp.error_estimate, 0.0});
    r.estimates.push_back({"speed_q", vq.method, vq.v, vq.error_estimate, 0.0});
    const bool both_zero = vp.v == 0.0 && vq.v == 0.0;
    const double gap = vq.v - vp.v;
    const bool strict = gap > vp.error_estimate + vq.error_estimate;
    r.claims.push_back({"dichotomy", both_zero || strict,
                        both_zero ? std::string("v(p) = v(q) = 0")
                                  : "v(q) - v(p) = " + detail::fmt(gap) + " vs error estimates " +
                                        detail::fmt(vp.error_estimate + vq.error_estimate)});
    if (!(vp.v > 0.0 && vq.v > 0.0)) return r;

    const double mean_gap = *vp.stationary_mean - *vq.stationary_mean;
    r.estimates.push_back({"stationary_mean_gap", "stationary_mean", mean_gap,
                           (vp.error_estimate + vq.error_estimate), 0.0});

    // long coupled run of the backward pair
    const CoupledStoppedCountSampler joint(p, q, *verdict.certificate, StopOn::Success);
    Rng rng(derive_seed(o.seed, 0xB4C));
    std::uint64_t z = 0, z2 = 0;
    for (std::uint64_t i = 0; i < o.burn_in; ++i) std::tie(z, z2) = joint(z + 1, z2 + 1, rng);
    const std::uint64_t per_batch = std::max<std::uint64_t>(1, o.run_length / o.batches);
    stats::RunningMean diff_batches, freq_batches;
    std::uint64_t order_violations = 0, above = 0;
    double diff_sum = 0.0;
    for (std::uint64_t b = 0; b < o.batches; ++b) {
        double bd = 0.0, bf = 0.0;
        for (std::uint64_t i = 0; i < per_batch; ++i) {
            std::tie(z, z2) = joint(z + 1, z2 + 1, rng);
            order_violations += z < z2;
            bd += static_cast<double>(z) - static_cast<double>(z2);
            bf += z > z2;
        }
        diff_sum += bd;
        above += static_cast<std::uint64_t>(bf);
        diff_batches.add(bd / static_cast<double>(per_batch));
        freq_batches.add(bf / static_cast<double>(per_batch));
    }
    const auto n = static_cast<double>(per_batch * o.batches);
    const double avg = diff_sum / n, freq = static_cast<double>(above) / n;
    r.counts["coupled_generations"] = per_batch * o.batches;
    r.counts["coupled_order_violations"] = order_violations;
    r.estimates.push_back({"coupled_average_gap", "ergodic_average", avg, 3.0 * diff_batches.standard_error(),
                           diff_batches.standard_error()});
    r.estimates.push_back({"coupled_frequency_above", "ergodic_average", freq, 3.0 * freq_batches.standard_error(),
                           freq_batches.standard_error()});
    r.claims.push_back({"coupled_average_ge_frequency", avg >= freq && order_violations == 0,
                        "average " + detail::fmt(avg) + ", frequency " + detail::fmt(freq)});
    r.claims.push_back({"mean_gap_ge_frequency", mean_gap >= freq - 3.0 * freq_batches.standard_error(),
                        "exact gap " + detail::fmt(mean_gap) + ", frequency " + detail::fmt(freq)});

    const std::size_t k = *verdict.witness;
    const auto pi_p = stationary_distribution(p, o.rel_tol);
    const double witness = pi_p.masses.at(k - 1) * coupled_failure_excess(p, q, *verdict.certificate, k);
    r.estimates.push_back({"witness_bound", "exact", witness, 0.0, 0.0});
    r.claims.push_back({"mean_gap_ge_witness_bound", mean_gap >= witness && witness > 0.0,
                        "exact gap " + detail::fmt(mean_gap) + ", witness " + detail::fmt(witness)});
    return r;
}

// ---------------------------------------------------------------------------

struct SuiteConfig {
    std::uint64_t seed = 1;
    /// Episode count for Monte Carlo experiments.
    std::uint64_t episodes = 100000;
    std::size_t threads = default_thread_count();
};

inline const std::vector<std::string>& suite_experiments() {
    static const std::vector<std::string> names{"pathwise_uv", "coupled_domination", "escape_gap", "speed_gap"};
    return names;
}

/// Runs the named experiments ("paper-all" expands to every experiment) on
/// the canonical environments.
inline std::vector<ExperimentReport> run_suite(const std::vector<std::string>& names, const SuiteConfig& config) {
    std::vector<std::string> expanded;
    for (const auto& n : names) {
        if (n == "paper-all") {
            expanded.insert(expanded.end(), suite_experiments().begin(), suite_experiments().end());
        } else if (std::find(suite_experiments().begin(), suite_experiments().end(), n) != suite_experiments().end()) {
            expanded.push_back(n);
        } else {
            throw std::invalid_argument("unknown experiment \"" + n + "\"");
        }
    }
    const auto env = [](const char* s) { return CookieEnvironment::parse(s); };
    std::vector<ExperimentReport> out;
    for (const auto& n : expanded) {
        const auto index = std::find(suite_experiments().begin(), suite_experiments().end(), n) - suite_experiments().begin();
        const auto seed = derive_seed(config.seed, static_cast<std::uint64_t>(index) + 1);
        if (n == "pathwise_uv") {
            for (const char* e : {"0.5", "0.9,0.9"})
                out.push_back(verify_pathwise_UV(env(e), config.episodes, 10000, seed, config.threads));
        } else if (n == "coupled_domination") {
            const std::pair<const char*, const char*> pairs[] = {{"0.5,0.9", "0.9,0.5"}, {"0.7,0.9,0.9", "0.9,0.7,0.9"}};
            for (const auto& [a, b] : pairs)
                out.push_back(verify_coupled_domination(env(a), env(b), config.episodes, 1000, seed, config.threads));
        } else if (n == "escape_gap") {
            EscapeOptions o;
            o.episodes = config.episodes;
            o.direct_episodes = config.episodes / 10;
            o.seed = seed;
            o.threads = config.threads;
            out.push_back(escape_probability_gap(env("0.9,0.8"), env("0.95,0.8"), o));
        } else if (n == "speed_gap") {
            SpeedGapOptions o;
            o.seed = seed;
            const std::pair<const char*, const char*> pairs[] = {
                {"0.9,0.9", "0.95,0.9"}, {"0.7,0.9,0.9", "0.9,0.7,0.9"}, {"0.8,0.95,0.95", "0.95,0.8,0.95"}};
            for (const auto& [a, b] : pairs) out.push_back(speed_gap(env(a), env(b), o));
        }
    }
    return out;
}

}  // namespace erw

#endif  // ERW_HARNESS_HPP
