// Coupling partial order between cookie environments.
//
// p ⪯ q holds when the product Bernoulli laws of p and q admit a joint law
// whose support only contains prefix-dominance pairs (y, z), i.e.
// sum_{j<=m} y_j <= sum_{j<=m} z_j for every m. Feasibility is decided as a
// transportation problem solved by max-flow; the flow is the certificate.

#ifndef ERW_COUPLING_HPP
#define ERW_COUPLING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "erw/cookie_env.hpp"

namespace erw {

inline constexpr std::size_t kMaxCouplingCookies = 12;
inline constexpr double kFeasibilityTolerance = 1e-10;

/// Length-M binary vector, bit j-1 holds the j-th entry.
using Outcome = std::uint32_t;

inline bool prefix_dominated(Outcome y, Outcome z, std::size_t m) {
    int sy = 0, sz = 0;
    for (std::size_t j = 0; j < m; ++j) {
        sy += static_cast<int>((y >> j) & 1U);
        sz += static_cast<int>((z >> j) & 1U);
        if (sy > sz) return false;
    }
    return true;
}

/// Probability of outcome `x` under independent Bernoulli(p_j) entries.
inline double product_mass(const CookieEnvironment& env, Outcome x) {
    double w = 1.0;
    for (std::size_t j = 0; j < env.size(); ++j) w *= ((x >> j) & 1U) ? env.probs()[j] : 1.0 - env.probs()[j];
    return w;
}

inline std::string outcome_string(Outcome x, std::size_t m) {
    std::string s = "(";
    for (std::size_t j = 0; j < m; ++j) {
        if (j) s += ',';
        s += ((x >> j) & 1U) ? '1' : '0';
    }
    return s + ")";
}

struct CouplingEntry {
    Outcome y = 0;
    Outcome z = 0;
    double mass = 0.0;
};

struct CouplingTable {
    std::size_t length = 0;
    std::vector<CouplingEntry> support;

    double total_mass() const {
        double t = 0.0;
        for (const auto& e : support) t += e.mass;
        return t;
    }
};

class CorruptedCouplingTable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Describes the first violated invariant of `table` as a coupling of (p, q),
/// or returns nullopt when the table is a valid certificate.
inline std::optional<std::string> coupling_violation(const CouplingTable& table, const CookieEnvironment& p,
                                                     const CookieEnvironment& q, double marginal_tol = 1e-10) {
    const std::size_t m = table.length;
    if (p.size() != m || q.size() != m) return "table length does not match the environments";
    if (m > kMaxCouplingCookies) return "table length exceeds " + std::to_string(kMaxCouplingCookies);
    const std::size_t n = std::size_t{1} << m;
    std::vector<double> first(n, 0.0), second(n, 0.0);
    for (const auto& e : table.support) {
        if (!(e.mass > 0.0)) return "non-positive mass on " + outcome_string(e.y, m) + " " + outcome_string(e.z, m);
        if (e.y >= n || e.z >= n) return "outcome out of range";
        if (!prefix_dominated(e.y, e.z, m))
            return "support pair " + outcome_string(e.y, m) + " " + outcome_string(e.z, m) + " violates prefix dominance";
        first[e.y] += e.mass;
        second[e.z] += e.mass;
    }
    if (std::abs(table.total_mass() - 1.0) > 1e-12) return "masses do not sum to 1";
    for (Outcome x = 0; x < n; ++x) {
        if (std::abs(first[x] - product_mass(p, x)) > marginal_tol)
            return "first marginal differs at " + outcome_string(x, m);
        if (std::abs(second[x] - product_mass(q, x)) > marginal_tol)
            return "second marginal differs at " + outcome_string(x, m);
    }
    return std::nullopt;
}

namespace detail {

/// Dinic max-flow on real capacities.
class MaxFlow {
public:
    explicit MaxFlow(std::size_t nodes) : adj_(nodes), level_(nodes), cursor_(nodes) {}

    std::size_t add_edge(std::size_t from, std::size_t to, double cap) {
        adj_[from].push_back(edges_.size());
        edges_.push_back({to, cap, 0.0});
        adj_[to].push_back(edges_.size());
        edges_.push_back({from, 0.0, 0.0});
        return edges_.size() - 2;
    }

    double flow_on(std::size_t edge) const { return edges_[edge].flow; }

    double run(std::size_t s, std::size_t t) {
        double total = 0.0;
        while (bfs(s, t)) {
            std::fill(cursor_.begin(), cursor_.end(), 0);
            while (true) {
                const double pushed = dfs(s, t, std::numeric_limits<double>::infinity());
                if (pushed <= kEps) break;
                total += pushed;
            }
        }
        return total;
    }

private:
    static constexpr double kEps = 1e-18;

    struct Edge {
        std::size_t to;
        double cap;
        double flow;
    };

    double residual(const Edge& e) const { return e.cap - e.flow; }

    bool bfs(std::size_t s, std::size_t t) {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<std::size_t> todo;
        level_[s] = 0;
        todo.push(s);
        while (!todo.empty()) {
            const auto v = todo.front();
            todo.pop();
            for (auto id : adj_[v]) {
                const auto& e = edges_[id];
                if (level_[e.to] < 0 && residual(e) > kEps) {
                    level_[e.to] = level_[v] + 1;
                    todo.push(e.to);
                }
            }
        }
        return level_[t] >= 0;
    }

    double dfs(std::size_t v, std::size_t t, double limit) {
        if (v == t) return limit;
        for (auto& i = cursor_[v]; i < adj_[v].size(); ++i) {
            const auto id = adj_[v][i];
            auto& e = edges_[id];
            if (level_[e.to] != level_[v] + 1 || residual(e) <= kEps) continue;
            const double got = dfs(e.to, t, std::min(limit, residual(e)));
            if (got > kEps) {
                e.flow += got;
                edges_[id ^ 1U].flow -= got;
                return got;
            }
        }
        return 0.0;
    }

    std::vector<std::vector<std::size_t>> adj_;
    std::vector<Edge> edges_;
    std::vector<int> level_;
    std::vector<std::size_t> cursor_;
};

struct TransportSolution {
    double max_flow = 0.0;
    CouplingTable table;
};

/// Max-flow over 2^M supply and 2^M demand nodes with prefix-dominance edges,
/// edges added in lexicographic (y, z) order.
inline TransportSolution solve_transport(const CookieEnvironment& p, const CookieEnvironment& q) {
    const std::size_t m = p.size();
    const std::size_t n = std::size_t{1} << m;
    const std::size_t source = 2 * n, sink = 2 * n + 1;
    MaxFlow net(2 * n + 2);
    for (Outcome y = 0; y < n; ++y) net.add_edge(source, y, product_mass(p, y));
    for (Outcome z = 0; z < n; ++z) net.add_edge(n + z, sink, product_mass(q, z));
    std::vector<std::pair<std::size_t, std::pair<Outcome, Outcome>>> pairs;
    for (Outcome y = 0; y < n; ++y)
        for (Outcome z = 0; z < n; ++z)
            if (prefix_dominated(y, z, m)) pairs.push_back({net.add_edge(y, n + z, 2.0), {y, z}});
    TransportSolution out;
    out.max_flow = net.run(source, sink);
    out.table.length = m;
    for (const auto& [edge, yz] : pairs) {
        const double f = net.flow_on(edge);
        if (f > 1e-300) out.table.support.push_back({yz.first, yz.second, f});
    }
    return out;
}

}  // namespace detail

enum class Order { Incomparable, Equal, WeakOnly, Strict };

inline std::string to_string(Order o) {
    switch (o) {
        case Order::Incomparable: return "Incomparable";
        case Order::Equal: return "Equal";
        case Order::WeakOnly: return "WeakOnly";
        case Order::Strict: return "Strict";
    }
    return "?";
}

struct OrderVerdict {
    Order order = Order::Incomparable;
    /// Minimal index m with sum_{j<=m} p_j < sum_{j<=m} q_j (Strict only).
    std::optional<std::size_t> witness;
    /// Failing prefix of the necessary cumulative test (Incomparable only).
    std::optional<std::size_t> failed_prefix;
    std::optional<CouplingTable> certificate;
    double max_flow = 0.0;
};

/// Both environments padded with strength-1/2 cookies to a common length.
inline std::pair<CookieEnvironment, CookieEnvironment> common_length(const CookieEnvironment& p,
                                                                     const CookieEnvironment& q) {
    const std::size_t m = std::max(p.size(), q.size());
    return {p.padded(m), q.padded(m)};
}

inline std::optional<std::size_t> first_strict_prefix(const CookieEnvironment& p, const CookieEnvironment& q) {
    for (std::size_t m = 1; m <= p.size(); ++m)
        if (CookieEnvironment::compare_prefix(p, q, m) < 0) return m;
    return std::nullopt;
}

inline OrderVerdict decide_order(const CookieEnvironment& p_in, const CookieEnvironment& q_in) {
    const auto [p, q] = common_length(p_in, q_in);
    const std::size_t m = p.size();
    if (m > kMaxCouplingCookies)
        throw std::invalid_argument("coupling search supports at most " + std::to_string(kMaxCouplingCookies) +
                                    " cookies, got " + std::to_string(m));
    OrderVerdict v;
    for (std::size_t k = 1; k <= m; ++k) {
        if (CookieEnvironment::compare_prefix(p, q, k) > 0) {
            v.failed_prefix = k;
            return v;
        }
    }
    auto solution = detail::solve_transport(p, q);
    v.max_flow = solution.max_flow;
    if (std::abs(solution.max_flow - 1.0) > kFeasibilityTolerance) return v;
    v.certificate = std::move(solution.table);
    if (p == q) {
        v.order = Order::Equal;
    } else if (auto k = first_strict_prefix(p, q)) {
        v.order = Order::Strict;
        v.witness = k;
    } else {
        v.order = Order::WeakOnly;
    }
    return v;
}

inline CouplingTable build_coupling_table(const CookieEnvironment& p, const CookieEnvironment& q) {
    auto verdict = decide_order(p, q);
    if (verdict.order == Order::Incomparable || !verdict.certificate)
        throw std::invalid_argument("no prefix-dominance coupling exists for p = (" + p.to_string() + "), q = (" +
                                    q.to_string() + ")");
    return std::move(*verdict.certificate);
}

inline std::size_t minimal_strict_index(const CookieEnvironment& p_in, const CookieEnvironment& q_in) {
    const auto verdict = decide_order(p_in, q_in);
    if (verdict.order != Order::Strict || !verdict.witness)
        throw std::invalid_argument("environments are not strictly ordered (verdict " + to_string(verdict.order) + ")");
    return *verdict.witness;
}

/// (1-q_1)...(1-q_{k-1}) q_k - (1-p_1)...(1-p_{k-1}) p_k
inline double strict_gap_value(const CookieEnvironment& p_in, const CookieEnvironment& q_in, std::size_t k) {
    const auto [p, q] = common_length(p_in, q_in);
    if (k < 1 || k > p.size()) throw std::invalid_argument("strict_gap_value: k must lie in 1..M");
    double wp = p.cookie(k), wq = q.cookie(k);
    for (std::size_t j = 1; j < k; ++j) {
        wp *= 1.0 - p.cookie(j);
        wq *= 1.0 - q.cookie(j);
    }
    return wq - wp;
}

}  // namespace erw

#endif  // ERW_COUPLING_HPP
