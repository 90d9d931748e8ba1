// JSON records and CSV exports.

#ifndef ERW_IO_HPP
#define ERW_IO_HPP

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "erw/backward_bp.hpp"
#include "erw/cookie_env.hpp"
#include "erw/coupling.hpp"
#include "erw/forward_bp.hpp"
#include "erw/harness.hpp"
#include "erw/walk.hpp"

namespace erw {

using json = nlohmann::ordered_json;

/// Non-finite numbers become strings so the output stays valid JSON.
inline json number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

inline json to_json(const CookieEnvironment& env) {
    json probs = json::array();
    for (double p : env.probs()) probs.push_back(p);
    return {{"probs", probs}};
}

inline json to_json(const Regime& r) {
    return {{"recurrence", to_string(r.recurrence)}, {"speed_sign", to_string(r.speed_sign)}};
}

inline json to_json(const SpeedReport& s) {
    return {{"delta", s.delta},
            {"regime", to_json(s.regime)},
            {"v", s.v},
            {"method", s.method},
            {"error_estimate", number(s.error_estimate)}};
}

inline json to_json(const ExcursionIdentity& e) {
    return {{"k", e.k}, {"lhs", e.lhs}, {"rhs", e.rhs}, {"abs_diff", e.abs_diff}};
}

inline json to_json(const CouplingTable& t) {
    json rows = json::array();
    for (const auto& e : t.support)
        rows.push_back({{"y", outcome_string(e.y, t.length)}, {"z", outcome_string(e.z, t.length)}, {"mass", e.mass}});
    return {{"length", t.length}, {"support", rows}};
}

inline json to_json(const OrderVerdict& v) {
    json j{{"order", to_string(v.order)}, {"max_flow", v.max_flow}};
    j["witness"] = v.witness ? json(*v.witness) : json(nullptr);
    j["failed_prefix"] = v.failed_prefix ? json(*v.failed_prefix) : json(nullptr);
    j["certificate"] = v.certificate ? to_json(*v.certificate) : json(nullptr);
    return j;
}

inline json to_json(const ExperimentReport& r) {
    json envs = json::array();
    for (const auto& e : r.environments) envs.push_back(to_json(e));
    json claims = json::array();
    for (const auto& c : r.claims) claims.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    json estimates = json::array();
    for (const auto& e : r.estimates)
        estimates.push_back({{"name", e.name},
                             {"method", e.method},
                             {"value", number(e.value)},
                             {"radius", number(e.radius)},
                             {"standard_error", number(e.standard_error)}});
    json counts = json::object();
    for (const auto& [k, v] : r.counts) counts[k] = v;
    json j{{"experiment", r.experiment}, {"environments", envs}, {"seed", r.seed},     {"episodes", r.episodes},
           {"passed", r.passed()},      {"claims", claims},     {"estimates", estimates}, {"counts", counts}};
    if (r.runtime_seconds) j["runtime_seconds"] = *r.runtime_seconds;
    return j;
}

inline json to_json(const std::vector<ExperimentReport>& reports) {
    json list = json::array();
    bool all = true;
    for (const auto& r : reports) {
        list.push_back(to_json(r));
        all = all && r.passed();
    }
    return {{"passed", all}, {"reports", list}};
}

// CSV

inline void write_trace_csv(std::ostream& os, const WalkTrace& trace) {
    os << "step,position\n";
    for (std::size_t n = 0; n < trace.positions.size(); ++n) os << n << ',' << trace.positions[n] << '\n';
}

inline void write_stationary_csv(std::ostream& os, const StationaryDistribution& pi) {
    os << "state,mass\n";
    os.precision(17);
    for (std::size_t k = 0; k < pi.masses.size(); ++k) os << k << ',' << pi.masses[k] << '\n';
}

inline void write_coupling_csv(std::ostream& os, const CouplingTable& t) {
    os << "y,z,mass\n";
    os.precision(17);
    for (const auto& e : t.support)
        os << '"' << outcome_string(e.y, t.length) << "\",\"" << outcome_string(e.z, t.length) << "\"," << e.mass << '\n';
}

template <class Writer>
void write_file(const std::string& path, Writer&& writer) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    writer(os);
    if (!os) throw std::runtime_error("failed writing " + path);
}

}  // namespace erw

#endif  // ERW_IO_HPP
