// Paired trial fields (xi, xi') built from a coupling table: at every site the
// first M trials of both components come from one joint draw (Y_i, Z_i), and
// all later trials are shared fair bits B_{i, j-M}.

#ifndef ERW_COUPLED_FIELD_HPP
#define ERW_COUPLED_FIELD_HPP

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "erw/coupling.hpp"
#include "erw/rng.hpp"
#include "erw/trial_field.hpp"

namespace erw {

class CoupledTrialField {
public:
    CoupledTrialField(CookieEnvironment p, CookieEnvironment q, CouplingTable table, std::uint64_t seed)
        : seed_(seed), table_(std::move(table)) {
        std::tie(p_, q_) = common_length(p, q);
        if (table_.length != p_.size())
            throw CorruptedCouplingTable("coupling table length " + std::to_string(table_.length) +
                                         " does not match environment length " + std::to_string(p_.size()));
        for (const auto& e : table_.support) {
            if (!prefix_dominated(e.y, e.z, table_.length))
                throw CorruptedCouplingTable("coupling table support contains non-dominance pair " +
                                             outcome_string(e.y, table_.length) + " " +
                                             outcome_string(e.z, table_.length));
            if (!(e.mass > 0.0)) throw CorruptedCouplingTable("coupling table has a non-positive mass");
        }
        if (table_.support.empty()) throw CorruptedCouplingTable("coupling table is empty");
        double acc = 0.0;
        cumulative_.reserve(table_.support.size());
        for (const auto& e : table_.support) cumulative_.push_back(acc += e.mass);
    }

    /// Builds the certificate table for (p, q) first.
    static CoupledTrialField from_order(const CookieEnvironment& p, const CookieEnvironment& q, std::uint64_t seed) {
        return CoupledTrialField(p, q, build_coupling_table(p, q), seed);
    }

    const CookieEnvironment& p() const { return p_; }
    const CookieEnvironment& q() const { return q_; }
    const CouplingTable& table() const { return table_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t cookie_count() const { return table_.length; }

    /// The joint draw (Y_i, Z_i) at `site`.
    const CouplingEntry& joint(std::int64_t site) const {
        const double u = to_unit(counter_hash(seed_, site, StreamTag::JointDraw, 0)) * cumulative_.back();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        if (it == cumulative_.end()) --it;
        return table_.support[static_cast<std::size_t>(it - cumulative_.begin())];
    }

    std::uint64_t fair_word(std::int64_t site, std::uint64_t w) const {
        return counter_hash(seed_, site, StreamTag::FairWord, w);
    }

    /// (xi_{site,j}, xi'_{site,j}); j >= 1.
    std::pair<bool, bool> trial(std::int64_t site, std::uint64_t j) const {
        if (j == 0) throw std::invalid_argument("trial index starts at 1");
        if (j <= cookie_count()) {
            const auto& e = joint(site);
            return {((e.y >> (j - 1)) & 1U) != 0, ((e.z >> (j - 1)) & 1U) != 0};
        }
        const std::uint64_t t = j - cookie_count() - 1;
        const bool b = (fair_word(site, t / 64) >> (t % 64)) & 1U;
        return {b, b};
    }

    /// Next unconsumed pair at `site`; advances that site's counter.
    std::pair<bool, bool> next(std::int64_t site) { return trial(site, ++counters_[site]); }

    /// One component viewed as an ordinary trial source.
    class Side {
    public:
        Side(const CoupledTrialField& field, bool second) : field_(&field), second_(second) {}
        std::size_t cookie_count() const { return field_->cookie_count(); }
        bool cookie_trial(std::int64_t site, std::uint64_t j) const {
            const auto& e = field_->joint(site);
            return (((second_ ? e.z : e.y) >> (j - 1)) & 1U) != 0;
        }
        std::uint64_t fair_word(std::int64_t site, std::uint64_t w) const { return field_->fair_word(site, w); }

    private:
        const CoupledTrialField* field_;
        bool second_;
    };

    Side first() const { return Side(*this, false); }
    Side second() const { return Side(*this, true); }

private:
    CookieEnvironment p_, q_;
    std::uint64_t seed_;
    CouplingTable table_;
    std::vector<double> cumulative_;
    std::unordered_map<std::int64_t, std::uint64_t> counters_;
};

static_assert(TrialSource<CoupledTrialField::Side>);

}  // namespace erw

#endif  // ERW_COUPLED_FIELD_HPP
