// Small statistics toolkit for the Monte Carlo checks: running moments,
// chi-square tests with cell pooling, Clopper-Pearson intervals.

#ifndef ERW_STATS_HPP
#define ERW_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace erw::stats {

class RunningMean {
public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }

    /// Chan et al. pairwise merge.
    void merge(const RunningMean& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) {
            *this = o;
            return;
        }
        const auto n = n_ + o.n_;
        const double d = o.mean_ - mean_;
        mean_ += d * static_cast<double>(o.n_) / static_cast<double>(n);
        m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / static_cast<double>(n);
        n_ = n;
    }

    std::uint64_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double standard_error() const { return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct ChiSquareResult {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    int cells = 0;
};

inline double chi_square_upper_tail(double statistic, int df) {
    if (df <= 0) return 1.0;
    return boost::math::gamma_q(0.5 * df, 0.5 * statistic);
}

/// Two-sample chi-square homogeneity test on categorical counts. Cells whose
/// combined count is below `min_cell` are pooled into one cell.
template <class Key>
ChiSquareResult two_sample_chi_square(const std::map<Key, std::uint64_t>& a, const std::map<Key, std::uint64_t>& b,
                                      double min_cell = 20.0) {
    std::map<Key, std::pair<double, double>> joint;
    for (const auto& [k, c] : a) joint[k].first += static_cast<double>(c);
    for (const auto& [k, c] : b) joint[k].second += static_cast<double>(c);
    std::vector<std::pair<double, double>> cells;
    std::pair<double, double> pooled{0.0, 0.0};
    for (const auto& [k, ab] : joint) {
        if (ab.first + ab.second < min_cell) {
            pooled.first += ab.first;
            pooled.second += ab.second;
        } else {
            cells.push_back(ab);
        }
    }
    if (pooled.first + pooled.second > 0.0) {
        if (pooled.first + pooled.second < min_cell && !cells.empty()) {
            auto smallest = std::min_element(cells.begin(), cells.end(), [](const auto& x, const auto& y) {
                return x.first + x.second < y.first + y.second;
            });
            smallest->first += pooled.first;
            smallest->second += pooled.second;
        } else {
            cells.push_back(pooled);
        }
    }
    double na = 0.0, nb = 0.0;
    for (const auto& [x, y] : cells) {
        na += x;
        nb += y;
    }
    ChiSquareResult r;
    r.cells = static_cast<int>(cells.size());
    if (na == 0.0 || nb == 0.0 || cells.size() < 2) return r;
    const double ka = std::sqrt(nb / na), kb = std::sqrt(na / nb);
    for (const auto& [x, y] : cells) {
        const double d = ka * x - kb * y;
        r.statistic += d * d / (x + y);
    }
    r.df = r.cells - 1;
    r.p_value = chi_square_upper_tail(r.statistic, r.df);
    return r;
}

/// Goodness of fit of observed counts against exact probabilities. Cells with
/// expected count below `min_expected` are pooled together with all mass not
/// listed in `probs`.
template <class Key>
ChiSquareResult goodness_of_fit(const std::map<Key, std::uint64_t>& observed, const std::map<Key, double>& probs,
                                double min_expected = 5.0) {
    double n = 0.0;
    for (const auto& [k, c] : observed) n += static_cast<double>(c);
    std::vector<std::pair<double, double>> cells;  // (observed, expected)
    double listed = 0.0;
    std::pair<double, double> pooled{0.0, 0.0};
    for (const auto& [k, pr] : probs) {
        listed += pr;
        const auto it = observed.find(k);
        const double o = it == observed.end() ? 0.0 : static_cast<double>(it->second);
        if (n * pr < min_expected) {
            pooled.first += o;
            pooled.second += n * pr;
        } else {
            cells.push_back({o, n * pr});
        }
    }
    for (const auto& [k, c] : observed)
        if (!probs.count(k)) pooled.first += static_cast<double>(c);
    pooled.second += n * std::max(0.0, 1.0 - listed);
    if (pooled.second > 0.0 || pooled.first > 0.0) {
        if (pooled.second < min_expected && !cells.empty()) {
            auto smallest = std::min_element(cells.begin(), cells.end(),
                                             [](const auto& x, const auto& y) { return x.second < y.second; });
            smallest->first += pooled.first;
            smallest->second += pooled.second;
        } else {
            cells.push_back(pooled);
        }
    }
    ChiSquareResult r;
    r.cells = static_cast<int>(cells.size());
    for (const auto& [o, e] : cells) r.statistic += (o - e) * (o - e) / e;
    r.df = r.cells - 1;
    r.p_value = chi_square_upper_tail(r.statistic, r.df);
    return r;
}

struct Interval {
    double lower = 0.0;
    double upper = 1.0;
};

/// Two-sided Clopper-Pearson interval for k successes in n trials.
inline Interval clopper_pearson(std::uint64_t k, std::uint64_t n, double confidence = 0.95) {
    const double alpha = 1.0 - confidence;
    Interval out;
    const auto kd = static_cast<double>(k), nd = static_cast<double>(n);
    out.lower = k == 0 ? 0.0 : boost::math::ibeta_inv(kd, nd - kd + 1.0, alpha / 2.0);
    out.upper = k == n ? 1.0 : boost::math::ibeta_inv(kd + 1.0, nd - kd, 1.0 - alpha / 2.0);
    return out;
}

/// Total variation distance between two (sub-)probability vectors.
inline double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = std::max(a.size(), b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = i < a.size() ? a[i] : 0.0;
        const double y = i < b.size() ? b[i] : 0.0;
        s += std::abs(x - y);
    }
    return 0.5 * s;
}

}  // namespace erw::stats

#endif  // ERW_STATS_HPP
