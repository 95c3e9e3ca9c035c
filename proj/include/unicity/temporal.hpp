// Copyright 2026 The Unicity Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "unicity/core.hpp"
#include "unicity/estimator.hpp"
#include "unicity/tensor.hpp"

// Per-period analyses: seasonal unicity curves with catalog-size
// rescaling, fingerprint drift, and the descriptive statistics the
// synthetic generator is calibrated against.

namespace unicity {

inline constexpr const char* kUncategorizedLabel = "(uncategorized)";

/// Raw and rescaled per-period unicity. rescaled(t) = u(t) / (|A|_t/|A|_0)
/// where |A|_t is the number of distinct items used in period t.
struct SeasonalCurve {
    std::uint32_t n_apps = 0;
    Strategy strategy = Strategy::kPopularity;
    struct Point {
        PeriodIndex period = 0;
        double mean = 0.0;
        double stddev = 0.0;
        std::uint32_t population = 0;
        std::uint32_t app_set_size = 0;  // |A|_t
        double rescaled = 0.0;           // u-tilde(t)
    };
    std::vector<Point> points;
};

/// estimate_unicity per single-period window; per-period seeds are derived
/// from (seed, period) so the curve is deterministic and period order is
/// irrelevant to the result.
inline SeasonalCurve seasonal_unicity(const FingerprintTensor& tensor,
                                      const EstimatorParams& params) {
    if (tensor.num_periods() < 2)
        throw UsageError("seasonal analysis needs at least 2 periods");
    SeasonalCurve curve;
    curve.n_apps = params.n_apps;
    curve.strategy = params.strategy;
    curve.points.resize(tensor.num_periods());
    for (PeriodIndex t = 0; t < tensor.num_periods(); ++t) {
        EstimatorParams per = params;
        per.seed = derive_seed(params.seed, stream_tag::kSeasonal, t);
        const auto est = estimate_unicity(tensor, PeriodRange::single(t), per);
        auto& pt = curve.points[t];
        pt.period = t;
        pt.mean = est.mean;
        pt.stddev = est.stddev;
        pt.population = est.population_size;
        pt.app_set_size = tensor.period_item_count(t);
    }
    const double base = static_cast<double>(curve.points[0].app_set_size);
    for (auto& pt : curve.points)
        pt.rescaled = pt.mean / (static_cast<double>(pt.app_set_size) / base);
    return curve;
}

enum class DriftMode { kConsecutive, kFromBaseline };

inline const char* drift_mode_name(DriftMode m) {
    return m == DriftMode::kConsecutive ? "consecutive" : "from_baseline";
}

/// Distribution summary of per-user Jaccard distances between two periods.
/// Consecutive mode compares t-1 with t (reported at t); baseline mode
/// compares period 0 with t. Quantiles use linear interpolation.
struct DriftSeries {
    DriftMode mode = DriftMode::kConsecutive;
    struct Point {
        PeriodIndex period = 0;      // the later period of the pair
        std::uint64_t users = 0;     // co-present users
        bool empty = false;          // no co-present users
        double mean = 0.0;
        double median = 0.0;
        double q1 = 0.0;
        double q3 = 0.0;
    };
    std::vector<Point> points;
    std::vector<std::vector<double>> raw;  // per point, only when requested
};

namespace detail {

inline double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) return 0.0;
    if (sorted.size() == 1) return sorted[0];
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double jaccard_distance(std::span<const ItemIdx> a, std::span<const ItemIdx> b) {
    std::size_t i = 0, j = 0, inter = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++inter;
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    const std::size_t uni = a.size() + b.size() - inter;
    if (uni == 0) return 0.0;
    return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace detail

inline DriftSeries jaccard_drift(const FingerprintTensor& tensor, DriftMode mode,
                                 bool keep_raw = false) {
    if (tensor.num_periods() < 2) throw UsageError("drift analysis needs at least 2 periods");
    DriftSeries series;
    series.mode = mode;
    for (PeriodIndex t = 1; t < tensor.num_periods(); ++t) {
        const PeriodIndex earlier = mode == DriftMode::kConsecutive ? t - 1 : 0;
        std::vector<double> dists;
        for (UserIdx u = 0; u < tensor.num_users(); ++u) {
            const auto fa = tensor.items_of(u, earlier);
            const auto fb = tensor.items_of(u, t);
            if (fa.empty() || fb.empty()) continue;  // only co-present users
            dists.push_back(detail::jaccard_distance(fa, fb));
        }
        DriftSeries::Point pt;
        pt.period = t;
        pt.users = dists.size();
        if (dists.empty()) {
            pt.empty = true;
        } else {
            double sum = 0.0;
            for (const double d : dists) sum += d;
            pt.mean = sum / static_cast<double>(dists.size());
            std::sort(dists.begin(), dists.end());
            pt.median = detail::quantile_sorted(dists, 0.5);
            pt.q1 = detail::quantile_sorted(dists, 0.25);
            pt.q3 = detail::quantile_sorted(dists, 0.75);
        }
        series.points.push_back(pt);
        if (keep_raw) series.raw.push_back(std::move(dists));
    }
    return series;
}

/// Per-period mean and median fingerprint size over users present in the
/// period.
struct UsageStats {
    struct Point {
        PeriodIndex period = 0;
        std::uint64_t users = 0;
        double mean_items = 0.0;
        double median_items = 0.0;
    };
    std::vector<Point> points;
};

inline UsageStats usage_stats(const FingerprintTensor& tensor) {
    UsageStats stats;
    for (PeriodIndex t = 0; t < tensor.num_periods(); ++t) {
        std::vector<double> sizes;
        for (UserIdx u = 0; u < tensor.num_users(); ++u) {
            const auto fp = tensor.items_of(u, t);
            if (!fp.empty()) sizes.push_back(static_cast<double>(fp.size()));
        }
        UsageStats::Point pt;
        pt.period = t;
        pt.users = sizes.size();
        if (!sizes.empty()) {
            double sum = 0.0;
            for (const double v : sizes) sum += v;
            pt.mean_items = sum / static_cast<double>(sizes.size());
            std::sort(sizes.begin(), sizes.end());
            pt.median_items = detail::quantile_sorted(sizes, 0.5);
        }
        stats.points.push_back(pt);
    }
    return stats;
}

/// Log-binned histogram of item popularity counts over a window. Bin b
/// covers [base^b, base^(b+1)) in count space, starting at 1.
struct PopularityHistogram {
    PeriodRange window;
    double base = 2.0;
    std::string scheme = "log2";
    struct Bin {
        std::uint64_t lo = 0;  // inclusive
        std::uint64_t hi = 0;  // exclusive
        std::uint64_t items = 0;
    };
    std::vector<Bin> bins;
    std::uint64_t total_items = 0;
    std::uint32_t max_count = 0;
};

inline PopularityHistogram popularity_histogram(const FingerprintTensor& tensor,
                                                PeriodRange window, double base = 2.0) {
    if (!(base > 1.0)) throw UsageError("histogram base must exceed 1");
    const auto pop = popularity(tensor, window);
    PopularityHistogram hist;
    hist.window = window;
    hist.base = base;
    hist.scheme = base == 2.0 ? "log2" : "log" + std::to_string(base);
    pop.for_each([&hist](ItemIdx, std::uint32_t count) {
        hist.max_count = std::max(hist.max_count, count);
        ++hist.total_items;
    });
    if (hist.total_items == 0) return hist;

    std::vector<std::uint64_t> edges{1};
    while (edges.back() <= hist.max_count) {
        const auto next = static_cast<std::uint64_t>(
            std::ceil(static_cast<double>(edges.back()) * base));
        edges.push_back(std::max(next, edges.back() + 1));
    }
    hist.bins.resize(edges.size() - 1);
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
        hist.bins[b].lo = edges[b];
        hist.bins[b].hi = edges[b + 1];
    }
    pop.for_each([&](ItemIdx, std::uint32_t count) {
        const auto it = std::upper_bound(edges.begin(), edges.end(), std::uint64_t{count});
        ++hist.bins[static_cast<std::size_t>(it - edges.begin()) - 1].items;
    });
    return hist;
}

/// Slope of log density vs log bin center over the histogram's tail;
/// estimates the exponent of a power-law-ish count distribution. The first
/// bin is skipped (discreteness) and empty bins are ignored.
inline double estimate_tail_exponent(const PopularityHistogram& hist) {
    std::vector<double> xs, ys;
    for (std::size_t b = 1; b < hist.bins.size(); ++b) {
        const auto& bin = hist.bins[b];
        if (bin.items == 0) continue;
        const double width = static_cast<double>(bin.hi - bin.lo);
        const double center = std::sqrt(static_cast<double>(bin.lo) *
                                        static_cast<double>(bin.hi - 1));
        const double density = static_cast<double>(bin.items) / width;
        xs.push_back(std::log(center));
        ys.push_back(std::log(density));
    }
    if (xs.size() < 2) throw DataError("tail fit needs at least 2 occupied bins");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return -slope;
}

/// Per-period fraction of used items per category label. Default basis is
/// distinct items; pair weighting counts every (user, item) presence.
struct CategoryFractions {
    bool pair_weighted = false;
    struct Point {
        PeriodIndex period = 0;
        std::map<std::string, double> fractions;  // sums to 1 per period
    };
    std::vector<Point> points;
};

inline CategoryFractions category_fractions(
    const FingerprintTensor& tensor, const std::unordered_map<ItemId, std::string>& categories,
    bool pair_weighted = false) {
    CategoryFractions result;
    result.pair_weighted = pair_weighted;
    // label per dense item, uncategorized reserved
    std::vector<const std::string*> label_of(tensor.num_items());
    static const std::string reserved = kUncategorizedLabel;
    for (ItemIdx i = 0; i < tensor.num_items(); ++i) {
        const auto it = categories.find(tensor.item_id(i));
        label_of[i] = it == categories.end() ? &reserved : &it->second;
    }
    for (PeriodIndex t = 0; t < tensor.num_periods(); ++t) {
        std::map<std::string, double> tally;
        double total = 0.0;
        if (pair_weighted) {
            for (UserIdx u = 0; u < tensor.num_users(); ++u)
                for (const ItemIdx i : tensor.items_of(u, t)) {
                    tally[*label_of[i]] += 1.0;
                    total += 1.0;
                }
        } else {
            for (ItemIdx i = 0; i < tensor.num_items(); ++i)
                if (!tensor.users_of(i, t).empty()) {
                    tally[*label_of[i]] += 1.0;
                    total += 1.0;
                }
        }
        CategoryFractions::Point pt;
        pt.period = t;
        if (total > 0.0)
            for (auto& [label, count] : tally) pt.fractions[label] = count / total;
        result.points.push_back(std::move(pt));
    }
    return result;
}

}  // namespace unicity
