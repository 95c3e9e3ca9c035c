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
#include <string>
#include <vector>

#include "unicity/core.hpp"
#include "unicity/estimator.hpp"
#include "unicity/rng.hpp"

// Sample-size dependence of unicity: draw user subsamples of scheduled
// sizes, attack each subsample as a dataset of its own, aggregate across
// realizations.

namespace unicity {

struct ScheduleEntry {
    std::uint64_t population_size = 0;
    std::uint32_t realizations = 1;
};

struct SubsampleSchedule {
    std::vector<ScheduleEntry> entries;

    /// Default realization count for a size: 20 up to 500k, 10 up to 900k,
    /// 5 above.
    static std::uint32_t default_realizations(std::uint64_t size) {
        if (size <= 500000) return 20;
        if (size < 1000000) return 10;
        return 5;
    }

    /// The tiered schedule: 100k..900k in steps of 100k, then 1M upward in
    /// steps of 500k, clipped to the dataset and always ending at the full
    /// population.
    static SubsampleSchedule tiered(std::uint64_t population) {
        SubsampleSchedule sched;
        for (std::uint64_t size = 100000; size < population; size += size < 1000000 ? 100000 : 500000)
            sched.entries.push_back({size, default_realizations(size)});
        sched.entries.push_back({population, 1});
        return sched;
    }

    void validate(std::uint64_t population) const {
        if (entries.empty()) throw UsageError("schedule has no entries");
        std::string offenders;
        for (const auto& e : entries) {
            if (e.realizations < 1) throw UsageError("schedule: realizations must be >= 1");
            if (e.population_size < 1 || e.population_size > population) {
                if (!offenders.empty()) offenders += ", ";
                offenders += std::to_string(e.population_size);
            }
        }
        if (!offenders.empty())
            throw DataError("schedule sizes outside population of " + std::to_string(population) +
                            ": " + offenders);
    }
};

struct ScalingCurve {
    std::uint32_t n_apps = 0;
    Strategy strategy = Strategy::kPopularity;
    PeriodRange window;
    std::uint64_t seed = 0;
    std::uint32_t s = 0;
    std::uint32_t sample_size = 0;
    bool popularity_from_parent = false;
    struct SizePoint {
        std::uint64_t population_size = 0;
        double mean = 0.0;   // across realizations
        double stddev = 0.0; // population std across realizations
        std::vector<double> per_realization;
    };
    std::vector<SizePoint> sizes;

    /// x values for fitting, in millions of users.
    std::vector<double> x_millions() const {
        std::vector<double> xs;
        xs.reserve(sizes.size());
        for (const auto& p : sizes) xs.push_back(static_cast<double>(p.population_size) / 1e6);
        return xs;
    }
    std::vector<double> means() const {
        std::vector<double> ys;
        ys.reserve(sizes.size());
        for (const auto& p : sizes) ys.push_back(p.mean);
        return ys;
    }
    std::vector<double> stddevs() const {
        std::vector<double> ys;
        ys.reserve(sizes.size());
        for (const auto& p : sizes) ys.push_back(p.stddev);
        return ys;
    }
};

/// For each schedule entry: draw `realizations` uniform user subsamples
/// without replacement from the window population, rebuild index and
/// popularity inside each subsample, and estimate unicity against the
/// subsample population. Deterministic: realization r of size index i uses
/// streams derived from (seed, i, r).
inline ScalingCurve scaling_curve(const FingerprintTensor& tensor,
                                  const SubsampleSchedule& schedule, PeriodRange window,
                                  const EstimatorParams& params,
                                  bool popularity_from_parent = false) {
    tensor.check_window(window);
    params.validate();
    const auto population = tensor.window_population(window);
    schedule.validate(population.size());

    ScalingCurve curve;
    curve.n_apps = params.n_apps;
    curve.strategy = params.strategy;
    curve.window = window;
    curve.seed = params.seed;
    curve.s = params.s;
    curve.sample_size = params.sample_size;
    curve.popularity_from_parent = popularity_from_parent;

    for (std::size_t i = 0; i < schedule.entries.size(); ++i) {
        const auto& entry = schedule.entries[i];
        ScalingCurve::SizePoint point;
        point.population_size = entry.population_size;
        for (std::uint32_t r = 0; r < entry.realizations; ++r) {
            auto draw_rng = derive_stream(params.seed, stream_tag::kSubsample, i, r);
            const auto picks =
                sample_without_replacement(population.size(), entry.population_size, draw_rng);
            std::vector<UserIdx> subset;
            subset.reserve(picks.size());
            for (const auto p : picks) subset.push_back(population[p]);
            const auto ctx =
                WindowContext::build_subset(tensor, window, subset, popularity_from_parent);
            EstimatorParams sub = params;
            sub.seed = derive_seed(params.seed, stream_tag::kSubEstimate, i, r);
            point.per_realization.push_back(estimate_unicity(ctx, sub).mean);
        }
        double sum = 0.0;
        for (const double v : point.per_realization) sum += v;
        point.mean = sum / static_cast<double>(point.per_realization.size());
        double ss = 0.0;
        for (const double v : point.per_realization) ss += (v - point.mean) * (v - point.mean);
        point.stddev = std::sqrt(ss / static_cast<double>(point.per_realization.size()));
        curve.sizes.push_back(std::move(point));
    }
    return curve;
}

}  // namespace unicity
