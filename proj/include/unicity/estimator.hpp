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
#include <span>
#include <string>
#include <vector>

#include "unicity/core.hpp"
#include "unicity/match_index.hpp"
#include "unicity/parallel.hpp"
#include "unicity/rng.hpp"
#include "unicity/tensor.hpp"

namespace unicity {

/// How the attacker picks the n quasi-identifier items out of a
/// fingerprint: uniformly at random, or rarest-first by popularity.
enum class Strategy { kRandom, kPopularity };

inline const char* strategy_name(Strategy s) {
    return s == Strategy::kRandom ? "random" : "popularity";
}

inline Strategy parse_strategy(const std::string& name) {
    if (name == "random") return Strategy::kRandom;
    if (name == "popularity") return Strategy::kPopularity;
    throw UsageError("unknown strategy '" + name + "' (expected random|popularity)");
}

/// The item subset used to match a user against the population.
/// items ⊆ the source user's window fingerprint, |items| = min(n, |fp|).
struct QuasiIdentifier {
    UserId source_user = 0;
    std::vector<ItemId> items;  // sorted external ids
};

/// Which window the attack's popularity ranks come from: the attacked
/// window itself (default, self-contained attack) or the full dataset
/// (sensitivity mode).
enum class PopularityScope { kWindow, kGlobal };

struct EstimatorParams {
    std::uint32_t n_apps = 1;
    Strategy strategy = Strategy::kPopularity;
    std::uint32_t s = 20;               // number of samples
    std::uint32_t sample_size = 10000;  // capped at the population size
    std::uint64_t seed = kDefaultSeed;
    std::uint32_t workers = 0;          // 0 = hardware concurrency
    PopularityScope popularity_scope = PopularityScope::kWindow;

    void validate() const {
        if (n_apps < 1) throw UsageError("n_apps must be >= 1");
        if (s < 1) throw UsageError("s must be >= 1");
        if (sample_size < 1) throw UsageError("sample_size must be >= 1");
    }
};

/// Result of one estimation run. mean is the arithmetic mean of the
/// per-sample unique fractions; std the population standard deviation.
struct UnicityEstimate {
    std::uint32_t n_apps = 0;
    Strategy strategy = Strategy::kPopularity;
    PeriodRange window;
    std::uint64_t seed = 0;
    std::uint32_t s = 0;
    std::uint32_t sample_size = 0;  // effective (after capping)
    std::uint32_t population_size = 0;
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<double> per_sample;
};

/// Everything estimation needs about one window, built once and shared
/// across (n, strategy) sweeps: the match index, the popularity table the
/// attack ranks by, and the population. Immutable; share freely across
/// threads.
struct WindowContext {
    const FingerprintTensor* tensor = nullptr;
    PeriodRange window;
    MatchIndex index;
    PopularityTable pop;

    static WindowContext build(const FingerprintTensor& tensor, PeriodRange window,
                               PopularityScope scope = PopularityScope::kWindow) {
        WindowContext ctx;
        ctx.tensor = &tensor;
        ctx.window = window;
        ctx.index = MatchIndex::build(tensor, window);
        ctx.pop = scope == PopularityScope::kWindow
                      ? popularity(tensor, window)
                      : popularity(tensor, {0, tensor.num_periods() - 1});
        return ctx;
    }

    /// Context for a user subsample attacked as its own dataset. When
    /// `popularity_from_parent` is set, attack ranks come from the parent
    /// dataset instead of the subsample (sensitivity mode).
    static WindowContext build_subset(const FingerprintTensor& tensor, PeriodRange window,
                                      std::span<const UserIdx> subset,
                                      bool popularity_from_parent = false) {
        WindowContext ctx;
        ctx.tensor = &tensor;
        ctx.window = window;
        ctx.index = MatchIndex::build_subset(tensor, window, subset);
        ctx.pop = popularity_from_parent ? popularity(tensor, window)
                                         : popularity(tensor, window, subset);
        return ctx;
    }
};

namespace detail {

/// Rarest-first pick: the min(n, |fp|) items with the lowest popularity,
/// ties broken by ascending item id. Deterministic, and the pick for n is
/// a prefix of the pick for n+1.
inline void select_low_popularity(std::span<const ItemIdx> fp, std::uint32_t n,
                                  const PopularityTable& pop, std::vector<ItemIdx>& out) {
    out.assign(fp.begin(), fp.end());
    const std::size_t k = std::min<std::size_t>(n, out.size());
    const auto rarer = [&pop](ItemIdx a, ItemIdx b) {
        const auto ca = pop.count(a), cb = pop.count(b);
        return ca != cb ? ca < cb : a < b;  // dense order == external id order
    };
    std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k), out.end(), rarer);
    out.resize(k);
}

/// Uniform pick without replacement via partial Fisher-Yates. With a fixed
/// stream the pick for n is a prefix of the pick for n+1.
inline void select_random(std::span<const ItemIdx> fp, std::uint32_t n, Xoshiro256& rng,
                          std::vector<ItemIdx>& out) {
    out.assign(fp.begin(), fp.end());
    const std::size_t k = std::min<std::size_t>(n, out.size());
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(out.size() - i));
        std::swap(out[i], out[j]);
    }
    out.resize(k);
}

}  // namespace detail

/// Spec operation over external ids. `pop` must cover every fingerprint
/// item (it does whenever both come from the same window).
inline QuasiIdentifier select_quasi_identifier(const FingerprintTensor& tensor,
                                               const Fingerprint& fp, std::uint32_t n,
                                               Strategy strategy, const PopularityTable& pop,
                                               std::uint64_t seed = kDefaultSeed) {
    if (fp.items.empty()) throw UsageError("cannot select from an empty fingerprint");
    std::vector<ItemIdx> dense;
    dense.reserve(fp.items.size());
    for (const ItemId id : fp.items) {
        const auto idx = tensor.find_item(id);
        if (!idx || pop.count(*idx) == 0)
            throw UsageError("popularity table does not cover item " + std::to_string(id));
        dense.push_back(*idx);
    }
    std::vector<ItemIdx> picked;
    if (strategy == Strategy::kPopularity) {
        detail::select_low_popularity(dense, n, pop, picked);
    } else {
        auto rng = derive_stream(seed, stream_tag::kQuasiId, fp.owner);
        detail::select_random(dense, n, rng, picked);
    }
    QuasiIdentifier q;
    q.source_user = fp.owner;
    for (const ItemIdx i : picked) q.items.push_back(tensor.item_id(i));
    std::sort(q.items.begin(), q.items.end());
    return q;
}

/// Per-user record of what the estimator actually did; test instrumentation.
struct TraceEntry {
    std::uint32_t sample = 0;
    UserIdx user = 0;
    std::vector<ItemIdx> items;
    bool unique = false;
};

namespace detail {

struct SampleOutcome {
    double fraction = 0.0;
    std::vector<TraceEntry> trace;
};

/// Evaluate one sample: which users, their quasi-identifiers, uniqueness
/// against the full context population.
inline SampleOutcome run_sample(const WindowContext& ctx, const EstimatorParams& p,
                                std::uint32_t sample_idx, std::uint32_t effective_sample,
                                bool want_trace) {
    const auto population = ctx.index.population();
    auto draw_rng = derive_stream(p.seed, stream_tag::kSampleDraw, sample_idx);
    const auto picks =
        sample_without_replacement(population.size(), effective_sample, draw_rng);

    SampleOutcome out;
    if (want_trace) out.trace.reserve(picks.size());
    std::vector<ItemIdx> fp_buf, qi_buf;
    std::uint64_t unique_count = 0;
    for (const std::uint32_t pick : picks) {
        const UserIdx u = population[pick];
        ctx.tensor->window_items_into(u, ctx.window, fp_buf);
        if (p.strategy == Strategy::kPopularity) {
            select_low_popularity(fp_buf, p.n_apps, ctx.pop, qi_buf);
        } else {
            auto qi_rng = derive_stream(p.seed, stream_tag::kQuasiId, sample_idx, u);
            select_random(fp_buf, p.n_apps, qi_rng, qi_buf);
        }
        const bool unique = ctx.index.count_matches(qi_buf, 2) == 1;
        unique_count += unique;
        if (want_trace) out.trace.push_back({sample_idx, u, qi_buf, unique});
    }
    out.fraction = static_cast<double>(unique_count) / static_cast<double>(effective_sample);
    return out;
}

inline UnicityEstimate reduce_samples(const WindowContext& ctx, const EstimatorParams& p,
                                      std::uint32_t effective_sample,
                                      std::vector<SampleOutcome>& outcomes,
                                      std::vector<TraceEntry>* trace) {
    UnicityEstimate est;
    est.n_apps = p.n_apps;
    est.strategy = p.strategy;
    est.window = ctx.window;
    est.seed = p.seed;
    est.s = static_cast<std::uint32_t>(outcomes.size());
    est.sample_size = effective_sample;
    est.population_size = ctx.index.population_size();
    est.per_sample.reserve(outcomes.size());
    for (auto& o : outcomes) {
        est.per_sample.push_back(o.fraction);
        if (trace)
            trace->insert(trace->end(), o.trace.begin(), o.trace.end());
    }
    double sum = 0.0;
    for (const double v : est.per_sample) sum += v;
    est.mean = sum / static_cast<double>(est.per_sample.size());
    double ss = 0.0;
    for (const double v : est.per_sample) ss += (v - est.mean) * (v - est.mean);
    est.stddev = std::sqrt(ss / static_cast<double>(est.per_sample.size()));
    return est;
}

}  // namespace detail

/// The estimation protocol: s samples of sample_size users drawn uniformly
/// without replacement from the window population; per user, an n-item
/// quasi-identifier; a user counts as unique when no other user in the
/// full population matches it. Deterministic given (dataset, params, seed)
/// regardless of worker count: samples are reduced in index order.
inline UnicityEstimate estimate_unicity(const WindowContext& ctx, const EstimatorParams& params,
                                        std::vector<TraceEntry>* trace = nullptr) {
    params.validate();
    const std::uint32_t population = ctx.index.population_size();
    if (population == 0) throw DataError("window population is empty");
    const std::uint32_t effective_sample = std::min(params.sample_size, population);

    std::vector<detail::SampleOutcome> outcomes(params.s);
    parallel_for_index(params.s, params.workers, [&](std::uint64_t j) {
        outcomes[j] = detail::run_sample(ctx, params, static_cast<std::uint32_t>(j),
                                         effective_sample, trace != nullptr);
    });
    return detail::reduce_samples(ctx, params, effective_sample, outcomes, trace);
}

inline UnicityEstimate estimate_unicity(const FingerprintTensor& tensor, PeriodRange window,
                                        const EstimatorParams& params,
                                        std::vector<TraceEntry>* trace = nullptr) {
    const auto ctx = WindowContext::build(tensor, window, params.popularity_scope);
    return estimate_unicity(ctx, params, trace);
}

/// One-sample estimate over an explicit user list (e.g. planted users).
/// Every listed user must be in the context population.
inline UnicityEstimate estimate_unicity_restricted(const WindowContext& ctx,
                                                   std::span<const UserIdx> users,
                                                   const EstimatorParams& params,
                                                   std::vector<TraceEntry>* trace = nullptr) {
    params.validate();
    if (users.empty()) throw UsageError("restricted estimate needs at least one user");
    const auto population = ctx.index.population();
    for (const UserIdx u : users)
        if (!std::binary_search(population.begin(), population.end(), u))
            throw DataError("user index " + std::to_string(u) + " not in window population");

    std::vector<ItemIdx> fp_buf, qi_buf;
    std::uint64_t unique_count = 0;
    for (const UserIdx u : users) {
        ctx.tensor->window_items_into(u, ctx.window, fp_buf);
        if (params.strategy == Strategy::kPopularity) {
            detail::select_low_popularity(fp_buf, params.n_apps, ctx.pop, qi_buf);
        } else {
            auto qi_rng = derive_stream(params.seed, stream_tag::kQuasiId, 0, u);
            detail::select_random(fp_buf, params.n_apps, qi_rng, qi_buf);
        }
        const bool unique = ctx.index.count_matches(qi_buf, 2) == 1;
        unique_count += unique;
        if (trace) trace->push_back({0, u, qi_buf, unique});
    }
    UnicityEstimate est;
    est.n_apps = params.n_apps;
    est.strategy = params.strategy;
    est.window = ctx.window;
    est.seed = params.seed;
    est.s = 1;
    est.sample_size = static_cast<std::uint32_t>(users.size());
    est.population_size = ctx.index.population_size();
    est.per_sample = {static_cast<double>(unique_count) / static_cast<double>(users.size())};
    est.mean = est.per_sample[0];
    est.stddev = 0.0;
    return est;
}

}  // namespace unicity
