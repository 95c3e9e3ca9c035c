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
#include "unicity/parallel.hpp"
#include "unicity/rng.hpp"
#include "unicity/tensor.hpp"

// Synthetic fingerprint datasets with known ground truth. Item ids double
// as popularity ranks: id 0 carries the largest Zipf weight. Per-user
// streams are derived from (seed, user), so generation shards across
// workers without changing the output.

namespace unicity {

struct GeneratorConfig {
    std::uint64_t users = 10000;
    std::uint64_t catalog = 5000;   // item-id space; unused ids stay available for planting
    std::uint32_t periods = 1;
    double alpha = 1.5;             // Zipf weight exponent, w_r ∝ (r+1)^-alpha
    double mean_items = 23.0;       // per-user per-period fingerprint size (shifted Poisson)
    double yearly_union_target = 76.0;  // drives the default churn rate
    double churn = -1.0;            // fraction of items replaced per period; <0 = derive
    std::uint32_t min_items_per_period = 3;
    std::uint64_t seed = kDefaultSeed;
    std::uint32_t workers = 0;

    /// Churn actually used: explicit value, or the rate that makes the
    /// T-period union land near yearly_union_target when every replacement
    /// were new to the union.
    double effective_churn() const {
        if (churn >= 0.0) return std::min(churn, 1.0);
        if (periods <= 1) return 0.0;
        const double extra = yearly_union_target - mean_items;
        if (extra <= 0.0) return 0.0;
        return std::min(1.0, extra / (static_cast<double>(periods - 1) * mean_items));
    }

    void validate() const {
        if (users < 1 || catalog < 1 || periods < 1)
            throw UsageError("generator: users, catalog and periods must be >= 1");
        if (!(alpha > 0.0)) throw UsageError("generator: alpha must be > 0");
        if (churn > 1.0) throw UsageError("generator: churn must be in [0,1]");
        if (mean_items < min_items_per_period)
            throw UsageError("generator: mean_items below min_items_per_period");
        if (mean_items > static_cast<double>(catalog))
            throw UsageError("generator: mean_items exceeds catalog size");
    }
};

namespace detail {

/// Exact weighted sampling without replacement (Efraimidis-Spirakis):
/// smallest k of Exp(w) keys. O(A log A); used when rejection sampling
/// would thrash, i.e. when the draw covers a large share of the catalog.
inline std::vector<std::uint32_t> weighted_pick_exact(const std::vector<double>& weights,
                                                      const std::vector<std::uint32_t>& exclude,
                                                      std::uint32_t k, Xoshiro256& rng) {
    std::vector<std::pair<double, std::uint32_t>> keyed;
    keyed.reserve(weights.size());
    std::vector<bool> banned(weights.size(), false);
    for (const auto e : exclude) banned[e] = true;
    for (std::uint32_t i = 0; i < weights.size(); ++i) {
        const double u = rng.uniform01();  // consume one draw per item, banned or not
        if (banned[i]) continue;
        keyed.emplace_back(-std::log(1.0 - u) / weights[i], i);
    }
    if (keyed.size() < k) throw DataError("generator: catalog too small for requested draw");
    std::nth_element(keyed.begin(), keyed.begin() + k, keyed.end());
    std::vector<std::uint32_t> out(k);
    for (std::uint32_t i = 0; i < k; ++i) out[i] = keyed[i].second;
    return out;
}

inline bool holds(const std::vector<std::uint32_t>& set, std::uint32_t v) {
    return std::find(set.begin(), set.end(), v) != set.end();
}

}  // namespace detail

/// Generate a tensor per the config: period-0 fingerprints drawn without
/// replacement proportional to Zipf weights; each later period replaces a
/// Binomial(|fp|, churn) subset with draws that exclude everything the
/// user held at the start of the period. Fingerprint size is constant per
/// user across periods.
inline FingerprintTensor generate(const GeneratorConfig& config) {
    config.validate();
    const auto num_users = config.users;
    const auto catalog = config.catalog;
    const auto periods = config.periods;
    const double churn = config.effective_churn();

    std::vector<double> weights(catalog);
    for (std::uint64_t r = 0; r < catalog; ++r)
        weights[r] = std::pow(static_cast<double>(r + 1), -config.alpha);
    const AliasTable alias(weights);

    // Fingerprint sizes first: they fix the CSR layout (the same layout for
    // every period, since churn preserves size).
    std::vector<std::uint32_t> fp_size(num_users);
    parallel_for_index(num_users, config.workers, [&](std::uint64_t u) {
        auto rng = derive_stream(config.seed, stream_tag::kGenerate, u);
        std::uint32_t m = 1 + poisson(config.mean_items - 1.0, rng);
        m = std::max(m, config.min_items_per_period);
        fp_size[u] = static_cast<std::uint32_t>(std::min<std::uint64_t>(m, catalog));
    });

    std::vector<std::uint64_t> offsets(num_users + 1, 0);
    for (std::uint64_t u = 0; u < num_users; ++u) offsets[u + 1] = offsets[u] + fp_size[u];
    const std::uint64_t entries_per_period = offsets[num_users];

    // items are stored as catalog ranks here; remapped to dense ids below
    std::vector<std::vector<std::uint32_t>> period_items(periods);
    for (auto& v : period_items) v.resize(entries_per_period);

    parallel_for_index(num_users, config.workers, [&](std::uint64_t u) {
        auto rng = derive_stream(config.seed, stream_tag::kGenerate, u);
        (void)poisson(config.mean_items - 1.0, rng);  // replay the size draw
        const std::uint32_t m = fp_size[u];

        std::vector<std::uint32_t> current;
        if (static_cast<std::uint64_t>(m) * 4 > catalog) {
            current = detail::weighted_pick_exact(weights, {}, m, rng);
        } else {
            current.reserve(m);
            while (current.size() < m) {
                const std::uint32_t pick = alias.sample(rng);
                if (!detail::holds(current, pick)) current.push_back(pick);
            }
        }
        std::sort(current.begin(), current.end());
        std::copy(current.begin(), current.end(), period_items[0].begin() +
                  static_cast<std::ptrdiff_t>(offsets[u]));

        for (std::uint32_t p = 1; p < periods; ++p) {
            std::uint32_t replace = binomial(m, churn, rng);
            replace = static_cast<std::uint32_t>(
                std::min<std::uint64_t>(replace, catalog - m));
            if (replace > 0) {
                const std::vector<std::uint32_t> before = current;  // banned for redraw
                // evict uniformly chosen victims
                for (std::uint32_t i = 0; i < replace; ++i) {
                    const auto j = i + static_cast<std::uint32_t>(rng.below(current.size() - i));
                    std::swap(current[i], current[j]);
                }
                current.erase(current.begin(), current.begin() + replace);
                if (static_cast<std::uint64_t>(m) * 4 > catalog) {
                    const auto fresh = detail::weighted_pick_exact(weights, before, replace, rng);
                    current.insert(current.end(), fresh.begin(), fresh.end());
                } else {
                    while (current.size() < m) {
                        const std::uint32_t pick = alias.sample(rng);
                        if (!detail::holds(before, pick) && !detail::holds(current, pick))
                            current.push_back(pick);
                    }
                }
                std::sort(current.begin(), current.end());
            }
            std::copy(current.begin(), current.end(), period_items[p].begin() +
                      static_cast<std::ptrdiff_t>(offsets[u]));
        }
    });

    // collect used ranks, build the dense item table
    std::vector<bool> used(catalog, false);
    for (const auto& v : period_items)
        for (const auto r : v) used[r] = true;
    std::vector<ItemId> item_ids;
    std::vector<ItemIdx> rank_to_dense(catalog, 0);
    for (std::uint64_t r = 0; r < catalog; ++r) {
        if (used[r]) {
            rank_to_dense[r] = static_cast<ItemIdx>(item_ids.size());
            item_ids.push_back(r);
        }
    }

    std::vector<FingerprintTensor::PeriodData> parts(periods);
    for (std::uint32_t p = 0; p < periods; ++p) {
        parts[p].user_offsets = offsets;
        parts[p].items.resize(entries_per_period);
        for (std::uint64_t k = 0; k < entries_per_period; ++k)
            parts[p].items[k] = rank_to_dense[period_items[p][k]];
        period_items[p].clear();
        period_items[p].shrink_to_fit();
    }

    std::vector<UserId> user_ids(num_users);
    for (std::uint64_t u = 0; u < num_users; ++u) user_ids[u] = u;

    return FingerprintTensor::from_parts(std::move(user_ids), std::move(item_ids), catalog,
                                         config.min_items_per_period, std::move(parts));
}

struct PlantResult {
    FingerprintTensor tensor;
    std::vector<UserId> planted_users;  // sorted external ids
    std::vector<ItemId> planted_items;  // planted_items[i] belongs to planted_users[i]
};

/// Give each of k chosen users one fresh item (an unused catalog id) in
/// every period they appear in. With rarity == 1 the item is theirs alone,
/// so they are guaranteed unique under the popularity strategy at n >= 1.
/// rarity > 1 shares each planted item with rarity-1 extra users, pinning
/// its popularity at exactly `rarity`.
inline PlantResult plant_unique_users(const FingerprintTensor& tensor, std::uint32_t k,
                                      std::uint32_t rarity = 1,
                                      std::uint64_t seed = kDefaultSeed) {
    if (rarity < 1) throw UsageError("plant: rarity must be >= 1");
    if (k > tensor.num_users()) throw UsageError("plant: k exceeds user count");
    PlantResult result;
    if (k == 0) {
        result.tensor = tensor;  // unchanged
        return result;
    }

    // fresh item ids: lowest unused ids in the catalog space
    std::vector<ItemId> fresh;
    {
        const auto& known = tensor.item_ids();
        std::size_t cursor = 0;
        for (ItemId id = 0; id < tensor.catalog_size() && fresh.size() < k; ++id) {
            while (cursor < known.size() && known[cursor] < id) ++cursor;
            if (cursor >= known.size() || known[cursor] != id) fresh.push_back(id);
        }
        if (fresh.size() < k)
            throw DataError("plant: catalog has only " + std::to_string(fresh.size()) +
                            " unused item ids, need " + std::to_string(k));
    }

    auto rng = derive_stream(seed, stream_tag::kPlant);
    const auto planted = sample_without_replacement(tensor.num_users(), k, rng);

    // receiver lists per fresh item: the planted user plus rarity-1 extras
    std::vector<std::vector<UserIdx>> receivers(k);
    if (rarity > 1) {
        std::vector<bool> is_planted(tensor.num_users(), false);
        for (const auto u : planted) is_planted[u] = true;
        std::vector<UserIdx> others;
        others.reserve(tensor.num_users() - k);
        for (UserIdx u = 0; u < tensor.num_users(); ++u)
            if (!is_planted[u]) others.push_back(u);
        if (others.size() < rarity - 1)
            throw DataError("plant: not enough non-planted users for requested rarity");
        for (std::uint32_t i = 0; i < k; ++i) {
            auto extra_rng = derive_stream(seed, stream_tag::kPlant, i + 1);
            const auto extra = sample_without_replacement(others.size(), rarity - 1, extra_rng);
            receivers[i].push_back(planted[i]);
            for (const auto e : extra) receivers[i].push_back(others[e]);
            std::sort(receivers[i].begin(), receivers[i].end());
        }
    } else {
        for (std::uint32_t i = 0; i < k; ++i) receivers[i] = {planted[i]};
    }

    // new item table: old ids plus the fresh ones
    std::vector<ItemId> new_item_ids = tensor.item_ids();
    new_item_ids.insert(new_item_ids.end(), fresh.begin(), fresh.end());
    std::sort(new_item_ids.begin(), new_item_ids.end());
    const auto new_idx_of = [&new_item_ids](ItemId id) {
        return static_cast<ItemIdx>(
            std::lower_bound(new_item_ids.begin(), new_item_ids.end(), id) -
            new_item_ids.begin());
    };
    std::vector<ItemIdx> old_to_new(tensor.num_items());
    for (ItemIdx i = 0; i < tensor.num_items(); ++i)
        old_to_new[i] = new_idx_of(tensor.item_id(i));

    // per-user additions: the fresh items this user receives, added to
    // every period the user is present in (a user can be an extra receiver
    // for several planted items)
    std::vector<std::vector<ItemIdx>> additions(tensor.num_users());
    for (std::uint32_t i = 0; i < k; ++i)
        for (const UserIdx u : receivers[i]) additions[u].push_back(new_idx_of(fresh[i]));

    const std::uint32_t num_users = tensor.num_users();
    std::vector<FingerprintTensor::PeriodData> parts(tensor.num_periods());
    for (PeriodIndex p = 0; p < tensor.num_periods(); ++p) {
        auto& part = parts[p];
        part.user_offsets.assign(num_users + 1, 0);
        for (UserIdx u = 0; u < num_users; ++u) {
            const auto old_items = tensor.items_of(u, p);
            std::uint64_t size = old_items.size();
            if (!old_items.empty()) size += additions[u].size();
            part.user_offsets[u + 1] = part.user_offsets[u] + size;
        }
        part.items.resize(part.user_offsets[num_users]);
        for (UserIdx u = 0; u < num_users; ++u) {
            auto out = part.items.begin() + static_cast<std::ptrdiff_t>(part.user_offsets[u]);
            const auto old_items = tensor.items_of(u, p);
            for (const ItemIdx i : old_items) *out++ = old_to_new[i];
            if (!old_items.empty() && !additions[u].empty()) {
                for (const ItemIdx i : additions[u]) *out++ = i;
                std::sort(part.items.begin() + static_cast<std::ptrdiff_t>(part.user_offsets[u]),
                          out);
            }
        }
    }

    result.tensor = FingerprintTensor::from_parts(
        std::vector<UserId>(tensor.user_ids()), std::move(new_item_ids), tensor.catalog_size(),
        tensor.min_items_per_period(), std::move(parts));
    for (std::uint32_t i = 0; i < k; ++i) {
        result.planted_users.push_back(tensor.user_id(planted[i]));
        result.planted_items.push_back(fresh[i]);
    }
    // report sorted by user id; items follow their users
    std::vector<std::uint32_t> order(k);
    for (std::uint32_t i = 0; i < k; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return result.planted_users[a] < result.planted_users[b];
    });
    std::vector<UserId> su(k);
    std::vector<ItemId> si(k);
    for (std::uint32_t i = 0; i < k; ++i) {
        su[i] = result.planted_users[order[i]];
        si[i] = result.planted_items[order[i]];
    }
    result.planted_users = std::move(su);
    result.planted_items = std::move(si);
    return result;
}

}  // namespace unicity
