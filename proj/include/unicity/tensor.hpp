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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "unicity/core.hpp"

namespace unicity {

/// One usage event: user touched item during period. Input unit for
/// ingestion; duplicates are legal and collapse during the build.
struct Event {
    UserId user = 0;
    ItemId item = 0;
    std::uint64_t period = 0;
};

/// One user's item set over a window: the union of the per-period sets
/// (binary max-aggregation). Items are sorted external ids.
struct Fingerprint {
    UserId owner = 0;
    PeriodRange window;
    std::vector<ItemId> items;
};

/// Sparse binary user x item x period structure. Immutable once built;
/// all accessors are safe under concurrent reads. Per period it stores a
/// CSR forward map (user -> sorted items) and a CSR inverted map
/// (item -> sorted users), both over dense indices. Dense indices are
/// assigned in ascending external-id order, so ordering by dense index
/// and by external id coincide.
class FingerprintTensor {
  public:
    struct PeriodData {
        // forward: item lists per user, empty range when absent
        std::vector<std::uint64_t> user_offsets;  // size num_users + 1
        std::vector<ItemIdx> items;
        // inverted: user lists per item
        std::vector<std::uint64_t> item_offsets;  // size num_items + 1
        std::vector<UserIdx> users;
    };

    FingerprintTensor() = default;

    /// Assembles a tensor from prebuilt per-period forward CSR data. The
    /// inverted indexes are derived here. `forward[p]` must hold
    /// user_offsets/items with sorted duplicate-free item lists that already
    /// honor the min-items threshold; callers are the event builder, the
    /// generator and the binary-cache loader.
    static FingerprintTensor from_parts(std::vector<UserId> user_ids,
                                        std::vector<ItemId> item_ids,
                                        std::uint64_t catalog_size,
                                        std::uint32_t min_items_per_period,
                                        std::vector<PeriodData> forward) {
        FingerprintTensor t;
        t.user_ids_ = std::move(user_ids);
        t.item_ids_ = std::move(item_ids);
        t.catalog_size_ = std::max<std::uint64_t>(catalog_size, t.item_ids_.size());
        t.min_items_per_period_ = min_items_per_period;
        t.periods_ = std::move(forward);
        for (auto& p : t.periods_) t.build_inverted(p);
        return t;
    }

    std::uint32_t num_users() const { return static_cast<std::uint32_t>(user_ids_.size()); }
    std::uint32_t num_items() const { return static_cast<std::uint32_t>(item_ids_.size()); }
    std::uint32_t num_periods() const { return static_cast<std::uint32_t>(periods_.size()); }
    /// Size of the item-id space the dataset was drawn from. At least
    /// num_items(); larger for generated datasets whose catalog has unused
    /// ids (those are what plant_unique_users consumes).
    std::uint64_t catalog_size() const { return catalog_size_; }
    std::uint32_t min_items_per_period() const { return min_items_per_period_; }

    UserId user_id(UserIdx u) const { return user_ids_[u]; }
    ItemId item_id(ItemIdx i) const { return item_ids_[i]; }
    const std::vector<UserId>& user_ids() const { return user_ids_; }
    const std::vector<ItemId>& item_ids() const { return item_ids_; }

    std::optional<UserIdx> find_user(UserId id) const {
        const auto it = std::lower_bound(user_ids_.begin(), user_ids_.end(), id);
        if (it == user_ids_.end() || *it != id) return std::nullopt;
        return static_cast<UserIdx>(it - user_ids_.begin());
    }

    std::optional<ItemIdx> find_item(ItemId id) const {
        const auto it = std::lower_bound(item_ids_.begin(), item_ids_.end(), id);
        if (it == item_ids_.end() || *it != id) return std::nullopt;
        return static_cast<ItemIdx>(it - item_ids_.begin());
    }

    /// Sorted item list of a user in one period; empty when absent.
    std::span<const ItemIdx> items_of(UserIdx u, PeriodIndex p) const {
        const auto& period = periods_[p];
        return {period.items.data() + period.user_offsets[u],
                period.items.data() + period.user_offsets[u + 1]};
    }

    /// Sorted posting list of an item in one period.
    std::span<const UserIdx> users_of(ItemIdx i, PeriodIndex p) const {
        const auto& period = periods_[p];
        return {period.users.data() + period.item_offsets[i],
                period.users.data() + period.item_offsets[i + 1]};
    }

    bool present(UserIdx u, PeriodIndex p) const { return !items_of(u, p).empty(); }

    bool in_window(UserIdx u, PeriodRange w) const {
        for (PeriodIndex p = w.first; p <= w.last; ++p)
            if (present(u, p)) return true;
        return false;
    }

    void check_window(PeriodRange w) const {
        if (w.first > w.last || w.last >= num_periods())
            throw UsageError("window [" + std::to_string(w.first) + "," +
                             std::to_string(w.last) + "] out of range, dataset has " +
                             std::to_string(num_periods()) + " periods");
    }

    /// Union of the user's per-period item sets over the window
    /// (maximum-value aggregation of the binary tensor), dense ids.
    std::vector<ItemIdx> window_items(UserIdx u, PeriodRange w) const {
        if (w.is_single()) {
            const auto one = items_of(u, w.first);
            return {one.begin(), one.end()};
        }
        std::vector<ItemIdx> merged;
        window_items_into(u, w, merged);
        return merged;
    }

    /// Same as window_items but reusing the caller's buffer (hot paths).
    void window_items_into(UserIdx u, PeriodRange w, std::vector<ItemIdx>& out) const {
        out.clear();
        if (w.is_single()) {
            const auto one = items_of(u, w.first);
            out.assign(one.begin(), one.end());
            return;
        }
        for (PeriodIndex p = w.first; p <= w.last; ++p) {
            const auto part = items_of(u, p);
            const std::size_t old_size = out.size();
            out.insert(out.end(), part.begin(), part.end());
            std::inplace_merge(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(old_size),
                               out.end());
        }
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }

    /// Users present in at least one period of the window, sorted.
    std::vector<UserIdx> window_population(PeriodRange w) const {
        check_window(w);
        std::vector<UserIdx> pop;
        for (UserIdx u = 0; u < num_users(); ++u)
            if (in_window(u, w)) pop.push_back(u);
        return pop;
    }

    /// |A|_t: distinct items used by at least one user in period t.
    std::uint32_t period_item_count(PeriodIndex p) const {
        std::uint32_t n = 0;
        const auto& period = periods_[p];
        for (ItemIdx i = 0; i < num_items(); ++i)
            if (period.item_offsets[i + 1] > period.item_offsets[i]) ++n;
        return n;
    }

    std::uint64_t period_entry_count(PeriodIndex p) const { return periods_[p].items.size(); }

    std::uint64_t total_entries() const {
        std::uint64_t n = 0;
        for (const auto& p : periods_) n += p.items.size();
        return n;
    }

    /// Visit every presence triple as external ids, ordered by
    /// (period, user, item). This is the canonical export order.
    template <typename Fn>
    void for_each_event(Fn&& fn) const {
        for (PeriodIndex p = 0; p < num_periods(); ++p)
            for (UserIdx u = 0; u < num_users(); ++u)
                for (const ItemIdx i : items_of(u, p)) fn(user_ids_[u], item_ids_[i], p);
    }

    const PeriodData& period_data(PeriodIndex p) const { return periods_[p]; }

  private:
    void build_inverted(PeriodData& period) const {
        const std::uint32_t items = num_items();
        period.item_offsets.assign(items + 1, 0);
        for (const ItemIdx i : period.items) ++period.item_offsets[i + 1];
        for (std::uint32_t i = 0; i < items; ++i)
            period.item_offsets[i + 1] += period.item_offsets[i];
        period.users.resize(period.items.size());
        std::vector<std::uint64_t> cursor(period.item_offsets.begin(),
                                          period.item_offsets.end() - 1);
        // ascending user order makes every posting list sorted by construction
        for (UserIdx u = 0; u + 1 < period.user_offsets.size(); ++u) {
            for (std::uint64_t k = period.user_offsets[u]; k < period.user_offsets[u + 1]; ++k)
                period.users[cursor[period.items[k]]++] = u;
        }
    }

    std::vector<UserId> user_ids_;   // sorted ascending
    std::vector<ItemId> item_ids_;   // sorted ascending
    std::uint64_t catalog_size_ = 0;
    std::uint32_t min_items_per_period_ = 3;
    std::vector<PeriodData> periods_;
};

/// Tallies reported by build_tensor; malformed-line counts from text
/// ingestion are tracked separately by the reader.
struct BuildStats {
    std::uint64_t input_events = 0;
    std::uint64_t excluded = 0;          // dropped by the exclusion list
    std::uint64_t duplicates = 0;        // collapsed repeats of a triple
    std::uint64_t below_threshold = 0;   // events dropped with their (user, period) group
    std::uint64_t kept = 0;
};

/// Builds a tensor from raw events: applies the exclusion list, collapses
/// duplicates, drops (user, period) groups smaller than
/// min_items_per_period, then assigns dense ids. `explicit_periods` fixes T;
/// 0 infers it from the data. Events with period >= T must have been
/// rejected by the reader already (the builder throws if any remain).
inline FingerprintTensor build_tensor(std::vector<Event> events,
                                      const std::unordered_set<ItemId>& exclusions,
                                      std::uint32_t min_items_per_period,
                                      std::uint32_t explicit_periods = 0,
                                      BuildStats* stats_out = nullptr) {
    if (min_items_per_period < 1) throw UsageError("min_items_per_period must be >= 1");
    BuildStats stats;
    stats.input_events = events.size();

    if (!exclusions.empty()) {
        const auto end = std::remove_if(events.begin(), events.end(), [&](const Event& e) {
            return exclusions.count(e.item) != 0;
        });
        stats.excluded = static_cast<std::uint64_t>(events.end() - end);
        events.erase(end, events.end());
    }

    std::uint64_t max_period = 0;
    for (const Event& e : events) max_period = std::max(max_period, e.period);
    std::uint32_t num_periods = events.empty()
                                    ? explicit_periods
                                    : static_cast<std::uint32_t>(max_period) + 1;
    if (explicit_periods > 0) {
        if (max_period >= explicit_periods && !events.empty())
            throw DataError("event period " + std::to_string(max_period) +
                            " outside declared period count " + std::to_string(explicit_periods));
        num_periods = explicit_periods;
    }

    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.period != b.period) return a.period < b.period;
        if (a.user != b.user) return a.user < b.user;
        return a.item < b.item;
    });
    const auto dup_end = std::unique(events.begin(), events.end(), [](const Event& a, const Event& b) {
        return a.period == b.period && a.user == b.user && a.item == b.item;
    });
    stats.duplicates = static_cast<std::uint64_t>(events.end() - dup_end);
    events.erase(dup_end, events.end());

    // drop (user, period) groups below the threshold
    std::vector<Event> kept;
    kept.reserve(events.size());
    std::size_t i = 0;
    while (i < events.size()) {
        std::size_t j = i;
        while (j < events.size() && events[j].period == events[i].period &&
               events[j].user == events[i].user)
            ++j;
        if (j - i >= min_items_per_period)
            kept.insert(kept.end(), events.begin() + static_cast<std::ptrdiff_t>(i),
                        events.begin() + static_cast<std::ptrdiff_t>(j));
        else
            stats.below_threshold += j - i;
        i = j;
    }
    stats.kept = kept.size();
    if (stats_out) *stats_out = stats;
    if (kept.empty()) throw DataError("no users left after filtering: empty dataset");

    // dense id assignment, ascending external id
    std::vector<UserId> user_ids;
    std::vector<ItemId> item_ids;
    user_ids.reserve(kept.size());
    item_ids.reserve(kept.size());
    for (const Event& e : kept) {
        user_ids.push_back(e.user);
        item_ids.push_back(e.item);
    }
    std::sort(user_ids.begin(), user_ids.end());
    user_ids.erase(std::unique(user_ids.begin(), user_ids.end()), user_ids.end());
    std::sort(item_ids.begin(), item_ids.end());
    item_ids.erase(std::unique(item_ids.begin(), item_ids.end()), item_ids.end());

    const auto user_idx = [&](UserId id) {
        return static_cast<UserIdx>(
            std::lower_bound(user_ids.begin(), user_ids.end(), id) - user_ids.begin());
    };
    const auto item_idx = [&](ItemId id) {
        return static_cast<ItemIdx>(
            std::lower_bound(item_ids.begin(), item_ids.end(), id) - item_ids.begin());
    };

    const auto num_users = static_cast<std::uint32_t>(user_ids.size());
    std::vector<FingerprintTensor::PeriodData> periods(num_periods);
    for (auto& p : periods) p.user_offsets.assign(num_users + 1, 0);
    for (const Event& e : kept)
        ++periods[e.period].user_offsets[user_idx(e.user) + 1];
    for (auto& p : periods) {
        for (std::uint32_t u = 0; u < num_users; ++u) p.user_offsets[u + 1] += p.user_offsets[u];
        p.items.resize(p.user_offsets[num_users]);
    }
    {
        std::vector<std::uint64_t> cursor;
        std::size_t k = 0;
        for (std::uint32_t p = 0; p < num_periods; ++p) {
            cursor.assign(periods[p].user_offsets.begin(), periods[p].user_offsets.end() - 1);
            while (k < kept.size() && kept[k].period == p) {
                periods[p].items[cursor[user_idx(kept[k].user)]++] = item_idx(kept[k].item);
                ++k;
            }
        }
    }
    const std::uint64_t catalog = item_ids.size();
    return FingerprintTensor::from_parts(std::move(user_ids), std::move(item_ids), catalog,
                                         min_items_per_period, std::move(periods));
}

/// Spec operation: a user's fingerprint over a window, external ids.
inline Fingerprint window_fingerprint(const FingerprintTensor& tensor, UserId user,
                                      PeriodRange window) {
    tensor.check_window(window);
    const auto u = tensor.find_user(user);
    if (!u || !tensor.in_window(*u, window))
        throw DataError("user " + std::to_string(user) + " absent from window [" +
                        std::to_string(window.first) + "," + std::to_string(window.last) + "]");
    Fingerprint fp;
    fp.owner = user;
    fp.window = window;
    for (const ItemIdx i : tensor.window_items(*u, window)) fp.items.push_back(tensor.item_id(i));
    return fp;
}

/// Per-item distinct-user counts within a window. Dense vector keyed by
/// ItemIdx; zero means the item does not occur in the window.
class PopularityTable {
  public:
    PopularityTable() = default;
    PopularityTable(PeriodRange window, std::vector<std::uint32_t> counts)
        : window_(window), counts_(std::move(counts)) {}

    PeriodRange window() const { return window_; }
    std::uint32_t count(ItemIdx i) const { return counts_[i]; }
    std::size_t table_size() const { return counts_.size(); }

    std::uint64_t total() const {
        std::uint64_t sum = 0;
        for (const auto c : counts_) sum += c;
        return sum;
    }

    /// Visit (ItemIdx, count) for items with nonzero count.
    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (ItemIdx i = 0; i < counts_.size(); ++i)
            if (counts_[i] > 0) fn(i, counts_[i]);
    }

  private:
    PeriodRange window_;
    std::vector<std::uint32_t> counts_;
};

/// Popularity over a window, computed from the forward lists (per-user
/// window fingerprints). The match index derives posting lists by a
/// different route; their agreement is a cross-structure invariant.
inline PopularityTable popularity(const FingerprintTensor& tensor, PeriodRange window) {
    tensor.check_window(window);
    std::vector<std::uint32_t> counts(tensor.num_items(), 0);
    std::vector<ItemIdx> buf;
    for (UserIdx u = 0; u < tensor.num_users(); ++u) {
        tensor.window_items_into(u, window, buf);
        for (const ItemIdx i : buf) ++counts[i];
    }
    return {window, std::move(counts)};
}

/// Popularity restricted to a user subset (sorted dense ids); used when a
/// subsample is attacked as a dataset of its own.
inline PopularityTable popularity(const FingerprintTensor& tensor, PeriodRange window,
                                  std::span<const UserIdx> users) {
    tensor.check_window(window);
    std::vector<std::uint32_t> counts(tensor.num_items(), 0);
    std::vector<ItemIdx> buf;
    for (const UserIdx u : users) {
        tensor.window_items_into(u, window, buf);
        for (const ItemIdx i : buf) ++counts[i];
    }
    return {window, std::move(counts)};
}

}  // namespace unicity
