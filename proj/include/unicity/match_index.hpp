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
#include <span>
#include <vector>

#include "unicity/core.hpp"
#include "unicity/tensor.hpp"

namespace unicity {

/// Inverted index over one window: item -> sorted posting list of users
/// whose window fingerprint contains the item, plus the window population.
/// Answers "how many users match this quasi-identifier" by intersecting
/// posting lists smallest-first. Immutable after build; reads are
/// thread-safe.
class MatchIndex {
  public:
    MatchIndex() = default;

    /// Index of the full window population. Postings are assembled by
    /// unioning the per-period posting lists of the tensor, which keeps
    /// this structurally independent from popularity() for cross-checks.
    static MatchIndex build(const FingerprintTensor& tensor, PeriodRange window) {
        tensor.check_window(window);
        MatchIndex idx;
        idx.window_ = window;
        idx.population_ = tensor.window_population(window);
        if (window.is_single()) {
            const auto& period = tensor.period_data(window.first);
            idx.offsets_ = period.item_offsets;
            idx.postings_ = period.users;
            return idx;
        }
        const std::uint32_t items = tensor.num_items();
        idx.offsets_.assign(items + 1, 0);
        std::vector<UserIdx> merged;
        // two passes: size, then fill
        for (ItemIdx i = 0; i < items; ++i)
            idx.offsets_[i + 1] = union_posting(tensor, i, window, merged).size();
        for (std::uint32_t i = 0; i < items; ++i) idx.offsets_[i + 1] += idx.offsets_[i];
        idx.postings_.resize(idx.offsets_[items]);
        for (ItemIdx i = 0; i < items; ++i) {
            const auto& list = union_posting(tensor, i, window, merged);
            std::copy(list.begin(), list.end(), idx.postings_.begin() +
                      static_cast<std::ptrdiff_t>(idx.offsets_[i]));
        }
        return idx;
    }

    /// Index restricted to a user subset (sorted dense ids): the subsample
    /// is treated as the whole dataset. Postings are the full-window
    /// postings filtered through a membership bitmap.
    static MatchIndex build_subset(const FingerprintTensor& tensor, PeriodRange window,
                                   std::span<const UserIdx> subset) {
        const MatchIndex full = build(tensor, window);
        MatchIndex idx;
        idx.window_ = window;
        std::vector<bool> member(tensor.num_users(), false);
        for (const UserIdx u : subset) member[u] = true;
        idx.population_.reserve(subset.size());
        for (const UserIdx u : full.population_)
            if (member[u]) idx.population_.push_back(u);
        const std::uint32_t items = tensor.num_items();
        idx.offsets_.assign(items + 1, 0);
        idx.postings_.reserve(full.postings_.size() / 2);
        for (ItemIdx i = 0; i < items; ++i) {
            for (const UserIdx u : full.posting(i))
                if (member[u]) idx.postings_.push_back(u);
            idx.offsets_[i + 1] = idx.postings_.size();
        }
        return idx;
    }

    PeriodRange window() const { return window_; }
    std::span<const UserIdx> population() const { return population_; }
    std::uint32_t population_size() const { return static_cast<std::uint32_t>(population_.size()); }

    std::span<const UserIdx> posting(ItemIdx i) const {
        return {postings_.data() + offsets_[i], postings_.data() + offsets_[i + 1]};
    }

    std::uint64_t posting_size(ItemIdx i) const { return offsets_[i + 1] - offsets_[i]; }
    std::size_t num_items() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }

    /// |{ users whose window fingerprint contains every item of q }|.
    /// q holds dense ids; empty posting short-circuits to 0.
    std::uint64_t match_count(std::span<const ItemIdx> q) const {
        return count_matches(q, ~std::uint64_t{0});
    }

    /// match_count with early exit once `cap` matches are found; returns
    /// min(match_count, cap).
    std::uint64_t count_matches(std::span<const ItemIdx> q, std::uint64_t cap) const {
        if (q.empty()) throw UsageError("match query must be non-empty");
        if (cap == 0) return 0;
        thread_local std::vector<ItemIdx> order;
        order.assign(q.begin(), q.end());
        std::sort(order.begin(), order.end(), [this](ItemIdx a, ItemIdx b) {
            const auto sa = posting_size(a), sb = posting_size(b);
            return sa != sb ? sa < sb : a < b;
        });
        const auto lead = posting(order[0]);
        if (lead.empty()) return 0;

        std::uint64_t found = 0;
        for (const UserIdx candidate : lead) {
            bool in_all = true;
            for (std::size_t j = 1; j < order.size(); ++j) {
                if (!contains(posting(order[j]), candidate)) {
                    in_all = false;
                    break;
                }
            }
            if (in_all && ++found >= cap) return found;
        }
        return found;
    }

    /// True iff exactly one user in the population matches q. When q is a
    /// subset of some population member's fingerprint, that one match is
    /// necessarily the source user.
    bool is_unique(std::span<const ItemIdx> q) const { return count_matches(q, 2) == 1; }

  private:
    static bool contains(std::span<const UserIdx> list, UserIdx value) {
        return std::binary_search(list.begin(), list.end(), value);
    }

    static const std::vector<UserIdx>& union_posting(const FingerprintTensor& tensor, ItemIdx i,
                                                     PeriodRange window,
                                                     std::vector<UserIdx>& buf) {
        buf.clear();
        for (PeriodIndex p = window.first; p <= window.last; ++p) {
            const auto part = tensor.users_of(i, p);
            const std::size_t old_size = buf.size();
            buf.insert(buf.end(), part.begin(), part.end());
            std::inplace_merge(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(old_size),
                               buf.end());
        }
        buf.erase(std::unique(buf.begin(), buf.end()), buf.end());
        return buf;
    }

    PeriodRange window_;
    std::vector<std::uint64_t> offsets_;
    std::vector<UserIdx> postings_;
    std::vector<UserIdx> population_;
};

}  // namespace unicity
