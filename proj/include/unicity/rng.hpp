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
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_set>
#include <vector>

#include "unicity/core.hpp"

// Seeded, splittable randomness. Every randomized routine in the library
// draws from a stream derived with derive_stream(seed, tags...), so any
// unit of work (a sample, a user, a realization) owns an independent
// stream and results do not depend on thread scheduling.

namespace unicity {

/// SplitMix64 step (Steele, Lea & Flood). Used both as a stream-derivation
/// mixer and to seed xoshiro state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xoshiro256** 1.0 (Blackman & Vigna), seeded via SplitMix64.
/// Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
  public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~std::uint64_t{0}; }

    result_type operator()() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform integer in [0, bound) via rejection (portable, no libstdc++
    /// distribution involved so streams are reproducible everywhere).
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = (*this)();
            if (r >= threshold) return r % bound;
        }
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::array<std::uint64_t, 4> state_{};
};

/// Fold tag words into a root seed, SplitMix64-style. Streams derived with
/// distinct tag tuples are independent for practical purposes.
template <typename... Tags>
std::uint64_t derive_seed(std::uint64_t root, Tags... tags) {
    std::uint64_t s = root;
    auto fold = [&s](std::uint64_t tag) {
        s ^= tag + 0x9E3779B97F4A7C15ULL + (s << 6) + (s >> 2);
        std::uint64_t st = s;
        s = splitmix64(st);
    };
    (fold(static_cast<std::uint64_t>(tags)), ...);
    return s;
}

template <typename... Tags>
Xoshiro256 derive_stream(std::uint64_t root, Tags... tags) {
    return Xoshiro256(derive_seed(root, tags...));
}

// Stream purpose tags. Keeping them in one place avoids accidental overlap.
namespace stream_tag {
inline constexpr std::uint64_t kSampleDraw = 0x5A01;
inline constexpr std::uint64_t kQuasiId = 0x5A02;
inline constexpr std::uint64_t kGenerate = 0x5A03;
inline constexpr std::uint64_t kPlant = 0x5A04;
inline constexpr std::uint64_t kSubsample = 0x5A05;
inline constexpr std::uint64_t kSubEstimate = 0x5A06;
inline constexpr std::uint64_t kSeasonal = 0x5A07;
}  // namespace stream_tag

/// k distinct values from [0, n), returned sorted ascending.
/// Floyd's algorithm when k is small relative to n, otherwise a partial
/// Fisher-Yates shuffle.
inline std::vector<std::uint32_t> sample_without_replacement(std::uint64_t n,
                                                             std::uint64_t k,
                                                             Xoshiro256& rng) {
    if (k > n) throw UsageError("sample_without_replacement: k exceeds population");
    std::vector<std::uint32_t> out;
    out.reserve(static_cast<std::size_t>(k));
    if (k == 0) return out;
    if (k * 3 >= n) {
        std::vector<std::uint32_t> pool(static_cast<std::size_t>(n));
        std::iota(pool.begin(), pool.end(), 0u);
        for (std::uint64_t i = 0; i < k; ++i) {
            const std::uint64_t j = i + rng.below(n - i);
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        }
        out.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    } else {
        std::unordered_set<std::uint32_t> chosen;
        chosen.reserve(static_cast<std::size_t>(k) * 2);
        for (std::uint64_t v = n - k; v < n; ++v) {
            const auto candidate = static_cast<std::uint32_t>(rng.below(v + 1));
            if (!chosen.insert(candidate).second) chosen.insert(static_cast<std::uint32_t>(v));
        }
        out.assign(chosen.begin(), chosen.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Poisson(lambda) by Knuth's product method; fine for the small means
/// used here (per-user item counts).
inline std::uint32_t poisson(double lambda, Xoshiro256& rng) {
    if (lambda <= 0.0) return 0;
    const double limit = std::exp(-lambda);
    std::uint32_t k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= rng.uniform01();
    } while (p > limit);
    return k - 1;
}

inline std::uint32_t binomial(std::uint32_t n, double p, Xoshiro256& rng) {
    std::uint32_t hits = 0;
    for (std::uint32_t i = 0; i < n; ++i)
        if (rng.uniform01() < p) ++hits;
    return hits;
}

/// Walker alias table for O(1) draws from a fixed discrete distribution.
/// Construction is deterministic (stable index-order worklists).
class AliasTable {
  public:
    explicit AliasTable(const std::vector<double>& weights) {
        const std::size_t n = weights.size();
        if (n == 0) throw UsageError("AliasTable: empty weight vector");
        prob_.resize(n);
        alias_.resize(n);
        const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
        if (!(total > 0.0)) throw UsageError("AliasTable: weights must sum to a positive value");

        std::vector<double> scaled(n);
        for (std::size_t i = 0; i < n; ++i) scaled[i] = weights[i] * static_cast<double>(n) / total;

        std::vector<std::uint32_t> small, large;
        small.reserve(n);
        large.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));

        while (!small.empty() && !large.empty()) {
            const std::uint32_t s = small.back();
            const std::uint32_t l = large.back();
            small.pop_back();
            prob_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] -= 1.0 - scaled[s];
            if (scaled[l] < 1.0) {
                large.pop_back();
                small.push_back(l);
            }
        }
        for (const auto i : large) prob_[i] = 1.0;
        for (const auto i : small) prob_[i] = 1.0;  // rounding leftovers
        for (std::size_t i = 0; i < n; ++i)
            if (prob_[i] >= 1.0) alias_[i] = static_cast<std::uint32_t>(i);
    }

    std::uint32_t sample(Xoshiro256& rng) const {
        const auto slot = static_cast<std::uint32_t>(rng.below(prob_.size()));
        return rng.uniform01() < prob_[slot] ? slot : alias_[slot];
    }

    std::size_t size() const { return prob_.size(); }

  private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

}  // namespace unicity
