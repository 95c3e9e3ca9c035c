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

#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "unicity/core.hpp"
#include "unicity/tensor.hpp"

// File formats:
//  - event text: `user_id,item_id,period_index` per line, unsigned decimal
//    integers, LF endings, optional header detected by a non-numeric first
//    field;
//  - exclusion list: one item_id per line;
//  - dataset cache: little-endian binary snapshot of a built tensor
//    ("UNIC" magic + version byte) so analyses skip re-ingestion.

namespace unicity {

struct ReadStats {
    std::uint64_t lines = 0;
    std::uint64_t records = 0;
    std::uint64_t malformed = 0;      // unparseable lines (counted, skipped)
    std::uint64_t bad_period = 0;     // period outside an explicit [0, T)
    bool header_skipped = false;
};

namespace detail {

/// Parse an unsigned decimal field; nullopt on garbage or overflow.
inline std::optional<std::uint64_t> parse_u64(const char* begin, const char* end) {
    if (begin == end) return std::nullopt;
    std::uint64_t value = 0;
    for (const char* p = begin; p != end; ++p) {
        if (*p < '0' || *p > '9') return std::nullopt;
        const std::uint64_t digit = static_cast<std::uint64_t>(*p - '0');
        if (value > (~std::uint64_t{0} - digit) / 10) return std::nullopt;
        value = value * 10 + digit;
    }
    return value;
}

inline void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace detail

/// Read an event file. Malformed lines are counted in stats and skipped;
/// an explicit period count rejects out-of-range periods the same way.
inline std::vector<Event> read_events(const std::string& path, ReadStats& stats,
                                      std::uint32_t explicit_periods = 0) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open event file: " + path);
    std::vector<Event> events;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        detail::strip_cr(line);
        ++stats.lines;
        if (line.empty()) continue;
        const char* begin = line.data();
        const char* end = begin + line.size();
        const char* c1 = std::find(begin, end, ',');
        const char* c2 = c1 == end ? end : std::find(c1 + 1, end, ',');
        std::optional<std::uint64_t> user, item, period;
        if (c1 != end && c2 != end && std::find(c2 + 1, end, ',') == end) {
            user = detail::parse_u64(begin, c1);
            item = detail::parse_u64(c1 + 1, c2);
            period = detail::parse_u64(c2 + 1, end);
        }
        if (!user || !item || !period) {
            if (first) {
                stats.header_skipped = true;  // non-numeric first line = header
            } else {
                ++stats.malformed;
            }
            first = false;
            continue;
        }
        first = false;
        if (explicit_periods > 0 && *period >= explicit_periods) {
            ++stats.bad_period;
            continue;
        }
        if (*period > 0xFFFFFFFFull) {
            ++stats.malformed;
            continue;
        }
        events.push_back({*user, *item, *period});
        ++stats.records;
    }
    return events;
}

/// One item id per line; blank lines ignored.
inline std::unordered_set<ItemId> read_exclusions(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open exclusion file: " + path);
    std::unordered_set<ItemId> out;
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
        detail::strip_cr(line);
        ++lineno;
        if (line.empty()) continue;
        const auto id = detail::parse_u64(line.data(), line.data() + line.size());
        if (!id)
            throw DataError(path + ":" + std::to_string(lineno) + ": not an item id: " + line);
        out.insert(*id);
    }
    return out;
}

/// Write the canonical event text for a tensor: header line, then triples
/// ordered by (period, user, item). Byte-deterministic.
inline void write_events(const FingerprintTensor& tensor, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write event file: " + path);
    out << "user_id,item_id,period_index\n";
    tensor.for_each_event([&out](UserId u, ItemId i, PeriodIndex p) {
        out << u << ',' << i << ',' << p << '\n';
    });
    if (!out) throw DataError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// binary dataset cache

namespace detail {

inline constexpr std::array<char, 4> kMagic{'U', 'N', 'I', 'C'};
inline constexpr std::uint8_t kCacheVersion = 1;

inline void put_u8(std::string& buf, std::uint8_t v) { buf.push_back(static_cast<char>(v)); }

inline void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class ByteReader {
  public:
    ByteReader(const char* data, std::size_t size) : data_(data), size_(size) {}
    std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
    std::uint32_t u32() {
        const char* p = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        const char* p = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
        return v;
    }
    const char* take(std::size_t n) {
        if (pos_ + n > size_) throw DataError("dataset cache truncated");
        const char* p = data_ + pos_;
        pos_ += n;
        return p;
    }

  private:
    const char* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Serialize a tensor (forward structure only; inverted indexes are
/// rebuilt on load). Little-endian, versioned, byte-deterministic.
inline void save_dataset(const FingerprintTensor& tensor, const std::string& path) {
    std::string buf;
    buf.reserve(64 + tensor.total_entries() * 4);
    buf.append(detail::kMagic.data(), detail::kMagic.size());
    detail::put_u8(buf, detail::kCacheVersion);
    detail::put_u32(buf, tensor.min_items_per_period());
    detail::put_u32(buf, tensor.num_periods());
    detail::put_u32(buf, tensor.num_users());
    detail::put_u32(buf, tensor.num_items());
    detail::put_u64(buf, tensor.catalog_size());
    for (const UserId id : tensor.user_ids()) detail::put_u64(buf, id);
    for (const ItemId id : tensor.item_ids()) detail::put_u64(buf, id);
    for (PeriodIndex p = 0; p < tensor.num_periods(); ++p) {
        const auto& period = tensor.period_data(p);
        for (const auto off : period.user_offsets) detail::put_u64(buf, off);
        for (const auto item : period.items) detail::put_u32(buf, item);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write dataset cache: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw DataError("write failed: " + path);
}

inline FingerprintTensor load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset cache: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    detail::ByteReader r(buf.data(), buf.size());
    const char* magic = r.take(4);
    if (!std::equal(detail::kMagic.begin(), detail::kMagic.end(), magic))
        throw DataError("not a dataset cache: " + path);
    const auto version = r.u8();
    if (version != detail::kCacheVersion)
        throw DataError("unsupported dataset cache version " + std::to_string(version));
    const auto min_items = r.u32();
    const auto periods = r.u32();
    const auto num_users = r.u32();
    const auto num_items = r.u32();
    const auto catalog = r.u64();
    std::vector<UserId> user_ids(num_users);
    for (auto& id : user_ids) id = r.u64();
    std::vector<ItemId> item_ids(num_items);
    for (auto& id : item_ids) id = r.u64();
    std::vector<FingerprintTensor::PeriodData> parts(periods);
    for (auto& part : parts) {
        part.user_offsets.resize(num_users + 1);
        for (auto& off : part.user_offsets) off = r.u64();
        part.items.resize(part.user_offsets[num_users]);
        for (auto& item : part.items) {
            item = r.u32();
            if (item >= num_items) throw DataError("dataset cache corrupt: item out of range");
        }
    }
    return FingerprintTensor::from_parts(std::move(user_ids), std::move(item_ids), catalog,
                                         min_items, std::move(parts));
}

/// True when the file starts with the dataset-cache magic.
inline bool is_dataset_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    char head[4] = {};
    in.read(head, 4);
    return in.gcount() == 4 && std::equal(detail::kMagic.begin(), detail::kMagic.end(), head);
}

/// FNV-1a 64-bit digest of a file, as 16 hex chars. Used to fingerprint
/// manifest inputs; not cryptographic.
inline std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file for digest: " + path);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    char chunk[65536];
    while (in.read(chunk, sizeof chunk) || in.gcount() > 0) {
        const auto got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(chunk[i]);
            h *= 0x100000001B3ULL;
        }
        if (got < static_cast<std::streamsize>(sizeof chunk)) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

}  // namespace unicity
