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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace unicity {

/// External pseudonymized identifiers. Opaque: they carry no semantics
/// beyond equality and ordering.
using UserId = std::uint64_t;
using ItemId = std::uint64_t;

/// Dense zero-based indices into a dataset's user/item tables. 32 bits is
/// enough for the scales this library targets (millions of users).
using UserIdx = std::uint32_t;
using ItemIdx = std::uint32_t;

using PeriodIndex = std::uint32_t;

/// Inclusive range of period indices [first, last].
struct PeriodRange {
    PeriodIndex first = 0;
    PeriodIndex last = 0;

    constexpr PeriodRange() = default;
    constexpr PeriodRange(PeriodIndex f, PeriodIndex l) : first(f), last(l) {}

    static constexpr PeriodRange single(PeriodIndex p) { return {p, p}; }

    constexpr std::uint32_t size() const { return last - first + 1; }
    constexpr bool contains(PeriodIndex p) const { return p >= first && p <= last; }
    constexpr bool is_single() const { return first == last; }
    constexpr bool operator==(const PeriodRange&) const = default;
};

/// Bad or inconsistent input data (unreadable files, empty datasets,
/// out-of-range references). Maps to CLI exit code 3.
class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Caller misuse of an interface (invalid parameter combinations).
/// Maps to CLI exit code 2.
class UsageError : public std::runtime_error {
  public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure (non-converged fit, degenerate system).
/// Maps to CLI exit code 4.
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Default RNG seed for commands where the caller does not pass one.
/// Logged in every manifest so reports stay auditable.
inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

}  // namespace unicity
