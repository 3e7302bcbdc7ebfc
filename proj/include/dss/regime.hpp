// Copyright 2026 The Countermeasure DSS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace dss {

enum class Regime : std::uint8_t {
  NoLockdown = 0,        // r0
  PartialLockdown = 1,   // r1
  CompleteLockdown = 2,  // r2
};

inline constexpr std::size_t kRegimeCount = 3;
inline constexpr std::array<Regime, kRegimeCount> kAllRegimes{
    Regime::NoLockdown, Regime::PartialLockdown, Regime::CompleteLockdown};

constexpr std::size_t index_of(Regime r) noexcept { return static_cast<std::size_t>(r); }

// "r0" / "r1" / "r2".
std::string_view to_string(Regime r) noexcept;

// Accepts "r0".."r2" and the long names "no_lockdown", "partial_lockdown",
// "complete_lockdown". Throws std::invalid_argument otherwise.
Regime regime_from_string(std::string_view s);

}  // namespace dss
