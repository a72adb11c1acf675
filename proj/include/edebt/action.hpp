// Copyright 2026 The edebt Authors
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
#include <optional>
#include <string_view>

namespace edebt {

/// Elasticity action. Enumerator order is the tie-break order used when
/// several actions score equally.
enum class Action { maintain = 0, launch = 1, release = 2 };

inline constexpr std::array<Action, 3> kAllActions{Action::maintain, Action::launch,
                                                   Action::release};

constexpr bool is_valid(Action a) noexcept {
  return a == Action::maintain || a == Action::launch || a == Action::release;
}

constexpr std::size_t index_of(Action a) noexcept { return static_cast<std::size_t>(a); }

constexpr std::string_view to_string(Action a) noexcept {
  switch (a) {
    case Action::maintain: return "maintain";
    case Action::launch: return "launch";
    case Action::release: return "release";
  }
  return "invalid";
}

inline std::optional<Action> action_from_string(std::string_view s) noexcept {
  for (Action a : kAllActions)
    if (to_string(a) == s) return a;
  return std::nullopt;
}

}  // namespace edebt
