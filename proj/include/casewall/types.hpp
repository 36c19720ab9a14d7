// Copyright 2026 The Casewall Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace casewall {

/// Server-assigned position of an accepted operation in a session log.
/// Dense, starting at 1; 0 means "nothing applied yet".
using Seq = std::uint64_t;

enum class Role { AnalystA, AnalystB };

/// Document assignment in a corpus manifest.
enum class Assignment { AnalystA, AnalystB, Both };

/// Where a piece of shared text lives in the Analysis Space.
enum class Channel { Sticky, Chat, Hypothesis };

/// Interface condition a session runs under.
enum class Condition { Standard, Translucence };

std::string_view to_string(Role role);
std::string_view to_string(Assignment assignment);
std::string_view to_string(Channel channel);
std::string_view to_string(Condition condition);

std::optional<Role> parse_role(std::string_view text);
std::optional<Assignment> parse_assignment(std::string_view text);
std::optional<Channel> parse_channel(std::string_view text);
std::optional<Condition> parse_condition(std::string_view text);

/// Role parse that throws; used where an unknown role is a caller error.
Role require_role(std::string_view text);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace casewall
