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

#include "casewall/types.hpp"

namespace casewall {

std::string_view to_string(Role role) {
  return role == Role::AnalystA ? "analyst-A" : "analyst-B";
}

std::string_view to_string(Assignment assignment) {
  switch (assignment) {
    case Assignment::AnalystA: return "analyst-A";
    case Assignment::AnalystB: return "analyst-B";
    case Assignment::Both: return "both";
  }
  return "both";
}

std::string_view to_string(Channel channel) {
  switch (channel) {
    case Channel::Sticky: return "sticky";
    case Channel::Chat: return "chat";
    case Channel::Hypothesis: return "hypothesis";
  }
  return "sticky";
}

std::string_view to_string(Condition condition) {
  return condition == Condition::Standard ? "standard" : "translucence";
}

std::optional<Role> parse_role(std::string_view text) {
  if (text == "analyst-A") return Role::AnalystA;
  if (text == "analyst-B") return Role::AnalystB;
  return std::nullopt;
}

std::optional<Assignment> parse_assignment(std::string_view text) {
  if (text == "analyst-A") return Assignment::AnalystA;
  if (text == "analyst-B") return Assignment::AnalystB;
  if (text == "both") return Assignment::Both;
  return std::nullopt;
}

std::optional<Channel> parse_channel(std::string_view text) {
  if (text == "sticky") return Channel::Sticky;
  if (text == "chat") return Channel::Chat;
  if (text == "hypothesis") return Channel::Hypothesis;
  return std::nullopt;
}

std::optional<Condition> parse_condition(std::string_view text) {
  if (text == "standard") return Condition::Standard;
  if (text == "translucence") return Condition::Translucence;
  return std::nullopt;
}

Role require_role(std::string_view text) {
  if (auto role = parse_role(text)) return *role;
  throw Error("unknown role: " + std::string(text));
}

}  // namespace casewall
