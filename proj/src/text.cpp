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

#include "casewall/text.hpp"

namespace casewall::text {

bool is_word_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || u >= 0x80;
}

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = ascii_lower(c);
  return out;
}

std::string normalize_name(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(ascii_lower(c));
  }
  return out;
}

std::vector<Span> words(std::string_view s) {
  std::vector<Span> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_word_byte(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && is_word_byte(s[j])) ++j;
    out.push_back({i, j});
    i = j;
  }
  return out;
}

bool matches_at(std::string_view haystack, std::size_t pos, std::string_view needle) {
  if (pos > haystack.size() || haystack.size() - pos < needle.size()) return false;
  for (std::size_t k = 0; k < needle.size(); ++k) {
    if (ascii_lower(haystack[pos + k]) != ascii_lower(needle[k])) return false;
  }
  return true;
}

bool on_word_boundary(std::string_view s, std::size_t begin, std::size_t end) {
  const bool left = begin == 0 || !is_word_byte(s[begin - 1]);
  const bool right = end >= s.size() || !is_word_byte(s[end]);
  return left && right;
}

bool contains_word(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return false;
  for (std::size_t pos = 0; pos + needle.size() <= haystack.size(); ++pos) {
    if (matches_at(haystack, pos, needle) && on_word_boundary(haystack, pos, pos + needle.size()))
      return true;
  }
  return false;
}

bool is_capitalized_word(std::string_view word) {
  if (word.size() < 2 || word[0] < 'A' || word[0] > 'Z') return false;
  bool has_lower = false;
  for (std::size_t i = 1; i < word.size(); ++i) {
    const char c = word[i];
    if (c >= 'a' && c <= 'z') {
      has_lower = true;
    } else if (!(c >= 'A' && c <= 'Z')) {
      return false;
    }
  }
  return has_lower;
}

}  // namespace casewall::text
