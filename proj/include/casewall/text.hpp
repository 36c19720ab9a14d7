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

// Byte-level text helpers shared by the corpus, entity and clue code.
//
// A "word byte" is an ASCII letter or digit, or any byte >= 0x80 (so UTF-8
// sequences never split a word). Everything else, including apostrophes and
// hyphens, is a boundary.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace casewall::text {

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive

  std::size_t size() const { return end - begin; }
  bool operator==(const Span&) const = default;
};

bool is_word_byte(char c);
char ascii_lower(char c);
std::string to_lower(std::string_view s);

/// Lowercases and collapses whitespace runs to one space; trims both ends.
std::string normalize_name(std::string_view s);

/// Maximal runs of word bytes.
std::vector<Span> words(std::string_view s);

/// Case-insensitive comparison of `needle` against `haystack` at `pos`.
bool matches_at(std::string_view haystack, std::size_t pos, std::string_view needle);

/// True if [begin, end) is delimited by non-word bytes (or the text edges).
bool on_word_boundary(std::string_view s, std::size_t begin, std::size_t end);

/// Whole-word, case-insensitive search.
bool contains_word(std::string_view haystack, std::string_view needle);

/// An uppercase ASCII letter followed by at least one more letter, with at
/// least one lowercase letter ("Rathbone", "McDonald"; not "I", not "FBI").
bool is_capitalized_word(std::string_view word);

}  // namespace casewall::text
