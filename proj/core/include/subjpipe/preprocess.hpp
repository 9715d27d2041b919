#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "subjpipe/corpus.hpp"

namespace subjpipe {

// Immutable map from emoji codepoint sequences (UTF-8) to short names.
class EmojiTable {
 public:
  struct Match {
    std::size_t length = 0;  // bytes consumed
    std::string_view name;
  };

  EmojiTable() = default;

  // Names must match [a-z0-9_]+; keys must be non-empty and unique.
  static EmojiTable from_entries(std::vector<std::pair<std::string, std::string>> entries);

  // Two-column `emoji\tname` TSV with an optional `emoji\tname` header.
  static EmojiTable load(const std::filesystem::path& path);

  // The curated table shipped with the library.
  static std::filesystem::path default_path();

  // Longest key that starts at byte offset `pos` of `text`.
  std::optional<Match> longest_match(std::string_view text, std::size_t pos) const;

  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, std::string> entries_;
  std::vector<std::size_t> key_lengths_;  // distinct, descending
};

inline constexpr std::string_view kEmptyPlaceholder = "[EMPTY]";

// Replaces each emoji sequence found in `table` by `:name:`, preferring the
// longest sequence at every position.
std::string demojize(std::string_view text, const EmojiTable& table);

// Deletes @mentions and http(s) URLs, collapses whitespace runs to a single
// space and trims.
//
// Mention: '@' + [A-Za-z0-9_]+, at the start of the string or after
// whitespace. URL: "http://" or "https://" + a run of non-whitespace, minus
// one trailing '.', ',', '!', '?' or ')'.
std::string strip_mentions_links(std::string_view text);

// Hook point for POS tagging / attention-mask preprocessing. Identity.
std::string linguistic_annotation_hook(std::string_view text);

// strip_mentions_links(demojize(text)), or "[EMPTY]" if nothing is left.
std::string preprocess(std::string_view text, const EmojiTable& table);

// Applies preprocess() to every row's text; ids, labels and flags untouched.
CorpusSplit preprocess_split(const CorpusSplit& split, const EmojiTable& table);

}  // namespace subjpipe
