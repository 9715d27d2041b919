#include "subjpipe/preprocess.hpp"

#include <algorithm>

#include "subjpipe/text_io.hpp"

namespace subjpipe {
namespace {

bool valid_name(std::string_view name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

bool is_word_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
         c == '_';
}

bool is_trailing_punct(char c) {
  return c == '.' || c == ',' || c == '!' || c == '?' || c == ')';
}

std::size_t codepoint_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead & 0xE0) == 0xC0) return 2;
  if ((lead & 0xF0) == 0xE0) return 3;
  if ((lead & 0xF8) == 0xF0) return 4;
  return 1;
}

// Length of the mention starting at `pos`, or 0. `kept` is the output so far;
// a deleted span counts as whitespace, so one pass reaches the fixpoint.
std::size_t mention_length(std::string_view s, std::size_t pos, std::string_view kept) {
  if (s[pos] != '@') return 0;
  if (!kept.empty() && !text::is_space(kept.back())) return 0;
  std::size_t end = pos + 1;
  while (end < s.size() && is_word_char(s[end])) ++end;
  return end - pos > 1 ? end - pos : 0;
}

// Length of the URL starting at `pos`, or 0.
std::size_t url_length(std::string_view s, std::size_t pos) {
  const std::string_view rest = s.substr(pos);
  std::size_t scheme = 0;
  if (rest.starts_with("http://")) {
    scheme = 7;
  } else if (rest.starts_with("https://")) {
    scheme = 8;
  } else {
    return 0;
  }
  std::size_t end = pos + scheme;
  while (end < s.size() && !text::is_space(s[end])) ++end;
  std::size_t body = end - pos - scheme;
  if (body == 0) return 0;
  if (body > 1 && is_trailing_punct(s[end - 1])) --end;
  return end - pos;
}

}  // namespace

EmojiTable EmojiTable::from_entries(std::vector<std::pair<std::string, std::string>> entries) {
  EmojiTable table;
  for (auto& [emoji, name] : entries) {
    if (emoji.empty()) throw Error("emoji table: empty emoji key");
    if (!valid_name(name)) throw Error("emoji table: invalid name '" + name + "'");
    const std::size_t len = emoji.size();
    const std::string duplicate_hint = name;
    if (!table.entries_.emplace(std::move(emoji), std::move(name)).second) {
      throw Error("emoji table: duplicate key for name '" + duplicate_hint + "'");
    }
    if (std::find(table.key_lengths_.begin(), table.key_lengths_.end(), len) ==
        table.key_lengths_.end()) {
      table.key_lengths_.push_back(len);
    }
  }
  std::sort(table.key_lengths_.rbegin(), table.key_lengths_.rend());
  return table;
}

EmojiTable EmojiTable::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error("missing emoji table: " + path.string());
  const std::string content = text::read_file(path);
  const auto lines = text::split_lines(content);
  std::vector<std::pair<std::string, std::string>> entries;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = text::split_tabs(lines[i]);
    if (i == 0 && fields.size() == 2 && fields[0] == "emoji" && fields[1] == "name") continue;
    if (fields.size() != 2) {
      throw Error(path.string() + ":" + std::to_string(i + 1) + ": expected emoji\\tname");
    }
    entries.emplace_back(std::string(fields[0]), std::string(fields[1]));
  }
  return from_entries(std::move(entries));
}

std::filesystem::path EmojiTable::default_path() {
  const std::filesystem::path installed = SUBJPIPE_INSTALLED_DATA_DIR "/emoji.tsv";
  const std::filesystem::path source = SUBJPIPE_DATA_DIR "/emoji.tsv";
  return std::filesystem::exists(source) ? source : installed;
}

std::optional<EmojiTable::Match> EmojiTable::longest_match(std::string_view text,
                                                           std::size_t pos) const {
  for (const std::size_t len : key_lengths_) {
    if (pos + len > text.size()) continue;
    const auto it = entries_.find(std::string(text.substr(pos, len)));
    if (it != entries_.end()) return Match{len, it->second};
  }
  return std::nullopt;
}

std::string demojize(std::string_view text, const EmojiTable& table) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (const auto match = table.longest_match(text, pos)) {
      out += ':';
      out += match->name;
      out += ':';
      pos += match->length;
      continue;
    }
    const std::size_t len =
        std::min(codepoint_length(static_cast<unsigned char>(text[pos])), text.size() - pos);
    out.append(text.substr(pos, len));
    pos += len;
  }
  return out;
}

std::string strip_mentions_links(std::string_view text) {
  std::string kept;
  kept.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t len = mention_length(text, pos, kept);
    if (len == 0) len = url_length(text, pos);
    if (len > 0) {
      kept += ' ';
      pos += len;
    } else {
      kept += text[pos++];
    }
  }

  std::string out;
  out.reserve(kept.size());
  bool pending_space = false;
  for (char c : kept) {
    if (text::is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

std::string linguistic_annotation_hook(std::string_view text) { return std::string(text); }

std::string preprocess(std::string_view text, const EmojiTable& table) {
  std::string cleaned = strip_mentions_links(linguistic_annotation_hook(demojize(text, table)));
  if (cleaned.empty()) return std::string(kEmptyPlaceholder);
  return cleaned;
}

CorpusSplit preprocess_split(const CorpusSplit& split, const EmojiTable& table) {
  CorpusSplit out = split;
  for (auto& row : out.rows) row.text = preprocess(row.text, table);
  return out;
}

}  // namespace subjpipe
