#include "subjpipe/translate.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <thread>
#include <vector>

#include "subjpipe/text_io.hpp"

namespace subjpipe {
namespace {

constexpr std::string_view kCacheHeader = "lang\tsha256\ttranslation_escaped";

bool is_lower_hex_digest(std::string_view s) {
  return s.size() == 64 && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

// One distinct source text that missed the cache.
struct PendingText {
  std::string_view text;
  std::size_t first_row = 0;
  std::optional<std::string> translation;
  std::string error;
};

void translate_with_retry(PendingText& pending, TranslationBackend& backend, Language source,
                          const TranslateOptions& options) {
  const int attempts = std::max(1, options.attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    try {
      pending.translation = backend.translate(pending.text, source);
      return;
    } catch (const std::exception& e) {
      pending.error = e.what();
    }
    if (attempt < attempts) std::this_thread::sleep_for(options.backoff);
  }
}

}  // namespace

StubBackend::StubBackend(std::unordered_map<std::string, std::string> mapping)
    : mapping_(std::move(mapping)) {}

std::string StubBackend::translate(std::string_view text, Language /*source*/) {
  ++calls_;
  const auto it = mapping_.find(std::string(text));
  if (it != mapping_.end()) return it->second;
  return "EN:" + std::string(text);
}

std::unique_ptr<StubBackend> stub_backend(const std::filesystem::path& mapping_file) {
  if (!std::filesystem::exists(mapping_file)) {
    throw Error("missing translation mapping file: " + mapping_file.string());
  }
  const std::string content = text::sanitize_utf8(text::read_file(mapping_file));
  std::unordered_map<std::string, std::string> mapping;
  for (const auto line : text::split_lines(content)) {
    const auto fields = text::split_tabs(line);
    if (fields.size() < 2) continue;
    mapping.insert_or_assign(std::string(fields[0]), std::string(fields[1]));
  }
  return std::make_unique<StubBackend>(std::move(mapping));
}

std::string sha256_hex(std::string_view text) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

TranslationCache::TranslationCache(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) {
    std::ofstream out(path_, std::ios::binary);
    out << kCacheHeader << '\n';
    if (!out) throw Error("cannot create translation cache: " + path_.string());
    return;
  }
  const std::string content = text::read_file(path_);
  const auto lines = text::split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i == 0 && lines[i] == kCacheHeader) continue;
    if (lines[i].empty()) continue;
    const auto fields = text::split_tabs(lines[i]);
    if (fields.size() != 3 || !parse_language(fields[0]) || !is_lower_hex_digest(fields[1])) {
      throw Error(path_.string() + ":" + std::to_string(i + 1) + ": malformed cache entry");
    }
    entries_.insert_or_assign(Key{std::string(fields[0]), std::string(fields[1])},
                              text::unescape_cell(fields[2]));
  }
}

std::optional<std::string> TranslationCache::find(Language source, std::string_view text) const {
  Key key{std::string(to_string(source)), sha256_hex(text)};
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  return it->second;
}

void TranslationCache::insert(Language source, std::string_view text, std::string translation) {
  Key key{std::string(to_string(source)), sha256_hex(text)};
  std::lock_guard lock(mutex_);
  {
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    out << key.first << '\t' << key.second << '\t' << text::escape_cell(translation) << '\n';
    out.flush();
    if (!out) throw Error("cannot write translation cache: " + path_.string());
  }
  entries_.insert_or_assign(std::move(key), std::move(translation));
}

std::map<TranslationCache::Key, std::string> TranslationCache::entries() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

std::size_t TranslationCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

CorpusSplit translate_split(const CorpusSplit& split, TranslationBackend& backend,
                            TranslationCache& cache, const TranslateOptions& options) {
  if (split.language == Language::en) return split;

  CorpusSplit out = split;
  out.language = Language::en;

  // Resolve cache hits first; collect each distinct missing text once.
  std::vector<PendingText> pending;
  std::unordered_map<std::string_view, std::size_t> pending_index;
  std::vector<std::optional<std::size_t>> row_pending(split.rows.size());
  for (std::size_t i = 0; i < split.rows.size(); ++i) {
    const std::string& source_text = split.rows[i].text;
    if (const auto pending_it = pending_index.find(source_text);
        pending_it != pending_index.end()) {
      row_pending[i] = pending_it->second;
      continue;
    }
    if (auto cached = cache.find(split.language, source_text)) {
      out.rows[i].text = std::move(*cached);
      continue;
    }
    pending_index.emplace(source_text, pending.size());
    row_pending[i] = pending.size();
    pending.push_back(PendingText{source_text, i, std::nullopt, {}});
  }

  const std::size_t workers =
      std::min<std::size_t>(pending.size(), static_cast<std::size_t>(
                                                std::max(1, options.max_concurrency)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < pending.size(); k = next++) {
      translate_with_retry(pending[k], backend, split.language, options);
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    if (workers > 0) work();
  }

  // Cache everything that succeeded, in input order, before reporting failures.
  const PendingText* first_failure = nullptr;
  for (const auto& p : pending) {
    if (p.translation) {
      cache.insert(split.language, p.text, *p.translation);
    } else if (first_failure == nullptr) {
      first_failure = &p;
    }
  }
  if (first_failure != nullptr) {
    throw Error("translation failed for sentence_id " +
                split.rows[first_failure->first_row].sentence_id + " after " +
                std::to_string(std::max(1, options.attempts)) +
                " attempts: " + first_failure->error);
  }

  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    if (row_pending[i]) out.rows[i].text = *pending[*row_pending[i]].translation;
  }
  return out;
}

}  // namespace subjpipe
