#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "subjpipe/corpus.hpp"

namespace subjpipe {

// Machine translation into English. Implementations must tolerate concurrent
// translate() calls and report failures by throwing.
class TranslationBackend {
 public:
  virtual ~TranslationBackend() = default;
  virtual std::string name() const = 0;
  virtual std::string translate(std::string_view text, Language source) = 0;
};

// Offline backend driven by a `source\tenglish` mapping file. Unmapped input
// comes back as "EN:" + input.
class StubBackend final : public TranslationBackend {
 public:
  explicit StubBackend(std::unordered_map<std::string, std::string> mapping);

  std::string name() const override { return "stub"; }
  std::string translate(std::string_view text, Language source) override;

  std::size_t call_count() const { return calls_.load(); }

 private:
  std::unordered_map<std::string, std::string> mapping_;
  std::atomic<std::size_t> calls_{0};
};

std::unique_ptr<StubBackend> stub_backend(const std::filesystem::path& mapping_file);

// Lowercase hex SHA-256 of the bytes of `text`.
std::string sha256_hex(std::string_view text);

// Persistent (source language, sha256(text)) -> translation map.
//
// File format: header `lang\tsha256\ttranslation_escaped`, then one entry per
// line with tabs/newlines/backslashes in the translation escaped. New entries
// are appended as they are inserted; a later line for the same key wins on
// reload.
class TranslationCache {
 public:
  using Key = std::pair<std::string, std::string>;  // (lang tag, sha256)

  // Loads `path` if present, otherwise creates it. Throws Error when the file
  // cannot be created or is malformed.
  explicit TranslationCache(std::filesystem::path path);

  TranslationCache(const TranslationCache&) = delete;
  TranslationCache& operator=(const TranslationCache&) = delete;

  std::optional<std::string> find(Language source, std::string_view text) const;
  // Throws Error if the entry cannot be appended to the backing file.
  void insert(Language source, std::string_view text, std::string translation);

  std::map<Key, std::string> entries() const;
  std::size_t size() const;
  const std::filesystem::path& path() const { return path_; }

  std::size_t hit_count() const { return hits_.load(); }
  std::size_t miss_count() const { return misses_.load(); }

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::map<Key, std::string> entries_;
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> misses_{0};
};

struct TranslateOptions {
  int attempts = 3;
  std::chrono::milliseconds backoff{1000};
  int max_concurrency = 4;
};

// Returns a copy of `split` with every text translated to English and the
// language set to en. English splits pass through untouched. Cached texts never
// reach the backend; fresh results are written to the cache in input order.
// A sentence that still fails after `attempts` tries aborts the whole split
// with an Error naming its sentence_id.
CorpusSplit translate_split(const CorpusSplit& split, TranslationBackend& backend,
                            TranslationCache& cache, const TranslateOptions& options = {});

}  // namespace subjpipe
