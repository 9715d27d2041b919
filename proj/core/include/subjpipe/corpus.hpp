#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subjpipe/common.hpp"

namespace subjpipe {

struct LabeledSentence {
  std::string sentence_id;
  std::string text;
  std::optional<SubjLabel> label;  // absent for unlabeled prediction input
  Language language = Language::en;
  std::optional<bool> solved_conflict;  // English corpora only

  bool operator==(const LabeledSentence&) const = default;
};

struct CorpusSplit {
  Split split = Split::train;
  Language language = Language::en;
  std::vector<LabeledSentence> rows;  // file order
  std::size_t skipped_count = 0;

  bool operator==(const CorpusSplit&) const = default;
};

struct DistributionStats {
  std::size_t total = 0;
  std::size_t obj_count = 0;
  std::size_t subj_count = 0;
  double obj_pct = 0.0;   // rounded half-up to 2 decimals
  double subj_pct = 0.0;
};

// A data line that was dropped while loading. `line_number` is 1-based and
// counts the header, so it matches what an editor shows.
struct SkippedLine {
  std::size_t line_number = 0;
  std::string reason;
};

using SkipLogger = std::function<void(const std::filesystem::path&, const SkippedLine&)>;

// Logs "path:line: skipped (reason)" to std::clog.
void log_skipped_to_stderr(const std::filesystem::path& path, const SkippedLine& skipped);

// Loads a labeled shared-task TSV.
//
// Layout is `sentence_id, sentence, label` or, with `has_confidence`,
// `sentence_id, sentence, label, solved_conflict`. Lines with surplus fields
// keep the first field as id and the trailing field(s) as label/confidence;
// the middle fields are rejoined with tabs into the text. Anything that still
// does not yield a valid label, confidence flag, id and non-blank text is
// counted in `skipped_count` and reported through `on_skip`.
//
// The first line is a header iff its label field is not "OBJ"/"SUBJ".
//
// Throws Error on a missing file, a file without data rows ("empty split"),
// a duplicate sentence_id, or `has_confidence` with a non-English language.
CorpusSplit load_tsv(const std::filesystem::path& path, Language language, Split split,
                     bool has_confidence, const SkipLogger& on_skip = log_skipped_to_stderr);

// Loads `sentence_id, sentence` rows without gold labels. A first line whose
// id field is "sentence_id" or "id" is a header.
CorpusSplit load_unlabeled_tsv(const std::filesystem::path& path, Language language,
                               Split split,
                               const SkipLogger& on_skip = log_skipped_to_stderr);

// True when the file carries a trailing solved_conflict column, judged from
// the header name or, without a header, from the shape of the first line.
bool detect_confidence_column(const std::filesystem::path& path);

// Throws Error("empty split") if the split has no labeled rows.
DistributionStats stats(const CorpusSplit& split);

struct Prediction {
  std::string sentence_id;
  SubjLabel label = SubjLabel::OBJ;

  bool operator==(const Prediction&) const = default;
};

// Writes `sentence_id\tlabel` with a header, LF endings, rows in input order.
void write_predictions(std::span<const std::string> ids, std::span<const SubjLabel> labels,
                       const std::filesystem::path& path);
void write_predictions(std::span<const Prediction> predictions,
                       const std::filesystem::path& path);

// Strict reader for prediction files: any malformed line or repeated id is an
// error.
std::vector<Prediction> load_predictions(const std::filesystem::path& path);

// Writes a split back out in the labeled layout (text cells are sanitized of
// tabs and newlines). Used for preprocessed and translated dumps.
void write_corpus_tsv(const CorpusSplit& split, const std::filesystem::path& path);

}  // namespace subjpipe
