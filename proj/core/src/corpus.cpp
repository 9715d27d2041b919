#include "subjpipe/corpus.hpp"

#include <iostream>
#include <string_view>
#include <unordered_set>

#include "subjpipe/text_io.hpp"

namespace subjpipe {
namespace {

std::optional<bool> parse_confidence(std::string_view text) {
  if (text == "1" || text == "true" || text == "True") return true;
  if (text == "0" || text == "false" || text == "False") return false;
  return std::nullopt;
}

std::string join_tabs(std::span<const std::string_view> fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i != 0) out += '\t';
    out += fields[i];
  }
  return out;
}

std::vector<std::string_view> data_lines_or_throw(const std::filesystem::path& path,
                                                  const std::string& content) {
  auto lines = text::split_lines(content);
  if (lines.empty()) throw Error("empty split: " + path.string() + " has no data rows");
  return lines;
}

std::string read_sanitized(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error("missing file: " + path.string());
  return text::sanitize_utf8(text::read_file(path));
}

// Label column index counted from the end of the field list.
std::size_t label_offset_from_end(bool has_confidence) { return has_confidence ? 2 : 1; }

bool first_line_is_header(std::string_view line, bool has_confidence) {
  const auto fields = text::split_tabs(line);
  const std::size_t offset = label_offset_from_end(has_confidence);
  if (fields.size() < offset) return true;
  return !parse_label(fields[fields.size() - offset]).has_value();
}

std::string_view clean_text_for_cell(std::string_view text, std::string& storage) {
  storage.clear();
  // Tabs survive: the loader rejoins interior fields.
  for (char c : text) storage += (c == '\n' || c == '\r') ? ' ' : c;
  return storage;
}

}  // namespace

void log_skipped_to_stderr(const std::filesystem::path& path, const SkippedLine& skipped) {
  std::clog << path.string() << ':' << skipped.line_number << ": skipped (" << skipped.reason
            << ")\n";
}

CorpusSplit load_tsv(const std::filesystem::path& path, Language language, Split split,
                     bool has_confidence, const SkipLogger& on_skip) {
  if (has_confidence && language != Language::en) {
    throw Error("solved_conflict column is only defined for English corpora");
  }
  const std::string content = read_sanitized(path);
  const auto lines = data_lines_or_throw(path, content);

  CorpusSplit result;
  result.split = split;
  result.language = language;

  const std::size_t first_data = first_line_is_header(lines.front(), has_confidence) ? 1 : 0;
  if (first_data >= lines.size()) {
    throw Error("empty split: " + path.string() + " has no data rows");
  }

  const std::size_t expected = has_confidence ? 4 : 3;
  std::unordered_set<std::string> seen_ids;

  auto skip = [&](std::size_t index, std::string reason) {
    ++result.skipped_count;
    if (on_skip) on_skip(path, SkippedLine{index + 1, std::move(reason)});
  };

  for (std::size_t i = first_data; i < lines.size(); ++i) {
    const auto fields = text::split_tabs(lines[i]);
    if (fields.size() < expected) {
      skip(i, "expected " + std::to_string(expected) + " fields, found " +
                  std::to_string(fields.size()));
      continue;
    }
    const std::size_t label_index = fields.size() - label_offset_from_end(has_confidence);
    const auto label = parse_label(fields[label_index]);
    if (!label) {
      skip(i, "invalid label field");
      continue;
    }
    std::optional<bool> confidence;
    if (has_confidence) {
      confidence = parse_confidence(fields.back());
      if (!confidence) {
        skip(i, "invalid solved_conflict field");
        continue;
      }
    }
    const std::string_view id = text::trim(fields.front());
    if (id.empty()) {
      skip(i, "empty sentence_id");
      continue;
    }
    std::string sentence =
        join_tabs(std::span(fields).subspan(1, label_index - 1));
    if (text::trim(sentence).empty()) {
      skip(i, "empty sentence");
      continue;
    }
    if (!seen_ids.emplace(id).second) {
      throw Error("duplicate sentence_id: " + std::string(id));
    }
    result.rows.push_back(LabeledSentence{
        std::string(id), std::move(sentence), label, language, confidence});
  }
  return result;
}

CorpusSplit load_unlabeled_tsv(const std::filesystem::path& path, Language language,
                               Split split, const SkipLogger& on_skip) {
  const std::string content = read_sanitized(path);
  const auto lines = data_lines_or_throw(path, content);

  CorpusSplit result;
  result.split = split;
  result.language = language;

  const auto first_id = text::trim(text::split_tabs(lines.front()).front());
  const std::size_t first_data = (first_id == "sentence_id" || first_id == "id") ? 1 : 0;
  if (first_data >= lines.size()) {
    throw Error("empty split: " + path.string() + " has no data rows");
  }

  std::unordered_set<std::string> seen_ids;
  for (std::size_t i = first_data; i < lines.size(); ++i) {
    const auto fields = text::split_tabs(lines[i]);
    const std::string_view id = text::trim(fields.front());
    std::string sentence =
        fields.size() < 2 ? std::string() : join_tabs(std::span(fields).subspan(1));
    if (id.empty() || text::trim(sentence).empty()) {
      ++result.skipped_count;
      if (on_skip) on_skip(path, SkippedLine{i + 1, "expected sentence_id and sentence"});
      continue;
    }
    if (!seen_ids.emplace(id).second) {
      throw Error("duplicate sentence_id: " + std::string(id));
    }
    result.rows.push_back(
        LabeledSentence{std::string(id), std::move(sentence), std::nullopt, language, {}});
  }
  return result;
}

bool detect_confidence_column(const std::filesystem::path& path) {
  const std::string content = read_sanitized(path);
  const auto lines = text::split_lines(content);
  if (lines.empty()) return false;
  const auto fields = text::split_tabs(lines.front());
  if (text::trim(fields.back()) == "solved_conflict") return true;
  return fields.size() >= 4 && parse_label(fields[fields.size() - 2]).has_value() &&
         parse_confidence(fields.back()).has_value();
}

DistributionStats stats(const CorpusSplit& split) {
  DistributionStats s;
  for (const auto& row : split.rows) {
    if (!row.label) continue;
    ++(*row.label == SubjLabel::OBJ ? s.obj_count : s.subj_count);
  }
  s.total = s.obj_count + s.subj_count;
  if (s.total == 0) throw Error("empty split");

  // Exact half-up rounding to hundredths of a percent in integer arithmetic.
  const auto hundredths = [&](std::size_t count) {
    return static_cast<double>((20000 * count + s.total) / (2 * s.total)) / 100.0;
  };
  s.obj_pct = hundredths(s.obj_count);
  s.subj_pct = hundredths(s.subj_count);
  return s;
}

void write_predictions(std::span<const std::string> ids, std::span<const SubjLabel> labels,
                       const std::filesystem::path& path) {
  if (ids.size() != labels.size()) {
    throw Error("write_predictions: " + std::to_string(ids.size()) + " ids but " +
                std::to_string(labels.size()) + " labels");
  }
  std::string body = "sentence_id\tlabel\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    body += ids[i];
    body += '\t';
    body += to_string(labels[i]);
    body += '\n';
  }
  text::write_file_atomic(path, body);
}

void write_predictions(std::span<const Prediction> predictions,
                       const std::filesystem::path& path) {
  std::vector<std::string> ids;
  std::vector<SubjLabel> labels;
  ids.reserve(predictions.size());
  labels.reserve(predictions.size());
  for (const auto& p : predictions) {
    ids.push_back(p.sentence_id);
    labels.push_back(p.label);
  }
  write_predictions(ids, labels, path);
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
  const std::string content = read_sanitized(path);
  const auto lines = text::split_lines(content);
  std::vector<Prediction> out;
  if (lines.empty()) return out;

  const std::size_t first_data = first_line_is_header(lines.front(), false) ? 1 : 0;
  std::unordered_set<std::string> seen;
  for (std::size_t i = first_data; i < lines.size(); ++i) {
    const auto fields = text::split_tabs(lines[i]);
    const auto label = fields.size() == 2 ? parse_label(fields[1]) : std::nullopt;
    const std::string_view id = text::trim(fields.front());
    if (!label || id.empty()) {
      throw Error(path.string() + ":" + std::to_string(i + 1) + ": malformed prediction line");
    }
    if (!seen.emplace(id).second) {
      throw Error(path.string() + ": duplicate prediction for id " + std::string(id));
    }
    out.push_back(Prediction{std::string(id), *label});
  }
  return out;
}

void write_corpus_tsv(const CorpusSplit& split, const std::filesystem::path& path) {
  const bool with_confidence =
      !split.rows.empty() && split.rows.front().solved_conflict.has_value();
  const bool labeled = !split.rows.empty() && split.rows.front().label.has_value();
  std::string body = !labeled         ? "sentence_id\tsentence\n"
                     : with_confidence ? "sentence_id\tsentence\tlabel\tsolved_conflict\n"
                                       : "sentence_id\tsentence\tlabel\n";
  std::string cell;
  for (const auto& row : split.rows) {
    body += row.sentence_id;
    body += '\t';
    body += clean_text_for_cell(row.text, cell);
    if (labeled) {
      body += '\t';
      body += row.label ? to_string(*row.label) : std::string_view("");
    }
    if (with_confidence) {
      body += '\t';
      body += row.solved_conflict.value_or(false) ? "1" : "0";
    }
    body += '\n';
  }
  text::write_file_atomic(path, body);
}

}  // namespace subjpipe
