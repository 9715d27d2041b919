#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>

#include "subjpipe/common.hpp"

namespace subjpipe {

// 2x2 tally with SUBJ as the positive class.
struct ConfusionMatrix {
  std::size_t tp_subj = 0;
  std::size_t fp_subj = 0;
  std::size_t fn_subj = 0;
  std::size_t tn_subj = 0;

  std::size_t total() const { return tp_subj + fp_subj + fn_subj + tn_subj; }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct MetricsReport {
  double f1_macro = 0.0;
  double p_macro = 0.0;
  double r_macro = 0.0;
  double f1_subj = 0.0;
  double p_subj = 0.0;
  double r_subj = 0.0;
  double accuracy = 0.0;
  // OBJ-as-positive counterparts, kept for the macro averages.
  double f1_obj = 0.0;
  double p_obj = 0.0;
  double r_obj = 0.0;
};

// Throws Error on mismatched lengths or empty input.
ConfusionMatrix confusion(std::span<const SubjLabel> gold, std::span<const SubjLabel> pred);

// Precision, recall and F1 are 0 whenever their denominator is 0. Macro
// values are plain means over SUBJ and OBJ. Throws Error if the matrix is
// empty.
MetricsReport report(const ConfusionMatrix& cm);

// Joins gold rows and predictions by sentence_id. Every gold id must be
// predicted exactly once and no other id may appear; otherwise the Error
// lists up to 10 offending ids.
MetricsReport evaluate_files(const std::filesystem::path& gold_path,
                             const std::filesystem::path& pred_path);

inline constexpr std::string_view kMetricsHeader =
    "f1_macro\tp_macro\tr_macro\tf1_subj\tp_subj\tr_subj\taccuracy";

// Header plus one row, each value fixed-point with 4 decimals.
std::string format_metrics_tsv(const MetricsReport& report);
void write_metrics_tsv(const MetricsReport& report, const std::filesystem::path& path);
// Reads the seven reported columns back (OBJ fields stay zero).
MetricsReport load_metrics_tsv(const std::filesystem::path& path);

}  // namespace subjpipe
