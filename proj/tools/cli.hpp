#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "subjpipe/common.hpp"
#include "subjpipe/corpus.hpp"
#include "subjpipe/metrics.hpp"
#include "subjpipe/trainer.hpp"

namespace subjpipe::cli {

enum class ConfidenceColumn { automatic, present, absent };

// Everything a command needs, after flags, config file and defaults have been
// merged.
struct RunConfig {
  Language language = Language::en;
  std::filesystem::path train;
  std::filesystem::path test;
  std::filesystem::path out_dir = ".";
  std::filesystem::path model;          // default: <out-dir>/model.ckpt
  std::filesystem::path cache;          // default: <out-dir>/translation_cache.tsv
  std::filesystem::path emoji_table;    // default: bundled table
  std::filesystem::path mt_stub;
  std::string mt_endpoint;
  TrainConfig train_config;
  std::size_t dim = 16;
  bool translate = false;
  bool dump_preprocessed = false;
  bool unlabeled = false;
  ConfidenceColumn confidence = ConfidenceColumn::automatic;

  // Throws Error when translation is requested for a non-English corpus and
  // no backend can be resolved.
  void validate() const;

  std::filesystem::path model_path() const;
  std::filesystem::path cache_path() const;
};

// One distribution line: "Arabic  Train (1185)  905 (76.37)  280 (23.63)".
std::string format_stats_row(Language language, Split split, const DistributionStats& stats);
std::string stats_header();

// Side-by-side metrics table, one row per file.
std::string format_report_table(const std::vector<std::string>& names,
                                const std::vector<MetricsReport>& reports);

// Row name for a metrics file: the parent directory for ".../metrics.tsv",
// the file stem otherwise.
std::string report_row_name(const std::filesystem::path& metrics_file);

int cmd_stats(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_preprocess(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_translate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_predict(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_evaluate(const std::filesystem::path& gold, const std::filesystem::path& pred,
                 const std::filesystem::path& metrics_out, std::ostream& out,
                 std::ostream& err);
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_report(const std::vector<std::filesystem::path>& metrics_files, std::ostream& out,
               std::ostream& err);

// Full command-line entry point: `subjpipe <command> [flags]`.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace subjpipe::cli
