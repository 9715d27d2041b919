#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "subjpipe/http_backend.hpp"
#include "subjpipe/preprocess.hpp"
#include "subjpipe/reference_encoder.hpp"
#include "subjpipe/text_io.hpp"
#include "subjpipe/translate.hpp"

namespace subjpipe::cli {
namespace {

// Error tagged with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message)
      : Error(stage + ": " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

template <typename Fn>
int guarded(std::string_view command, std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    err << "subjpipe " << command << ": " << e.what() << '\n';
    return 1;
  }
}

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

bool wants_confidence(const RunConfig& config, const std::filesystem::path& path) {
  switch (config.confidence) {
    case ConfidenceColumn::present: return true;
    case ConfidenceColumn::absent: return false;
    case ConfidenceColumn::automatic:
      return config.language == Language::en && detect_confidence_column(path);
  }
  return false;
}

CorpusSplit load_labeled(const RunConfig& config, const std::filesystem::path& path,
                         Split split) {
  if (path.empty()) throw Error("no --" + std::string(to_string(split)) + " file given");
  return load_tsv(path, config.language, split, wants_confidence(config, path));
}

EmojiTable load_emoji_table(const RunConfig& config) {
  return EmojiTable::load(config.emoji_table.empty() ? EmojiTable::default_path()
                                                     : config.emoji_table);
}

bool needs_translation(const RunConfig& config) {
  return config.translate && config.language != Language::en;
}

std::unique_ptr<TranslationBackend> resolve_backend(const RunConfig& config) {
  if (!config.mt_stub.empty()) return stub_backend(config.mt_stub);
  if (auto http = http_config_from_env(config.mt_endpoint)) {
    if (http->endpoint.empty()) {
      throw Error(std::string(kMtKeyEnvVar) + " is set but no --mt-endpoint was given");
    }
    return http_backend(std::move(*http));
  }
  throw Error("no translation backend: pass --mt-stub <file> or set " +
              std::string(kMtKeyEnvVar) + " with --mt-endpoint");
}

// Lazily created translation machinery shared by the splits of one command.
struct Translator {
  std::unique_ptr<TranslationBackend> backend;
  std::unique_ptr<TranslationCache> cache;

  CorpusSplit apply(const RunConfig& config, const CorpusSplit& split) {
    if (!needs_translation(config)) return split;
    if (!backend) {
      backend = resolve_backend(config);
      std::filesystem::create_directories(config.cache_path().parent_path().empty()
                                              ? std::filesystem::path(".")
                                              : config.cache_path().parent_path());
      cache = std::make_unique<TranslationCache>(config.cache_path());
    }
    return translate_split(split, *backend, *cache);
  }

  // Empty when nothing was translated.
  std::string summary() const {
    if (!cache) return {};
    return "translation cache: " + std::to_string(cache->hit_count()) + " hits, " +
           std::to_string(cache->miss_count()) + " misses\n";
  }
};

CorpusSplit prepare(const RunConfig& config, const CorpusSplit& raw, const EmojiTable& table,
                    Translator& translator) {
  CorpusSplit cleaned = stage("preprocess", [&] { return preprocess_split(raw, table); });
  return stage("translate", [&] { return translator.apply(config, cleaned); });
}

void ensure_out_dir(const RunConfig& config) {
  std::filesystem::create_directories(config.out_dir);
}

std::string format_loss_trace(const std::vector<double>& losses) {
  std::string out = "epoch\tloss\n";
  char buf[64];
  for (std::size_t i = 0; i < losses.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu\t%.17g\n", i + 1, losses[i]);
    out += buf;
  }
  return out;
}

std::vector<SubjLabel> gold_labels(const CorpusSplit& split) {
  std::vector<SubjLabel> labels;
  for (const auto& row : split.rows) labels.push_back(*row.label);
  return labels;
}

std::vector<SubjLabel> predicted_labels(const std::vector<Prediction>& predictions) {
  std::vector<SubjLabel> labels;
  for (const auto& p : predictions) labels.push_back(p.label);
  return labels;
}

struct TrainedModel {
  std::unique_ptr<ReferenceEncoder> encoder;
  std::vector<double> epoch_loss;
  std::size_t steps = 0;
};

TrainedModel fit(const RunConfig& config, const CorpusSplit& train_split) {
  return stage("train", [&] {
    const ReferenceEncoder initial(build_vocabulary(train_split), config.dim,
                                   config.train_config.seed);
    TrainResult result = train(train_split, initial, config.train_config);
    auto* trained = dynamic_cast<ReferenceEncoder*>(result.encoder.get());
    TrainedModel model;
    model.encoder = std::make_unique<ReferenceEncoder>(*trained);
    model.epoch_loss = std::move(result.epoch_loss);
    model.steps = result.steps;
    return model;
  });
}

}  // namespace

void RunConfig::validate() const {
  train_config.validate();
  if (dim < 2) throw Error("--dim must be at least 2");
  if (needs_translation(*this) && mt_stub.empty()) {
    const auto http = http_config_from_env(mt_endpoint);
    if (!http || http->endpoint.empty()) {
      throw Error("translation requested for " + std::string(to_string(language)) +
                  " but no backend is available: pass --mt-stub <file> or set " +
                  std::string(kMtKeyEnvVar) + " with --mt-endpoint");
    }
  }
}

std::filesystem::path RunConfig::model_path() const {
  return model.empty() ? out_dir / "model.ckpt" : model;
}

std::filesystem::path RunConfig::cache_path() const {
  return cache.empty() ? out_dir / "translation_cache.tsv" : cache;
}

std::string stats_header() {
  return pad_right("Language", 14) + pad_right("Dataset(N)", 16) + pad_right("OBJ(N)(%)", 16) +
         "SUBJ(N)(%)";
}

std::string format_stats_row(Language language, Split split, const DistributionStats& s) {
  const auto cell = [](std::size_t n, double pct) {
    return std::to_string(n) + " (" + text::format_fixed(pct, 2) + ")";
  };
  return pad_right(std::string(display_name(language)), 14) +
         pad_right(std::string(display_name(split)) + " (" + std::to_string(s.total) + ")", 16) +
         pad_right(cell(s.obj_count, s.obj_pct), 16) + cell(s.subj_count, s.subj_pct);
}

std::string report_row_name(const std::filesystem::path& metrics_file) {
  if (metrics_file.stem() == "metrics" && metrics_file.has_parent_path()) {
    const auto parent = metrics_file.parent_path().filename().string();
    if (!parent.empty() && parent != "." && parent != "..") return parent;
  }
  return metrics_file.stem().string();
}

std::string format_report_table(const std::vector<std::string>& names,
                                const std::vector<MetricsReport>& reports) {
  std::size_t name_width = std::string_view("Language").size();
  for (const auto& n : names) name_width = std::max(name_width, n.size());
  name_width += 2;

  const char* columns[] = {"F1 Macro", "P Macro", "R Macro", "F1 SUBJ",
                           "P SUBJ",   "R SUBJ",  "Accuracy"};
  std::string out = pad_right("Language", name_width);
  for (std::size_t c = 0; c < 7; ++c) out += pad_right(columns[c], c == 6 ? 0 : 10);
  out += '\n';
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    const double values[] = {r.f1_macro, r.p_macro, r.r_macro, r.f1_subj,
                             r.p_subj,   r.r_subj,  r.accuracy};
    out += pad_right(names[i], name_width);
    for (std::size_t c = 0; c < 7; ++c) {
      out += pad_right(text::format_fixed(values[c], 4), c == 6 ? 0 : 10);
    }
    out += '\n';
  }
  return out;
}

int cmd_stats(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded("stats", err, [&] {
    if (config.train.empty() && config.test.empty()) {
      throw Error("stats needs --train and/or --test");
    }
    std::vector<std::string> rows;
    for (const auto& [path, split] : {std::pair{config.train, Split::train},
                                      std::pair{config.test, Split::test}}) {
      if (path.empty()) continue;
      const auto corpus = load_labeled(config, path, split);
      rows.push_back(format_stats_row(config.language, split, stats(corpus)));
    }
    out << stats_header() << '\n';
    for (const auto& row : rows) out << row << '\n';
    return 0;
  });
}

int cmd_preprocess(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded("preprocess", err, [&] {
    const EmojiTable table = load_emoji_table(config);
    ensure_out_dir(config);
    for (const auto& [path, split] : {std::pair{config.train, Split::train},
                                      std::pair{config.test, Split::test}}) {
      if (path.empty()) continue;
      const auto corpus = config.unlabeled ? load_unlabeled_tsv(path, config.language, split)
                                           : load_labeled(config, path, split);
      const auto target =
          config.out_dir / ("preprocessed_" + std::string(to_string(split)) + ".tsv");
      write_corpus_tsv(preprocess_split(corpus, table), target);
      out << "wrote " << target.string() << '\n';
    }
    return 0;
  });
}

int cmd_translate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded("translate", err, [&] {
    RunConfig forced = config;
    forced.translate = true;
    forced.validate();
    ensure_out_dir(forced);
    Translator translator;
    for (const auto& [path, split] : {std::pair{forced.train, Split::train},
                                      std::pair{forced.test, Split::test}}) {
      if (path.empty()) continue;
      const auto corpus = forced.unlabeled ? load_unlabeled_tsv(path, forced.language, split)
                                           : load_labeled(forced, path, split);
      const auto target =
          forced.out_dir / ("translated_" + std::string(to_string(split)) + ".tsv");
      write_corpus_tsv(translator.apply(forced, corpus), target);
      out << "wrote " << target.string() << '\n';
    }
    out << translator.summary();
    return 0;
  });
}

int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded("train", err, [&] {
    config.validate();
    const auto raw = stage("load", [&] { return load_labeled(config, config.train, Split::train); });
    const EmojiTable table = stage("load", [&] { return load_emoji_table(config); });
    Translator translator;
    const auto prepared = prepare(config, raw, table, translator);
    const auto model = fit(config, prepared);
    ensure_out_dir(config);
    model.encoder->save(config.model_path());
    text::write_file_atomic(config.out_dir / "loss_trace.tsv", format_loss_trace(model.epoch_loss));
    out << "trained " << model.steps << " steps over " << model.epoch_loss.size()
        << " epochs; final loss " << std::setprecision(6) << model.epoch_loss.back() << '\n'
        << "wrote " << config.model_path().string() << '\n';
    return 0;
  });
}

int cmd_predict(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded("predict", err, [&] {
    config.validate();
    const auto encoder =
        stage("load", [&] { return ReferenceEncoder::load(config.model_path()); });
    if (config.test.empty()) throw Error("no --test file given");
    const auto raw = stage("load", [&] {
      return config.unlabeled ? load_unlabeled_tsv(config.test, config.language, Split::test)
                              : load_labeled(config, config.test, Split::test);
    });
    const EmojiTable table = stage("load", [&] { return load_emoji_table(config); });
    Translator translator;
    const auto prepared = prepare(config, raw, table, translator);
    const auto predictions = stage("predict", [&] { return predict(prepared, encoder); });
    ensure_out_dir(config);
    const auto target = config.out_dir / "predictions.tsv";
    write_predictions(predictions, target);
    out << "wrote " << target.string() << '\n';
    return 0;
  });
}

int cmd_evaluate(const std::filesystem::path& gold, const std::filesystem::path& pred,
                 const std::filesystem::path& metrics_out, std::ostream& out,
                 std::ostream& err) {
  return guarded("evaluate", err, [&] {
    const MetricsReport report = evaluate_files(gold, pred);
    if (!metrics_out.empty()) {
      if (metrics_out.has_parent_path()) {
        std::filesystem::create_directories(metrics_out.parent_path());
      }
      write_metrics_tsv(report, metrics_out);
    }
    out << format_metrics_tsv(report);
    return 0;
  });
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded("run", err, [&] {
    stage("config", [&] { config.validate(); return 0; });
    const auto raw_train =
        stage("load", [&] { return load_labeled(config, config.train, Split::train); });
    const auto raw_test =
        stage("load", [&] { return load_labeled(config, config.test, Split::test); });
    const EmojiTable table = stage("load", [&] { return load_emoji_table(config); });

    ensure_out_dir(config);
    Translator translator;
    const auto train_split = prepare(config, raw_train, table, translator);
    const auto test_split = prepare(config, raw_test, table, translator);
    if (config.dump_preprocessed) {
      stage("dump", [&] {
        write_corpus_tsv(train_split, config.out_dir / "preprocessed_train.tsv");
        write_corpus_tsv(test_split, config.out_dir / "preprocessed_test.tsv");
        return 0;
      });
    }

    const auto model = fit(config, train_split);

    const auto predictions_path = config.out_dir / "predictions.tsv";
    const auto metrics_path = config.out_dir / "metrics.tsv";
    const auto [test_report, train_report] = stage("predict", [&] {
      const auto test_predictions = predict(test_split, *model.encoder);
      write_predictions(test_predictions, predictions_path);
      const auto train_predictions = predict(train_split, *model.encoder);
      return std::pair{
          report(confusion(gold_labels(test_split), predicted_labels(test_predictions))),
          report(confusion(gold_labels(train_split), predicted_labels(train_predictions)))};
    });

    stage("evaluate", [&] {
      const MetricsReport joined = evaluate_files(config.test, predictions_path);
      write_metrics_tsv(joined, metrics_path);
      write_metrics_tsv(train_report, config.out_dir / "train_metrics.tsv");
      return 0;
    });

    stage("report", [&] {
      model.encoder->save(config.model_path());
      text::write_file_atomic(config.out_dir / "loss_trace.tsv",
                              format_loss_trace(model.epoch_loss));
      const auto train_stats = stats(raw_train);
      const auto test_stats = stats(raw_test);
      const auto& tc = config.train_config;
      std::ostringstream report_text;
      report_text << "subjpipe run: " << display_name(config.language) << " ("
                  << to_string(config.language) << ")\n\n"
                  << stats_header() << '\n'
                  << format_stats_row(config.language, Split::train, train_stats) << '\n'
                  << format_stats_row(config.language, Split::test, test_stats) << "\n\n"
                  << "skipped lines: train " << raw_train.skipped_count << ", test "
                  << raw_test.skipped_count << '\n'
                  << "translated to English: " << (needs_translation(config) ? "yes" : "no")
                  << '\n'
                  << "batch_size=" << tc.batch_size << " learning_rate=" << tc.learning_rate
                  << " epochs=" << tc.epochs << " seed=" << tc.seed
                  << " confidence_weight=" << tc.confidence_weight << " dim=" << config.dim
                  << '\n'
                  << "optimizer steps: " << model.steps << ", final training loss: "
                  << text::format_fixed(model.epoch_loss.back(), 6) << '\n'
                  << "training accuracy: " << text::format_fixed(train_report.accuracy, 4)
                  << "\n\n"
                  << format_report_table({std::string(display_name(config.language))},
                                         {test_report});
      text::write_file_atomic(config.out_dir / "report.txt", report_text.str());
      out << report_text.str() << translator.summary();
      return 0;
    });
    return 0;
  });
}

int cmd_report(const std::vector<std::filesystem::path>& metrics_files, std::ostream& out,
               std::ostream& err) {
  return guarded("report", err, [&] {
    if (metrics_files.empty()) throw Error("report needs at least one metrics file");
    std::vector<std::string> names;
    std::vector<MetricsReport> reports;
    for (const auto& file : metrics_files) {
      names.push_back(report_row_name(file));
      reports.push_back(load_metrics_tsv(file));
    }
    out << format_report_table(names, reports);
    return 0;
  });
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multilingual subjectivity classification pipeline", "subjpipe"};
  app.set_config("--config", "", "Flat `key = value` file; command-line flags take precedence");
  app.fallthrough();
  app.require_subcommand(1, 1);

  RunConfig config;
  std::string language = "en";
  std::string confidence = "auto";
  std::string out_dir = ".";
  std::string train_path, test_path, model_path, cache_path, emoji_path, mt_stub;

  app.add_option("--lang", language, "Corpus language")
      ->check(CLI::IsMember({"ar", "bg", "en", "de", "it", "multi"}))
      ->capture_default_str();
  app.add_option("--train", train_path, "Training TSV");
  app.add_option("--test", test_path, "Test TSV");
  app.add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  app.add_option("--model", model_path, "Model checkpoint (default <out-dir>/model.ckpt)");
  app.add_option("--cache", cache_path,
                 "Translation cache (default <out-dir>/translation_cache.tsv)");
  app.add_option("--emoji-table", emoji_path, "Emoji table TSV (default: bundled)");
  app.add_option("--seed", config.train_config.seed, "Seed for every random choice")
      ->capture_default_str();
  app.add_option("--batch-size", config.train_config.batch_size)->capture_default_str();
  app.add_option("--lr", config.train_config.learning_rate)->capture_default_str();
  app.add_option("--epochs", config.train_config.epochs)->capture_default_str();
  app.add_option("--confidence-weight", config.train_config.confidence_weight)
      ->capture_default_str();
  app.add_option("--dim", config.dim, "Reference encoder embedding size")
      ->capture_default_str();
  app.add_option("--confidence", confidence, "solved_conflict column: auto, yes or no")
      ->check(CLI::IsMember({"auto", "yes", "no"}))
      ->capture_default_str();
  app.add_flag("--translate", config.translate, "Translate non-English text to English");
  app.add_option("--mt-stub", mt_stub, "Offline translation mapping TSV");
  app.add_option("--mt-endpoint", config.mt_endpoint,
                 "HTTP translation endpoint (credential from SUBJPIPE_MT_KEY)");
  app.add_flag("--dump-preprocessed", config.dump_preprocessed,
               "Write the text the model actually consumes");
  app.add_flag("--unlabeled", config.unlabeled, "Input has no label column");

  auto* stats_cmd = app.add_subcommand("stats", "Label distribution of --train/--test");
  auto* preprocess_cmd = app.add_subcommand("preprocess", "Demojize and strip mentions/URLs");
  auto* translate_cmd = app.add_subcommand("translate", "Translate --train/--test to English");
  auto* train_cmd = app.add_subcommand("train", "Train the reference encoder on --train");
  auto* predict_cmd = app.add_subcommand("predict", "Label --test with a trained model");
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a prediction file");
  auto* run_cmd = app.add_subcommand("run", "Full pipeline: load to evaluation");
  auto* report_cmd = app.add_subcommand("report", "Combine metrics files into one table");

  std::string gold, pred, metrics_out;
  evaluate_cmd->add_option("--gold", gold, "Gold TSV")->required();
  evaluate_cmd->add_option("--pred", pred, "Prediction TSV")->required();
  evaluate_cmd->add_option("--metrics-out", metrics_out, "Write metrics TSV here");
  std::vector<std::string> metrics_files;
  report_cmd->add_option("metrics", metrics_files, "Metrics TSV files")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  config.language = *parse_language(language);
  config.confidence = confidence == "yes"  ? ConfidenceColumn::present
                      : confidence == "no" ? ConfidenceColumn::absent
                                           : ConfidenceColumn::automatic;
  config.train = train_path;
  config.test = test_path;
  config.out_dir = out_dir;
  config.model = model_path;
  config.cache = cache_path;
  config.emoji_table = emoji_path;
  config.mt_stub = mt_stub;

  if (stats_cmd->parsed()) return cmd_stats(config, out, err);
  if (preprocess_cmd->parsed()) return cmd_preprocess(config, out, err);
  if (translate_cmd->parsed()) return cmd_translate(config, out, err);
  if (train_cmd->parsed()) return cmd_train(config, out, err);
  if (predict_cmd->parsed()) return cmd_predict(config, out, err);
  if (evaluate_cmd->parsed()) return cmd_evaluate(gold, pred, metrics_out, out, err);
  if (run_cmd->parsed()) return cmd_run(config, out, err);
  if (report_cmd->parsed()) {
    return cmd_report({metrics_files.begin(), metrics_files.end()}, out, err);
  }
  return 2;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return main(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace subjpipe::cli
