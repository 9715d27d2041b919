#include "subjpipe/metrics.hpp"

#include <array>
#include <cstdlib>
#include <unordered_map>
#include <vector>

#include "subjpipe/corpus.hpp"
#include "subjpipe/text_io.hpp"

namespace subjpipe {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

std::string id_list(const std::vector<std::string>& ids, std::size_t total) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i != 0) out += ", ";
    out += ids[i];
  }
  if (total > ids.size()) out += ", ... (" + std::to_string(total) + " total)";
  return out;
}

}  // namespace

ConfusionMatrix confusion(std::span<const SubjLabel> gold, std::span<const SubjLabel> pred) {
  if (gold.size() != pred.size()) {
    throw Error("confusion: " + std::to_string(gold.size()) + " gold labels but " +
                std::to_string(pred.size()) + " predictions");
  }
  if (gold.empty()) throw Error("confusion: no labels");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool gold_subj = gold[i] == SubjLabel::SUBJ;
    const bool pred_subj = pred[i] == SubjLabel::SUBJ;
    if (gold_subj && pred_subj) ++cm.tp_subj;
    else if (!gold_subj && pred_subj) ++cm.fp_subj;
    else if (gold_subj && !pred_subj) ++cm.fn_subj;
    else ++cm.tn_subj;
  }
  return cm;
}

MetricsReport report(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw Error("report: empty confusion matrix");
  MetricsReport r;
  r.p_subj = ratio(cm.tp_subj, cm.tp_subj + cm.fp_subj);
  r.r_subj = ratio(cm.tp_subj, cm.tp_subj + cm.fn_subj);
  r.f1_subj = harmonic(r.p_subj, r.r_subj);
  r.p_obj = ratio(cm.tn_subj, cm.tn_subj + cm.fn_subj);
  r.r_obj = ratio(cm.tn_subj, cm.tn_subj + cm.fp_subj);
  r.f1_obj = harmonic(r.p_obj, r.r_obj);
  r.p_macro = (r.p_subj + r.p_obj) / 2.0;
  r.r_macro = (r.r_subj + r.r_obj) / 2.0;
  r.f1_macro = (r.f1_subj + r.f1_obj) / 2.0;
  r.accuracy = ratio(cm.tp_subj + cm.tn_subj, cm.total());
  return r;
}

MetricsReport evaluate_files(const std::filesystem::path& gold_path,
                             const std::filesystem::path& pred_path) {
  const bool with_confidence = detect_confidence_column(gold_path);
  const CorpusSplit gold = load_tsv(gold_path, with_confidence ? Language::en : Language::multi,
                                    Split::test, with_confidence);
  const auto predictions = load_predictions(pred_path);

  std::unordered_map<std::string, SubjLabel> predicted;
  for (const auto& p : predictions) predicted.emplace(p.sentence_id, p.label);

  constexpr std::size_t kListed = 10;
  std::vector<std::string> missing;
  std::size_t missing_total = 0;
  std::vector<SubjLabel> gold_labels, pred_labels;
  std::unordered_map<std::string_view, bool> gold_ids;
  for (const auto& row : gold.rows) {
    gold_ids.emplace(row.sentence_id, true);
    const auto it = predicted.find(row.sentence_id);
    if (it == predicted.end()) {
      if (missing.size() < kListed) missing.push_back(row.sentence_id);
      ++missing_total;
      continue;
    }
    gold_labels.push_back(*row.label);
    pred_labels.push_back(it->second);
  }

  std::vector<std::string> extra;
  std::size_t extra_total = 0;
  for (const auto& p : predictions) {
    if (gold_ids.contains(p.sentence_id)) continue;
    if (extra.size() < kListed) extra.push_back(p.sentence_id);
    ++extra_total;
  }

  if (missing_total > 0 || extra_total > 0) {
    std::string message = "prediction ids do not match gold ids";
    if (missing_total > 0) message += "; missing: " + id_list(missing, missing_total);
    if (extra_total > 0) message += "; unexpected: " + id_list(extra, extra_total);
    throw Error(message);
  }
  return report(confusion(gold_labels, pred_labels));
}

std::string format_metrics_tsv(const MetricsReport& r) {
  std::string out(kMetricsHeader);
  out += '\n';
  const std::array<double, 7> values{r.f1_macro, r.p_macro, r.r_macro, r.f1_subj,
                                     r.p_subj,   r.r_subj,  r.accuracy};
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i != 0) out += '\t';
    out += text::format_fixed(values[i], 4);
  }
  out += '\n';
  return out;
}

void write_metrics_tsv(const MetricsReport& report, const std::filesystem::path& path) {
  text::write_file_atomic(path, format_metrics_tsv(report));
}

MetricsReport load_metrics_tsv(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error("missing metrics file: " + path.string());
  const std::string content = text::read_file(path);
  const auto lines = text::split_lines(content);
  if (lines.size() < 2 || lines[0] != kMetricsHeader) {
    throw Error("not a metrics file: " + path.string());
  }
  const auto fields = text::split_tabs(lines[1]);
  if (fields.size() != 7) throw Error("malformed metrics row: " + path.string());
  std::array<double, 7> values{};
  for (std::size_t i = 0; i < 7; ++i) {
    const std::string cell(fields[i]);
    char* end = nullptr;
    values[i] = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0') {
      throw Error("malformed metrics value in " + path.string());
    }
  }
  MetricsReport r;
  r.f1_macro = values[0];
  r.p_macro = values[1];
  r.r_macro = values[2];
  r.f1_subj = values[3];
  r.p_subj = values[4];
  r.r_subj = values[5];
  r.accuracy = values[6];
  return r;
}

}  // namespace subjpipe
