#include "subjpipe/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "subjpipe/common.hpp"

namespace subjpipe {
namespace {

void check_sizes(std::size_t logits, std::size_t targets, std::size_t weights) {
  if (logits == 0) throw Error("weighted_loss: empty batch");
  if (logits != targets || logits != weights) {
    throw Error("weighted_loss: size mismatch (" + std::to_string(logits) + " logits, " +
                std::to_string(targets) + " targets, " + std::to_string(weights) + " weights)");
  }
}

double log_sum_exp(const SentimentLogits& logits) {
  const double peak = *std::max_element(logits.scores.begin(), logits.scores.end());
  double sum = 0.0;
  for (double z : logits.scores) sum += std::exp(z - peak);
  return peak + std::log(sum);
}

}  // namespace

double cross_entropy(const SentimentLogits& logits, SentimentClass target) {
  return log_sum_exp(logits) - logits[target];
}

double weighted_loss(std::span<const SentimentLogits> logits,
                     std::span<const SentimentClass> targets, std::span<const double> weights) {
  check_sizes(logits.size(), targets.size(), weights.size());
  double numerator = 0.0;
  double total_weight = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    numerator += weights[i] * cross_entropy(logits[i], targets[i]);
    total_weight += weights[i];
  }
  return numerator / total_weight;
}

double weighted_loss(std::span<const SentimentLogits> logits, const WeightedBatch& batch) {
  return weighted_loss(logits, batch.targets, batch.weights);
}

LossWithGradient weighted_loss_with_gradient(std::span<const SentimentLogits> logits,
                                             std::span<const SentimentClass> targets,
                                             std::span<const double> weights) {
  check_sizes(logits.size(), targets.size(), weights.size());
  double total_weight = 0.0;
  for (double w : weights) total_weight += w;

  LossWithGradient out;
  out.logit_grad.resize(logits.size());
  double numerator = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double lse = log_sum_exp(logits[i]);
    numerator += weights[i] * (lse - logits[i][targets[i]]);
    // d CE / dz = softmax(z) - onehot(target)
    const double scale = weights[i] / total_weight;
    for (std::size_t c = 0; c < kSentimentClasses; ++c) {
      out.logit_grad[i].scores[c] = scale * std::exp(logits[i].scores[c] - lse);
    }
    out.logit_grad[i][targets[i]] -= scale;
  }
  out.loss = numerator / total_weight;
  return out;
}

}  // namespace subjpipe
