#pragma once

#include <span>
#include <vector>

#include "subjpipe/encoder.hpp"
#include "subjpipe/labels.hpp"

namespace subjpipe {

struct WeightedBatch {
  TokenBatch inputs;
  std::vector<SentimentClass> targets;
  std::vector<double> weights;  // confidence weight per example
};

// Softmax cross-entropy of one example, computed with log-sum-exp.
double cross_entropy(const SentimentLogits& logits, SentimentClass target);

// sum_i w_i * CE_i / sum_i w_i. Throws Error on an empty batch or mismatched
// sizes.
double weighted_loss(std::span<const SentimentLogits> logits,
                     std::span<const SentimentClass> targets, std::span<const double> weights);
double weighted_loss(std::span<const SentimentLogits> logits, const WeightedBatch& batch);

struct LossWithGradient {
  double loss = 0.0;
  std::vector<SentimentLogits> logit_grad;  // d(loss)/d(logits), per example
};

LossWithGradient weighted_loss_with_gradient(std::span<const SentimentLogits> logits,
                                             std::span<const SentimentClass> targets,
                                             std::span<const double> weights);

}  // namespace subjpipe
