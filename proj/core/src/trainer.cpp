#include "subjpipe/trainer.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace subjpipe {
namespace {

// Unbiased index in [0, bound) by rejection.
std::size_t bounded(std::mt19937_64& rng, std::size_t bound) {
  const std::uint64_t range = static_cast<std::uint64_t>(bound);
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % range;
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return static_cast<std::size_t>(draw % range);
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch)};
  std::mt19937_64 rng(seq);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[bounded(rng, i)]);
  return order;
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size == 0) throw Error("batch size must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error("learning rate must be positive");
  }
  if (epochs == 0) throw Error("epoch count must be positive");
  if (!(confidence_weight > 0.0) || !std::isfinite(confidence_weight)) {
    throw Error("confidence weight must be positive");
  }
}

double sample_weight(const LabeledSentence& row, const TrainConfig& config) {
  return row.solved_conflict.value_or(false) ? config.confidence_weight : 1.0;
}

WeightedBatch make_weighted_batch(std::span<const LabeledSentence* const> rows,
                                  const Encoder& encoder, const TrainConfig& config) {
  WeightedBatch batch;
  std::vector<std::vector<TokenId>> sequences;
  sequences.reserve(rows.size());
  for (const LabeledSentence* row : rows) {
    if (!row->label) throw Error("training row without label: " + row->sentence_id);
    sequences.push_back(encoder.tokenize(row->text));
    batch.targets.push_back(to_sentiment(*row->label));
    batch.weights.push_back(sample_weight(*row, config));
  }
  batch.inputs = TokenBatch::pad(sequences, encoder.pad_id());
  return batch;
}

void GradientDescent::step(std::span<double> parameters, std::span<const double> gradient) {
  for (std::size_t i = 0; i < parameters.size(); ++i) {
    parameters[i] -= learning_rate_ * gradient[i];
  }
}

Adam::Adam(double learning_rate, double beta1, double beta2, double epsilon)
    : learning_rate_(learning_rate), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

void Adam::step(std::span<double> parameters, std::span<const double> gradient) {
  if (m_.size() != parameters.size()) {
    m_.assign(parameters.size(), 0.0);
    v_.assign(parameters.size(), 0.0);
    t_ = 0;
  }
  ++t_;
  const double correction1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double correction2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < parameters.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * gradient[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * gradient[i] * gradient[i];
    const double m_hat = m_[i] / correction1;
    const double v_hat = v_[i] / correction2;
    parameters[i] -= learning_rate_ * m_hat / (std::sqrt(v_hat) + epsilon_);
  }
}

std::unique_ptr<Optimizer> make_gradient_descent(const TrainConfig& config) {
  return std::make_unique<GradientDescent>(config.learning_rate);
}

TrainResult train(const CorpusSplit& split, const Encoder& initial, const TrainConfig& config,
                  const OptimizerFactory& optimizer_factory) {
  config.validate();
  if (split.rows.empty()) throw Error("empty training split");

  TrainResult result;
  result.encoder = initial.clone();
  Encoder& encoder = *result.encoder;
  auto optimizer = optimizer_factory(config);

  const std::size_t n = split.rows.size();
  std::vector<double> gradient(encoder.parameters().size());
  std::vector<const LabeledSentence*> batch_rows;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = epoch_order(n, config.seed, epoch);
    double epoch_numerator = 0.0;
    double epoch_weight = 0.0;

    for (std::size_t start = 0, batch_index = 0; start < n;
         start += config.batch_size, ++batch_index) {
      const std::size_t end = std::min(n, start + config.batch_size);
      batch_rows.clear();
      for (std::size_t k = start; k < end; ++k) batch_rows.push_back(&split.rows[order[k]]);

      const WeightedBatch batch = make_weighted_batch(batch_rows, encoder, config);
      const auto logits = encoder.forward(batch.inputs);
      const auto loss = weighted_loss_with_gradient(logits, batch.targets, batch.weights);
      if (!std::isfinite(loss.loss)) {
        throw Error("non-finite loss at epoch " + std::to_string(epoch + 1) + ", batch " +
                    std::to_string(batch_index + 1));
      }

      std::fill(gradient.begin(), gradient.end(), 0.0);
      encoder.backward(batch.inputs, loss.logit_grad, gradient);
      optimizer->step(encoder.parameters(), gradient);
      ++result.steps;

      const double batch_weight = std::accumulate(batch.weights.begin(), batch.weights.end(), 0.0);
      epoch_numerator += loss.loss * batch_weight;
      epoch_weight += batch_weight;
    }
    result.epoch_loss.push_back(epoch_numerator / epoch_weight);
  }
  return result;
}

std::vector<Prediction> predict(const CorpusSplit& split, const Encoder& encoder,
                                std::size_t batch_size) {
  std::vector<Prediction> out;
  out.reserve(split.rows.size());
  if (batch_size == 0) batch_size = 1;
  std::vector<std::string_view> texts;
  for (std::size_t start = 0; start < split.rows.size(); start += batch_size) {
    const std::size_t end = std::min(split.rows.size(), start + batch_size);
    texts.clear();
    for (std::size_t i = start; i < end; ++i) texts.push_back(split.rows[i].text);
    const auto logits = encoder.forward(encode_texts(encoder, texts));
    for (std::size_t i = start; i < end; ++i) {
      out.push_back(Prediction{split.rows[i].sentence_id, from_logits(logits[i - start])});
    }
  }
  return out;
}

}  // namespace subjpipe
