#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "subjpipe/corpus.hpp"
#include "subjpipe/encoder.hpp"
#include "subjpipe/loss.hpp"

namespace subjpipe {

struct TrainConfig {
  std::size_t batch_size = 16;
  double learning_rate = 2e-5;
  std::size_t epochs = 20;
  std::uint64_t seed = 0;
  double confidence_weight = 1.2;

  // Throws Error unless every field is positive (seed aside).
  void validate() const;
};

// confidence_weight for rows whose annotation conflict was resolved, 1.0 for
// everything else.
double sample_weight(const LabeledSentence& row, const TrainConfig& config);

// Tokenized inputs, mapped sentiment targets and confidence weights for a run
// of labeled rows. Throws Error if a row has no label.
WeightedBatch make_weighted_batch(std::span<const LabeledSentence* const> rows,
                                  const Encoder& encoder, const TrainConfig& config);

class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual void step(std::span<double> parameters, std::span<const double> gradient) = 0;
};

// Constant learning rate, no momentum.
class GradientDescent final : public Optimizer {
 public:
  explicit GradientDescent(double learning_rate) : learning_rate_(learning_rate) {}
  void step(std::span<double> parameters, std::span<const double> gradient) override;

 private:
  double learning_rate_;
};

class Adam final : public Optimizer {
 public:
  explicit Adam(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                double epsilon = 1e-8);
  void step(std::span<double> parameters, std::span<const double> gradient) override;

 private:
  double learning_rate_, beta1_, beta2_, epsilon_;
  std::uint64_t t_ = 0;
  std::vector<double> m_, v_;
};

using OptimizerFactory = std::function<std::unique_ptr<Optimizer>(const TrainConfig&)>;

std::unique_ptr<Optimizer> make_gradient_descent(const TrainConfig& config);

struct TrainResult {
  std::unique_ptr<Encoder> encoder;
  std::vector<double> epoch_loss;  // weighted mean batch loss, one per epoch
  std::size_t steps = 0;           // optimizer updates performed
};

// Mini-batch training of a copy of `initial`. Rows are reshuffled every epoch
// by a generator seeded with (config.seed, epoch), so the result depends only
// on the data, the config and the initial parameters.
//
// Throws Error on an empty or unlabeled split, and on a non-finite batch loss
// (the message carries the epoch and batch numbers).
TrainResult train(const CorpusSplit& split, const Encoder& initial, const TrainConfig& config,
                  const OptimizerFactory& optimizer = make_gradient_descent);

// Per-row labels via the negative-vs-positive decision rule, in input order.
std::vector<Prediction> predict(const CorpusSplit& split, const Encoder& encoder,
                                std::size_t batch_size = 64);

}  // namespace subjpipe
