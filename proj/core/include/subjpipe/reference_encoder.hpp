#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "subjpipe/corpus.hpp"
#include "subjpipe/encoder.hpp"

namespace subjpipe {

// Mean-of-embeddings sentence encoder with a single linear layer to three
// logits. Small enough to train on a laptop and to gradient-check exactly.
//
// Token ids: 0 is padding, 1 is out-of-vocabulary, vocabulary entries follow
// in the order given. Tokenization splits on ASCII whitespace and folds ASCII
// letters to lowercase.
//
// Parameter layout: embeddings [(vocab + 2) x dim], weights [3 x dim],
// bias [3].
class ReferenceEncoder final : public Encoder {
 public:
  static constexpr TokenId kPadId = 0;
  static constexpr TokenId kOovId = 1;

  // Parameters are drawn uniformly from [-0.1, 0.1] by a generator seeded
  // with `seed`. Throws Error on an empty vocabulary or dim < 2.
  ReferenceEncoder(std::vector<std::string> vocab, std::size_t dim, std::uint64_t seed);

  std::vector<TokenId> tokenize(std::string_view text) const override;
  TokenId pad_id() const override { return kPadId; }

  std::vector<SentimentLogits> forward(const TokenBatch& batch) const override;
  void backward(const TokenBatch& batch, std::span<const SentimentLogits> logit_grad,
                std::span<double> gradient) const override;

  std::span<double> parameters() override { return params_; }
  std::span<const double> parameters() const override { return params_; }

  std::unique_ptr<Encoder> clone() const override;

  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& vocabulary() const { return vocab_; }

  std::span<const double> bias() const;

  // Text container: magic line, dim, vocabulary, then every parameter as a
  // hexadecimal float so a reload is bit-identical.
  void save(const std::filesystem::path& path) const;
  static ReferenceEncoder load(const std::filesystem::path& path);

 private:
  ReferenceEncoder() = default;
  void index_vocabulary();

  std::size_t embedding_offset(TokenId id) const { return static_cast<std::size_t>(id) * dim_; }
  std::size_t weight_offset() const { return (vocab_.size() + 2) * dim_; }
  std::size_t bias_offset() const { return weight_offset() + kSentimentClasses * dim_; }

  // Mean embedding over the unmasked positions of one row; zero if none.
  std::vector<double> pooled(const TokenBatch& batch, std::size_t row,
                             std::size_t* real_tokens) const;

  std::vector<std::string> vocab_;
  std::unordered_map<std::string, TokenId> index_;
  std::size_t dim_ = 0;
  std::vector<double> params_;
};

std::unique_ptr<ReferenceEncoder> reference_encoder(std::vector<std::string> vocab,
                                                    std::size_t dim, std::uint64_t seed);

// Sorted distinct lowercase whitespace tokens of every row.
std::vector<std::string> build_vocabulary(const CorpusSplit& split);

}  // namespace subjpipe
