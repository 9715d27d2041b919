#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "subjpipe/labels.hpp"

namespace subjpipe {

using TokenId = std::int32_t;

// Row-major token matrix padded to a common width, with a 0/1 mask marking
// real tokens.
class TokenBatch {
 public:
  TokenBatch() = default;
  TokenBatch(std::size_t rows, std::size_t width, std::vector<TokenId> ids,
             std::vector<std::uint8_t> mask);

  // Pads every sequence with `pad_id` up to max(longest sequence, min_width).
  static TokenBatch pad(std::span<const std::vector<TokenId>> sequences, TokenId pad_id = 0,
                        std::size_t min_width = 0);

  std::size_t size() const { return rows_; }
  std::size_t width() const { return width_; }
  std::span<const TokenId> ids(std::size_t row) const {
    return std::span(ids_).subspan(row * width_, width_);
  }
  std::span<const std::uint8_t> mask(std::size_t row) const {
    return std::span(mask_).subspan(row * width_, width_);
  }

 private:
  std::size_t rows_ = 0;
  std::size_t width_ = 0;
  std::vector<TokenId> ids_;
  std::vector<std::uint8_t> mask_;
};

// A trainable three-way sentence classifier.
//
// forward() must be deterministic and must ignore every position whose mask is
// 0. Parameters are exposed as one flat vector so optimizers stay generic.
class Encoder {
 public:
  virtual ~Encoder() = default;

  virtual std::vector<TokenId> tokenize(std::string_view text) const = 0;
  virtual TokenId pad_id() const { return 0; }

  virtual std::vector<SentimentLogits> forward(const TokenBatch& batch) const = 0;

  // Adds d(loss)/d(parameters) to `gradient`, given d(loss)/d(logits) for each
  // example of `batch`.
  virtual void backward(const TokenBatch& batch, std::span<const SentimentLogits> logit_grad,
                        std::span<double> gradient) const = 0;

  virtual std::span<double> parameters() = 0;
  virtual std::span<const double> parameters() const = 0;

  virtual std::unique_ptr<Encoder> clone() const = 0;
};

// Tokenizes and pads a list of texts with the encoder's own tokenizer.
TokenBatch encode_texts(const Encoder& encoder, std::span<const std::string_view> texts);

}  // namespace subjpipe
