#include "subjpipe/encoder.hpp"

#include <algorithm>
#include <string>

#include "subjpipe/common.hpp"

namespace subjpipe {

TokenBatch::TokenBatch(std::size_t rows, std::size_t width, std::vector<TokenId> ids,
                       std::vector<std::uint8_t> mask)
    : rows_(rows), width_(width), ids_(std::move(ids)), mask_(std::move(mask)) {
  if (ids_.size() != rows_ * width_ || mask_.size() != rows_ * width_) {
    throw Error("TokenBatch: expected " + std::to_string(rows_ * width_) + " cells");
  }
}

TokenBatch TokenBatch::pad(std::span<const std::vector<TokenId>> sequences, TokenId pad_id,
                           std::size_t min_width) {
  std::size_t width = min_width;
  for (const auto& seq : sequences) width = std::max(width, seq.size());
  std::vector<TokenId> ids(sequences.size() * width, pad_id);
  std::vector<std::uint8_t> mask(sequences.size() * width, 0);
  for (std::size_t r = 0; r < sequences.size(); ++r) {
    std::copy(sequences[r].begin(), sequences[r].end(), ids.begin() + r * width);
    std::fill_n(mask.begin() + r * width, sequences[r].size(), 1);
  }
  return TokenBatch(sequences.size(), width, std::move(ids), std::move(mask));
}

TokenBatch encode_texts(const Encoder& encoder, std::span<const std::string_view> texts) {
  std::vector<std::vector<TokenId>> sequences;
  sequences.reserve(texts.size());
  for (const auto text : texts) sequences.push_back(encoder.tokenize(text));
  return TokenBatch::pad(sequences, encoder.pad_id());
}

}  // namespace subjpipe
