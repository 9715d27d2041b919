#pragma once

#include <array>
#include <cstddef>

#include "subjpipe/common.hpp"

namespace subjpipe {

// Output classes of a three-way sentiment head. The numeric values are the
// logit indices.
enum class SentimentClass : std::size_t { negative = 0, neutral = 1, positive = 2 };

inline constexpr std::size_t kSentimentClasses = 3;

struct SentimentLogits {
  std::array<double, kSentimentClasses> scores{};

  double& operator[](SentimentClass c) { return scores[static_cast<std::size_t>(c)]; }
  double operator[](SentimentClass c) const { return scores[static_cast<std::size_t>(c)]; }

  bool operator==(const SentimentLogits&) const = default;
};

// SUBJ -> negative, OBJ -> positive.
SentimentClass to_sentiment(SubjLabel label);

// Decides between negative and positive only; the neutral score never
// matters. Ties go to OBJ. Throws Error on non-finite scores.
SubjLabel from_logits(const SentimentLogits& logits);

SentimentLogits one_hot(SentimentClass c);

}  // namespace subjpipe
