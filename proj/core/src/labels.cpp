#include "subjpipe/labels.hpp"

#include <algorithm>
#include <cmath>

namespace subjpipe {

SentimentClass to_sentiment(SubjLabel label) {
  return label == SubjLabel::SUBJ ? SentimentClass::negative : SentimentClass::positive;
}

SubjLabel from_logits(const SentimentLogits& logits) {
  if (!std::all_of(logits.scores.begin(), logits.scores.end(),
                   [](double v) { return std::isfinite(v); })) {
    throw Error("from_logits: non-finite logit");
  }
  return logits[SentimentClass::negative] > logits[SentimentClass::positive] ? SubjLabel::SUBJ
                                                                             : SubjLabel::OBJ;
}

SentimentLogits one_hot(SentimentClass c) {
  SentimentLogits logits;
  logits[c] = 1.0;
  return logits;
}

}  // namespace subjpipe
