#include "subjpipe/reference_encoder.hpp"

#include <cstdio>
#include <cstdlib>
#include <random>
#include <set>

#include "subjpipe/text_io.hpp"

namespace subjpipe {
namespace {

constexpr std::string_view kMagic = "subjpipe-reference-encoder 1";

std::string fold_ascii(std::string_view token) {
  std::string out(token);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

template <typename Fn>
void for_each_token(std::string_view text, Fn&& fn) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text::is_space(text[pos])) ++pos;
    std::size_t end = pos;
    while (end < text.size() && !text::is_space(text[end])) ++end;
    if (end > pos) fn(text.substr(pos, end - pos));
    pos = end;
  }
}

std::string hexfloat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

}  // namespace

ReferenceEncoder::ReferenceEncoder(std::vector<std::string> vocab, std::size_t dim,
                                   std::uint64_t seed)
    : vocab_(std::move(vocab)), dim_(dim) {
  if (vocab_.empty()) throw Error("reference encoder: empty vocabulary");
  if (dim_ < 2) throw Error("reference encoder: dim must be at least 2");
  for (auto& token : vocab_) token = fold_ascii(token);
  index_vocabulary();

  params_.resize(bias_offset() + kSentimentClasses);
  std::mt19937_64 rng(seed);
  for (double& p : params_) {
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    p = -0.1 + 0.2 * unit;
  }
}

void ReferenceEncoder::index_vocabulary() {
  index_.clear();
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    index_.emplace(vocab_[i], static_cast<TokenId>(i + 2));
  }
}

std::vector<TokenId> ReferenceEncoder::tokenize(std::string_view text) const {
  std::vector<TokenId> ids;
  for_each_token(text, [&](std::string_view token) {
    const auto it = index_.find(fold_ascii(token));
    ids.push_back(it == index_.end() ? kOovId : it->second);
  });
  return ids;
}

std::vector<double> ReferenceEncoder::pooled(const TokenBatch& batch, std::size_t row,
                                             std::size_t* real_tokens) const {
  std::vector<double> h(dim_, 0.0);
  const auto ids = batch.ids(row);
  const auto mask = batch.mask(row);
  std::size_t count = 0;
  for (std::size_t t = 0; t < ids.size(); ++t) {
    if (mask[t] == 0) continue;
    const TokenId id = ids[t];
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_.size() + 2) {
      throw Error("reference encoder: token id out of range");
    }
    const double* e = params_.data() + embedding_offset(id);
    for (std::size_t d = 0; d < dim_; ++d) h[d] += e[d];
    ++count;
  }
  if (count > 0) {
    for (double& v : h) v /= static_cast<double>(count);
  }
  if (real_tokens != nullptr) *real_tokens = count;
  return h;
}

std::vector<SentimentLogits> ReferenceEncoder::forward(const TokenBatch& batch) const {
  std::vector<SentimentLogits> out(batch.size());
  const double* w = params_.data() + weight_offset();
  const double* b = params_.data() + bias_offset();
  for (std::size_t r = 0; r < batch.size(); ++r) {
    const auto h = pooled(batch, r, nullptr);
    for (std::size_t c = 0; c < kSentimentClasses; ++c) {
      double z = b[c];
      for (std::size_t d = 0; d < dim_; ++d) z += w[c * dim_ + d] * h[d];
      out[r].scores[c] = z;
    }
  }
  return out;
}

void ReferenceEncoder::backward(const TokenBatch& batch,
                                std::span<const SentimentLogits> logit_grad,
                                std::span<double> gradient) const {
  if (logit_grad.size() != batch.size() || gradient.size() != params_.size()) {
    throw Error("reference encoder: backward size mismatch");
  }
  const double* w = params_.data() + weight_offset();
  double* gw = gradient.data() + weight_offset();
  double* gb = gradient.data() + bias_offset();
  std::vector<double> dh(dim_);

  for (std::size_t r = 0; r < batch.size(); ++r) {
    std::size_t count = 0;
    const auto h = pooled(batch, r, &count);
    const auto& g = logit_grad[r].scores;
    std::fill(dh.begin(), dh.end(), 0.0);
    for (std::size_t c = 0; c < kSentimentClasses; ++c) {
      gb[c] += g[c];
      for (std::size_t d = 0; d < dim_; ++d) {
        gw[c * dim_ + d] += g[c] * h[d];
        dh[d] += w[c * dim_ + d] * g[c];
      }
    }
    if (count == 0) continue;
    const auto ids = batch.ids(r);
    const auto mask = batch.mask(r);
    const double inv = 1.0 / static_cast<double>(count);
    for (std::size_t t = 0; t < ids.size(); ++t) {
      if (mask[t] == 0) continue;
      double* ge = gradient.data() + embedding_offset(ids[t]);
      for (std::size_t d = 0; d < dim_; ++d) ge[d] += dh[d] * inv;
    }
  }
}

std::unique_ptr<Encoder> ReferenceEncoder::clone() const {
  return std::make_unique<ReferenceEncoder>(*this);
}

std::span<const double> ReferenceEncoder::bias() const {
  return std::span(params_).subspan(bias_offset(), kSentimentClasses);
}

void ReferenceEncoder::save(const std::filesystem::path& path) const {
  std::string body(kMagic);
  body += "\ndim " + std::to_string(dim_) + "\nvocab " + std::to_string(vocab_.size()) + '\n';
  for (const auto& token : vocab_) body += text::escape_cell(token) + '\n';
  body += "params " + std::to_string(params_.size()) + '\n';
  for (double p : params_) body += hexfloat(p) + '\n';
  text::write_file_atomic(path, body);
}

ReferenceEncoder ReferenceEncoder::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error("missing model checkpoint: " + path.string());
  const std::string content = text::read_file(path);
  const auto lines = text::split_lines(content);
  std::size_t next = 0;
  auto line = [&]() -> std::string_view {
    if (next >= lines.size()) throw Error("truncated model checkpoint: " + path.string());
    return lines[next++];
  };
  auto count_after = [&](std::string_view prefix) -> std::size_t {
    const auto l = line();
    if (!l.starts_with(prefix)) throw Error("malformed model checkpoint: " + path.string());
    return static_cast<std::size_t>(std::strtoull(std::string(l.substr(prefix.size())).c_str(),
                                                  nullptr, 10));
  };

  if (line() != kMagic) throw Error("not a reference encoder checkpoint: " + path.string());
  ReferenceEncoder encoder;
  encoder.dim_ = count_after("dim ");
  const std::size_t vocab_size = count_after("vocab ");
  for (std::size_t i = 0; i < vocab_size; ++i) encoder.vocab_.push_back(text::unescape_cell(line()));
  const std::size_t param_count = count_after("params ");
  if (encoder.dim_ < 2 || encoder.vocab_.empty() ||
      param_count != (vocab_size + 2) * encoder.dim_ + kSentimentClasses * (encoder.dim_ + 1)) {
    throw Error("inconsistent model checkpoint: " + path.string());
  }
  encoder.params_.reserve(param_count);
  for (std::size_t i = 0; i < param_count; ++i) {
    const std::string cell(line());
    char* end = nullptr;
    encoder.params_.push_back(std::strtod(cell.c_str(), &end));
    if (end == cell.c_str() || *end != '\0') {
      throw Error("malformed parameter in model checkpoint: " + path.string());
    }
  }
  encoder.index_vocabulary();
  return encoder;
}

std::unique_ptr<ReferenceEncoder> reference_encoder(std::vector<std::string> vocab,
                                                    std::size_t dim, std::uint64_t seed) {
  return std::make_unique<ReferenceEncoder>(std::move(vocab), dim, seed);
}

std::vector<std::string> build_vocabulary(const CorpusSplit& split) {
  std::set<std::string> tokens;
  for (const auto& row : split.rows) {
    for_each_token(row.text, [&](std::string_view token) { tokens.insert(fold_ascii(token)); });
  }
  return {tokens.begin(), tokens.end()};
}

}  // namespace subjpipe
