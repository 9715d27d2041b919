#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "subjpipe/loss.hpp"
#include "subjpipe/reference_encoder.hpp"
#include "subjpipe/trainer.hpp"
#include "test_support.hpp"

using namespace subjpipe;
using subjpipe::testing::TempDir;

namespace {

// Fixed logits for every row, no parameters worth mentioning.
class ConstantEncoder final : public Encoder {
 public:
  explicit ConstantEncoder(SentimentLogits z) : z_(z) {}
  std::vector<TokenId> tokenize(std::string_view) const override { return {2}; }
  std::vector<SentimentLogits> forward(const TokenBatch& batch) const override {
    return std::vector<SentimentLogits>(batch.size(), z_);
  }
  void backward(const TokenBatch&, std::span<const SentimentLogits>,
                std::span<double>) const override {}
  std::span<double> parameters() override { return param_; }
  std::span<const double> parameters() const override { return param_; }
  std::unique_ptr<Encoder> clone() const override { return std::make_unique<ConstantEncoder>(z_); }

 private:
  SentimentLogits z_;
  std::vector<double> param_{0.0};
};

LabeledSentence row(std::string id, std::string text, SubjLabel label,
                    std::optional<bool> conflict = std::nullopt) {
  return {std::move(id), std::move(text), label, Language::en, conflict};
}

CorpusSplit separable_split() {
  TempDir dir;
  subjpipe::testing::write_separable_corpus(dir / "train.tsv");
  return load_tsv(dir / "train.tsv", Language::en, Split::train, false,
                  subjpipe::testing::ignore_skip);
}

std::unique_ptr<ReferenceEncoder> encoder_for(const CorpusSplit& split, std::uint64_t seed = 7) {
  return reference_encoder(build_vocabulary(split), 16, seed);
}

double norm(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

}  // namespace

TEST_CASE("default hyperparameters") {
  const TrainConfig c;
  CHECK(c.batch_size == 16);
  CHECK(c.learning_rate == 2e-5);
  CHECK(c.epochs == 20);
  CHECK(c.confidence_weight == 1.2);
  CHECK_NOTHROW(c.validate());
  TrainConfig bad;
  bad.batch_size = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = {};
  bad.learning_rate = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("confidence weights") {
  const TrainConfig c;
  CHECK(sample_weight(row("a", "x", SubjLabel::OBJ, true), c) == 1.2);
  CHECK(sample_weight(row("a", "x", SubjLabel::OBJ, false), c) == 1.0);
  CHECK(sample_weight(row("a", "x", SubjLabel::OBJ), c) == 1.0);
}

TEST_CASE("weighted loss examples") {
  const std::vector<SentimentLogits> z{{{0.3, -1.0, 2.0}}, {{1.0, 1.0, 1.0}}, {{-2.0, 0.5, 0.1}}};
  const std::vector<SentimentClass> t{SentimentClass::negative, SentimentClass::positive,
                                      SentimentClass::neutral};
  SUBCASE("uniform weights equal the mean cross-entropy") {
    double mean = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) mean += cross_entropy(z[i], t[i]);
    mean /= 3.0;
    const std::vector<double> w(3, 1.0);
    CHECK(std::abs(weighted_loss(z, t, w) - mean) <= 1e-12);
    const std::vector<double> w5(3, 5.0);
    CHECK(std::abs(weighted_loss(z, t, w5) - mean) <= 1e-12);
  }
  SUBCASE("CE 2 and 1 with weights 1.2 and 1") {
    // CE of a target at logit -x with the other two at 0 is log(1 + 2 e^x).
    const double x2 = std::log((std::exp(2.0) - 1.0) / 2.0);
    const double x1 = std::log((std::exp(1.0) - 1.0) / 2.0);
    const std::vector<SentimentLogits> z2{{{-x2, 0.0, 0.0}}, {{-x1, 0.0, 0.0}}};
    const std::vector<SentimentClass> t2{SentimentClass::negative, SentimentClass::negative};
    CHECK(cross_entropy(z2[0], t2[0]) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(cross_entropy(z2[1], t2[1]) == doctest::Approx(1.0).epsilon(1e-12));
    const std::vector<double> w{1.2, 1.0};
    CHECK(weighted_loss(z2, t2, w) == doctest::Approx(3.4 / 2.2).epsilon(1e-12));
  }
  SUBCASE("empty and mismatched batches throw") {
    CHECK_THROWS_AS(weighted_loss(std::span<const SentimentLogits>{},
                                  std::span<const SentimentClass>{}, std::span<const double>{}),
                    Error);
    const std::vector<double> w(2, 1.0);
    CHECK_THROWS_AS(weighted_loss(z, t, w), Error);
  }
  SUBCASE("cross-entropy survives huge logits") {
    const SentimentLogits big{{1000.0, -1000.0, 0.0}};
    CHECK(std::isfinite(cross_entropy(big, SentimentClass::positive)));
    CHECK(cross_entropy(big, SentimentClass::negative) == doctest::Approx(0.0));
  }
}

TEST_CASE("logit gradient matches central differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> v(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    std::vector<SentimentLogits> z(n);
    std::vector<SentimentClass> t(n);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = {{v(rng), v(rng), v(rng)}};
      t[i] = static_cast<SentimentClass>(rng() % 3);
      w[i] = 0.5 + (rng() % 100) / 50.0;
    }
    const auto lg = weighted_loss_with_gradient(z, t, w);
    CHECK(lg.loss == doctest::Approx(weighted_loss(z, t, w)).epsilon(1e-14));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < 3; ++k) {
        auto up = z, down = z;
        up[i].scores[k] += 1e-5;
        down[i].scores[k] -= 1e-5;
        const double numeric = (weighted_loss(up, t, w) - weighted_loss(down, t, w)) / 2e-5;
        CHECK(subjpipe::testing::relative_error(lg.logit_grad[i].scores[k], numeric) < 1e-4);
      }
    }
  }
}

TEST_CASE("parameter gradient through the reference encoder matches central differences") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CAPTURE(seed);
    const auto r = subjpipe::testing::check_reference_gradient(seed);
    CHECK(r.nonzero > 0);
    CHECK(r.max_relative_error < 1e-4);
  }
}

TEST_CASE("padding never changes logits") {
  std::vector<std::string> vocab{"a", "b", "c", "d"};
  ReferenceEncoder enc(vocab, 6, 3);
  std::mt19937 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<TokenId>> seqs(1 + rng() % 5);
    for (auto& s : seqs) {
      for (std::size_t k = 0, len = rng() % 6; k < len; ++k) s.push_back(1 + rng() % 5);
    }
    const auto tight = enc.forward(TokenBatch::pad(seqs, 0));
    const auto padded = enc.forward(TokenBatch::pad(seqs, 0, 12 + rng() % 8));
    REQUIRE(tight.size() == padded.size());
    for (std::size_t i = 0; i < tight.size(); ++i) {
      for (std::size_t k = 0; k < 3; ++k) {
        CHECK(std::abs(tight[i].scores[k] - padded[i].scores[k]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("masked positions are ignored whatever ids they hold") {
  ReferenceEncoder enc({"a", "b", "c"}, 4, 9);
  const TokenBatch clean(1, 4, {2, 3, 0, 0}, {1, 1, 0, 0});
  const TokenBatch junk(1, 4, {2, 3, 4, 1}, {1, 1, 0, 0});
  CHECK(enc.forward(clean)[0].scores == enc.forward(junk)[0].scores);
}

TEST_CASE("raising one example's weight raises its share of the gradient") {
  std::vector<std::string> vocab{"a", "b", "c", "d", "e"};
  ReferenceEncoder enc(vocab, 5, 21);
  const std::vector<std::vector<TokenId>> seqs{{2, 3}, {4}, {5, 6, 2}, {6}};
  const TokenBatch batch = TokenBatch::pad(seqs, 0);
  const std::vector<SentimentClass> targets{SentimentClass::negative, SentimentClass::positive,
                                            SentimentClass::positive, SentimentClass::negative};
  const auto logits = enc.forward(batch);

  auto contributions = [&](const std::vector<double>& w) {
    const auto lg = weighted_loss_with_gradient(logits, targets, w);
    std::vector<double> total(enc.parameters().size(), 0.0);
    enc.backward(batch, lg.logit_grad, total);
    std::vector<std::vector<double>> parts;
    std::vector<double> sum(total.size(), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) {
      std::vector<SentimentLogits> only(w.size(), SentimentLogits{});
      only[i] = lg.logit_grad[i];
      std::vector<double> g(total.size(), 0.0);
      enc.backward(batch, only, g);
      for (std::size_t k = 0; k < g.size(); ++k) sum[k] += g[k];
      parts.push_back(std::move(g));
    }
    // The per-example pieces really decompose the total gradient.
    for (std::size_t k = 0; k < total.size(); ++k) CHECK(sum[k] == doctest::Approx(total[k]));
    return parts;
  };
  auto share = [&](const std::vector<std::vector<double>>& parts, std::size_t j) {
    double all = 0.0;
    for (const auto& p : parts) all += norm(p);
    return norm(parts[j]) / all;
  };

  for (std::size_t j = 0; j < 4; ++j) {
    std::vector<double> w(4, 1.0);
    double previous = share(contributions(w), j);
    for (double bump : {1.2, 2.0, 5.0}) {
      w[j] = bump;
      const double now = share(contributions(w), j);
      CHECK(now > previous);
      previous = now;
    }
  }
}

TEST_CASE("eight rows with batch 16 is one step per epoch") {
  CorpusSplit split;
  for (int i = 0; i < 8; ++i) {
    split.rows.push_back(row("r" + std::to_string(i), i % 2 ? "fact" : "awful",
                             i % 2 ? SubjLabel::OBJ : SubjLabel::SUBJ));
  }
  auto enc = encoder_for(split);
  TrainConfig c;
  c.epochs = 1;
  const auto r = train(split, *enc, c);
  CHECK(r.steps == 1);
  CHECK(r.epoch_loss.size() == 1);
  c.epochs = 3;
  c.batch_size = 3;
  CHECK(train(split, *enc, c).steps == 9);
}

TEST_CASE("training does not touch the initial encoder") {
  const auto split = separable_split();
  auto enc = encoder_for(split);
  const std::vector<double> before(enc->parameters().begin(), enc->parameters().end());
  TrainConfig c;
  c.epochs = 2;
  c.learning_rate = 0.5;
  const auto r = train(split, *enc, c);
  CHECK(std::equal(before.begin(), before.end(), enc->parameters().begin()));
  CHECK_FALSE(std::equal(before.begin(), before.end(), r.encoder->parameters().begin()));
}

TEST_CASE("separable toy corpus is fitted perfectly") {
  const auto split = separable_split();
  auto enc = encoder_for(split);
  TrainConfig c;
  c.learning_rate = 0.5;
  c.epochs = 200;
  c.seed = 7;
  const auto r = train(split, *enc, c);
  CHECK(r.epoch_loss.back() < r.epoch_loss.front());
  const auto preds = predict(split, *r.encoder);
  REQUIRE(preds.size() == split.rows.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    CHECK(preds[i].sentence_id == split.rows[i].sentence_id);
    CHECK(preds[i].label == *split.rows[i].label);
  }
}

TEST_CASE("same seed, same data: bit-identical loss trace and parameters") {
  const auto split = separable_split();
  auto enc = encoder_for(split);
  TrainConfig c;
  c.learning_rate = 0.3;
  c.epochs = 15;
  c.batch_size = 4;
  c.seed = 42;
  const auto a = train(split, *enc, c);
  const auto b = train(split, *enc, c);
  CHECK(a.epoch_loss == b.epoch_loss);
  CHECK(std::equal(a.encoder->parameters().begin(), a.encoder->parameters().end(),
                   b.encoder->parameters().begin()));
  c.seed = 43;
  const auto other = train(split, *enc, c);
  CHECK(other.epoch_loss != a.epoch_loss);
}

TEST_CASE("non-finite loss aborts with epoch and batch") {
  const auto split = separable_split();
  SUBCASE("NaN logits") {
    const ConstantEncoder nan_enc(SentimentLogits{{std::nan(""), 0.0, 0.0}});
    CHECK_THROWS_WITH_AS(train(split, nan_enc, TrainConfig{}),
                         doctest::Contains("non-finite loss at epoch 1, batch 1"), Error);
  }
  SUBCASE("divergent learning rate") {
    auto enc = encoder_for(split);
    TrainConfig c;
    c.learning_rate = 1e300;
    c.epochs = 50;
    CHECK_THROWS_WITH_AS(train(split, *enc, c), doctest::Contains("non-finite loss"), Error);
  }
}

TEST_CASE("empty and unlabeled splits are rejected") {
  CorpusSplit empty;
  auto enc = reference_encoder({"x"}, 4, 1);
  CHECK_THROWS_WITH_AS(train(empty, *enc, TrainConfig{}),
                       doctest::Contains("empty training split"), Error);
  CorpusSplit unlabeled;
  unlabeled.rows.push_back({"a", "x", std::nullopt, Language::en, std::nullopt});
  CHECK_THROWS_AS(train(unlabeled, *enc, TrainConfig{}), Error);
}

TEST_CASE("predict follows the decision rule and keeps input order") {
  CorpusSplit split;
  for (int i = 0; i < 130; ++i) split.rows.push_back(row("p" + std::to_string(i), "x", SubjLabel::OBJ));
  const auto subj = predict(split, ConstantEncoder(SentimentLogits{{0.9, 0.05, 0.05}}), 64);
  const auto obj = predict(split, ConstantEncoder(SentimentLogits{{0.1, 0.8, 0.1}}), 64);
  REQUIRE(subj.size() == 130);
  for (std::size_t i = 0; i < 130; ++i) {
    CHECK(subj[i].sentence_id == split.rows[i].sentence_id);
    CHECK(subj[i].label == SubjLabel::SUBJ);
    CHECK(obj[i].label == SubjLabel::OBJ);
  }
  CHECK(predict(CorpusSplit{}, ConstantEncoder(SentimentLogits{{0, 0, 0}})).empty());
}

TEST_CASE("reference encoder basics") {
  SUBCASE("same seed, same parameters") {
    ReferenceEncoder a({"x", "y"}, 8, 7), b({"x", "y"}, 8, 7), c({"x", "y"}, 8, 8);
    CHECK(std::equal(a.parameters().begin(), a.parameters().end(), b.parameters().begin()));
    CHECK_FALSE(std::equal(a.parameters().begin(), a.parameters().end(), c.parameters().begin()));
    CHECK(a.parameters().size() == (2 + 2) * 8 + 3 * 8 + 3);
    for (double p : a.parameters()) {
      CHECK(p >= -0.1);
      CHECK(p <= 0.1);
    }
  }
  SUBCASE("an all-padding row gives exactly the bias") {
    ReferenceEncoder enc({"x"}, 4, 2);
    const TokenBatch batch(2, 3, {0, 0, 0, 2, 0, 0}, {0, 0, 0, 1, 0, 0});
    const auto z = enc.forward(batch);
    for (std::size_t k = 0; k < 3; ++k) CHECK(z[0].scores[k] == enc.bias()[k]);
    CHECK(z[1].scores != z[0].scores);
  }
  SUBCASE("tokenizer folds case") {
    ReferenceEncoder enc({"the"}, 4, 2);
    const auto ids = enc.tokenize("The THE the");
    CHECK(ids == std::vector<TokenId>{2, 2, 2});
    CHECK(enc.tokenize("zebra") == std::vector<TokenId>{ReferenceEncoder::kOovId});
    CHECK(enc.tokenize("  ").empty());
  }
  SUBCASE("bad construction") {
    CHECK_THROWS_AS(ReferenceEncoder({}, 4, 1), Error);
    CHECK_THROWS_AS(ReferenceEncoder({"x"}, 1, 1), Error);
  }
}

TEST_CASE("checkpoint round trip is bit-exact") {
  const auto split = separable_split();
  auto enc = encoder_for(split);
  TrainConfig c;
  c.learning_rate = 0.5;
  c.epochs = 5;
  const auto r = train(split, *enc, c);
  const auto& trained = dynamic_cast<const ReferenceEncoder&>(*r.encoder);
  TempDir dir;
  trained.save(dir / "model.ckpt");
  const auto back = ReferenceEncoder::load(dir / "model.ckpt");
  CHECK(back.vocabulary() == trained.vocabulary());
  CHECK(back.dim() == trained.dim());
  REQUIRE(back.parameters().size() == trained.parameters().size());
  CHECK(std::equal(back.parameters().begin(), back.parameters().end(),
                   trained.parameters().begin()));
  CHECK(predict(split, back) == predict(split, trained));

  subjpipe::testing::write_text(dir / "junk.ckpt", "not a checkpoint\n");
  CHECK_THROWS_AS(ReferenceEncoder::load(dir / "junk.ckpt"), Error);
  CHECK_THROWS_AS(ReferenceEncoder::load(dir / "absent.ckpt"), Error);
}

TEST_CASE("optimizer seam") {
  const auto split = separable_split();
  auto enc = encoder_for(split);
  TrainConfig c;
  c.learning_rate = 0.05;
  c.epochs = 60;
  const auto r = train(split, *enc, c, [](const TrainConfig& cfg) -> std::unique_ptr<Optimizer> {
    return std::make_unique<Adam>(cfg.learning_rate);
  });
  CHECK(r.epoch_loss.back() < r.epoch_loss.front());
  const auto preds = predict(split, *r.encoder);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) correct += preds[i].label == *split.rows[i].label;
  CHECK(correct == preds.size());

  GradientDescent gd(0.5);
  std::vector<double> p{1.0, 2.0};
  const std::vector<double> g{2.0, -4.0};
  gd.step(p, g);
  CHECK(p == std::vector<double>{0.0, 4.0});
}
