#include <doctest.h>

#include <algorithm>
#include <random>

#include "subjpipe/metrics.hpp"
#include "test_support.hpp"

using namespace subjpipe;
using subjpipe::testing::brute_force_metrics;
using subjpipe::testing::expand_confusion;
using subjpipe::testing::TempDir;
using subjpipe::testing::write_text;

namespace {

constexpr auto S = SubjLabel::SUBJ;
constexpr auto O = SubjLabel::OBJ;

SubjLabel flip(SubjLabel l) { return l == S ? O : S; }

}  // namespace

TEST_CASE("confusion tallies with SUBJ positive") {
  CHECK(confusion(std::vector{S}, std::vector{S}) == ConfusionMatrix{1, 0, 0, 0});
  CHECK(confusion(std::vector{O}, std::vector{S}) == ConfusionMatrix{0, 1, 0, 0});
  CHECK(confusion(std::vector{S, O, S}, std::vector{S, O, O}) == ConfusionMatrix{1, 0, 1, 1});
  CHECK_THROWS_AS(confusion(std::vector{S}, std::vector{S, O}), Error);
  CHECK_THROWS_AS(confusion(std::vector<SubjLabel>{}, std::vector<SubjLabel>{}), Error);
}

TEST_CASE("report on a perfect matrix") {
  const auto r = report({4, 0, 0, 6});
  for (double v : {r.f1_macro, r.p_macro, r.r_macro, r.f1_subj, r.p_subj, r.r_subj, r.accuracy}) {
    CHECK(v == 1.0);
  }
}

TEST_CASE("report on tp=3 fp=1 fn=2 tn=4 matches the frozen oracle values") {
  // Frozen from an exact rational computation: P_subj 3/4, R_subj 3/5,
  // F1_subj 2/3, P_obj 2/3, R_obj 4/5, F1_obj 8/11, macro F1 23/33.
  const auto r = report({3, 1, 2, 4});
  CHECK(r.p_subj == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(r.r_subj == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(r.f1_subj == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.p_obj == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.r_obj == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(r.f1_obj == doctest::Approx(8.0 / 11.0).epsilon(1e-12));
  CHECK(r.f1_macro == doctest::Approx(23.0 / 33.0).epsilon(1e-12));
  CHECK(r.accuracy == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("all-OBJ predictions on the English test distribution") {
  const auto r = report({0, 0, 122, 362});
  CHECK(r.accuracy == doctest::Approx(362.0 / 484.0).epsilon(1e-12));
  CHECK(r.f1_subj == 0.0);
  CHECK(r.p_subj == 0.0);
  CHECK(r.r_subj == 0.0);
}

TEST_CASE("zero denominators give zero") {
  const auto r = report({0, 0, 0, 5});
  CHECK(r.f1_subj == 0.0);
  CHECK(r.f1_obj == 1.0);
  CHECK(r.f1_macro == 0.5);
  CHECK_THROWS_AS(report({0, 0, 0, 0}), Error);
}

TEST_CASE("property: report matches the brute-force oracle on every small matrix") {
  std::vector<SubjLabel> gold, pred;
  int checked = 0;
  for (std::size_t tp = 0; tp <= 6; ++tp)
    for (std::size_t fp = 0; fp <= 6; ++fp)
      for (std::size_t fn = 0; fn <= 6; ++fn)
        for (std::size_t tn = 0; tn <= 6; ++tn) {
          const ConfusionMatrix cm{tp, fp, fn, tn};
          if (cm.total() == 0) continue;
          expand_confusion(cm, gold, pred);
          const auto o = brute_force_metrics(gold, pred);
          const auto r = report(cm);
          CHECK(std::abs(r.f1_macro - o.f1_macro) <= 1e-12);
          CHECK(std::abs(r.p_macro - o.p_macro) <= 1e-12);
          CHECK(std::abs(r.r_macro - o.r_macro) <= 1e-12);
          CHECK(std::abs(r.f1_subj - o.f1_subj) <= 1e-12);
          CHECK(std::abs(r.p_subj - o.p_subj) <= 1e-12);
          CHECK(std::abs(r.r_subj - o.r_subj) <= 1e-12);
          CHECK(std::abs(r.accuracy - o.accuracy) <= 1e-12);
          ++checked;
        }
  CHECK(checked == 2400);
}

TEST_CASE("property: class swap symmetry, permutation invariance and ranges") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 50)(rng);
    std::vector<SubjLabel> gold(n), pred(n);
    for (int i = 0; i < n; ++i) {
      gold[i] = rng() % 3 == 0 ? S : O;
      pred[i] = rng() % 2 ? S : O;
    }
    const auto r = report(confusion(gold, pred));

    std::vector<SubjLabel> gold_swapped(gold), pred_swapped(pred);
    std::transform(gold.begin(), gold.end(), gold_swapped.begin(), flip);
    std::transform(pred.begin(), pred.end(), pred_swapped.begin(), flip);
    const auto s = report(confusion(gold_swapped, pred_swapped));
    CHECK(s.f1_macro == doctest::Approx(r.f1_macro).epsilon(1e-12));
    CHECK(s.p_macro == doctest::Approx(r.p_macro).epsilon(1e-12));
    CHECK(s.r_macro == doctest::Approx(r.r_macro).epsilon(1e-12));
    CHECK(s.accuracy == r.accuracy);
    CHECK(s.f1_subj == r.f1_obj);
    CHECK(s.p_subj == r.p_obj);
    CHECK(s.r_subj == r.r_obj);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<SubjLabel> gold_perm(n), pred_perm(n);
    for (int i = 0; i < n; ++i) {
      gold_perm[i] = gold[order[i]];
      pred_perm[i] = pred[order[i]];
    }
    const auto p = report(confusion(gold_perm, pred_perm));
    CHECK(p.f1_macro == r.f1_macro);
    CHECK(p.accuracy == r.accuracy);

    for (double v : {r.f1_macro, r.p_macro, r.r_macro, r.f1_subj, r.p_subj, r.r_subj, r.accuracy}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    if (r.p_subj > 0 && r.r_subj > 0) {
      CHECK(r.f1_subj >= std::min(r.p_subj, r.r_subj) - 1e-15);
      CHECK(r.f1_subj <= std::max(r.p_subj, r.r_subj) + 1e-15);
    }
    CHECK(r.f1_macro == doctest::Approx((r.f1_subj + r.f1_obj) / 2.0).epsilon(1e-15));
  }
}

TEST_CASE("evaluate_files joins by id") {
  TempDir dir;
  write_text(dir / "gold.tsv", "sentence_id\tsentence\tlabel\na\tx\tOBJ\nb\ty\tSUBJ\nc\tz\tSUBJ\n");
  SUBCASE("identical labels") {
    write_text(dir / "pred.tsv", "sentence_id\tlabel\na\tOBJ\nb\tSUBJ\nc\tSUBJ\n");
    const auto r = evaluate_files(dir / "gold.tsv", dir / "pred.tsv");
    CHECK(r.f1_macro == 1.0);
    CHECK(r.accuracy == 1.0);
  }
  SUBCASE("shuffled rows give the same report") {
    write_text(dir / "p1.tsv", "sentence_id\tlabel\na\tSUBJ\nb\tSUBJ\nc\tOBJ\n");
    write_text(dir / "p2.tsv", "sentence_id\tlabel\nc\tOBJ\na\tSUBJ\nb\tSUBJ\n");
    const auto r1 = evaluate_files(dir / "gold.tsv", dir / "p1.tsv");
    const auto r2 = evaluate_files(dir / "gold.tsv", dir / "p2.tsv");
    CHECK(r1.f1_macro == r2.f1_macro);
    CHECK(r1.accuracy == r2.accuracy);
    CHECK(r1.p_subj == r2.p_subj);
  }
  SUBCASE("missing id is named") {
    write_text(dir / "pred.tsv", "sentence_id\tlabel\na\tOBJ\nc\tSUBJ\n");
    CHECK_THROWS_WITH_AS(evaluate_files(dir / "gold.tsv", dir / "pred.tsv"),
                         doctest::Contains("missing: b"), Error);
  }
  SUBCASE("extra id is named") {
    write_text(dir / "pred.tsv", "sentence_id\tlabel\na\tOBJ\nb\tOBJ\nc\tSUBJ\nzz\tOBJ\n");
    CHECK_THROWS_WITH_AS(evaluate_files(dir / "gold.tsv", dir / "pred.tsv"),
                         doctest::Contains("unexpected: zz"), Error);
  }
  SUBCASE("duplicate prediction id") {
    write_text(dir / "pred.tsv", "sentence_id\tlabel\na\tOBJ\na\tOBJ\nb\tOBJ\nc\tSUBJ\n");
    CHECK_THROWS_AS(evaluate_files(dir / "gold.tsv", dir / "pred.tsv"), Error);
  }
}

TEST_CASE("missing-id listing stops at ten") {
  TempDir dir;
  std::string gold = "sentence_id\tsentence\tlabel\n";
  for (int i = 0; i < 15; ++i) gold += "g" + std::to_string(i) + "\tx\tOBJ\n";
  write_text(dir / "gold.tsv", gold);
  write_text(dir / "pred.tsv", "sentence_id\tlabel\n");
  try {
    evaluate_files(dir / "gold.tsv", dir / "pred.tsv");
    FAIL("expected an error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("g9") != std::string::npos);
    CHECK(msg.find("g10") == std::string::npos);
    CHECK(msg.find("15 total") != std::string::npos);
  }
}

TEST_CASE("metrics TSV format and reload") {
  TempDir dir;
  const auto r = report({3, 1, 2, 4});
  CHECK(format_metrics_tsv(r) ==
        "f1_macro\tp_macro\tr_macro\tf1_subj\tp_subj\tr_subj\taccuracy\n"
        "0.6970\t0.7083\t0.7000\t0.6667\t0.7500\t0.6000\t0.7000\n");
  write_metrics_tsv(r, dir / "m.tsv");
  const auto back = load_metrics_tsv(dir / "m.tsv");
  CHECK(back.f1_macro == 0.697);
  CHECK(back.accuracy == 0.7);
  write_text(dir / "bad.tsv", "nope\n");
  CHECK_THROWS_AS(load_metrics_tsv(dir / "bad.tsv"), Error);
}
