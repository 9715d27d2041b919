#include <doctest.h>

#include <random>

#include "subjpipe/preprocess.hpp"
#include "test_support.hpp"

using namespace subjpipe;

namespace {

const std::string kHeart = "\xE2\x9D\xA4";              // U+2764
const std::string kHeartVs16 = "\xE2\x9D\xA4\xEF\xB8\x8F";  // U+2764 U+FE0F

EmojiTable heart_table() {
  return EmojiTable::from_entries({{kHeart, "red_heart"}});
}

const EmojiTable& bundled() {
  static const EmojiTable table = EmojiTable::load(EmojiTable::default_path());
  return table;
}

}  // namespace

TEST_CASE("demojize replaces known emoji") {
  const auto table = heart_table();
  CHECK(demojize("I " + kHeart + " this", table) == "I :red_heart: this");
  CHECK(demojize("plain text", table) == "plain text");
  CHECK(demojize(kHeart + kHeart, table) == ":red_heart::red_heart:");
}

TEST_CASE("demojize prefers the longest sequence") {
  const auto table = EmojiTable::from_entries(
      {{kHeart, "red_heart"}, {kHeartVs16, "red_heart_vs"}});
  CHECK(demojize(kHeartVs16 + "!", table) == ":red_heart_vs:!");
  CHECK(demojize(kHeart + "!", table) == ":red_heart:!");
}

TEST_CASE("demojize leaves unknown emoji alone") {
  const std::string rocket = "\xF0\x9F\x9A\x80";
  CHECK(demojize("go " + rocket, heart_table()) == "go " + rocket);
}

TEST_CASE("bundled table loads and carries the heart entries") {
  CHECK(bundled().size() > 20);
  CHECK(demojize(kHeart, bundled()) == ":red_heart:");
  CHECK(demojize(kHeartVs16, bundled()) == ":red_heart:");
  CHECK(demojize("\xF0\x9F\x87\xA9\xF0\x9F\x87\xAA", bundled()) == ":flag_germany:");
}

TEST_CASE("emoji table validation") {
  CHECK_THROWS_AS(EmojiTable::from_entries({{kHeart, "Red Heart"}}), Error);
  CHECK_THROWS_AS(EmojiTable::from_entries({{"", "x"}}), Error);
  CHECK_THROWS_AS(EmojiTable::from_entries({{kHeart, "a"}, {kHeart, "b"}}), Error);
  CHECK_THROWS_AS(EmojiTable::load("/nonexistent/emoji.tsv"), Error);
}

TEST_CASE("strip_mentions_links examples") {
  CHECK(strip_mentions_links("@user said http://x.co hi") == "said hi");
  CHECK(strip_mentions_links("no handles here") == "no handles here");
  CHECK(strip_mentions_links("see https://a.b/c?d=1.") == "see .");
}

TEST_CASE("mention needs start or whitespace before it") {
  CHECK(strip_mentions_links("mail me at a@b.com") == "mail me at a@b.com");
  CHECK(strip_mentions_links("@ alone") == "@ alone");
  CHECK(strip_mentions_links("hi\t@bob_99, ok") == "hi , ok");
}

TEST_CASE("URL trailing punctuation keeps only one character out") {
  CHECK(strip_mentions_links("(see http://x.co/a)") == "(see )");
  CHECK(strip_mentions_links("go http://x.co!!") == "go !");
  CHECK(strip_mentions_links("http:// nothing") == "http:// nothing");
}

TEST_CASE("preprocess composes and never returns empty") {
  CHECK(preprocess("@u " + kHeart + " http://x.co", heart_table()) == ":red_heart:");
  CHECK(preprocess("", heart_table()) == "[EMPTY]");
  CHECK(preprocess("@only https://links.io", heart_table()) == "[EMPTY]");
  CHECK(preprocess("Fact.", heart_table()) == "Fact.");
}

TEST_CASE("linguistic hook is the identity") {
  CHECK(linguistic_annotation_hook("Der Hund bellt.") == "Der Hund bellt.");
}

TEST_CASE("property: preprocess is idempotent and strip only adds spaces") {
  std::mt19937 rng(2024);
  const std::vector<std::string> pieces{
      "@user", "@", "a@b", "http://", "https://x.co/p?q=1", ".", ",", ")", "!", "?", " ",
      "  ", "\t", "word", "Wort", "\xD0\xB4\xD0\xB0", kHeart, kHeartVs16,
      "\xF0\x9F\x98\x82", ":", "_", "[EMPTY]", "http", "x"};
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text;
    const int n = std::uniform_int_distribution<int>(0, 10)(rng);
    for (int i = 0; i < n; ++i) text += pieces[rng() % pieces.size()];

    const std::string once = preprocess(text, bundled());
    CHECK_MESSAGE(preprocess(once, bundled()) == once, "input: ", text);

    const std::string stripped = strip_mentions_links(text);
    // Every character in the output either was already in the input or is a space.
    for (char c : stripped) {
      if (c != ' ') CHECK(text.find(c) != std::string::npos);
    }
  }
}

TEST_CASE("property: demojize keeps non-emoji codepoints in order") {
  std::mt19937 rng(99);
  const std::vector<std::string> plain{"a", "B", " ", "\xC3\xA9", "\xD8\xB3", "\xE4\xB8\xAD", "9"};
  const auto table = heart_table();
  for (int trial = 0; trial < 500; ++trial) {
    std::string text, expected_plain;
    for (int i = 0; i < 12; ++i) {
      if (rng() % 4 == 0) {
        text += kHeart;
      } else {
        const auto& p = plain[rng() % plain.size()];
        text += p;
        expected_plain += p;
      }
    }
    std::string out = demojize(text, table);
    for (std::size_t pos; (pos = out.find(":red_heart:")) != std::string::npos;) {
      out.erase(pos, std::string_view(":red_heart:").size());
    }
    CHECK(out == expected_plain);
  }
}
