#include "subjpipe/common.hpp"

#include <array>
#include <utility>

namespace subjpipe {
namespace {

constexpr std::array<std::pair<Language, std::string_view>, 6> kLanguageTags{{
    {Language::ar, "ar"},
    {Language::bg, "bg"},
    {Language::en, "en"},
    {Language::de, "de"},
    {Language::it, "it"},
    {Language::multi, "multi"},
}};

constexpr std::array<std::pair<Split, std::string_view>, 3> kSplitTags{{
    {Split::train, "train"},
    {Split::dev, "dev"},
    {Split::test, "test"},
}};

}  // namespace

std::string_view to_string(SubjLabel label) {
  return label == SubjLabel::SUBJ ? "SUBJ" : "OBJ";
}

std::optional<SubjLabel> parse_label(std::string_view text) {
  if (text == "OBJ") return SubjLabel::OBJ;
  if (text == "SUBJ") return SubjLabel::SUBJ;
  return std::nullopt;
}

std::string_view to_string(Language language) {
  for (const auto& [lang, tag] : kLanguageTags) {
    if (lang == language) return tag;
  }
  return "?";
}

std::optional<Language> parse_language(std::string_view text) {
  for (const auto& [lang, tag] : kLanguageTags) {
    if (tag == text) return lang;
  }
  return std::nullopt;
}

std::string_view display_name(Language language) {
  switch (language) {
    case Language::ar: return "Arabic";
    case Language::bg: return "Bulgarian";
    case Language::en: return "English";
    case Language::de: return "German";
    case Language::it: return "Italian";
    case Language::multi: return "Multilingual";
  }
  return "?";
}

std::string_view to_string(Split split) {
  for (const auto& [s, tag] : kSplitTags) {
    if (s == split) return tag;
  }
  return "?";
}

std::optional<Split> parse_split(std::string_view text) {
  for (const auto& [s, tag] : kSplitTags) {
    if (tag == text) return s;
  }
  return std::nullopt;
}

std::string_view display_name(Split split) {
  switch (split) {
    case Split::train: return "Train";
    case Split::dev: return "Dev";
    case Split::test: return "Test";
  }
  return "?";
}

}  // namespace subjpipe
