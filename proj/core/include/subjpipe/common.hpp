#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace subjpipe {

// Every recoverable pipeline failure surfaces as this type; the CLI maps it to
// a nonzero exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SubjLabel { OBJ, SUBJ };

enum class Language { ar, bg, en, de, it, multi };

enum class Split { train, dev, test };

// Exact serialized forms: "OBJ" / "SUBJ". Parsing is case-sensitive.
std::string_view to_string(SubjLabel label);
std::optional<SubjLabel> parse_label(std::string_view text);

// Short tags ("ar", "bg", ...) as used on the command line.
std::string_view to_string(Language language);
std::optional<Language> parse_language(std::string_view text);
// "Arabic", "Bulgarian", ... as printed in distribution tables.
std::string_view display_name(Language language);

std::string_view to_string(Split split);
std::optional<Split> parse_split(std::string_view text);
std::string_view display_name(Split split);

}  // namespace subjpipe
