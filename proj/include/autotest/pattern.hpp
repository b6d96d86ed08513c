#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace autotest {

/// Generalizes a value into the two-class token pattern language: maximal
/// digit runs become `\d+`, maximal ASCII letter runs become `[a-zA-Z]+`,
/// whitespace runs collapse to one space, everything else stays literal.
/// Literal backslashes and '[' are escaped with a backslash.
///
///   "tt0054215"    -> "[a-zA-Z]+\d+"
///   "107 patients" -> "\d+ [a-zA-Z]+"
std::string generalize_value(std::string_view value);

/// A parsed token pattern. Matching is a full-string match with the same
/// whitespace collapsing applied to the value.
class TokenPattern {
 public:
  enum class Kind { digits, letters, literal };
  struct Token {
    Kind kind;
    char literal = 0;
  };

  /// Throws DataError on a malformed pattern (dangling escape).
  static TokenPattern parse(std::string_view pattern);

  bool matches(std::string_view value) const;

  const std::string& text() const { return text_; }
  const std::vector<Token>& tokens() const { return tokens_; }

 private:
  std::string text_;
  std::vector<Token> tokens_;
};

}  // namespace autotest
