#include "autotest/pattern.hpp"

#include "autotest/common.hpp"

namespace autotest {

namespace {

constexpr std::string_view kDigitToken = "\\d+";
constexpr std::string_view kLetterToken = "[a-zA-Z]+";

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_letter(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
bool is_ws(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::string collapse_whitespace(std::string_view value) {
  std::string out;
  out.reserve(value.size());
  bool in_ws = false;
  for (char c : value) {
    if (is_ws(c)) {
      if (!in_ws) out.push_back(' ');
      in_ws = true;
    } else {
      out.push_back(c);
      in_ws = false;
    }
  }
  return out;
}

}  // namespace

std::string generalize_value(std::string_view value) {
  const std::string v = collapse_whitespace(value);
  std::string out;
  std::size_t i = 0;
  while (i < v.size()) {
    const char c = v[i];
    if (is_digit(c)) {
      while (i < v.size() && is_digit(v[i])) ++i;
      out += kDigitToken;
    } else if (is_letter(c)) {
      while (i < v.size() && is_letter(v[i])) ++i;
      out += kLetterToken;
    } else {
      if (c == '\\' || c == '[') out.push_back('\\');
      out.push_back(c);
      ++i;
    }
  }
  return out;
}

TokenPattern TokenPattern::parse(std::string_view pattern) {
  TokenPattern p;
  p.text_ = std::string(pattern);
  std::size_t i = 0;
  while (i < pattern.size()) {
    if (pattern.substr(i, kDigitToken.size()) == kDigitToken) {
      p.tokens_.push_back({Kind::digits});
      i += kDigitToken.size();
    } else if (pattern.substr(i, kLetterToken.size()) == kLetterToken) {
      p.tokens_.push_back({Kind::letters});
      i += kLetterToken.size();
    } else if (pattern[i] == '\\') {
      if (i + 1 >= pattern.size()) {
        throw DataError("dangling escape in pattern '" + p.text_ + "'");
      }
      p.tokens_.push_back({Kind::literal, pattern[i + 1]});
      i += 2;
    } else {
      p.tokens_.push_back({Kind::literal, pattern[i]});
      ++i;
    }
  }
  return p;
}

bool TokenPattern::matches(std::string_view value) const {
  const std::string v = collapse_whitespace(value);
  // Adjacent same-class runs (e.g. `\d+\d+`) need backtracking, so walk the
  // tokens with an explicit memo over (token, position).
  const std::size_t n = tokens_.size();
  const std::size_t len = v.size();
  std::vector<char> memo((n + 1) * (len + 1), -1);
  auto rec = [&](auto&& self, std::size_t t, std::size_t pos) -> bool {
    char& slot = memo[t * (len + 1) + pos];
    if (slot != -1) return slot != 0;
    bool ok = false;
    if (t == n) {
      ok = pos == len;
    } else {
      const Token& tok = tokens_[t];
      if (tok.kind == Kind::literal) {
        ok = pos < len && v[pos] == tok.literal && self(self, t + 1, pos + 1);
      } else {
        auto in_class = tok.kind == Kind::digits ? is_digit : is_letter;
        std::size_t end = pos;
        while (end < len && in_class(v[end])) ++end;
        // Greedy first; a following token of another class cannot start
        // inside this run, so the longest run is almost always the answer.
        for (std::size_t stop = end; stop > pos && !ok; --stop) {
          ok = self(self, t + 1, stop);
        }
      }
    }
    slot = ok ? 1 : 0;
    return ok;
  };
  return rec(rec, 0, 0);
}

}  // namespace autotest
