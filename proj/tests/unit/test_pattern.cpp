#include "autotest/common.hpp"
#include "autotest/pattern.hpp"
#include "doctest.h"

using namespace autotest;

TEST_CASE("generalization into token patterns") {
  CHECK(generalize_value("tt0054215") == "[a-zA-Z]+\\d+");
  CHECK(generalize_value("107 patients") == "\\d+ [a-zA-Z]+");
  CHECK(generalize_value("12/3/2020") == "\\d+/\\d+/\\d+");
  CHECK(generalize_value("a  \t b") == "[a-zA-Z]+ [a-zA-Z]+");
  CHECK(generalize_value("x[1]\\") == "[a-zA-Z]+\\[\\d+]\\\\");
  CHECK(generalize_value("") == "");
}

TEST_CASE("pattern matching") {
  const auto p = TokenPattern::parse("\\d+ [a-zA-Z]+");
  CHECK(p.matches("12 oz"));
  CHECK_FALSE(p.matches("new facility"));
  CHECK(p.matches("12   oz"));  // whitespace runs collapse
  CHECK_FALSE(p.matches("12oz"));
  CHECK_FALSE(p.matches("12 oz!"));

  const auto lit = TokenPattern::parse("[a-zA-Z]+-\\d+");
  CHECK(lit.matches("ab-1234"));
  CHECK_FALSE(lit.matches("ab_1234"));

  // Every generalized value matches its own pattern.
  for (const char* v : {"tt0054215", "a.b@c.com", "x[1]\\", "(555) 123-4567", "2020-01-02T03:04:05Z"}) {
    CHECK(TokenPattern::parse(generalize_value(v)).matches(v));
  }
  CHECK_THROWS_AS(TokenPattern::parse("abc\\"), DataError);
}
