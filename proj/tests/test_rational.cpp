#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>

#include "coalesce/rational.hpp"

using namespace coalesce;

TEST_CASE("rat builds canonical fractions") {
  CHECK(rat(1, 2) == rat(2, 4));
  CHECK(rat(-3, 6) == rat(1, -2));
  CHECK(rat(0, 7) == rat(0));
  CHECK(rat(5) == rat(5, 1));
}

TEST_CASE("rat_str always shows the denominator") {
  CHECK(rat_str(rat(3)) == "3/1");
  CHECK(rat_str(rat(1, 16)) == "1/16");
  CHECK(rat_str(rat(-9, 512)) == "-9/512");
  CHECK(rat_str(rat(0)) == "0/1");
}

TEST_CASE("rat_parse accepts integers and fractions, canonicalized") {
  CHECK(rat_parse("4/8") == rat(1, 2));
  CHECK(rat_parse("-4/8") == rat(-1, 2));
  CHECK(rat_parse("4/-8") == rat(-1, 2));
  CHECK(rat_parse("7") == rat(7));
  CHECK(rat_parse("+7") == rat(7));
  // arbitrary precision round-trip
  const Rat big = rat_parse("123456789012345678901234567890/4");
  CHECK(rat_str(big) == "61728394506172839450617283945/2");
}

TEST_CASE("rat_parse rejects malformed input") {
  CHECK_THROWS_AS(rat_parse(""), std::invalid_argument);
  CHECK_THROWS_AS(rat_parse("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(rat_parse("1.5"), std::invalid_argument);
  CHECK_THROWS_AS(rat_parse("a/b"), std::invalid_argument);
  CHECK_THROWS_AS(rat_parse("1/"), std::invalid_argument);
  CHECK_THROWS_AS(rat_parse("/2"), std::invalid_argument);
  CHECK_THROWS_AS(rat_parse("1 /2"), std::invalid_argument);
}

TEST_CASE("rat_double converts exactly representable values") {
  CHECK(rat_double(rat(3, 4)) == 0.75);  // a dyadic rational converts exactly
  CHECK(rat_double(rat(1, 3)) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("arithmetic stays exact far beyond machine precision") {
  Rat sum = rat(0);
  for (int k = 1; k <= 50; ++k) sum += rat(1, k) - rat(1, k + 1);
  CHECK(sum == rat(50, 51));
}
