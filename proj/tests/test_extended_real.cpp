#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "mo/extended_real.hpp"

using mo::ExtReal;

TEST_CASE("extended real arithmetic conventions") {
  const ExtReal inf = ExtReal::infinity();

  SECTION("addition absorbs infinity") {
    REQUIRE((ExtReal(2.0) + ExtReal(3.0)).value() == 5.0);
    REQUIRE(!(ExtReal(2.0) + inf).is_finite());
    REQUIRE(!(inf + inf).is_finite());
  }

  SECTION("multiplication: c * inf = inf for c > 0, 0 * inf = 0") {
    REQUIRE(!(2.0 * inf).is_finite());
    REQUIRE((0.0 * inf).value() == 0.0);
    REQUIRE((0.5 * ExtReal(4.0)).value() == 2.0);
    REQUIRE_THROWS_AS(-1.0 * inf, std::logic_error);
  }

  SECTION("subtracting a finite real") {
    REQUIRE((ExtReal(5.0) - 2.0).value() == 3.0);
    REQUIRE(!(inf - 1e300).is_finite());
  }

  SECTION("ordering puts infinity on top") {
    REQUIRE(ExtReal(1e308) < inf);
    REQUIRE(inf <= inf);
    REQUIRE(!(inf < inf));
    REQUIRE(inf == ExtReal::infinity());
    REQUIRE(ExtReal(2.0) <= ExtReal(2.0));
    REQUIRE(ExtReal(-1.0) < ExtReal(0.0));
  }

  SECTION("overflowed doubles collapse into the tagged state") {
    const ExtReal x(std::numeric_limits<double>::infinity());
    REQUIRE(!x.is_finite());
    REQUIRE_THROWS_AS(x.value(), std::logic_error);
    REQUIRE(x.value_or(-1.0) == -1.0);
  }

  SECTION("NaN and -inf are rejected") {
    REQUIRE_THROWS_AS(ExtReal(std::nan("")), std::invalid_argument);
    REQUIRE_THROWS_AS(ExtReal(-std::numeric_limits<double>::infinity()),
                      std::invalid_argument);
  }
}
