#include "doctest.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "rsi/score.hpp"

using rsi::Score;

TEST_CASE("infinite scores compare equal and above every finite score") {
  const Score inf = Score::infinity();
  const Score big = Score::finite(1e300);
  CHECK(inf == Score::infinity());
  CHECK_FALSE(inf < inf);
  CHECK(big < inf);
  CHECK_FALSE(inf < big);
  CHECK(Score::finite(1.0) < Score::finite(2.0));
  CHECK(Score::finite(2.0) == Score::finite(2.0));
  CHECK(Score{} == inf);
}

TEST_CASE("finite scores reject non-finite values") {
  CHECK_THROWS_AS(Score::finite(std::numeric_limits<double>::infinity()), std::invalid_argument);
  CHECK_THROWS_AS(Score::finite(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS((void)Score::infinity().value(), std::logic_error);
}

TEST_CASE("text forms") {
  CHECK(rsi::to_string(Score::infinity()) == "inf");
  CHECK(rsi::to_string(Score::finite(0.25)) == "0.25");
  CHECK(rsi::to_string(Score::finite(4.0 / 3.0)) == "1.3333333333333333");
  CHECK(rsi::shortest_decimal(0.58) == "0.58");
  CHECK(rsi::shortest_decimal(1.0 - 0.58) == "0.42000000000000004");
  std::ostringstream os;
  os << Score::finite(2.5) << ' ' << Score::infinity();
  CHECK(os.str() == "2.5 inf");
}
