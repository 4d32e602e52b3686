#include "rsi/score.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <stdexcept>

namespace rsi {

Score Score::finite(double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("Score::finite: value is not finite");
  }
  return Score{value, true};
}

double Score::value() const {
  if (!finite_) throw std::logic_error("Score::value: score is infinite");
  return value_;
}

std::string to_string(Score score) {
  if (score.is_infinite()) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", score.value());
  return buf;
}

std::string shortest_decimal(double x) {
  char buf[32];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

std::ostream& operator<<(std::ostream& os, Score score) {
  return os << to_string(score);
}

}  // namespace rsi
