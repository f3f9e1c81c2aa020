#include "snumlab/power_log.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "snumlab/error.hpp"

namespace snumlab {

double power_log_term(double a, double b, double x) {
  if (x <= 1) return b == 0 ? 1.0 : 0.0;
  return std::exp(-a * std::log(x) + b * std::log(std::log2(x)));
}

double power_log_mode(double a, double b) { return b <= 0 ? 1.0 : std::exp(b / a); }

double power_log_integral(double a, double b, double from) {
  require(a > 1 && b >= 0 && from >= 1, ErrorCode::invalid_argument,
          "power-log integral needs a > 1, b >= 0, from >= 1");
  // u = ln x:  (ln 2)^-b * Gamma(b+1, (a-1) ln from) / (a-1)^(b+1)
  const double c = a - 1;
  const double z = c * std::log(from);
  const double ln2 = std::numbers::ln2;
  if (b == 0) return std::exp(-z) / c;
  return boost::math::tgamma(b + 1, z) / (std::pow(ln2, b) * std::pow(c, b + 1));
}

Bracket power_log_sum(double a, double b, double start) {
  require(a > 1 && b >= 0, ErrorCode::invalid_argument, "power-log sum needs a > 1, b >= 0");
  start = std::max(1.0, std::ceil(start));
  double head = 0;
  const double mono = std::max(2.0, std::ceil(power_log_mode(a, b)));
  double j = start;
  for (; j < mono; j += 1) head += power_log_term(a, b, j);
  const double tail = power_log_integral(a, b, j);
  return {head + tail, head + tail + power_log_term(a, b, j)};
}

bool power_log_series_converges(const Rational& a, const Rational& b) {
  return a > 1 || (a == 1 && b < -1);
}

}  // namespace snumlab
