#pragma once

#include <cstdint>

#include "snumlab/core_params.hpp"

namespace snumlab {

struct Bracket {
  double lower = 0;
  double upper = 0;
};

/// x^-a (log2 x)^b.
double power_log_term(double a, double b, double x);

/// Where x^-a (log2 x)^b starts to decrease: e^(b/a).
double power_log_mode(double a, double b);

/// Integral of x^-a (log2 x)^b over [from, inf), for a > 1, b >= 0, from >= 1.
double power_log_integral(double a, double b, double from);

/// Sum of j^-a (log2 j)^b over integers j >= start, for a > 1 and b >= 0.
/// Terms before the decreasing region are added explicitly; the rest is
/// bracketed by the integral test.
Bracket power_log_sum(double a, double b, double start);

/// Exact convergence test for sum j^-a log^b j: a > 1, or a = 1 and b < -1.
bool power_log_series_converges(const Rational& a, const Rational& b);

}  // namespace snumlab
