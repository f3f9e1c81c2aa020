#pragma once

#include <string>

#include "snumlab/core_params.hpp"

namespace snumlab {

/// A: p1, p2 on the same side of 2.  B: p1 < 2 < p2 above the crossover.
/// C: p1 < 2 < p2 below the crossover.  D: p2 < p1 (diagonal operators only).
enum class Regime { A, B, C, D };

std::string to_string(Regime r);

/// a_k ~ k^-alpha_out (log2 k)^beta_out.
struct RateLaw {
  Rational alpha_out;
  Rational beta_out;
  Regime regime = Regime::A;
};

}  // namespace snumlab
