#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace snumlab {

struct RateSample {
  double k = 0;
  double value = 0;
};

/// Least-squares fit of log2 v = c - alpha log2 k + beta log2 log2 k.
struct RateFit {
  double alpha_hat = 0;
  double beta_hat = 0;
  double log2_scale = 0;
  double r2 = 1;
  std::size_t samples = 0;
  double k_min = 0;
  double k_max = 0;
  bool low_confidence = false;  // k-range spans fewer than 6 octaves
};

/// Needs >= 5 samples with k >= 4 and positive values. Throws degenerate when
/// the design matrix is rank deficient.
RateFit fit_rate_law(std::span<const RateSample> samples);

/// Plain log-log slope of v against x (no log term), for counting laws.
double loglog_slope(std::span<const RateSample> samples);

}  // namespace snumlab
