#include "snumlab/rate_fit.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "snumlab/error.hpp"

namespace snumlab {

RateFit fit_rate_law(std::span<const RateSample> samples) {
  require(samples.size() >= 5, ErrorCode::invalid_argument, "rate fit needs at least 5 samples");
  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  RateFit fit;
  fit.samples = samples.size();
  fit.k_min = samples.front().k;
  fit.k_max = samples.front().k;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    require(s.k >= 4, ErrorCode::invalid_argument, "rate fit needs k >= 4");
    require(s.value > 0 && std::isfinite(s.value), ErrorCode::invalid_argument,
            "rate fit needs positive finite values");
    const double lk = std::log2(s.k);
    X(i, 0) = 1;
    X(i, 1) = -lk;
    X(i, 2) = std::log2(lk);
    y(i) = std::log2(s.value);
    fit.k_min = std::min(fit.k_min, s.k);
    fit.k_max = std::max(fit.k_max, s.k);
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  require(qr.rank() == 3, ErrorCode::degenerate, "degenerate design: k-grid too short or collinear");
  const Eigen::Vector3d coef = qr.solve(y);
  fit.log2_scale = coef(0);
  fit.alpha_hat = coef(1);
  fit.beta_hat = coef(2);

  const double mean = y.mean();
  const double ss_tot = (y.array() - mean).square().sum();
  const double ss_res = (y - X * coef).squaredNorm();
  fit.r2 = ss_tot <= 1e-24 ? 1.0 : std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
  fit.low_confidence = std::log2(fit.k_max / fit.k_min) < 6;
  return fit;
}

double loglog_slope(std::span<const RateSample> samples) {
  require(samples.size() >= 2, ErrorCode::invalid_argument, "slope needs at least 2 samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& s : samples) {
    require(s.k > 0 && s.value > 0, ErrorCode::invalid_argument, "slope needs positive data");
    const double x = std::log2(s.k), y = std::log2(s.value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(samples.size());
  const double den = n * sxx - sx * sx;
  require(den > 0, ErrorCode::degenerate, "slope needs distinct abscissae");
  return (n * sxy - sx * sy) / den;
}

}  // namespace snumlab
