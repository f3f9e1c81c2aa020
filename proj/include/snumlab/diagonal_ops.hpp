#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snumlab/core_params.hpp"
#include "snumlab/rate_law.hpp"

namespace snumlab {

/// How much a numerical bound on an approximation number can be trusted.
enum class BoundStatus {
  exact,             // the value is a_k itself
  upper,             // rigorous upper bound
  upper_with_c1,     // upper bound assuming the unspecified constant is 1
  equivalent_range,  // as above, and a_k is equivalent to it (k <= N/4)
  up_to_constant,    // valid only up to an unknown multiplicative constant
};

std::string to_string(BoundStatus s);

/// sigma_k = k^-alpha log2^beta k past the cutoff 2^(beta/alpha), 1 before it.
/// Between the cutoff and the mode e^(beta/alpha) the raw formula still rises,
/// so values are clamped to the running minimum; this keeps sigma
/// nonincreasing and changes nothing asymptotically.
class DecaySequence {
 public:
  static DecaySequence make(const Rational& alpha, const Rational& beta);

  const Rational& alpha() const noexcept { return alpha_; }
  const Rational& beta() const noexcept { return beta_; }
  double cutoff() const noexcept { return cutoff_; }

  /// sigma at rank k >= 1. Real ranks are accepted so that block starts far
  /// beyond 2^64 can be evaluated.
  double operator()(double k) const;

 private:
  Rational alpha_, beta_;
  double a_ = 0, b_ = 0, cutoff_ = 1, head_floor_ = 1;
};

struct FiniteIdResult {
  double value = 0;
  BoundStatus status = BoundStatus::exact;
};

/// a_k(id : l_p1^N -> l_p2^N): exact for p2 < p1 and p1 = p2, otherwise the
/// standard upper estimate with its constant set to 1. Zero for k > N.
FiniteIdResult approx_finite_id(const Exponent& p1, const Exponent& p2, std::uint64_t N, std::uint64_t k);

/// Same estimate with real-valued dimension and rank.
double finite_id_value(const Exponent& p1, const Exponent& p2, double N, double k);

/// a_k(D_sigma : l_p -> l_p) = sigma_k.
double approx_diag_same_p(const DecaySequence& seq, std::uint64_t k);

/// a_k of the finite diagonal diag(sigma) on l_p^n: the k-th largest |sigma_i|,
/// zero for k > n.
double approx_diag_same_p(std::span<const double> sigma, std::uint64_t k);

/// Coordinate range [start, start + size) handled by one projection.
struct Block {
  double start = 1;
  double size = 1;
};

enum class BlockFamily { dyadic, stretched };
std::string to_string(BlockFamily f);

struct RankAllocation {
  BlockFamily family = BlockFamily::dyadic;
  double log2_growth = 1;            // blocks are [2^{h(i-1)}, 2^{hi})
  std::vector<Block> blocks;
  std::vector<std::uint64_t> ranks;  // k_i per block
  double tail_start = 0;             // first coordinate of the tail operator
  double tail_norm = 0;              // its norm, charged once at rank 1
  std::uint64_t rank_used = 1;       // sum (k_i - 1) + 1
  double bound = 0;
};

struct BlockSplitResult {
  double bound = 0;
  BoundStatus status = BoundStatus::upper_with_c1;
  std::string method;  // "dp", "greedy" or "norm"
  RankAllocation allocation;
};

/// Largest target rank for which the dynamic program runs; above it the
/// Lagrangian allocation takes over.
inline constexpr std::uint64_t kDpRankLimit = std::uint64_t{1} << 14;

/// Upper bound on a_K(D_sigma : l_p1 -> l_p2) from splitting D_sigma into
/// block-diagonal pieces, bounding each piece through the finite identity and
/// distributing the rank budget with plain additivity.
BlockSplitResult block_split_upper(const DecaySequence& seq, const Exponent& p1, const Exponent& p2,
                                   std::uint64_t K);

enum class AllocationMethod { automatic, dp, greedy };

BlockSplitResult block_split_upper(const DecaySequence& seq, const Exponent& p1, const Exponent& p2,
                                   std::uint64_t K, AllocationMethod method);

/// block_split_upper over an ascending rank grid, evaluated with one dynamic
/// program for all ranks up to kDpRankLimit. The result is made nonincreasing
/// (a bound for a_K also bounds a_K' for K' > K).
std::vector<double> block_split_profile(const DecaySequence& seq, const Exponent& p1, const Exponent& p2,
                                        std::span<const std::uint64_t> ranks);

struct SectionLowerResult {
  double value = 0;
  double section_dim = 0;  // N
  BoundStatus status = BoundStatus::up_to_constant;
};

/// Lower bound (up to a constant) on a_K(D_sigma) from the section
/// l_p1^N -> l_p1(1/sigma) -> l_p2 -> l_p2^N. N follows the regime: 4K for
/// same-side and upper cross regimes, [(4K)^(t/2)] below the crossover, 8K for
/// p2 < p1.
SectionLowerResult section_lower_bound(const DecaySequence& seq, const Exponent& p1, const Exponent& p2,
                                       std::uint64_t K);
SectionLowerResult section_lower_bound(const DecaySequence& seq, const Exponent& p1, const Exponent& p2,
                                       std::uint64_t K, double section_dim);

/// Asymptotic rate of a_k(D_sigma : l_p1 -> l_p2) in all four regimes.
RateLaw rate_envelope_diag(const Rational& alpha, const Rational& beta, const Exponent& p1,
                           const Exponent& p2);

/// Norm of D_sigma restricted to coordinates >= from (upper bound when
/// p2 < p1, where it is an l_r tail sum).
double diagonal_tail_norm(const DecaySequence& seq, const Exponent& p1, const Exponent& p2, double from);

}  // namespace snumlab
