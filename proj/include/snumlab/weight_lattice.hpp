#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "snumlab/core_params.hpp"

namespace snumlab {

using LatticePoint = std::vector<std::int64_t>;

/// Integer numerator of a level-0 cube weight. The exact weight is
/// key / weight_scale(gamma).
using WeightKey = unsigned __int128;

/// Exact integral of w_gamma = prod |r_i|^(gamma_i - 1) over the dyadic cube
/// Q_{nu,k} (center 2^-nu k, side 2^-nu).
Rational cube_weight_exact(const BlockIndex& gamma, int nu, std::span<const std::int64_t> k);
double cube_weight(const BlockIndex& gamma, int nu, std::span<const std::int64_t> k);

/// prod_i gamma_i 2^gamma_i: the common denominator of level-0 cube weights.
Rational weight_scale(const BlockIndex& gamma);

/// (2j+1)^g - (2j-1)^g with odd-power signs, i.e. g 2^g times the integral of
/// |t|^(g-1) over [j - 1/2, j + 1/2]. Symmetric in j and increasing in |j|.
/// Returns nullopt on 128-bit overflow.
std::optional<WeightKey> axis_factor(int g, std::int64_t j);

/// All lattice points of the box |k|_inf <= K ranked by increasing level-0
/// cube weight, ties broken lexicographically on k. Immutable once built.
class CubeWeightTable {
 public:
  static constexpr std::uint64_t default_max_points = std::uint64_t{1} << 26;

  static CubeWeightTable build(const BlockIndex& gamma, std::int64_t box_radius,
                               std::uint64_t max_points = default_max_points);

  const BlockIndex& gamma() const noexcept { return gamma_; }
  std::int64_t box_radius() const noexcept { return radius_; }
  std::size_t size() const noexcept { return order_.size(); }

  LatticePoint point(std::size_t rank) const;
  WeightKey key(std::size_t rank) const;
  double weight(std::size_t rank) const;
  Rational weight_exact(std::size_t rank) const;
  /// tau(k). Throws out_of_range for points outside the box.
  std::size_t rank_of(std::span<const std::int64_t> k) const;
  bool contains(std::span<const std::int64_t> k) const;

  /// Smallest weight on the box boundary. Every lattice point with weight at
  /// most this value lies in the box, so counts up to it are exact.
  Rational reliable_weight_exact() const;
  double reliable_weight() const;
  /// Number of leading ranks whose weight is <= reliable_weight().
  std::size_t reliable_count() const;

  /// Number of ranks with key <= bound.
  std::size_t count_keys_at_most(const boost::multiprecision::cpp_int& bound) const;

  /// CSV: rank,k,weight with k joined by ';' and weight at 17 significant digits.
  void write_csv(std::ostream& os) const;

 private:
  CubeWeightTable() = default;
  WeightKey key_of_index(std::uint32_t index) const;
  LatticePoint point_of_index(std::uint32_t index) const;

  BlockIndex gamma_;
  std::int64_t radius_ = 0;
  std::uint64_t side_ = 0;
  std::vector<std::vector<WeightKey>> factors_;  // [coordinate][j + K]
  std::vector<std::uint32_t> order_;             // rank -> linear index
  std::vector<std::uint32_t> rank_;              // linear index -> rank
  double inv_scale_ = 0;
};

/// count[j] = #{k in table : w(Q_{0,k}) <= thresholds[j]}. Thresholds must be
/// ascending and no larger than table.reliable_weight(); larger thresholds
/// would silently undercount and are rejected with out_of_range.
std::vector<std::uint64_t> counting_profile(const CubeWeightTable& table,
                                            std::span<const double> thresholds);

/// #{k in Z^m : w(Q_{0,k}) <= threshold} computed exactly without a box, by
/// walking the product structure coordinate by coordinate.
std::uint64_t count_weight_level_set(const BlockIndex& gamma, double threshold,
                                     std::uint64_t max_count = std::uint64_t{1} << 40);

/// floor(threshold * weight_scale(gamma)): w <= threshold iff key <= this.
boost::multiprecision::cpp_int weight_key_bound(const BlockIndex& gamma, double threshold);

/// Exponents of the reindexed weight sequence.
struct WeightSequenceParams {
  BlockIndex gamma;
  Exponent p1;
  Exponent p2;
  /// (gamma_1 - 1)(1 - p2/p1); absent when p2 = inf.
  std::optional<Rational> exponent_e;
  /// (gamma_1 - 1)(1/p2 - 1/p1), the exponent of the diagonal sequence
  /// w~_l^(1/p2).
  Rational exponent_s;

  static WeightSequenceParams make(const BlockIndex& gamma, const Exponent& p1, const Exponent& p2);
};

/// max(1, l log2^(1-n) l); 1 for l in {0, 1}.
double reduced_base(int n, std::uint64_t ell);

/// w~_l = max(1, l log2^(1-n) l)^exponent_e. Requires p2 < inf.
double wtilde(const WeightSequenceParams& params, std::uint64_t ell);

/// w~_l^(1/p2) = max(1, l log2^(1-n) l)^exponent_s; defined for p2 = inf too.
double reduced_diagonal(const WeightSequenceParams& params, std::uint64_t ell);

}  // namespace snumlab
