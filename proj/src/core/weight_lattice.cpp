#include "snumlab/weight_lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <utility>

#include "snumlab/error.hpp"

namespace snumlab {

namespace mp = boost::multiprecision;

namespace {

constexpr WeightKey kKeyMax = ~WeightKey{0};

std::optional<WeightKey> checked_mul(WeightKey a, WeightKey b) {
  if (a != 0 && b > kKeyMax / a) return std::nullopt;
  return a * b;
}

std::optional<WeightKey> checked_pow(WeightKey base, int e) {
  WeightKey r = 1;
  for (int i = 0; i < e; ++i) {
    auto next = checked_mul(r, base);
    if (!next) return std::nullopt;
    r = *next;
  }
  return r;
}

mp::cpp_int to_cpp_int(WeightKey v) {
  mp::cpp_int r = static_cast<std::uint64_t>(v >> 64);
  r <<= 64;
  r += static_cast<std::uint64_t>(v);
  return r;
}

double key_to_double(WeightKey v) {
  return std::ldexp(static_cast<double>(static_cast<std::uint64_t>(v >> 64)), 64) +
         static_cast<double>(static_cast<std::uint64_t>(v));
}

// Signed odd power: sign(x)|x|^g.
mp::cpp_int signed_pow(const mp::cpp_int& x, int g) {
  mp::cpp_int a = mp::abs(x);
  mp::cpp_int r = mp::pow(a, static_cast<unsigned>(g));
  return x < 0 ? mp::cpp_int(-r) : r;
}

// Largest j >= 0 with axis_factor(g, j) <= budget, or -1 if none.
std::int64_t max_axis_index(int g, WeightKey budget) {
  if (*axis_factor(g, 0) > budget) return -1;
  std::int64_t lo = 0, hi = 1;
  auto fits = [&](std::int64_t j) {
    auto f = axis_factor(g, j);
    return f && *f <= budget;
  };
  while (fits(hi)) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (fits(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

std::optional<WeightKey> axis_factor(int g, std::int64_t j) {
  if (j < 0) j = -j;
  if (j == 0) return WeightKey{2};
  const WeightKey hi = static_cast<WeightKey>(2 * j + 1);
  const WeightKey lo = static_cast<WeightKey>(2 * j - 1);
  auto a = checked_pow(hi, g);
  if (!a) return std::nullopt;
  return *a - *checked_pow(lo, g);
}

Rational weight_scale(const BlockIndex& gamma) {
  mp::cpp_int c = 1;
  for (int g : gamma.gammas()) c *= mp::cpp_int(g) << g;
  return Rational(c);
}

Rational cube_weight_exact(const BlockIndex& gamma, int nu, std::span<const std::int64_t> k) {
  require(static_cast<int>(k.size()) == gamma.m(), ErrorCode::invalid_argument,
          "lattice point dimension does not match the block index");
  require(nu >= 0, ErrorCode::invalid_argument, "level must be nonnegative");
  Rational w = 1;
  for (int i = 0; i < gamma.m(); ++i) {
    const int g = gamma.gammas()[i];
    const mp::cpp_int kk = k[i];
    // Integral of |t|^(g-1) over [(2k-1)/2^(nu+1), (2k+1)/2^(nu+1)].
    const mp::cpp_int num = signed_pow(2 * kk + 1, g) - signed_pow(2 * kk - 1, g);
    const mp::cpp_int den = mp::cpp_int(g) << ((nu + 1) * g);
    w *= Rational(num, den);
  }
  return w;
}

double cube_weight(const BlockIndex& gamma, int nu, std::span<const std::int64_t> k) {
  return to_double(cube_weight_exact(gamma, nu, k));
}

mp::cpp_int weight_key_bound(const BlockIndex& gamma, double threshold) {
  require(std::isfinite(threshold), ErrorCode::out_of_range, "threshold must be finite");
  if (threshold < 0) return -1;
  const Rational scaled = Rational(threshold) * weight_scale(gamma);
  return mp::numerator(scaled) / mp::denominator(scaled);
}

// ---------------------------------------------------------------------------

CubeWeightTable CubeWeightTable::build(const BlockIndex& gamma, std::int64_t box_radius,
                                       std::uint64_t max_points) {
  require(box_radius >= 1, ErrorCode::invalid_argument, "box radius must be >= 1");
  const std::uint64_t side = 2 * static_cast<std::uint64_t>(box_radius) + 1;
  const std::uint64_t cap = std::min<std::uint64_t>(max_points, std::numeric_limits<std::uint32_t>::max());
  std::uint64_t count = 1;
  for (int i = 0; i < gamma.m(); ++i) {
    if (count > cap / side)
      fail(ErrorCode::capacity, "box of radius " + std::to_string(box_radius) + " in dimension " +
                                    std::to_string(gamma.m()) + " exceeds the point budget of " +
                                    std::to_string(cap));
    count *= side;
  }

  CubeWeightTable t;
  t.gamma_ = gamma;
  t.radius_ = box_radius;
  t.side_ = side;
  t.factors_.resize(gamma.m());
  WeightKey corner = 1;
  for (int i = 0; i < gamma.m(); ++i) {
    auto& f = t.factors_[i];
    f.resize(side);
    for (std::int64_t j = -box_radius; j <= box_radius; ++j) {
      auto v = axis_factor(gamma.gammas()[i], j);
      require(v.has_value(), ErrorCode::capacity, "exact weight key exceeds 128 bits");
      f[static_cast<std::size_t>(j + box_radius)] = *v;
    }
    auto c = checked_mul(corner, f.back());
    require(c.has_value(), ErrorCode::capacity, "exact weight key exceeds 128 bits; reduce box_radius");
    corner = *c;
  }
  t.inv_scale_ = 1.0 / to_double(weight_scale(gamma));

  const auto n = static_cast<std::uint32_t>(count);
  t.order_.resize(n);
  if ((corner >> 64) == 0) {
    std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(n);
    for (std::uint32_t i = 0; i < n; ++i) keyed[i] = {static_cast<std::uint64_t>(t.key_of_index(i)), i};
    std::sort(keyed.begin(), keyed.end());
    for (std::uint32_t r = 0; r < n; ++r) t.order_[r] = keyed[r].second;
  } else {
    for (std::uint32_t i = 0; i < n; ++i) t.order_[i] = i;
    std::sort(t.order_.begin(), t.order_.end(), [&t](std::uint32_t a, std::uint32_t b) {
      const WeightKey ka = t.key_of_index(a), kb = t.key_of_index(b);
      return ka != kb ? ka < kb : a < b;
    });
  }
  t.rank_.resize(n);
  for (std::uint32_t r = 0; r < n; ++r) t.rank_[t.order_[r]] = r;
  return t;
}

// Linear index is row-major with the first coordinate most significant, so
// index order coincides with lexicographic order on k.
WeightKey CubeWeightTable::key_of_index(std::uint32_t index) const {
  WeightKey key = 1;
  std::uint64_t rest = index;
  for (int i = gamma_.m() - 1; i >= 0; --i) {
    key *= factors_[i][rest % side_];
    rest /= side_;
  }
  return key;
}

LatticePoint CubeWeightTable::point_of_index(std::uint32_t index) const {
  LatticePoint k(gamma_.m());
  std::uint64_t rest = index;
  for (int i = gamma_.m() - 1; i >= 0; --i) {
    k[i] = static_cast<std::int64_t>(rest % side_) - radius_;
    rest /= side_;
  }
  return k;
}

LatticePoint CubeWeightTable::point(std::size_t rank) const { return point_of_index(order_.at(rank)); }

WeightKey CubeWeightTable::key(std::size_t rank) const { return key_of_index(order_.at(rank)); }

double CubeWeightTable::weight(std::size_t rank) const { return key_to_double(key(rank)) * inv_scale_; }

Rational CubeWeightTable::weight_exact(std::size_t rank) const {
  return Rational(to_cpp_int(key(rank))) / weight_scale(gamma_);
}

bool CubeWeightTable::contains(std::span<const std::int64_t> k) const {
  if (static_cast<int>(k.size()) != gamma_.m()) return false;
  return std::all_of(k.begin(), k.end(), [this](std::int64_t c) { return c >= -radius_ && c <= radius_; });
}

std::size_t CubeWeightTable::rank_of(std::span<const std::int64_t> k) const {
  require(static_cast<int>(k.size()) == gamma_.m(), ErrorCode::invalid_argument,
          "lattice point dimension does not match the block index");
  require(contains(k), ErrorCode::out_of_range, "lattice point outside the enumeration box");
  std::uint64_t index = 0;
  for (int i = 0; i < gamma_.m(); ++i) index = index * side_ + static_cast<std::uint64_t>(k[i] + radius_);
  return rank_[index];
}

Rational CubeWeightTable::reliable_weight_exact() const {
  // Weights grow with every |k_i|, so the boundary minimum sits on an axis.
  std::optional<WeightKey> best;
  for (int i = 0; i < gamma_.m(); ++i) {
    WeightKey key = factors_[i].back();
    for (int l = 0; l < gamma_.m(); ++l)
      if (l != i) key *= WeightKey{2};
    if (!best || key < *best) best = key;
  }
  return Rational(to_cpp_int(*best)) / weight_scale(gamma_);
}

double CubeWeightTable::reliable_weight() const { return to_double(reliable_weight_exact()); }

std::size_t CubeWeightTable::count_keys_at_most(const mp::cpp_int& bound) const {
  if (bound < 0) return 0;
  std::size_t lo = 0, hi = order_.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (to_cpp_int(key(mid)) <= bound) lo = mid + 1;
    else hi = mid;
  }
  return lo;
}

std::size_t CubeWeightTable::reliable_count() const {
  const Rational scaled = reliable_weight_exact() * weight_scale(gamma_);
  return count_keys_at_most(mp::numerator(scaled));
}

void CubeWeightTable::write_csv(std::ostream& os) const {
  os << "rank,k,weight\n";
  char buf[32];
  for (std::size_t r = 0; r < size(); ++r) {
    const LatticePoint k = point(r);
    os << r << ',';
    for (std::size_t i = 0; i < k.size(); ++i) os << (i ? ";" : "") << k[i];
    std::snprintf(buf, sizeof buf, "%.17g", weight(r));
    os << ',' << buf << '\n';
  }
}

std::vector<std::uint64_t> counting_profile(const CubeWeightTable& table, std::span<const double> thresholds) {
  require(std::is_sorted(thresholds.begin(), thresholds.end()), ErrorCode::invalid_argument,
          "thresholds must be ascending");
  const Rational reliable = table.reliable_weight_exact();
  std::vector<std::uint64_t> counts;
  counts.reserve(thresholds.size());
  for (double thr : thresholds) {
    if (!std::isfinite(thr) || Rational(thr) > reliable)
      fail(ErrorCode::out_of_range, "threshold beyond the table's reliable weight " +
                                        std::to_string(table.reliable_weight()) +
                                        "; counts would be truncated by the box boundary");
    counts.push_back(table.count_keys_at_most(weight_key_bound(table.gamma(), thr)));
  }
  return counts;
}

namespace {

struct LevelSetCounter {
  const std::vector<int>& gammas;
  std::uint64_t max_count;
  std::uint64_t total = 0;

  // Points of coordinates i..m-1 whose key product is <= budget.
  std::uint64_t count(std::size_t i, WeightKey budget) {
    const int g = gammas[i];
    const std::int64_t jmax = max_axis_index(g, budget);
    if (jmax < 0) return 0;
    if (i + 1 == gammas.size()) return 2 * static_cast<std::uint64_t>(jmax) + 1;
    // Remaining coordinates need at least 2 each.
    const WeightKey rest_min = WeightKey{1} << (gammas.size() - i - 1);
    std::uint64_t c = 0;
    for (std::int64_t j = 0; j <= jmax; ++j) {
      const WeightKey f = *axis_factor(g, j);
      if (f > budget / rest_min) break;
      const std::uint64_t sub = count(i + 1, budget / f);
      c += (j == 0 ? 1 : 2) * sub;
      if (c > max_count) fail(ErrorCode::capacity, "level set larger than the counting budget");
    }
    return c;
  }
};

}  // namespace

std::uint64_t count_weight_level_set(const BlockIndex& gamma, double threshold, std::uint64_t max_count) {
  const mp::cpp_int bound = weight_key_bound(gamma, threshold);
  if (bound < 0) return 0;
  require(mp::msb(bound + 1) < 127, ErrorCode::capacity, "threshold too large for exact counting");
  const auto lo = static_cast<std::uint64_t>(bound & mp::cpp_int(std::numeric_limits<std::uint64_t>::max()));
  const auto hi = static_cast<std::uint64_t>(bound >> 64);
  const WeightKey budget = (static_cast<WeightKey>(hi) << 64) | lo;
  LevelSetCounter counter{gamma.gammas(), max_count};
  return counter.count(0, budget);
}

// ---------------------------------------------------------------------------

WeightSequenceParams WeightSequenceParams::make(const BlockIndex& gamma, const Exponent& p1,
                                                const Exponent& p2) {
  WeightSequenceParams w{gamma, p1, p2, std::nullopt, 0};
  const Rational g1 = gamma.gamma1() - 1;
  if (!p2.is_infinite()) w.exponent_e = g1 * (1 - p2.value() * p1.reciprocal());
  w.exponent_s = g1 * (p2.reciprocal() - p1.reciprocal());
  return w;
}

double reduced_base(int n, std::uint64_t ell) {
  if (ell <= 1) return 1.0;
  const double l = static_cast<double>(ell);
  const double base = l * std::pow(std::log2(l), 1 - n);
  return std::max(1.0, base);
}

double wtilde(const WeightSequenceParams& params, std::uint64_t ell) {
  require(params.exponent_e.has_value(), ErrorCode::invalid_argument,
          "w~ needs p2 < inf; use reduced_diagonal for the diagonal sequence");
  return std::pow(reduced_base(params.gamma.n(), ell), to_double(*params.exponent_e));
}

double reduced_diagonal(const WeightSequenceParams& params, std::uint64_t ell) {
  return std::pow(reduced_base(params.gamma.n(), ell), to_double(params.exponent_s));
}

}  // namespace snumlab
