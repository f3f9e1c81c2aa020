#include "snumlab/diagonal_ops.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "snumlab/error.hpp"
#include "snumlab/power_log.hpp"

namespace snumlab {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::A: return "A";
    case Regime::B: return "B";
    case Regime::C: return "C";
    case Regime::D: return "D";
  }
  return "?";
}

std::string to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::exact: return "exact";
    case BoundStatus::upper: return "upper";
    case BoundStatus::upper_with_c1: return "upper-with-C1";
    case BoundStatus::equivalent_range: return "equivalent-range";
    case BoundStatus::up_to_constant: return "up-to-constant";
  }
  return "?";
}

std::string to_string(BlockFamily f) { return f == BlockFamily::dyadic ? "dyadic" : "stretched"; }

// ---------------------------------------------------------------------------

DecaySequence DecaySequence::make(const Rational& alpha, const Rational& beta) {
  require(alpha > 0, ErrorCode::invalid_argument, "decay exponent alpha must be positive");
  require(beta >= 0, ErrorCode::invalid_argument, "log exponent beta must be nonnegative");
  DecaySequence s;
  s.alpha_ = alpha;
  s.beta_ = beta;
  s.a_ = to_double(alpha);
  s.b_ = to_double(beta);
  s.cutoff_ = std::exp2(s.b_ / s.a_);
  s.head_floor_ = std::min(1.0, power_log_term(s.a_, s.b_, std::ceil(s.cutoff_)));
  return s;
}

double DecaySequence::operator()(double k) const {
  if (k < cutoff_) return 1.0;
  return std::min(head_floor_, power_log_term(a_, b_, k));
}

double approx_diag_same_p(const DecaySequence& seq, std::uint64_t k) {
  require(k >= 1, ErrorCode::invalid_argument, "rank must be >= 1");
  return seq(static_cast<double>(k));
}

double approx_diag_same_p(std::span<const double> sigma, std::uint64_t k) {
  require(k >= 1, ErrorCode::invalid_argument, "rank must be >= 1");
  if (k > sigma.size()) return 0.0;
  std::vector<double> a(sigma.size());
  std::transform(sigma.begin(), sigma.end(), a.begin(), [](double v) { return std::abs(v); });
  std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k - 1), a.end(), std::greater<>());
  return a[k - 1];
}

// ---------------------------------------------------------------------------

namespace {

const Rational kHalf = Rational(1, 2);

bool is_endpoint_pair(const Exponent& p1, const Exponent& p2) {
  return p1.reciprocal() == 1 && p2.is_infinite();
}

bool crosses_two(const Exponent& p1, const Exponent& p2) {
  return p1.reciprocal() > kHalf && p2.reciprocal() < kHalf;
}

}  // namespace

double finite_id_value(const Exponent& p1, const Exponent& p2, double N, double k) {
  if (k > N) return 0.0;
  if (p2 < p1) return std::pow(N - k + 1, to_double(p2.reciprocal() - p1.reciprocal()));
  if (crosses_two(p1, p2)) {
    require(!is_endpoint_pair(p1, p2), ErrorCode::unsupported_endpoint,
            "(p1, p2) = (1, inf) has no finite-identity estimate");
    const double inv_t = to_double(inv_t_of(p1, p2));
    const double log_n = std::log(N);
    if (std::log(k) <= 2 * inv_t * log_n) return 1.0;
    return std::exp(inv_t * log_n - 0.5 * std::log(k));
  }
  return 1.0;
}

FiniteIdResult approx_finite_id(const Exponent& p1, const Exponent& p2, std::uint64_t N, std::uint64_t k) {
  require(N >= 1 && k >= 1, ErrorCode::invalid_argument, "dimension and rank must be >= 1");
  const double n = static_cast<double>(N), kk = static_cast<double>(k);
  FiniteIdResult r;
  r.value = finite_id_value(p1, p2, n, kk);
  if (k > N || p2 < p1 || p1 == p2) r.status = BoundStatus::exact;
  else if (4 * k <= N) r.status = BoundStatus::equivalent_range;
  else r.status = crosses_two(p1, p2) ? BoundStatus::upper_with_c1 : BoundStatus::upper;
  return r;
}

// ---------------------------------------------------------------------------

namespace {

void check_diag_preconditions(const DecaySequence& seq, const Exponent& p1, const Exponent& p2) {
  require(!is_endpoint_pair(p1, p2), ErrorCode::unsupported_endpoint, "(p1, p2) = (1, inf) is excluded");
  require(p2.reciprocal() <= 1, ErrorCode::precondition, "p2 >= 1 is required (Banach target)");
  const Rational gap = p2.reciprocal() - p1.reciprocal();
  require(seq.alpha() > std::max(Rational(0), gap), ErrorCode::precondition,
          "alpha must exceed max(0, 1/p2 - 1/p1)");
}

bool below_crossover(const DecaySequence& seq, const Exponent& p1, const Exponent& p2) {
  return crosses_two(p1, p2) && seq.alpha() < inv_t_of(p1, p2);
}

// Per-block candidate ranks: costs k - 1 with strictly improving values.
struct Candidates {
  std::vector<std::uint64_t> cost;
  std::vector<double> value;
};

struct Plan {
  BlockFamily family = BlockFamily::dyadic;
  double log2_growth = 1;
  std::vector<Block> blocks;
  std::vector<Candidates> cands;
  std::vector<double> tails;  // tails[M]: norm of D_sigma past the first M blocks
  BoundStatus status = BoundStatus::upper;
};

// Blocks [2^{h(i-1)}, 2^{hi}); h = 1 is the dyadic split.
Block make_block(double h, int i) {
  const double lo = std::floor(std::exp2(h * (i - 1)));
  const double hi = std::floor(std::exp2(h * i));
  return {lo, std::max(1.0, hi - lo)};
}

Candidates block_candidates(const DecaySequence& seq, const Exponent& p1, const Exponent& p2, const Block& b,
                            std::uint64_t budget) {
  std::vector<std::uint64_t> costs{0};
  for (int j = 0;; ++j) {
    const double c = std::round(std::exp2(j / 8.0));
    if (c > static_cast<double>(budget)) break;
    costs.push_back(static_cast<std::uint64_t>(c));
  }
  if (b.size <= static_cast<double>(budget)) costs.push_back(static_cast<std::uint64_t>(b.size));
  if (crosses_two(p1, p2)) {
    const double knee = std::ceil(std::exp(2 * to_double(inv_t_of(p1, p2)) * std::log(b.size)));
    if (knee <= static_cast<double>(budget)) costs.push_back(static_cast<std::uint64_t>(knee));
  }
  std::sort(costs.begin(), costs.end());
  costs.erase(std::unique(costs.begin(), costs.end()), costs.end());

  const double scale = seq(b.start);
  Candidates out;
  for (std::uint64_t c : costs) {
    const double v = scale * finite_id_value(p1, p2, b.size, static_cast<double>(c + 1));
    if (out.value.empty() || v < out.value.back()) {
      out.cost.push_back(c);
      out.value.push_back(v);
    }
  }
  return out;
}

// An allocation over the first `blocks` blocks; everything past them is one
// tail operator charged at rank 1.
struct Selection {
  std::size_t blocks = 0;
  std::vector<std::size_t> choice;  // candidate index per block
  std::uint64_t used = 0;
  double value = 0;  // block sum plus tail norm
};

Selection lagrangian_pick(const Plan& plan, std::size_t blocks, double lambda) {
  Selection s;
  s.blocks = blocks;
  s.choice.resize(blocks);
  for (std::size_t i = 0; i < blocks; ++i) {
    const auto& c = plan.cands[i];
    std::size_t best = 0;
    double best_v = c.value[0];
    for (std::size_t j = 1; j < c.cost.size(); ++j) {
      const double v = c.value[j] + lambda * static_cast<double>(c.cost[j]);
      if (v < best_v) {
        best_v = v;
        best = j;
      }
    }
    s.choice[i] = best;
    s.used += c.cost[best];
    s.value += c.value[best];
  }
  s.value += plan.tails[blocks];
  return s;
}

// Lagrangian relaxation over the candidate grid followed by a greedy pass that
// spends any budget the multiplier search left unused.
Selection greedy_prefix(const Plan& plan, std::size_t blocks, std::uint64_t budget) {
  Selection sel = lagrangian_pick(plan, blocks, 0.0);
  if (sel.used > budget) {
    double hi = 1.0;
    while (lagrangian_pick(plan, blocks, hi).used > budget) hi *= 2;
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (lagrangian_pick(plan, blocks, mid).used > budget ? lo : hi) = mid;
    }
    sel = lagrangian_pick(plan, blocks, hi);
  }
  for (;;) {
    const std::uint64_t left = budget - sel.used;
    double best_ratio = 0;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < blocks; ++i) {
      const auto& c = plan.cands[i];
      const std::size_t cur = sel.choice[i];
      for (std::size_t j = cur + 1; j < c.cost.size() && c.cost[j] - c.cost[cur] <= left; ++j) {
        const double ratio = (c.value[cur] - c.value[j]) / static_cast<double>(c.cost[j] - c.cost[cur]);
        if (ratio > best_ratio) {
          best_ratio = ratio;
          bi = i;
          bj = j;
        }
      }
    }
    if (best_ratio <= 0) break;
    const auto& c = plan.cands[bi];
    sel.used += c.cost[bj] - c.cost[sel.choice[bi]];
    sel.value += c.value[bj] - c.value[sel.choice[bi]];
    sel.choice[bi] = bj;
  }
  return sel;
}

Selection greedy_allocate(const Plan& plan, std::uint64_t budget) {
  Selection best = lagrangian_pick(plan, 0, 0.0);
  for (std::size_t m = 1; m <= plan.cands.size(); ++m) {
    Selection s = greedy_prefix(plan, m, budget);
    if (s.value < best.value) best = std::move(s);
  }
  return best;
}

struct DpTable {
  std::vector<double> total;                      // total[b]: best bound with budget b over all prefixes
  std::vector<std::uint16_t> prefix;              // prefix[b]: number of blocks achieving total[b]
  std::vector<std::vector<std::uint8_t>> choice;  // [block][b]
};

DpTable dp_allocate(const Plan& plan, std::uint64_t budget) {
  const std::size_t width = static_cast<std::size_t>(budget) + 1;
  DpTable dp;
  std::vector<double> best(width, 0.0), next(width);
  dp.total.assign(width, plan.tails[0]);
  dp.prefix.assign(width, 0);
  dp.choice.resize(plan.cands.size());
  for (std::size_t i = 0; i < plan.cands.size(); ++i) {
    const auto& c = plan.cands[i];
    auto& ch = dp.choice[i];
    ch.assign(width, 0);
    for (std::size_t b = 0; b < width; ++b) {
      double v = best[b] + c.value[0];
      std::uint8_t arg = 0;
      for (std::size_t j = 1; j < c.cost.size() && c.cost[j] <= b; ++j) {
        const double w = best[b - c.cost[j]] + c.value[j];
        if (w < v) {
          v = w;
          arg = static_cast<std::uint8_t>(j);
        }
      }
      next[b] = v;
      ch[b] = arg;
      const double with_tail = v + plan.tails[i + 1];
      if (with_tail < dp.total[b]) {
        dp.total[b] = with_tail;
        dp.prefix[b] = static_cast<std::uint16_t>(i + 1);
      }
    }
    best.swap(next);
  }
  return dp;
}

Selection dp_backtrack(const Plan& plan, const DpTable& dp, std::uint64_t budget) {
  Selection s;
  s.blocks = dp.prefix[budget];
  s.choice.resize(s.blocks);
  s.value = dp.total[budget];
  std::uint64_t b = budget;
  for (std::size_t i = s.blocks; i-- > 0;) {
    const std::size_t j = dp.choice[i][b];
    s.choice[i] = j;
    s.used += plan.cands[i].cost[j];
    b -= plan.cands[i].cost[j];
  }
  return s;
}

constexpr std::size_t kMaxBlocks = 1000;
constexpr double kTailFraction = 0.01;

// Block grids tried for every bound: the natural one and one twice as coarse.
constexpr double kGrowthFactors[] = {1.0, 2.0};

Plan make_plan(const DecaySequence& seq, const Exponent& p1, const Exponent& p2, std::uint64_t k_max,
               double growth_factor) {
  check_diag_preconditions(seq, p1, p2);
  Plan plan;
  plan.family = below_crossover(seq, p1, p2) ? BlockFamily::stretched : BlockFamily::dyadic;
  const double h = plan.family == BlockFamily::stretched ? 0.5 / to_double(inv_t_of(p1, p2)) : 1.0;
  plan.log2_growth = h * growth_factor;
  plan.tails.push_back(diagonal_tail_norm(seq, p1, p2, 1.0));
  plan.status = crosses_two(p1, p2) ? BoundStatus::upper_with_c1 : BoundStatus::upper;
  const std::uint64_t budget = k_max - 1;

  auto add_block = [&] {
    const Block b = make_block(plan.log2_growth, static_cast<int>(plan.blocks.size()) + 1);
    plan.blocks.push_back(b);
    plan.cands.push_back(block_candidates(seq, p1, p2, b, budget));
    plan.tails.push_back(diagonal_tail_norm(seq, p1, p2, b.start + b.size));
  };
  do add_block();
  while (plan.blocks.back().start + plan.blocks.back().size < 4.0 * static_cast<double>(k_max) &&
         plan.blocks.size() < kMaxBlocks);

  // Grow the block list until the last tail is a negligible part of the bound.
  for (int round = 0; round < 16; ++round) {
    const double bound = greedy_allocate(plan, budget).value;
    if (plan.tails.back() <= kTailFraction * bound || plan.blocks.size() >= kMaxBlocks) break;
    while (plan.tails.back() > kTailFraction * bound && plan.blocks.size() < kMaxBlocks &&
           std::isfinite(plan.blocks.back().start))
      add_block();
  }
  return plan;
}

BlockSplitResult finish(const Plan& plan, const Selection& sel, const char* method) {
  BlockSplitResult r;
  r.status = plan.status;
  r.method = sel.blocks == 0 ? "norm" : method;
  auto& a = r.allocation;
  a.family = plan.family;
  a.log2_growth = plan.log2_growth;
  a.blocks.assign(plan.blocks.begin(), plan.blocks.begin() + static_cast<std::ptrdiff_t>(sel.blocks));
  a.tail_start = sel.blocks == 0 ? 1.0 : a.blocks.back().start + a.blocks.back().size;
  a.tail_norm = plan.tails[sel.blocks];
  a.ranks.resize(sel.blocks);
  for (std::size_t i = 0; i < sel.blocks; ++i) a.ranks[i] = plan.cands[i].cost[sel.choice[i]] + 1;
  a.rank_used = sel.used + 1;
  a.bound = sel.value;
  r.bound = a.bound;
  return r;
}

}  // namespace

double diagonal_tail_norm(const DecaySequence& seq, const Exponent& p1, const Exponent& p2, double from) {
  from = std::max(1.0, std::ceil(from));
  if (p2 >= p1) return seq(from);
  // l_r norm of the tail with 1/r = 1/p2 - 1/p1; sigma <= k^-a log^b k past the cutoff.
  const double inv_r = to_double(p2.reciprocal() - p1.reciprocal());
  const double r = 1.0 / inv_r;
  const double a = to_double(seq.alpha()), b = to_double(seq.beta());
  constexpr double kExplicitTerms = 256;
  const double explicit_end =
      std::max(from + kExplicitTerms, std::ceil(std::max(seq.cutoff(), power_log_mode(a, b))) + 1);
  require(explicit_end - from < 1e8, ErrorCode::capacity, "tail head too long to sum explicitly");
  double sum = 0;
  double k = from;
  for (; k < explicit_end; k += 1) sum += std::pow(seq(k), r);
  sum += power_log_sum(a * r, b * r, k).upper;
  return std::pow(sum, inv_r);
}

BlockSplitResult block_split_upper(const DecaySequence& seq, const Exponent& p1, const Exponent& p2,
                                   std::uint64_t K) {
  return block_split_upper(seq, p1, p2, K, AllocationMethod::automatic);
}

BlockSplitResult block_split_upper(const DecaySequence& seq, const Exponent& p1, const Exponent& p2,
                                   std::uint64_t K, AllocationMethod method) {
  require(K >= 1, ErrorCode::invalid_argument, "target rank must be >= 1");
  const bool use_dp =
      method == AllocationMethod::dp || (method == AllocationMethod::automatic && K <= kDpRankLimit);
  BlockSplitResult best;
  best.bound = std::numeric_limits<double>::infinity();
  for (double g : kGrowthFactors) {
    const Plan plan = make_plan(seq, p1, p2, K, g);
    BlockSplitResult r = use_dp ? finish(plan, dp_backtrack(plan, dp_allocate(plan, K - 1), K - 1), "dp")
                                : finish(plan, greedy_allocate(plan, K - 1), "greedy");
    if (r.bound < best.bound) best = std::move(r);
  }
  return best;
}

std::vector<double> block_split_profile(const DecaySequence& seq, const Exponent& p1, const Exponent& p2,
                                        std::span<const std::uint64_t> ranks) {
  if (ranks.empty()) return {};
  require(std::is_sorted(ranks.begin(), ranks.end()) && ranks.front() >= 1, ErrorCode::invalid_argument,
          "rank grid must be ascending and >= 1");
  std::vector<double> out(ranks.size(), std::numeric_limits<double>::infinity());
  const std::uint64_t dp_budget = std::min(ranks.back(), kDpRankLimit) - 1;
  for (double g : kGrowthFactors) {
    const Plan plan = make_plan(seq, p1, p2, ranks.back(), g);
    const DpTable dp = dp_allocate(plan, dp_budget);
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      const std::uint64_t K = ranks[i];
      const double v = K - 1 <= dp_budget ? dp.total[K - 1] : greedy_allocate(plan, K - 1).value;
      out[i] = std::min(out[i], v);
    }
  }
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = std::min(out[i], out[i - 1]);
  return out;
}

// ---------------------------------------------------------------------------

SectionLowerResult section_lower_bound(const DecaySequence& seq, const Exponent& p1, const Exponent& p2,
                                       std::uint64_t K) {
  check_diag_preconditions(seq, p1, p2);
  require(K >= 1, ErrorCode::invalid_argument, "target rank must be >= 1");
  const double k = static_cast<double>(K);
  double n;
  if (p2 < p1) n = 8 * k;
  else if (below_crossover(seq, p1, p2))
    n = std::floor(std::pow(4 * k, 0.5 / to_double(inv_t_of(p1, p2))));
  else n = 4 * k;
  return section_lower_bound(seq, p1, p2, K, n);
}

SectionLowerResult section_lower_bound(const DecaySequence& seq, const Exponent& p1, const Exponent& p2,
                                       std::uint64_t K, double section_dim) {
  check_diag_preconditions(seq, p1, p2);
  require(K >= 1, ErrorCode::invalid_argument, "target rank must be >= 1");
  const double k = static_cast<double>(K);
  require(std::isfinite(section_dim) && section_dim >= 1, ErrorCode::out_of_range,
          "section dimension out of range");
  // The finite identity is only equivalent to its estimate for k <= N/4;
  // the exact p2 < p1 formula holds for every k <= N.
  if (p2 < p1) require(k <= section_dim, ErrorCode::out_of_range, "rank exceeds the section dimension");
  else require(4 * k <= section_dim, ErrorCode::out_of_range, "rank outside the equivalence range k <= N/4");
  SectionLowerResult r;
  r.section_dim = section_dim;
  r.value = seq(section_dim) * finite_id_value(p1, p2, section_dim, k);
  return r;
}

RateLaw rate_envelope_diag(const Rational& alpha, const Rational& beta, const Exponent& p1,
                           const Exponent& p2) {
  require(!is_endpoint_pair(p1, p2), ErrorCode::unsupported_endpoint, "(p1, p2) = (1, inf) is excluded");
  require(beta >= 0, ErrorCode::invalid_argument, "beta must be nonnegative");
  const Rational gap = p2.reciprocal() - p1.reciprocal();
  require(alpha > std::max(Rational(0), gap), ErrorCode::precondition,
          "alpha must exceed max(0, 1/p2 - 1/p1)");
  RateLaw law{alpha, beta, Regime::A};
  if (p2 < p1) {
    law.regime = Regime::D;
    law.alpha_out = alpha - gap;
  } else if (crosses_two(p1, p2)) {
    const Rational inv_t = inv_t_of(p1, p2);
    require(alpha != inv_t, ErrorCode::unsupported_boundary, "alpha = 1/t is the excluded regime boundary");
    if (alpha > inv_t) {
      law.regime = Regime::B;
      law.alpha_out = alpha - inv_t + kHalf;
    } else {
      law.regime = Regime::C;
      law.alpha_out = alpha / (2 * inv_t);
    }
  }
  return law;
}

}  // namespace snumlab
