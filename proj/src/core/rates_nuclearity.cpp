#include "snumlab/rates_nuclearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "snumlab/diagonal_ops.hpp"
#include "snumlab/error.hpp"
#include "snumlab/weight_lattice.hpp"

namespace snumlab {

RateLaw embedding_rate(const BlockIndex& gamma, const EmbeddingParams& params) {
  params.validate();
  require(params.p1.reciprocal() < 1, ErrorCode::unsupported_endpoint,
          "p1 = 1 lies outside the range of the rate theorem (needs p1 > 1)");
  require(params.p1 < params.p2, ErrorCode::precondition, "rate law needs p1 < p2");
  require(is_compact_embedding(params, gamma), ErrorCode::precondition, "embedding is not compact");

  const Rational inv_p = params.p1.reciprocal() - params.p2.reciprocal();
  const Rational alpha = (gamma.gamma1() - 1) * inv_p;
  const Rational beta = (gamma.n() - 1) * alpha;
  // gamma_1/p = 1/min{p1, p2'} is the same equation as alpha = 1/t.
  const bool crosses = params.p1.reciprocal() > Rational(1, 2) && params.p2.reciprocal() < Rational(1, 2);
  require(!crosses || alpha != inv_t_of(params.p1, params.p2), ErrorCode::unsupported_boundary,
          "gamma_1/p = 1/min{p1, p2'} is the excluded regime boundary");
  return rate_envelope_diag(alpha, beta, params.p1, params.p2);
}

Exponent tong_exponent(const Exponent& r1, const Exponent& r2) {
  if (r2 <= r1) return Exponent::finite(1);
  return Exponent::from_reciprocal(1 - r1.reciprocal() + r2.reciprocal());
}

double lp_norm(std::span<const double> x, const Exponent& r) {
  double peak = 0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak == 0 || r.is_infinite()) return peak;
  if (r.reciprocal() == 1) {
    double s = 0;
    for (double v : x) s += std::abs(v);
    return s;
  }
  const double rd = r.to_double();
  double s = 0;
  for (double v : x) s += std::pow(std::abs(v) / peak, rd);
  return peak * std::pow(s, 1.0 / rd);
}

double tong_nuclear_norm(std::span<const double> tau, const Exponent& r1, const Exponent& r2) {
  return lp_norm(tau, tong_exponent(r1, r2));
}

// ---------------------------------------------------------------------------

TailLaw TailLaw::power_log(double c, const Rational& alpha, const Rational& beta) {
  TailLaw t;
  t.kind = Kind::power_log;
  t.scale = c;
  t.alpha = alpha;
  t.beta = beta;
  return t;
}

TailLaw TailLaw::geometric(double c, double ratio) {
  TailLaw t;
  t.kind = Kind::geometric;
  t.scale = c;
  t.ratio = ratio;
  return t;
}

double TailLaw::operator()(double j) const {
  if (kind == Kind::geometric) return scale * std::pow(ratio, j);
  return scale * power_log_term(to_double(alpha), to_double(beta), j);
}

double SequenceGenerator::operator()(std::uint64_t j) const {
  require(j >= 1, ErrorCode::invalid_argument, "sequence indices start at 1");
  if (j <= head.size()) return head[j - 1];
  return tail(static_cast<double>(j));
}

namespace {

void check_generator(const SequenceGenerator& g) {
  for (std::size_t i = 0; i < g.head.size(); ++i) {
    require(g.head[i] > 0, ErrorCode::precondition, "tau must be positive");
    require(i == 0 || g.head[i] <= g.head[i - 1], ErrorCode::precondition, "tau must be nonincreasing");
  }
  const TailLaw& t = g.tail;
  require(t.scale > 0, ErrorCode::precondition, "tail scale must be positive");
  const double first = static_cast<double>(g.head.size() + 1);
  if (t.kind == TailLaw::Kind::geometric) {
    require(t.ratio > 0 && t.ratio <= 1, ErrorCode::precondition, "geometric ratio must lie in (0, 1]");
  } else {
    require(t.alpha >= 0 && t.beta >= 0, ErrorCode::precondition, "tail exponents must be nonnegative");
    require(t.alpha > 0 || t.beta == 0, ErrorCode::precondition, "tail (log2 j)^beta increases");
    if (t.beta > 0) {
      const double mode = power_log_mode(to_double(t.alpha), to_double(t.beta));
      require(first >= std::max(2.0, mode), ErrorCode::precondition,
              "tail is not monotone from its first index; extend the head past e^(beta/alpha)");
    }
  }
  require(g.head.empty() || t(first) <= g.head.back(), ErrorCode::precondition,
          "tail starts above the last head entry");
}

bool tail_tends_to_zero(const TailLaw& t) {
  return t.kind == TailLaw::Kind::geometric ? t.ratio < 1 : t.alpha > 0;
}

}  // namespace

NuclearNormResult tong_nuclear_norm(const SequenceGenerator& tau, const Exponent& r1, const Exponent& r2) {
  check_generator(tau);
  const Exponent t = tong_exponent(r1, r2);
  const TailLaw& law = tau.tail;
  const double first = static_cast<double>(tau.head.size() + 1);
  NuclearNormResult r;

  if (t.is_infinite()) {
    const double sup = tau.head.empty() ? law(first) : tau.head.front();
    r.lower = r.upper = sup;
    r.nuclear = tail_tends_to_zero(law);
    r.certificate = r.nuclear ? "t = inf: tau in c_0" : "t = inf: tau does not tend to 0";
    return r;
  }

  const Rational inv_t = t.reciprocal();
  const double td = t.to_double();
  const bool converges =
      law.kind == TailLaw::Kind::geometric ? law.ratio < 1 : law.alpha > inv_t;  // alpha t > 1
  if (!converges) {
    r.lower = r.upper = std::numeric_limits<double>::infinity();
    r.certificate = law.kind == TailLaw::Kind::geometric
                        ? "constant tail: sum of tau_j^t diverges"
                        : "alpha t = " + Rational(law.alpha / inv_t).str() + " <= 1: sum of tau_j^t diverges";
    return r;
  }

  double head = 0;
  for (double v : tau.head) head += std::pow(v, td);
  r.nuclear = true;
  if (law.kind == TailLaw::Kind::geometric) {
    const double rt = std::pow(law.ratio, td);
    const double s = head + std::pow(law.scale, td) * std::pow(rt, first) / (1 - rt);
    r.lower = r.upper = std::pow(s, 1.0 / td);
    r.certificate = "geometric tail summed in closed form";
    return r;
  }

  // Explicit partial sum until the terms are negligible, then the integral test.
  const double a = to_double(law.alpha) * td, b = to_double(law.beta) * td;
  const double ct = std::pow(law.scale, td);
  constexpr double kMaxTerms = 1 << 24;
  double s = head, j = first;
  for (; j < first + kMaxTerms; j += 1) {
    const double term = ct * power_log_term(a, b, j);
    if (term <= 1e-13 * s && j >= power_log_mode(a, b)) break;
    s += term;
  }
  const double rest = ct * power_log_integral(a, b, j);
  r.lower = std::pow(s + rest, 1.0 / td);
  r.upper = std::pow(s + rest + ct * power_log_term(a, b, j), 1.0 / td);
  r.certificate = "alpha t = " + Rational(law.alpha / inv_t).str() + " > 1: partial sum plus integral-test tail";
  return r;
}

double linfty_source_nuclear_norm(const std::vector<std::vector<double>>& columns, const Exponent& r2) {
  double s = 0;
  for (const auto& c : columns) s += lp_norm(c, r2);
  return s;
}

// ---------------------------------------------------------------------------

NuclearityWitness is_nuclear_embedding(const BlockIndex& gamma, const EmbeddingParams& params) {
  params.validate();
  NuclearityWitness w;
  w.smoothness_per_dim = (params.s1 - params.s2) / gamma.d();
  w.gap = params.p1.reciprocal() - params.p2.reciprocal();
  w.inv_gamma1 = Rational(1, gamma.gamma1());
  w.verdict = w.smoothness_per_dim > w.gap && w.gap > w.inv_gamma1;
  return w;
}

std::string to_string(SeriesVerdict v) { return v == SeriesVerdict::convergent ? "convergent" : "divergent"; }

SeriesDiagnostic nuclearity_series_diagnostic(const BlockIndex& gamma, const Exponent& p1, const Exponent& p2,
                                              std::uint64_t terms) {
  require(p1 < p2, ErrorCode::precondition, "series diagnostic needs p1 < p2");
  require(p1.reciprocal() <= 1, ErrorCode::invalid_argument, "p1 must be >= 1");
  const int n = gamma.n();
  SeriesDiagnostic d;
  d.t = tong_exponent(p1, p2);
  d.partial_sums.reserve(terms);

  if (d.t.is_infinite()) {
    // sup_l (l log2^(1-n) l)^(1 - gamma_1); the clamp at l <= 1 gives 1.
    const double e = 1.0 - gamma.gamma1();
    double sup = 1.0;
    for (std::uint64_t l = 2; l < terms + 2; ++l) {
      sup = std::max(sup, std::pow(reduced_base(n, l), e));
      d.partial_sums.push_back(sup);
    }
    d.log_exponent = Rational(1 - n) * Rational(1 - gamma.gamma1());
    d.verdict = gamma.gamma1() > 1 ? SeriesVerdict::convergent : SeriesVerdict::divergent;
    d.total = {sup, sup};
    d.note = "t = inf: bounded sequence tending to 0 since gamma_1 > 1";
    return d;
  }

  const Rational e = (gamma.gamma1() - 1) * (p2.reciprocal() - p1.reciprocal()) / d.t.reciprocal();
  d.exponent = e;
  d.log_exponent = (1 - n) * e;
  const double ed = to_double(e);
  double s = 0;
  for (std::uint64_t l = 2; l < terms + 2; ++l) {
    s += std::pow(reduced_base(n, l), ed);
    d.partial_sums.push_back(s);
  }

  if (e < -1) {
    d.verdict = SeriesVerdict::convergent;
    const double start = static_cast<double>(terms + 2);
    const Bracket tail = power_log_sum(-ed, to_double(d.log_exponent), start);
    // The clamp max(1, .) only lowers terms, so the raw tail is always an upper
    // bound; it is a lower bound once the base has passed 1 and is increasing.
    const bool unclamped = n == 1 || (std::log(start) > n - 1 && reduced_base(n, terms + 2) > 1);
    d.total = {s + (unclamped ? tail.lower : 0.0), s + tail.upper};
    d.note = "exponent test: e < -1";
  } else if (e == -1) {
    d.verdict = SeriesVerdict::divergent;
    d.boundary = true;
    d.total = {s, std::numeric_limits<double>::infinity()};
    d.note = "boundary: decided by log factor, log exponent " + d.log_exponent.str() + " >= 0 diverges";
  } else {
    d.verdict = SeriesVerdict::divergent;
    d.total = {s, std::numeric_limits<double>::infinity()};
    d.note = "exponent test: e > -1";
  }
  return d;
}

}  // namespace snumlab
