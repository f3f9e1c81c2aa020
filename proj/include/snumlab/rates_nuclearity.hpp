#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snumlab/core_params.hpp"
#include "snumlab/power_log.hpp"
#include "snumlab/rate_law.hpp"

namespace snumlab {

/// Rate of a_k(id) between block-radial Besov/Sobolev spaces:
/// a_k ~ k^-alpha_out (log2 k)^beta_out. Needs a compact embedding with
/// 1 < p1 < p2 <= inf off the boundary gamma_1/p = 1/min{p1, p2'}.
RateLaw embedding_rate(const BlockIndex& gamma, const EmbeddingParams& params);

/// t(r1, r2): 1/t = 1 for r2 <= r1, else 1 - 1/r1 + 1/r2. Infinite only for (1, inf).
Exponent tong_exponent(const Exponent& r1, const Exponent& r2);

/// l_r norm, computed as max|x| * (sum (|x|/max|x|)^r)^(1/r) so that a
/// single nonzero entry returns its modulus exactly.
double lp_norm(std::span<const double> x, const Exponent& r);

/// Nuclear norm of the finite diagonal D_tau : l_r1^n -> l_r2^n, i.e. ||tau||_t.
double tong_nuclear_norm(std::span<const double> tau, const Exponent& r1, const Exponent& r2);

/// tau_j for j > head.size(), in closed form.
struct TailLaw {
  enum class Kind { power_log, geometric };
  Kind kind = Kind::power_log;
  double scale = 1;      // c
  Rational alpha = 1;    // power_log: c j^-alpha (log2 j)^beta
  Rational beta = 0;
  double ratio = 0.5;    // geometric: c ratio^j

  static TailLaw power_log(double c, const Rational& alpha, const Rational& beta);
  static TailLaw geometric(double c, double ratio);

  double operator()(double j) const;
};

/// tau = (head_1, ..., head_J, tail(J+1), tail(J+2), ...), indices from 1.
struct SequenceGenerator {
  std::vector<double> head;
  TailLaw tail;

  double operator()(std::uint64_t j) const;
};

struct NuclearNormResult {
  bool nuclear = false;
  double lower = 0;  // two-sided bracket of ||tau||_t (both inf when divergent)
  double upper = 0;
  std::string certificate;
};

/// ||tau||_t for an infinite nonincreasing sequence. Convergence is decided
/// from the tail law exponents; the value is bracketed by an explicit partial
/// sum plus the integral test. For t = inf returns sup tau, and the operator
/// is nuclear iff tau -> 0. Throws precondition for a nonpositive, increasing
/// or non-monotone tail.
NuclearNormResult tong_nuclear_norm(const SequenceGenerator& tau, const Exponent& r1, const Exponent& r2);

/// Nuclear norm of T : l_inf^n -> l_r2 given the columns T e_i: sum_i ||T e_i||_r2.
double linfty_source_nuclear_norm(const std::vector<std::vector<double>>& columns, const Exponent& r2);

struct NuclearityWitness {
  bool verdict = false;
  Rational smoothness_per_dim;  // (s1 - s2) / d
  Rational gap;                 // 1/p1 - 1/p2
  Rational inv_gamma1;          // 1 / gamma_1
};

/// (s1 - s2)/d > 1/p1 - 1/p2 > 1/gamma_1, compared exactly.
NuclearityWitness is_nuclear_embedding(const BlockIndex& gamma, const EmbeddingParams& params);

enum class SeriesVerdict { convergent, divergent };
std::string to_string(SeriesVerdict v);

struct SeriesDiagnostic {
  /// Exponent e of sum_{l>=2} (l log2^(1-n) l)^e; absent when t = inf.
  std::optional<Rational> exponent;
  Exponent t;
  /// Exponent of log2 l in the summand, (1 - n) e.
  Rational log_exponent;
  std::vector<double> partial_sums;  // partial_sums[i] covers l = 2..i+2; running sup when t = inf
  SeriesVerdict verdict = SeriesVerdict::divergent;
  bool boundary = false;  // e = -1: the log factor decides
  Bracket total;          // bracket of the full sum when convergent
  std::string note;
};

/// Series behind the nuclearity criterion, evaluated for l = 2..terms+1. The
/// verdict comes from the exact exponent test, never from the partial sums.
SeriesDiagnostic nuclearity_series_diagnostic(const BlockIndex& gamma, const Exponent& p1, const Exponent& p2,
                                              std::uint64_t terms);

}  // namespace snumlab
