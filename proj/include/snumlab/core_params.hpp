#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace snumlab {

/// Arbitrary-precision rational. All regime decisions are made in this type.
using Rational = boost::multiprecision::cpp_rational;

/// Parses "a/b", "-3", "1.25" or "2.5e-1" into an exact rational.
Rational parse_rational(std::string_view text);

double to_double(const Rational& r);

/// Integrability or fine index in (0, inf]. Infinity is an explicit state,
/// with 1/inf = 0.
class Exponent {
 public:
  Exponent() = default;  // 1

  static Exponent finite(const Rational& value);
  static Exponent infinity();
  /// Inverse of reciprocal(): 0 maps to infinity.
  static Exponent from_reciprocal(const Rational& reciprocal);
  /// Accepts everything parse_rational does plus "inf" / "infinity".
  static Exponent parse(std::string_view text);

  bool is_infinite() const noexcept { return infinite_; }
  /// Throws for the infinite exponent.
  const Rational& value() const;
  Rational reciprocal() const;
  /// Hoelder conjugate with 1/p' = (1 - 1/p)_+, so 1' = inf and inf' = 1.
  Exponent conjugate() const;
  double to_double() const;
  std::string str() const;

  friend bool operator==(const Exponent& a, const Exponent& b) {
    return a.reciprocal() == b.reciprocal();
  }
  friend std::strong_ordering operator<=>(const Exponent& a, const Exponent& b) {
    const Rational ra = a.reciprocal(), rb = b.reciprocal();
    if (ra > rb) return std::strong_ordering::less;
    if (ra < rb) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  bool infinite_ = false;
  Rational value_ = 1;
};

Exponent min(const Exponent& a, const Exponent& b);

/// Block dimensions gamma_1 <= ... <= gamma_m of the symmetry group, each >= 2.
class BlockIndex {
 public:
  static BlockIndex make(std::vector<int> gammas);

  const std::vector<int>& gammas() const noexcept { return gammas_; }
  int m() const noexcept { return static_cast<int>(gammas_.size()); }
  int d() const noexcept { return d_; }
  int gamma1() const noexcept { return gammas_.front(); }
  /// Multiplicity of the smallest block.
  int n() const noexcept { return n_; }
  std::string str() const;

 private:
  std::vector<int> gammas_;
  int d_ = 0;
  int n_ = 0;
};

struct EmbeddingParams {
  Rational s1 = 0;
  Rational s2 = 0;
  Exponent p1;
  Exponent p2;
  Exponent q1;
  Exponent q2;

  /// p1, p2 must lie in [1, inf].
  void validate() const;
};

struct DerivedExponents {
  Rational delta;    // s1 - s2 - d (1/p1 - 1/p2)
  Rational inv_p;    // 1/p1 - 1/p2
  Exponent t;        // 1/t = 1/min{p1', p2}
  Exponent p1_dual;
  Exponent p2_dual;
  Rational sigma1;   // s1 + m/2 - m/p1
  Rational sigma2;
};

DerivedExponents derive_exponents(const EmbeddingParams& params, const BlockIndex& gamma);

/// s1 - s2 > d (1/p1 - 1/p2) > 0. The gamma_i >= 2 half of the criterion is
/// a BlockIndex invariant.
bool is_compact_embedding(const EmbeddingParams& params, const BlockIndex& gamma);

/// 1/t with t = min{p1', p2}; the exponent driving the finite-dimensional
/// identity estimates.
Rational inv_t_of(const Exponent& p1, const Exponent& p2);

}  // namespace snumlab
