#include "snumlab/core_params.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>

#include "snumlab/error.hpp"

namespace snumlab {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(),
                                   [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

Rational pow10(long e) {
  Rational r = 1;
  for (long i = 0; i < e; ++i) r *= 10;
  return r;
}

// Unsigned decimal with optional fraction and exponent.
Rational parse_decimal(std::string_view s, std::string_view whole) {
  std::string_view mant = s, exp_part;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    mant = s.substr(0, e);
    exp_part = s.substr(e + 1);
  }
  std::string_view ip = mant, fp;
  if (auto dot = mant.find('.'); dot != std::string_view::npos) {
    ip = mant.substr(0, dot);
    fp = mant.substr(dot + 1);
  }
  if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) ||
      (!fp.empty() && !all_digits(fp)))
    fail(ErrorCode::invalid_argument, "not a number: '" + std::string(whole) + "'");
  std::string digits = std::string(ip) + std::string(fp);
  boost::multiprecision::cpp_int num(digits.empty() ? std::string("0") : digits);
  Rational r(num);
  r /= pow10(static_cast<long>(fp.size()));
  if (!exp_part.empty()) {
    bool neg = false;
    if (exp_part.front() == '+' || exp_part.front() == '-') {
      neg = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    if (!all_digits(exp_part) || exp_part.size() > 4)
      fail(ErrorCode::invalid_argument, "bad exponent in '" + std::string(whole) + "'");
    const long e = std::stol(std::string(exp_part));
    r = neg ? r / pow10(e) : r * pow10(e);
  }
  return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view whole = text;
  std::string_view s = trim(text);
  bool neg = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational r;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    const auto num = trim(s.substr(0, slash));
    const auto den = trim(s.substr(slash + 1));
    if (!all_digits(num) || !all_digits(den))
      fail(ErrorCode::invalid_argument, "bad fraction: '" + std::string(whole) + "'");
    boost::multiprecision::cpp_int d(std::string{den});
    if (d == 0) fail(ErrorCode::invalid_argument, "zero denominator: '" + std::string(whole) + "'");
    r = Rational(boost::multiprecision::cpp_int(std::string{num}), d);
  } else {
    r = parse_decimal(s, whole);
  }
  return neg ? Rational(-r) : r;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Exponent Exponent::finite(const Rational& value) {
  require(value > 0, ErrorCode::invalid_argument, "exponent must be positive");
  Exponent e;
  e.value_ = value;
  return e;
}

Exponent Exponent::infinity() {
  Exponent e;
  e.infinite_ = true;
  e.value_ = 0;
  return e;
}

Exponent Exponent::from_reciprocal(const Rational& reciprocal) {
  require(reciprocal >= 0, ErrorCode::invalid_argument, "negative reciprocal exponent");
  if (reciprocal == 0) return infinity();
  return finite(1 / reciprocal);
}

Exponent Exponent::parse(std::string_view text) {
  std::string lower;
  for (char c : trim(text)) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "inf" || lower == "infinity" || lower == "+inf") return infinity();
  return finite(parse_rational(text));
}

const Rational& Exponent::value() const {
  require(!infinite_, ErrorCode::invalid_argument, "infinite exponent has no finite value");
  return value_;
}

Rational Exponent::reciprocal() const { return infinite_ ? Rational(0) : Rational(1 / value_); }

Exponent Exponent::conjugate() const {
  const Rational r = 1 - reciprocal();
  return from_reciprocal(r > 0 ? r : Rational(0));
}

double Exponent::to_double() const {
  return infinite_ ? std::numeric_limits<double>::infinity() : snumlab::to_double(value_);
}

std::string Exponent::str() const { return infinite_ ? std::string("inf") : value_.str(); }

Exponent min(const Exponent& a, const Exponent& b) { return a <= b ? a : b; }

BlockIndex BlockIndex::make(std::vector<int> gammas) {
  require(!gammas.empty(), ErrorCode::invalid_argument, "block index needs at least one block");
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    require(gammas[i] >= 2, ErrorCode::invalid_argument, "every block dimension must be >= 2");
    if (i > 0)
      require(gammas[i - 1] <= gammas[i], ErrorCode::invalid_argument,
              "block dimensions must be nondecreasing");
  }
  BlockIndex b;
  b.gammas_ = std::move(gammas);
  for (int g : b.gammas_) b.d_ += g;
  b.n_ = static_cast<int>(std::count(b.gammas_.begin(), b.gammas_.end(), b.gammas_.front()));
  return b;
}

std::string BlockIndex::str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < gammas_.size(); ++i) os << (i ? "," : "") << gammas_[i];
  os << ')';
  return os.str();
}

void EmbeddingParams::validate() const {
  require(p1.reciprocal() <= 1 && p2.reciprocal() <= 1, ErrorCode::invalid_argument,
          "p1 and p2 must lie in [1, inf]");
}

Rational inv_t_of(const Exponent& p1, const Exponent& p2) {
  return std::max(p1.conjugate().reciprocal(), p2.reciprocal());
}

DerivedExponents derive_exponents(const EmbeddingParams& params, const BlockIndex& gamma) {
  params.validate();
  DerivedExponents e;
  e.inv_p = params.p1.reciprocal() - params.p2.reciprocal();
  e.delta = params.s1 - params.s2 - gamma.d() * e.inv_p;
  e.p1_dual = params.p1.conjugate();
  e.p2_dual = params.p2.conjugate();
  e.t = min(e.p1_dual, params.p2);
  const Rational m = gamma.m();
  e.sigma1 = params.s1 + m / 2 - m * params.p1.reciprocal();
  e.sigma2 = params.s2 + m / 2 - m * params.p2.reciprocal();
  return e;
}

bool is_compact_embedding(const EmbeddingParams& params, const BlockIndex& gamma) {
  params.validate();
  const Rational gap = gamma.d() * (params.p1.reciprocal() - params.p2.reciprocal());
  return params.s1 - params.s2 > gap && gap > 0;
}

}  // namespace snumlab
