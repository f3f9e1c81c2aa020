#include <doctest.h>

#include <cmath>
#include <vector>

#include "snumlab/diagonal_ops.hpp"
#include "snumlab/error.hpp"

using namespace snumlab;

namespace {

Exponent E(const char* s) { return Exponent::parse(s); }
DecaySequence seq(const char* a, const char* b = "0") { return DecaySequence::make(parse_rational(a), parse_rational(b)); }

}  // namespace

TEST_CASE("decay sequence") {
  CHECK(seq("1")(8) == doctest::Approx(1.0 / 8));
  CHECK(seq("1", "1")(1) == 1);
  CHECK(seq("1", "1")(8) == doctest::Approx(3.0 / 8));
  const DecaySequence s = seq("1/4", "2");
  for (double k = 1; k < 5000; k += 1) CHECK(s(k + 1) <= s(k));
  CHECK_THROWS_AS(seq("0"), Error);
  CHECK_THROWS_AS(seq("1", "-1"), Error);
}

TEST_CASE("finite identity") {
  SUBCASE("exact p2 < p1") {
    for (std::uint64_t k = 1; k <= 8; ++k) {
      const auto r = approx_finite_id(E("inf"), E("1"), 8, k);
      CHECK(r.value == static_cast<double>(9 - k));
      CHECK(r.status == BoundStatus::exact);
    }
    CHECK(approx_finite_id(E("inf"), E("1"), 8, 9).value == 0);
  }
  SUBCASE("same p") {
    CHECK(approx_finite_id(E("3"), E("3"), 10, 4).value == 1);
    CHECK(approx_finite_id(E("3"), E("3"), 10, 4).status == BoundStatus::exact);
  }
  SUBCASE("cross case (ii) branch") {
    const auto r = approx_finite_id(E("4/3"), E("4"), 256, 100);
    CHECK(r.value == doctest::Approx(0.4));
    CHECK(r.status != BoundStatus::exact);
    CHECK(approx_finite_id(E("4/3"), E("4"), 256, 8).value == 1);
  }
  CHECK_THROWS_AS(approx_finite_id(E("2"), E("2"), 4, 0), Error);
}

TEST_CASE("same-p diagonal") {
  CHECK(approx_diag_same_p(seq("1"), 5) == doctest::Approx(0.2));
  CHECK(approx_diag_same_p(seq("1/2", "3"), 1) == 1);
  const std::vector<double> v{0.3, -2, 1, 0.5};
  CHECK(approx_diag_same_p(v, 1) == 2);
  CHECK(approx_diag_same_p(v, 2) == 1);
  CHECK(approx_diag_same_p(v, 4) == 0.3);
  CHECK(approx_diag_same_p(v, 5) == 0);
}

TEST_CASE("block split upper bound") {
  SUBCASE("rank one is the norm") {
    const auto r = block_split_upper(seq("1/2"), E("4/3"), E("4"), 1);
    CHECK(r.bound == 1);
    CHECK(r.method == "norm");
  }
  SUBCASE("Hilbert case within factor 4") {
    const auto r = block_split_upper(seq("1"), E("2"), E("2"), 64);
    CHECK(r.bound >= 1.0 / 64);
    CHECK(r.bound <= 4.0 / 64);
  }
  SUBCASE("allocation bookkeeping") {
    const auto r = block_split_upper(seq("1/2"), E("4/3"), E("4"), 300);
    std::uint64_t used = 1;
    for (auto k : r.allocation.ranks) used += k - 1;
    CHECK(used == r.allocation.rank_used);
    CHECK(r.allocation.rank_used <= 300);
    CHECK(r.status == BoundStatus::upper_with_c1);
  }
  SUBCASE("dp and greedy agree in order of magnitude") {
    const auto dp = block_split_upper(seq("1/2"), E("4/3"), E("4"), 2000, AllocationMethod::dp);
    const auto gr = block_split_upper(seq("1/2"), E("4/3"), E("4"), 2000, AllocationMethod::greedy);
    CHECK(dp.bound <= gr.bound * (1 + 1e-12));
    CHECK(gr.bound <= 2 * dp.bound);
  }
  SUBCASE("profile matches single evaluations and is nonincreasing") {
    const std::vector<std::uint64_t> ks{4, 16, 64, 256, 1024};
    const auto prof = block_split_profile(seq("1/8"), E("4/3"), E("4"), ks);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      CHECK(prof[i] <= block_split_upper(seq("1/8"), E("4/3"), E("4"), ks[i]).bound * (1 + 1e-12));
      if (i) CHECK(prof[i] <= prof[i - 1]);
    }
  }
  SUBCASE("p2 < p1 uses the tail sum") {
    const auto r = block_split_upper(seq("1"), E("2"), E("1"), 32);
    CHECK(std::isfinite(r.bound));
    CHECK(r.bound > 0);
  }
  CHECK_THROWS_AS(block_split_upper(seq("1/4"), E("2"), E("1"), 8), Error);  // alpha <= 1/p2 - 1/p1
}

TEST_CASE("tail norm") {
  CHECK(diagonal_tail_norm(seq("1"), E("2"), E("2"), 10) == doctest::Approx(0.1));
  // l_2 tail of k^-1 from 1: sqrt(pi^2/6).
  const double l2 = diagonal_tail_norm(seq("1"), E("inf"), E("2"), 1);
  CHECK(l2 >= std::sqrt(M_PI * M_PI / 6));
  CHECK(l2 == doctest::Approx(std::sqrt(M_PI * M_PI / 6)).epsilon(1e-4));
}

TEST_CASE("section lower bound") {
  const auto r = section_lower_bound(seq("1"), E("2"), E("2"), 16, 64);
  CHECK(r.value == doctest::Approx(1.0 / 64));
  CHECK(r.section_dim == 64);
  const auto d = section_lower_bound(seq("1"), E("2"), E("1"), 2, 8);
  CHECK(d.value == doctest::Approx(std::sqrt(7.0) / 8));
  for (std::uint64_t K : {1u, 8u, 100u, 5000u}) {
    const auto l = section_lower_bound(seq("1/2"), E("4/3"), E("4"), K);
    CHECK(l.value <= block_split_upper(seq("1/2"), E("4/3"), E("4"), K).bound);
  }
  CHECK_THROWS_AS(section_lower_bound(seq("1"), E("2"), E("2"), 16, 32), Error);
}

TEST_CASE("rate envelope") {
  const auto b = rate_envelope_diag(Rational(1, 2), 0, E("4/3"), E("4"));
  CHECK(b.alpha_out == Rational(3, 4));
  CHECK(b.regime == Regime::B);
  const auto c = rate_envelope_diag(Rational(1, 8), 0, E("4/3"), E("4"));
  CHECK(c.alpha_out == Rational(1, 4));
  CHECK(c.regime == Regime::C);
  const auto a = rate_envelope_diag(1, 0, E("2"), E("2"));
  CHECK(a.alpha_out == 1);
  CHECK(a.beta_out == 0);
  CHECK(a.regime == Regime::A);
  const auto d = rate_envelope_diag(1, 1, E("2"), E("1"));
  CHECK(d.alpha_out == Rational(1, 2));
  CHECK(d.beta_out == 1);
  CHECK(d.regime == Regime::D);
  CHECK_THROWS_AS(rate_envelope_diag(Rational(1, 4), 0, E("4/3"), E("4")), Error);  // alpha = 1/t
  CHECK_THROWS_AS(rate_envelope_diag(1, 0, E("1"), E("inf")), Error);
}
