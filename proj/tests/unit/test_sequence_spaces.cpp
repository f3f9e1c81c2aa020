#include <doctest.h>

#include <cmath>

#include "snumlab/error.hpp"
#include "snumlab/sequence_spaces.hpp"

using namespace snumlab;

namespace {

const BlockIndex g22 = BlockIndex::make({2, 2});
const Exponent two = Exponent::finite(2);
const Exponent inf = Exponent::infinity();

LayerWeight unit_weight() {
  return [](int, const LatticePoint&) { return 1.0; };
}

EmbeddingParams acceptance_params() {
  EmbeddingParams p;
  p.s1 = 3;
  p.s2 = 0;
  p.p1 = Exponent::parse("4/3");
  p.p2 = Exponent::finite(4);
  p.q1 = p.q2 = two;
  return p;
}

}  // namespace

TEST_CASE("besov sequence norm") {
  LevelSequence l;
  l.add(0, {0, 0}, 1);
  CHECK(besov_seq_norm(l, 0.7, two, two, g22) == doctest::Approx(0.25));
  CHECK(besov_seq_norm(LevelSequence{}, 1, two, two, g22) == 0);
  l.add(1, {3, -1}, -0.5);
  l.add(2, {1, 1}, 2);
  const double n = besov_seq_norm(l, 1.5, Exponent::parse("3/2"), Exponent::finite(3), g22);
  CHECK(besov_seq_norm(l.scaled(-3), 1.5, Exponent::parse("3/2"), Exponent::finite(3), g22) ==
        doctest::Approx(3 * n));
}

TEST_CASE("layered norm") {
  LevelSequence one;
  one.add(0, {5}, -0.75);
  CHECK(layered_norm(one, 0, two, two, unit_weight()) == doctest::Approx(0.75));
  LevelSequence two_levels;
  two_levels.add(0, {0}, 1);
  two_levels.add(1, {0}, 1);
  CHECK(layered_norm(two_levels, 1, two, two, unit_weight()) == doctest::Approx(std::sqrt(5.0)));
  CHECK(layered_norm(two_levels, 1, two, inf, unit_weight()) == doctest::Approx(2));
  CHECK(layered_norm(two_levels, 0, inf, Exponent::finite(1), unit_weight()) == doctest::Approx(2));
  const LayerWeight bad = [](int, const LatticePoint&) { return 0.0; };
  CHECK_THROWS_AS(layered_norm(two_levels, 0, two, two, bad), Error);
}

TEST_CASE("reindex ratio") {
  const CubeWeightTable table = CubeWeightTable::build(g22, 16);
  const EmbeddingParams p = acceptance_params();
  SUBCASE("single entry at rank 0") {
    LevelSequence l;
    l.add(0, {0, 0}, 1);
    const auto r = reindex_equivalence_ratio(l, p, g22, table);
    // w(Q_00)^((1 - p2/p1)/p2) with w~_0 = 1.
    const double expected = std::pow(1.0 / 16, (1 - 4 / (4.0 / 3)) / 4);
    CHECK(r.ratio == doctest::Approx(expected));
  }
  SUBCASE("homogeneous") {
    LevelSequence l;
    l.add(0, {1, 0}, 0.5);
    l.add(1, {1, -1}, -1);
    const auto a = reindex_equivalence_ratio(l, p, g22, table);
    const auto b = reindex_equivalence_ratio(l.scaled(7), p, g22, table);
    CHECK(a.ratio == doctest::Approx(b.ratio));
  }
  CHECK_THROWS_AS(reindex_equivalence_ratio(LevelSequence{}, p, g22, table), Error);
  EmbeddingParams pinf = p;
  pinf.p2 = inf;
  LevelSequence l;
  l.add(0, {0, 0}, 1);
  CHECK_THROWS_AS(reindex_equivalence_ratio(l, pinf, g22, table), Error);
  LevelSequence far;
  far.add(0, {16, 16}, 1);
  CHECK_THROWS_AS(reindex_equivalence_ratio(far, p, g22, table), Error);
}

TEST_CASE("random level sequences are seeded") {
  const CubeWeightTable table = CubeWeightTable::build(g22, 16);
  const auto a = random_level_sequences(table, 20, 2, 8, 42);
  const auto b = random_level_sequences(table, 20, 2, 8, 42);
  const auto c = random_level_sequences(table, 20, 2, 8, 43);
  REQUIRE(a.size() == 20);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].entries.size() == b[i].entries.size());
    CHECK_FALSE(a[i].is_zero());
    CHECK(a[i].entries.size() <= 8);
    for (std::size_t j = 0; j < a[i].entries.size(); ++j) {
      const auto& e = a[i].entries[j];
      CHECK(e.value == b[i].entries[j].value);
      CHECK(e.key == b[i].entries[j].key);
      CHECK(std::abs(e.value) >= 0.1);
      CHECK(std::abs(e.value) <= 1);
      CHECK(e.level >= 0);
      CHECK(e.level <= 2);
      CHECK(table.rank_of(e.key) < table.reliable_count());
    }
    differs = differs || a[i].entries.size() != c[i].entries.size() ||
              a[i].entries.front().value != c[i].entries.front().value;
  }
  CHECK(differs);
}
