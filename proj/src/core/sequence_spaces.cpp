#include "snumlab/sequence_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "snumlab/error.hpp"

namespace snumlab {

LevelSequence LevelSequence::scaled(double c) const {
  LevelSequence out = *this;
  for (auto& e : out.entries) e.value *= c;
  return out;
}

bool LevelSequence::is_zero() const {
  return std::all_of(entries.begin(), entries.end(), [](const LevelEntry& e) { return e.value == 0; });
}

double layered_norm(const LevelSequence& lambda, double sigma, const Exponent& p, const Exponent& q,
                    const LayerWeight& weight) {
  const bool p_inf = p.is_infinite(), q_inf = q.is_infinite();
  const double pd = p_inf ? 0 : p.to_double();
  const double qd = q_inf ? 0 : q.to_double();

  std::map<int, double> inner;  // level -> sum |lambda|^p w  (or sup |lambda| when p = inf)
  for (const auto& e : lambda.entries) {
    require(e.level >= 0, ErrorCode::invalid_argument, "levels must be >= 0");
    const double w = weight(e.level, e.key);
    require(w > 0 && std::isfinite(w), ErrorCode::invalid_argument,
            "no positive weight for a support point at level " + std::to_string(e.level));
    double& acc = inner[e.level];
    const double a = std::abs(e.value);
    if (p_inf) acc = std::max(acc, a);
    else acc += std::pow(a, pd) * w;
  }

  double outer = 0;
  for (const auto& [level, acc] : inner) {
    const double layer = std::exp2(level * sigma) * (p_inf ? acc : std::pow(acc, 1.0 / pd));
    if (q_inf) outer = std::max(outer, layer);
    else outer += std::pow(layer, qd);
  }
  return q_inf ? outer : std::pow(outer, 1.0 / qd);
}

double besov_seq_norm(const LevelSequence& lambda, double sigma, const Exponent& p, const Exponent& q,
                      const BlockIndex& gamma) {
  const int m = gamma.m();
  return layered_norm(lambda, sigma, p, q, [&](int level, const LatticePoint& k) {
    require(static_cast<int>(k.size()) == m, ErrorCode::invalid_argument, "key dimension differs from m");
    return std::exp2(m * level) * cube_weight(gamma, level, k);
  });
}

ReindexRatio reindex_equivalence_ratio(const LevelSequence& lambda, const EmbeddingParams& params,
                                       const BlockIndex& gamma, const CubeWeightTable& table) {
  params.validate();
  require(!params.p2.is_infinite(), ErrorCode::invalid_argument, "reindexing needs p2 < inf");
  require(!lambda.is_zero(), ErrorCode::invalid_argument, "lambda must be nonzero");
  require(table.gamma().gammas() == gamma.gammas(), ErrorCode::invalid_argument,
          "table built for a different block index");

  const std::size_t reliable = table.reliable_count();
  for (const auto& e : lambda.entries) {
    require(table.contains(e.key) && table.rank_of(e.key) < reliable, ErrorCode::out_of_range,
            "support point outside the table's reliable range");
  }

  const DerivedExponents ex = derive_exponents(params, gamma);
  const WeightSequenceParams ws = WeightSequenceParams::make(gamma, params.p1, params.p2);
  // 1 - p2/p1; p1 = inf gives 1
  const double w_power = params.p1.is_infinite() ? 1.0 : to_double(1 - params.p2.value() / params.p1.value());

  ReindexRatio r;
  r.lattice_norm = layered_norm(lambda, to_double(params.s2 - params.s1), params.p2, params.q2,
                                [&](int level, const LatticePoint& k) {
                                  return std::pow(cube_weight(gamma, level, k), w_power);
                                });
  LevelSequence flat;
  flat.entries.reserve(lambda.entries.size());
  for (const auto& e : lambda.entries)
    flat.add(e.level, {static_cast<std::int64_t>(table.rank_of(e.key))}, e.value);
  r.reindexed_norm = layered_norm(flat, -to_double(ex.delta), params.p2, params.q2,
                                  [&](int, const LatticePoint& l) {
                                    return wtilde(ws, static_cast<std::uint64_t>(l.front()));
                                  });
  r.ratio = r.lattice_norm / r.reindexed_norm;
  return r;
}

std::vector<LevelSequence> random_level_sequences(const CubeWeightTable& table, std::size_t count,
                                                  int max_level, int max_entries, std::uint64_t seed) {
  require(max_level >= 0 && max_entries >= 1, ErrorCode::invalid_argument, "bad sampling limits");
  const std::size_t reliable = table.reliable_count();
  require(reliable >= 1, ErrorCode::out_of_range, "table has no reliable ranks");
  std::mt19937_64 rng(seed);
  // Fixed bit-level mappings keep the stream identical across standard libraries.
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto below = [&](std::uint64_t n) { return static_cast<std::uint64_t>(unit() * static_cast<double>(n)); };
  const double log_r = std::log(static_cast<double>(reliable));

  std::vector<LevelSequence> out(count);
  for (auto& seq : out) {
    const int entries = 1 + static_cast<int>(below(static_cast<std::uint64_t>(max_entries)));
    for (int i = 0; i < entries; ++i) {
      const int level = static_cast<int>(below(static_cast<std::uint64_t>(max_level) + 1));
      const auto rank = std::min<std::size_t>(reliable - 1, static_cast<std::size_t>(std::exp(unit() * log_r)) - 1);
      const double mag = 0.1 + 0.9 * unit();
      seq.add(level, table.point(rank), (rng() & 1) ? mag : -mag);
    }
  }
  return out;
}

}  // namespace snumlab
