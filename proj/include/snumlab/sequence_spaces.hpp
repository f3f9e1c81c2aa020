#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "snumlab/core_params.hpp"
#include "snumlab/weight_lattice.hpp"

namespace snumlab {

struct LevelEntry {
  int level = 0;
  LatticePoint key;  // point of Z^m, or a one-element flat index
  double value = 0;
};

/// Finitely supported coefficients lambda_{nu,key}. Absent entries are zero;
/// duplicate (level, key) pairs are not merged.
struct LevelSequence {
  std::vector<LevelEntry> entries;

  void add(int level, LatticePoint key, double value) { entries.push_back({level, std::move(key), value}); }
  LevelSequence scaled(double c) const;
  bool is_zero() const;
};

/// ( sum_nu 2^(nu sigma q) ( sum_k |lambda_{nu,k}|^p 2^(m nu) w_gamma(Q_{nu,k}) )^(q/p) )^(1/q)
double besov_seq_norm(const LevelSequence& lambda, double sigma, const Exponent& p, const Exponent& q,
                      const BlockIndex& gamma);

/// Weight of entry (nu, key); return a value <= 0 or NaN to signal "undefined".
using LayerWeight = std::function<double(int level, const LatticePoint& key)>;

/// ( sum_nu 2^(nu sigma q) ( sum_l |lambda_{nu,l}|^p w_{nu,l} )^(q/p) )^(1/q).
/// Throws invalid_argument when a support point has no positive weight.
double layered_norm(const LevelSequence& lambda, double sigma, const Exponent& p, const Exponent& q,
                    const LayerWeight& weight);

struct ReindexRatio {
  double lattice_norm = 0;    // l_q2(2^(nu (s2 - s1)) l_p2(Z^m, w_gamma(Q)^(1 - p2/p1)))
  double reindexed_norm = 0;  // l_q2(2^(-nu delta) l_p2(N_0, w~)) with l = tau(k)
  double ratio = 0;
};

/// Compares the lattice-indexed target norm with its flattened form. Requires
/// p2 < inf, a nonzero lambda, and every key inside the table's reliable range.
ReindexRatio reindex_equivalence_ratio(const LevelSequence& lambda, const EmbeddingParams& params,
                                       const BlockIndex& gamma, const CubeWeightTable& table);

/// count seeded random sequences with 1..max_entries entries each, levels
/// uniform in 0..max_level, keys log-uniform over the table's reliable ranks
/// and values of modulus in [0.1, 1] with random sign.
std::vector<LevelSequence> random_level_sequences(const CubeWeightTable& table, std::size_t count,
                                                  int max_level, int max_entries, std::uint64_t seed);

}  // namespace snumlab
