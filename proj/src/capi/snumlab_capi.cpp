#include "snumlab/snumlab.h"

#include <cstring>
#include <fstream>
#include <string>

#include "snumlab/diagonal_ops.hpp"
#include "snumlab/error.hpp"
#include "snumlab/rate_fit.hpp"
#include "snumlab/rates_nuclearity.hpp"
#include "snumlab/report.hpp"
#include "snumlab/weight_lattice.hpp"

struct snl_weight_table {
  snumlab::CubeWeightTable table;
};

namespace {

using namespace snumlab;

thread_local std::string g_last_error;

template <class F>
snl_status guarded(F body) {
  try {
    g_last_error.clear();
    body();
    return SNL_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<snl_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SNL_CAPACITY;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SNL_INTERNAL;
  }
}

template <class T>
void need(const T* p, const char* what) {
  require(p != nullptr, ErrorCode::invalid_argument, std::string(what) + " must not be null");
}

std::string text(const char* s, const char* what) {
  need(s, what);
  return s;
}

BlockIndex block_index(const int* gamma, std::size_t m) {
  need(gamma, "gamma");
  return BlockIndex::make(std::vector<int>(gamma, gamma + m));
}

EmbeddingParams embedding(const snl_embedding_params* p) {
  need(p, "params");
  EmbeddingParams e{parse_rational(text(p->s1, "s1")),     parse_rational(text(p->s2, "s2")),
                    Exponent::parse(text(p->p1, "p1")),    Exponent::parse(text(p->p2, "p2")),
                    Exponent::parse(text(p->q1, "q1")),    Exponent::parse(text(p->q2, "q2"))};
  e.validate();
  return e;
}

DecaySequence decay(const char* alpha, const char* beta) {
  return DecaySequence::make(parse_rational(text(alpha, "alpha")), parse_rational(text(beta, "beta")));
}

Exponent exponent(const char* s, const char* what) { return Exponent::parse(text(s, what)); }

void copy_text(char* dst, const std::string& src) {
  require(src.size() < SNL_TEXT_MAX, ErrorCode::capacity, "rational too long for the text buffer: " + src);
  std::memcpy(dst, src.c_str(), src.size() + 1);
}

void fill_law(snl_rate_law* out, const RateLaw& law) {
  need(out, "law");
  out->alpha_out = to_double(law.alpha_out);
  out->beta_out = to_double(law.beta_out);
  copy_text(out->alpha_text, law.alpha_out.str());
  copy_text(out->beta_text, law.beta_out.str());
  out->regime = to_string(law.regime).front();
}

}  // namespace

extern "C" {

const char* snl_version(void) { return "1.0.0"; }

const char* snl_last_error(void) { return g_last_error.c_str(); }

const char* snl_status_name(snl_status status) {
  switch (status) {
    case SNL_OK: return "ok";
    case SNL_INVALID_ARGUMENT: return "invalid-argument";
    case SNL_PRECONDITION: return "precondition";
    case SNL_UNSUPPORTED_BOUNDARY: return "unsupported-boundary";
    case SNL_UNSUPPORTED_ENDPOINT: return "unsupported-endpoint";
    case SNL_OUT_OF_RANGE: return "out-of-range";
    case SNL_CAPACITY: return "capacity";
    case SNL_CONFIG: return "config";
    case SNL_IO: return "io";
    case SNL_DEGENERATE: return "degenerate";
    case SNL_INTERNAL: return "internal";
  }
  return "unknown";
}

snl_status snl_is_compact_embedding(const int* gamma, size_t m, const snl_embedding_params* params, int* compact) {
  return guarded([&] {
    need(compact, "compact");
    *compact = is_compact_embedding(embedding(params), block_index(gamma, m)) ? 1 : 0;
  });
}

snl_status snl_cube_weight(const int* gamma, size_t m, int nu, const int64_t* k, double* weight) {
  return guarded([&] {
    need(k, "k");
    need(weight, "weight");
    *weight = cube_weight(block_index(gamma, m), nu, std::span<const std::int64_t>(k, m));
  });
}

snl_status snl_weight_table_build(const int* gamma, size_t m, int64_t box_radius, snl_weight_table** table) {
  return guarded([&] {
    need(table, "table");
    *table = nullptr;
    *table = new snl_weight_table{CubeWeightTable::build(block_index(gamma, m), box_radius)};
  });
}

void snl_weight_table_free(snl_weight_table* table) { delete table; }

size_t snl_weight_table_size(const snl_weight_table* table) { return table ? table->table.size() : 0; }

size_t snl_weight_table_reliable_count(const snl_weight_table* table) {
  return table ? table->table.reliable_count() : 0;
}

snl_status snl_weight_table_point(const snl_weight_table* table, size_t rank, int64_t* k) {
  return guarded([&] {
    need(table, "table");
    need(k, "k");
    require(rank < table->table.size(), ErrorCode::out_of_range, "rank beyond table size");
    const LatticePoint p = table->table.point(rank);
    std::copy(p.begin(), p.end(), k);
  });
}

snl_status snl_weight_table_weight(const snl_weight_table* table, size_t rank, double* weight) {
  return guarded([&] {
    need(table, "table");
    need(weight, "weight");
    require(rank < table->table.size(), ErrorCode::out_of_range, "rank beyond table size");
    *weight = table->table.weight(rank);
  });
}

snl_status snl_weight_table_rank_of(const snl_weight_table* table, const int64_t* k, size_t* rank) {
  return guarded([&] {
    need(table, "table");
    need(k, "k");
    need(rank, "rank");
    *rank = table->table.rank_of(std::span<const std::int64_t>(k, table->table.gamma().gammas().size()));
  });
}

snl_status snl_weight_table_counting_profile(const snl_weight_table* table, const double* thresholds, size_t n,
                                             uint64_t* counts) {
  return guarded([&] {
    need(table, "table");
    if (n == 0) return;
    need(thresholds, "thresholds");
    need(counts, "counts");
    const auto c = counting_profile(table->table, std::span<const double>(thresholds, n));
    std::copy(c.begin(), c.end(), counts);
  });
}

snl_status snl_weight_table_write_csv(const snl_weight_table* table, const char* path) {
  return guarded([&] {
    need(table, "table");
    std::ofstream os(text(path, "path"), std::ios::binary);
    require(static_cast<bool>(os), ErrorCode::io, std::string("cannot write ") + path);
    table->table.write_csv(os);
  });
}

snl_status snl_count_weight_level_set(const int* gamma, size_t m, double threshold, uint64_t* count) {
  return guarded([&] {
    need(count, "count");
    *count = count_weight_level_set(block_index(gamma, m), threshold);
  });
}

snl_status snl_finite_id(const char* p1, const char* p2, uint64_t n, uint64_t k, double* value,
                         snl_bound_status* status) {
  return guarded([&] {
    need(value, "value");
    const FiniteIdResult r = approx_finite_id(exponent(p1, "p1"), exponent(p2, "p2"), n, k);
    *value = r.value;
    if (status) *status = static_cast<snl_bound_status>(static_cast<int>(r.status));
  });
}

snl_status snl_diag_same_p(const char* alpha, const char* beta, uint64_t k, double* value) {
  return guarded([&] {
    need(value, "value");
    *value = approx_diag_same_p(decay(alpha, beta), k);
  });
}

snl_status snl_block_split_upper(const char* alpha, const char* beta, const char* p1, const char* p2, uint64_t k,
                                 double* bound) {
  return guarded([&] {
    need(bound, "bound");
    *bound = block_split_upper(decay(alpha, beta), exponent(p1, "p1"), exponent(p2, "p2"), k).bound;
  });
}

snl_status snl_block_split_profile(const char* alpha, const char* beta, const char* p1, const char* p2,
                                   const uint64_t* ks, size_t n, double* bounds) {
  return guarded([&] {
    if (n == 0) return;
    need(ks, "ks");
    need(bounds, "bounds");
    const auto v = block_split_profile(decay(alpha, beta), exponent(p1, "p1"), exponent(p2, "p2"),
                                       std::span<const std::uint64_t>(ks, n));
    std::copy(v.begin(), v.end(), bounds);
  });
}

snl_status snl_section_lower_bound(const char* alpha, const char* beta, const char* p1, const char* p2, uint64_t k,
                                   double* value, double* section_dim) {
  return guarded([&] {
    need(value, "value");
    const auto r = section_lower_bound(decay(alpha, beta), exponent(p1, "p1"), exponent(p2, "p2"), k);
    *value = r.value;
    if (section_dim) *section_dim = r.section_dim;
  });
}

snl_status snl_rate_envelope_diag(const char* alpha, const char* beta, const char* p1, const char* p2,
                                  snl_rate_law* law) {
  return guarded([&] {
    fill_law(law, rate_envelope_diag(parse_rational(text(alpha, "alpha")), parse_rational(text(beta, "beta")),
                                     exponent(p1, "p1"), exponent(p2, "p2")));
  });
}

snl_status snl_embedding_rate(const int* gamma, size_t m, const snl_embedding_params* params, snl_rate_law* law) {
  return guarded([&] { fill_law(law, embedding_rate(block_index(gamma, m), embedding(params))); });
}

snl_status snl_tong_inv_exponent(const char* r1, const char* r2, double* inv_t) {
  return guarded([&] {
    need(inv_t, "inv_t");
    *inv_t = to_double(tong_exponent(exponent(r1, "r1"), exponent(r2, "r2")).reciprocal());
  });
}

snl_status snl_tong_nuclear_norm(const double* tau, size_t n, const char* r1, const char* r2, double* norm) {
  return guarded([&] {
    need(norm, "norm");
    if (n) need(tau, "tau");
    *norm = tong_nuclear_norm(std::span<const double>(tau, n), exponent(r1, "r1"), exponent(r2, "r2"));
  });
}

snl_status snl_linfty_source_nuclear_norm(const double* columns, size_t rows, size_t cols, const char* r2,
                                          double* norm) {
  return guarded([&] {
    need(norm, "norm");
    if (rows * cols) need(columns, "columns");
    std::vector<std::vector<double>> c(cols);
    for (size_t i = 0; i < cols; ++i) c[i].assign(columns + i * rows, columns + (i + 1) * rows);
    *norm = linfty_source_nuclear_norm(c, exponent(r2, "r2"));
  });
}

snl_status snl_is_nuclear_embedding(const int* gamma, size_t m, const snl_embedding_params* params,
                                    snl_nuclearity_witness* witness) {
  return guarded([&] {
    need(witness, "witness");
    const NuclearityWitness w = is_nuclear_embedding(block_index(gamma, m), embedding(params));
    witness->verdict = w.verdict ? 1 : 0;
    witness->smoothness_per_dim = to_double(w.smoothness_per_dim);
    witness->gap = to_double(w.gap);
    witness->inv_gamma1 = to_double(w.inv_gamma1);
  });
}

snl_status snl_nuclearity_series(const int* gamma, size_t m, const char* p1, const char* p2, uint64_t terms,
                                 double* partial_sums, int* convergent, int* boundary) {
  return guarded([&] {
    const SeriesDiagnostic d =
        nuclearity_series_diagnostic(block_index(gamma, m), exponent(p1, "p1"), exponent(p2, "p2"), terms);
    if (partial_sums) std::copy(d.partial_sums.begin(), d.partial_sums.end(), partial_sums);
    if (convergent) *convergent = d.verdict == SeriesVerdict::convergent ? 1 : 0;
    if (boundary) *boundary = d.boundary ? 1 : 0;
  });
}

snl_status snl_fit_rate_law(const double* k, const double* values, size_t n, snl_rate_fit* fit) {
  return guarded([&] {
    need(fit, "fit");
    if (n) {
      need(k, "k");
      need(values, "values");
    }
    std::vector<RateSample> s(n);
    for (size_t i = 0; i < n; ++i) s[i] = {k[i], values[i]};
    const RateFit f = fit_rate_law(s);
    fit->alpha_hat = f.alpha_hat;
    fit->beta_hat = f.beta_hat;
    fit->r2 = f.r2;
    fit->samples = f.samples;
    fit->low_confidence = f.low_confidence ? 1 : 0;
  });
}

snl_status snl_run_command(const char* command, const char* config_path, const char* out_dir, uint64_t seed,
                           const char* format, snl_run_summary* summary) {
  return guarded([&] {
    const SweepConfig cfg = load_config(text(config_path, "config_path"));
    const RunSummary s = run_command(text(command, "command"), cfg, text(out_dir, "out_dir"), seed,
                                     parse_format(format ? format : "all"));
    if (summary) {
      summary->points = s.points;
      summary->failures = s.failures;
      summary->exit_code = s.exit_code;
    }
  });
}

}  // extern "C"
