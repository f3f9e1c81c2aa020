/* snumlab C API.
 *
 * Exponents and rationals cross the boundary as text ("4/3", "0.25", "inf")
 * and are parsed exactly. Every call returns an snl_status; on failure
 * snl_last_error() describes it (thread-local, valid until the next call on
 * the same thread). */
#ifndef SNUMLAB_H
#define SNUMLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(SNUMLAB_BUILDING_LIBRARY)
#define SNL_API __attribute__((visibility("default")))
#else
#define SNL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum snl_status {
  SNL_OK = 0,
  SNL_INVALID_ARGUMENT = 1,
  SNL_PRECONDITION = 2,
  SNL_UNSUPPORTED_BOUNDARY = 3,
  SNL_UNSUPPORTED_ENDPOINT = 4,
  SNL_OUT_OF_RANGE = 5,
  SNL_CAPACITY = 6,
  SNL_CONFIG = 7,
  SNL_IO = 8,
  SNL_DEGENERATE = 9,
  SNL_INTERNAL = 99
} snl_status;

/* Reliability of a finite-identity value. */
typedef enum snl_bound_status {
  SNL_BOUND_EXACT = 0,
  SNL_BOUND_UPPER = 1,
  SNL_BOUND_UPPER_WITH_C1 = 2,
  SNL_BOUND_EQUIVALENT_RANGE = 3,
  SNL_BOUND_UP_TO_CONSTANT = 4
} snl_bound_status;

SNL_API const char* snl_version(void);
SNL_API const char* snl_last_error(void);
SNL_API const char* snl_status_name(snl_status status);

typedef struct snl_embedding_params {
  const char* s1;
  const char* s2;
  const char* p1;
  const char* p2;
  const char* q1;
  const char* q2;
} snl_embedding_params;

#define SNL_TEXT_MAX 64

typedef struct snl_rate_law {
  double alpha_out;
  double beta_out;
  char alpha_text[SNL_TEXT_MAX];
  char beta_text[SNL_TEXT_MAX];
  char regime; /* 'A', 'B', 'C' or 'D' */
} snl_rate_law;

typedef struct snl_rate_fit {
  double alpha_hat;
  double beta_hat;
  double r2;
  size_t samples;
  int low_confidence;
} snl_rate_fit;

typedef struct snl_nuclearity_witness {
  int verdict;
  double smoothness_per_dim;
  double gap;
  double inv_gamma1;
} snl_nuclearity_witness;

typedef struct snl_run_summary {
  size_t points;
  size_t failures;
  int exit_code;
} snl_run_summary;

/* ---- core parameters ---- */
SNL_API snl_status snl_is_compact_embedding(const int* gamma, size_t m, const snl_embedding_params* params,
                                            int* compact);

/* ---- weight lattice ---- */
typedef struct snl_weight_table snl_weight_table;

SNL_API snl_status snl_cube_weight(const int* gamma, size_t m, int nu, const int64_t* k, double* weight);
SNL_API snl_status snl_weight_table_build(const int* gamma, size_t m, int64_t box_radius,
                                          snl_weight_table** table);
SNL_API void snl_weight_table_free(snl_weight_table* table);
SNL_API size_t snl_weight_table_size(const snl_weight_table* table);
SNL_API size_t snl_weight_table_reliable_count(const snl_weight_table* table);
SNL_API snl_status snl_weight_table_point(const snl_weight_table* table, size_t rank, int64_t* k);
SNL_API snl_status snl_weight_table_weight(const snl_weight_table* table, size_t rank, double* weight);
SNL_API snl_status snl_weight_table_rank_of(const snl_weight_table* table, const int64_t* k, size_t* rank);
SNL_API snl_status snl_weight_table_counting_profile(const snl_weight_table* table, const double* thresholds,
                                                     size_t n, uint64_t* counts);
SNL_API snl_status snl_weight_table_write_csv(const snl_weight_table* table, const char* path);
SNL_API snl_status snl_count_weight_level_set(const int* gamma, size_t m, double threshold, uint64_t* count);

/* ---- diagonal operators ---- */
SNL_API snl_status snl_finite_id(const char* p1, const char* p2, uint64_t n, uint64_t k, double* value,
                                 snl_bound_status* status);
SNL_API snl_status snl_diag_same_p(const char* alpha, const char* beta, uint64_t k, double* value);
SNL_API snl_status snl_block_split_upper(const char* alpha, const char* beta, const char* p1, const char* p2,
                                         uint64_t k, double* bound);
SNL_API snl_status snl_block_split_profile(const char* alpha, const char* beta, const char* p1, const char* p2,
                                           const uint64_t* ks, size_t n, double* bounds);
SNL_API snl_status snl_section_lower_bound(const char* alpha, const char* beta, const char* p1, const char* p2,
                                           uint64_t k, double* value, double* section_dim);
SNL_API snl_status snl_rate_envelope_diag(const char* alpha, const char* beta, const char* p1, const char* p2,
                                          snl_rate_law* law);

/* ---- rates and nuclearity ---- */
SNL_API snl_status snl_embedding_rate(const int* gamma, size_t m, const snl_embedding_params* params,
                                      snl_rate_law* law);
/* 1/t(r1, r2); 0 means t = inf. */
SNL_API snl_status snl_tong_inv_exponent(const char* r1, const char* r2, double* inv_t);
SNL_API snl_status snl_tong_nuclear_norm(const double* tau, size_t n, const char* r1, const char* r2,
                                         double* norm);
/* columns is column-major: column i occupies columns[i*rows .. i*rows+rows-1]. */
SNL_API snl_status snl_linfty_source_nuclear_norm(const double* columns, size_t rows, size_t cols,
                                                  const char* r2, double* norm);
SNL_API snl_status snl_is_nuclear_embedding(const int* gamma, size_t m, const snl_embedding_params* params,
                                            snl_nuclearity_witness* witness);
/* partial_sums may be NULL; otherwise it receives `terms` values. */
SNL_API snl_status snl_nuclearity_series(const int* gamma, size_t m, const char* p1, const char* p2,
                                         uint64_t terms, double* partial_sums, int* convergent, int* boundary);

/* ---- reporting ---- */
SNL_API snl_status snl_fit_rate_law(const double* k, const double* values, size_t n, snl_rate_fit* fit);
/* command: rates, diag, lattice, nuclear or equiv; format: csv, json or all. */
SNL_API snl_status snl_run_command(const char* command, const char* config_path, const char* out_dir,
                                   uint64_t seed, const char* format, snl_run_summary* summary);

#ifdef __cplusplus
}
#endif

#endif /* SNUMLAB_H */
