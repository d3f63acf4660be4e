#ifndef RIS_IM_H
#define RIS_IM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#define RIS_SCHEME_SSK 0

#define RIS_SCHEME_SM 1

#define RIS_DETECTOR_GREEDY 0

#define RIS_DETECTOR_ML 1

#define RIS_MODULATION_PSK 0

#define RIS_MODULATION_QAM 1

#define RIS_MODE_EXACT 0

#define RIS_MODE_UPPER_BOUND 1

typedef enum RisStatus {
  RIS_STATUS_OK = 0,
  RIS_STATUS_NULL_POINTER = 1,
  RIS_STATUS_INVALID_ARGUMENT = 2,
  RIS_STATUS_NUMERIC = 3,
  RIS_STATUS_BUFFER_TOO_SMALL = 4,
  RIS_STATUS_PANIC = 5,
} RisStatus;

/**
 * Opaque constellation handle.
 */
typedef struct RisConstellation RisConstellation;

/**
 * Opaque simulation plan handle.
 */
typedef struct RisSimPlan RisSimPlan;

/**
 * BER estimate at one SNR point.
 */
typedef struct RisBerRecord {
  double snr_db;
  uint64_t bits_sent;
  uint64_t bit_errors;
  double ber;
  double ci_lo;
  double ci_hi;
  double wall_seconds;
  /**
   * Nonzero when the bit budget ran out before the error target.
   */
  uint8_t truncated;
} RisBerRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ris_version(void);

/**
 * Message of the last failed call on this thread, empty after a success.
 * Valid until the next call into the library from the same thread.
 */
const char *ris_last_error_message(void);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum RisStatus ris_constellation_new(uint32_t modulation,
                                     uint32_t order,
                                     double es,
                                     struct RisConstellation **out);

/**
 * # Safety
 * `c` must be null or a handle from [`ris_constellation_new`] not yet freed.
 */
void ris_constellation_free(struct RisConstellation *c);

/**
 * # Safety
 * `c` must be a live handle, `order` writable.
 */
enum RisStatus ris_constellation_order(const struct RisConstellation *c, uint32_t *order);

/**
 * Point carrying bit label `label`.
 *
 * # Safety
 * `c` must be a live handle, `re` and `im` writable.
 */
enum RisStatus ris_constellation_point(const struct RisConstellation *c,
                                       uint32_t label,
                                       double *re,
                                       double *im);

/**
 * Creates a simulation plan. `constellation` is required for SM and must
 * be null for SSK; it is copied, so the caller keeps ownership.
 *
 * # Safety
 * `grid` must point to `grid_len` readable doubles, `constellation` must
 * be null or live, `out` writable.
 */
enum RisStatus ris_sim_plan_new(uint32_t scheme_id,
                                uint32_t detector_id,
                                uint32_t n_ref,
                                uint32_t n_rx,
                                const struct RisConstellation *constellation,
                                const double *grid,
                                uintptr_t grid_len,
                                uint64_t seed,
                                uint64_t min_bit_errors,
                                uint64_t max_bits,
                                struct RisSimPlan **out);

/**
 * Sets the von Mises phase-error concentration; a negative value restores
 * perfect phases.
 *
 * # Safety
 * `plan` must be a live handle.
 */
enum RisStatus ris_sim_plan_set_kappa(struct RisSimPlan *plan, double kappa);

/**
 * # Safety
 * `plan` must be null or a handle from [`ris_sim_plan_new`] not yet freed.
 */
void ris_sim_plan_free(struct RisSimPlan *plan);

/**
 * Simulates one SNR point with `workers` threads (0 picks the default).
 *
 * # Safety
 * `plan` must be live, `out` writable.
 */
enum RisStatus ris_sim_run_point(const struct RisSimPlan *plan,
                                 double snr_db,
                                 uint32_t workers,
                                 struct RisBerRecord *out);

/**
 * Simulates the whole grid into `out[0..capacity]`; `written` receives the
 * number of records. Fails with `BufferTooSmall` before simulating when
 * the grid does not fit.
 *
 * # Safety
 * `plan` must be live, `out` must hold `capacity` records, `written` writable.
 */
enum RisStatus ris_sim_run_sweep(const struct RisSimPlan *plan,
                                 uint32_t workers,
                                 struct RisBerRecord *out,
                                 uintptr_t capacity,
                                 uintptr_t *written);

/**
 * Analytical BEP at one SNR. `constellation` is required for SM and
 * ignored for SSK; `mode` only affects greedy SSK.
 *
 * # Safety
 * `constellation` must be null or live, `bep` writable.
 */
enum RisStatus ris_theory_bep(uint32_t scheme_id,
                              uint32_t detector_id,
                              uint32_t n_ref,
                              uint32_t n_rx,
                              const struct RisConstellation *constellation,
                              double snr_db,
                              uint32_t mode_id,
                              double *bep);

/**
 * Greedy RIS-SSK pairwise error probability at `es_n0` (linear).
 *
 * # Safety
 * `pep` must be writable.
 */
enum RisStatus ris_pep_ssk_greedy(uint32_t n_ref, double es_n0, uint32_t mode_id, double *pep);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RIS_IM_H */
