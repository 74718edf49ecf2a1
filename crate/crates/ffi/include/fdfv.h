#ifndef FDFV_H
#define FDFV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every call.
typedef enum FdfvStatus {
  FDFV_STATUS_OK = 0,
  // A required pointer argument was null.
  FDFV_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  FDFV_STATUS_INVALID_UTF8 = 2,
  // A name, configuration or index was rejected.
  FDFV_STATUS_INVALID_ARGUMENT = 3,
  // The computation broke down (non-finite or non-physical state).
  FDFV_STATUS_BLOW_UP = 4,
  // A file could not be read or written.
  FDFV_STATUS_IO = 5,
  // An internal error; the message has details.
  FDFV_STATUS_INTERNAL = 6,
} FdfvStatus;

// The final snapshot of a completed run.
typedef struct FdfvRun FdfvRun;

// A catalog stencil.
typedef struct FdfvStencil FdfvStencil;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty if none. The
// pointer stays valid until the next failing call on the same thread.
const char *fdfv_last_error(void);

// Looks up a catalog stencil such as `"3rd-B-biased"`.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a writable pointer.
enum FdfvStatus fdfv_stencil_new(const char *name, struct FdfvStencil **out);

// Releases a stencil; null is ignored.
//
// # Safety
// `s` must come from [`fdfv_stencil_new`] and not be used afterwards.
void fdfv_stencil_free(struct FdfvStencil *s);

// Designed order of accuracy.
//
// # Safety
// `s` must be a live stencil handle and `order` writable.
enum FdfvStatus fdfv_stencil_order(const struct FdfvStencil *s, uint32_t *order);

// `b_0`, the sum of the nodal moments, as a double.
//
// # Safety
// `s` must be a live stencil handle and `b0` writable.
enum FdfvStatus fdfv_stencil_b0(const struct FdfvStencil *s, double *b0);

// Largest stable Courant number of the stencil with Runge-Kutta scheme
// `rk` (`"fe"`, `"rk2"` ... `"rk5"`); 0 when no positive value is stable.
//
// # Safety
// `s` must be a live stencil handle, `rk` a NUL-terminated string and
// `courant` writable.
enum FdfvStatus fdfv_stencil_max_courant(const struct FdfvStencil *s,
                                         const char *rk,
                                         size_t theta_samples,
                                         double tol,
                                         double *courant);

// Runs a problem described by a JSON configuration (the same format the
// command-line tool reads) to its final time.
//
// # Safety
// `config_json` must be a NUL-terminated string and `out` writable.
enum FdfvStatus fdfv_run_json(const char *config_json, struct FdfvRun **out);

// Releases a run; null is ignored.
//
// # Safety
// `r` must come from [`fdfv_run_json`] and not be used afterwards.
void fdfv_run_free(struct FdfvRun *r);

// Number of cell averages, time steps taken, and output columns.
//
// # Safety
// `r` must be a live run handle; each output pointer may be null.
enum FdfvStatus fdfv_run_info(const struct FdfvRun *r,
                              size_t *cells,
                              size_t *steps,
                              size_t *columns);

// Name of output column `index`, owned by the run handle.
//
// # Safety
// `r` must be a live run handle and `name` writable.
enum FdfvStatus fdfv_run_column_name(const struct FdfvRun *r, size_t index, const char **name);

// Copies the cell-center x coordinates and the averages of column
// `index` into caller buffers of `len` entries; `len` must equal the cell
// count. Either buffer may be null.
//
// # Safety
// `r` must be a live run handle; non-null buffers must hold `len` doubles.
enum FdfvStatus fdfv_run_averages(const struct FdfvRun *r,
                                  size_t index,
                                  double *x,
                                  double *values,
                                  size_t len);

// Largest relative change of a conserved total over the run.
//
// # Safety
// `r` must be a live run handle and `drift` writable.
enum FdfvStatus fdfv_run_conservation_drift(const struct FdfvRun *r, double *drift);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FDFV_H */
