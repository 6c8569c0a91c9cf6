#ifndef EOMQ_H
#define EOMQ_H

/* Generated by cbindgen from eomq-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every API call.
typedef enum EomqStatus {
  EOMQ_STATUS_OK = 0,
  EOMQ_STATUS_NULL_POINTER = 1,
  EOMQ_STATUS_INVALID_ARGUMENT = 2,
  EOMQ_STATUS_NUMERIC_FAILURE = 3,
  EOMQ_STATUS_NOT_BISTABLE = 4,
} EomqStatus;

// Opaque parameter handle.
typedef struct EomqParams EomqParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the most recent error message of this thread into `buf`
// (NUL-terminated, truncated to `cap` bytes) and returns the full message
// length in bytes.
uintptr_t eomq_last_error(char *buf, uintptr_t cap);

// Creates a parameter handle with the documented defaults
// (red-sideband double-window demo set).
struct EomqParams *eomq_params_new(void);

// Parses a handle from a JSON object whose keys mirror the parameter names;
// missing keys take the defaults.
enum EomqStatus eomq_params_from_json(const char *json, struct EomqParams **out);

// Releases a parameter handle. Passing NULL is a no-op.
void eomq_params_free(struct EomqParams *p);

// Sets one named parameter (names mirror the JSON keys).
enum EomqStatus eomq_params_set(struct EomqParams *p, const char *name, double value);

// Validates the handle's invariants (positive rates, couplings, inversion
// range).
enum EomqStatus eomq_params_validate(const struct EomqParams *p);

// Puts the handle on the mechanical red sideband (all detunings = omega_b).
enum EomqStatus eomq_params_red_sideband(struct EomqParams *p);

// Probe response eps_T at detuning `delta`; absorption is the real part,
// dispersion the imaginary part.
enum EomqStatus eomq_epsilon_t(const struct EomqParams *p,
                               double delta,
                               double *out_re,
                               double *out_im);

// Probe spectrum over `n` uniform offsets x in [x_min, x_max]; fills the
// caller-allocated arrays `xs`, `re`, `im` (length `n`). Fails without
// partial output when any grid point hits a pole.
enum EomqStatus eomq_probe_spectrum(const struct EomqParams *p,
                                    double x_min,
                                    double x_max,
                                    uintptr_t n,
                                    double *xs,
                                    double *re,
                                    double *im);

// Predicted transparency-window offsets +-sqrt(g_em^2 - 2 g^2 sigma_z).
enum EomqStatus eomq_omit_minima(const struct EomqParams *p, double *out_minus, double *out_plus);

// Predicted absorption-peak offsets (center, +side).
enum EomqStatus eomq_omia_peaks(const struct EomqParams *p, double *out_center, double *out_side);

// Hybrid-mode poles and numeric residues (red sideband): fills four
// length-3 arrays and the printed-form deviation.
enum EomqStatus eomq_hybrid_poles(const struct EomqParams *p,
                                  double *poles_re,
                                  double *poles_im,
                                  double *residues_re,
                                  double *residues_im,
                                  double *max_printed_deviation);

// Displacement-spectrum value S_x(omega).
enum EomqStatus eomq_displacement_spectrum(const struct EomqParams *p, double omega, double *out);

// Prominence-filtered peak count of S_x over `n` frequencies in
// [omega_min, omega_max].
enum EomqStatus eomq_nms_peak_count(const struct EomqParams *p,
                                    double omega_min,
                                    double omega_max,
                                    uintptr_t n,
                                    uintptr_t *out_count);

// Steady-state photon-number roots at pump amplitude `e_p`: fills up to 3
// ascending roots and their stability flags (1 = stable).
enum EomqStatus eomq_photon_roots(const struct EomqParams *p,
                                  double e_p,
                                  double *roots,
                                  uint8_t *stable,
                                  uintptr_t *out_count);

// Switching metrics from a pump sweep over `n` amplitudes in
// [e_min, e_max]; fails with `NOT_BISTABLE` when no turning pair exists.
enum EomqStatus eomq_switching_metrics(const struct EomqParams *p,
                                       double e_min,
                                       double e_max,
                                       uintptr_t n,
                                       double *out_ratio,
                                       double *out_e_up,
                                       double *out_e_down);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EOMQ_H */
