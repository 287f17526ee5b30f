/* Generated by cbindgen; do not edit. */

#ifndef CRUCISPEC_H
#define CRUCISPEC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum CsStatus {
  CS_STATUS_OK = 0,
  CS_STATUS_ERR_NULL_POINTER = 1,
  CS_STATUS_ERR_DOMAIN = 2,
  CS_STATUS_ERR_RESOURCE = 3,
  CS_STATUS_ERR_CONVERGENCE = 4,
  CS_STATUS_ERR_CONSISTENCY = 5,
  CS_STATUS_ERR_NOT_POSITIVE_DEFINITE = 6,
  CS_STATUS_ERR_ACCURACY = 7,
  CS_STATUS_ERR_UNSUPPORTED = 8,
  CS_STATUS_ERR_CONFIG = 9,
  CS_STATUS_ERR_IO = 10,
  CS_STATUS_ERR_BUFFER_TOO_SMALL = 11,
  CS_STATUS_ERR_PANIC = 12,
} CsStatus;

/**
 * Profile generators accepted by [`cs_profile_new`].
 */
typedef enum CsProfileKind {
  CS_PROFILE_KIND_RHOMBUS = 0,
  CS_PROFILE_KIND_ELLIPSE = 1,
} CsProfileKind;

/**
 * Model potentials accepted by [`cs_modes_solve`].
 */
typedef enum CsPotential {
  CS_POTENTIAL_ABS_LINEAR = 0,
  CS_POTENTIAL_QUADRATIC = 1,
} CsPotential;

/**
 * Opaque family of 1D modes.
 */
typedef struct CsModes CsModes;

/**
 * Opaque planar bound-state estimate.
 */
typedef struct CsPlanar CsPlanar;

/**
 * Opaque cross-section profile.
 */
typedef struct CsProfile CsProfile;

/**
 * Opaque 3D spectrum report.
 */
typedef struct CsSpectrum CsSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *cs_version(void);

/**
 * Length in bytes of the last error message on this thread, without the
 * terminating NUL.
 */
size_t cs_last_error_length(void);

/**
 * Copies the last error message into `buf` (NUL-terminated, truncated to
 * `len - 1` bytes). Returns the number of bytes written without the NUL.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t cs_last_error_message(char *buf, size_t len);

/**
 * Creates a profile of kind `kind` (a [`CsProfileKind`] value) and
 * elongation `h`.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum CsStatus cs_profile_new(int kind, double h, struct CsProfile **out);

/**
 * # Safety
 * `p` must be null or a handle from [`cs_profile_new`], not yet freed.
 */
void cs_profile_free(struct CsProfile *p);

/**
 * Full width `h(tau)` of the stretched section.
 *
 * # Safety
 * `p` must be a live profile handle and `out` a valid pointer.
 */
enum CsStatus cs_profile_width(const struct CsProfile *p, double tau, double *out);

/**
 * Threshold of the continuous spectrum from the channel solver.
 *
 * # Safety
 * `p` must be a live profile handle and `out` a valid pointer.
 */
enum CsStatus cs_profile_threshold(const struct CsProfile *p, double *out);

/**
 * Two-grid estimate of the planar bound state on the cross truncated at
 * `l`, from spacings `coarse_spacing` and half of it.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum CsStatus cs_planar_estimate(double l, double coarse_spacing, struct CsPlanar **out);

/**
 * # Safety
 * `p` must be null or a handle from [`cs_planar_estimate`], not yet freed.
 */
void cs_planar_free(struct CsPlanar *p);

/**
 * Extrapolated eigenvalue and its error bar.
 *
 * # Safety
 * `p` must be a live handle; `value` and `error_bar` valid pointers.
 */
enum CsStatus cs_planar_lambda(const struct CsPlanar *p, double *value, double *error_bar);

/**
 * The normalized bound state at `(x1, x2)`.
 *
 * # Safety
 * `p` must be a live handle and `out` a valid pointer.
 */
enum CsStatus cs_planar_eval(const struct CsPlanar *p, double x1, double x2, double *out);

/**
 * The `count` lowest eigenpairs of the 1D model operator (a
 * [`CsPotential`] value) at `lambda`.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum CsStatus cs_modes_solve(int potential, double lambda, size_t count, struct CsModes **out);

/**
 * # Safety
 * `m` must be null or a handle from [`cs_modes_solve`], not yet freed.
 */
void cs_modes_free(struct CsModes *m);

/**
 * Number of modes in the family, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t cs_modes_count(const struct CsModes *m);

/**
 * Eigenvalue and parity (0 even, 1 odd) of the mode at `position`.
 *
 * # Safety
 * `m` must be a live handle; `value` and `parity` valid pointers.
 */
enum CsStatus cs_modes_eigenvalue(const struct CsModes *m,
                                  size_t position,
                                  double *value,
                                  int *parity);

/**
 * Value of the mode at `position` at `zeta`.
 *
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum CsStatus cs_modes_eval(const struct CsModes *m, size_t position, double zeta, double *out);

/**
 * Max-min upper bounds from `count` trial functions at the profile's `H`.
 * Writes `count` values into `theta` and the number below the threshold
 * into `certified`.
 *
 * # Safety
 * Handles must be live; `theta` valid for `theta_len` doubles.
 */
enum CsStatus cs_certify(const struct CsProfile *profile,
                         const struct CsPlanar *planar,
                         size_t count,
                         double *theta,
                         size_t theta_len,
                         size_t *certified);

/**
 * Eigenvalues of the dense pencil `K c = theta M c` (row-major `n x n`).
 *
 * # Safety
 * `k` and `m` valid for `n * n` doubles, `out` for `n` doubles.
 */
enum CsStatus cs_generalized_pencil(const double *k, const double *m, size_t n, double *out);

/**
 * Spectrum of the truncated waveguide over all symmetry sectors.
 *
 * # Safety
 * `profile` must be a live handle and `out` a valid pointer.
 */
enum CsStatus cs_waveguide_analyze(const struct CsProfile *profile,
                                   double arm_halflength,
                                   double spacing_xy,
                                   double spacing_z,
                                   bool coarse_check,
                                   struct CsSpectrum **out);

/**
 * # Safety
 * `s` must be null or a handle from [`cs_waveguide_analyze`], not yet freed.
 */
void cs_spectrum_free(struct CsSpectrum *s);

/**
 * Certified count, threshold, and whether nothing lies below it.
 *
 * # Safety
 * `s` must be a live handle; output pointers valid.
 */
enum CsStatus cs_spectrum_summary(const struct CsSpectrum *s,
                                  size_t *count,
                                  double *cutoff,
                                  bool *empty_flag);

/**
 * All computed eigenvalues, with multiplicity, ascending. `written`
 * receives the total; fails with `ErrBufferTooSmall` if `len` is short.
 *
 * # Safety
 * `s` must be a live handle; `buf` valid for `len` doubles or null when
 * `len` is 0.
 */
enum CsStatus cs_spectrum_eigenvalues(const struct CsSpectrum *s,
                                      double *buf,
                                      size_t len,
                                      size_t *written);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CRUCISPEC_H */
