#ifndef VHODGE_H
#define VHODGE_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum VhStatus {
  VH_STATUS_OK = 0,
  VH_STATUS_NULL_POINTER = 1,
  VH_STATUS_INVALID_ARGUMENT = 2,
  VH_STATUS_PARSE_ERROR = 3,
  VH_STATUS_NUMERICAL_FAILURE = 4,
  // The computation ran but a mathematical check did not pass.
  VH_STATUS_CHECK_FAILED = 5,
  VH_STATUS_PANIC = 6,
} VhStatus;

typedef enum VhBoundary {
  VH_BOUNDARY_CLOSED = 0,
  VH_BOUNDARY_NORMAL = 1,
  VH_BOUNDARY_TANGENTIAL = 2,
} VhBoundary;

// Opaque per-triangle vector field bound to the mesh it was realized on.
typedef struct VhField VhField;

// Opaque triangle mesh.
typedef struct VhMesh VhMesh;

// Opaque eigenvalue list.
typedef struct VhSpectrum VhSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next failing call on the same thread.
const char *vh_last_error_message(void);

// Built-in mesh by name, e.g. `"torus"`, `"annulus:3x24"`, `"sphere:2"`.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum VhStatus vh_mesh_builtin(const char *name, struct VhMesh **out);

// Mesh parsed from OFF text.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum VhStatus vh_mesh_from_off(const char *text, struct VhMesh **out);

// Vertex, edge and triangle counts.
//
// # Safety
// `mesh` must come from a `vh_mesh_*` constructor; `counts` must point to
// three writable `size_t`.
enum VhStatus vh_mesh_counts(const struct VhMesh *mesh, size_t *counts);

// # Safety
// `mesh` must be null or come from a `vh_mesh_*` constructor, and must not
// be used afterwards.
void vh_mesh_free(struct VhMesh *mesh);

// Field on `mesh` from a JSON description (`{"kind": "random", "seed": 1}`,
// `{"kind": "constant", "vector": [1, 0, 0]}`, ...).
//
// # Safety
// `mesh` must be a live handle, `json` NUL-terminated, `out` valid.
enum VhStatus vh_field_from_json(const struct VhMesh *mesh, const char *json, struct VhField **out);

// # Safety
// `field` must be null or a live handle, and must not be used afterwards.
void vh_field_free(struct VhField *field);

// Runs the pointwise identity suite; writes the largest relative residual.
// Returns `CheckFailed` if it exceeds `1e-10`.
//
// # Safety
// `max_rel` must be null or a valid pointer.
enum VhStatus vh_verify_algebra(size_t dim, size_t trials, uint64_t seed, double *max_rel);

// Harmonic dimensions for degrees 0, 1, 2 under `bc`. A null `field` means
// `v = 0`. On a mesh without boundary every condition reduces to closed.
//
// # Safety
// Handles must be live; `dims` must point to three writable `size_t`.
enum VhStatus vh_betti(const struct VhMesh *mesh,
                       const struct VhField *field,
                       enum VhBoundary bc,
                       size_t *dims);

// Lowest `count` eigenvalues of the degree-`k` v-Hodge Laplacian.
//
// # Safety
// Handles must be live (`field` may be null); `out` must be valid.
enum VhStatus vh_spectrum(const struct VhMesh *mesh,
                          const struct VhField *field,
                          size_t k,
                          enum VhBoundary bc,
                          size_t count,
                          struct VhSpectrum **out);

// Number of eigenvalues held by `spectrum` (0 for null).
//
// # Safety
// `spectrum` must be null or a live handle.
size_t vh_spectrum_len(const struct VhSpectrum *spectrum);

// Pointer to the ascending eigenvalues, valid while `spectrum` lives.
//
// # Safety
// `spectrum` must be null or a live handle.
const double *vh_spectrum_values(const struct VhSpectrum *spectrum);

// Largest relative eigenpair residual and the number of zero eigenvalues.
//
// # Safety
// `spectrum` must be a live handle; outputs may be null.
enum VhStatus vh_spectrum_stats(const struct VhSpectrum *spectrum,
                                double *max_residual,
                                size_t *zero_multiplicity);

// # Safety
// `spectrum` must be null or a live handle, and must not be used afterwards.
void vh_spectrum_free(struct VhSpectrum *spectrum);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VHODGE_H */
