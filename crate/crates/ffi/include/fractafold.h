#ifndef FRACTAFOLD_H
#define FRACTAFOLD_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define FF_OK 0

#define FF_ERR_NULL 1

#define FF_ERR_INVALID 2

#define FF_ERR_FORBIDDEN 3

#define FF_ERR_OUT_OF_RANGE 4

#define FF_ERR_NUMERIC 5

#define FF_ERR_BUFFER 6

#define FF_ERR_PANIC 7

#define FF_BASE_OCTAHEDRON 0

#define FF_BASE_CIRCULAR_LADDER_EDGES 1

#define FF_BASE_TRIANGLE 2

#define FF_LEVEL_GAMMA 0

#define FF_LEVEL_GAMMA0 1

/**
 * Refined triangle mesh over a 4-regular or cornered base.
 */
typedef struct FfMesh FfMesh;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message on this thread into `buf` as a NUL-terminated
 * string, truncating to `cap` bytes. Returns the full message length.
 *
 * # Safety
 * `buf` must be null or valid for `cap` bytes.
 */
size_t ff_last_error(char *buf, size_t cap);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ff_version(void);

/**
 * Returns 1 if `lambda` is a forbidden eigenvalue of the gasket mesh operator.
 */
int32_t ff_is_forbidden(double lambda);

/**
 * Evaluates R(z) = z(m - z) for the decimation polynomial with multiplier `m`.
 *
 * # Safety
 * `result` must be valid for writes.
 */
int32_t ff_r_apply(double multiplier, double z, double *result);

/**
 * Both real preimages of `w` under R, lower branch first.
 *
 * # Safety
 * `lo` and `hi` must be valid for writes.
 */
int32_t ff_r_inverse(double multiplier, double w, double *lo, double *hi);

/**
 * Limit of scaled inverse iterates, the function whose zeros give the
 * continuum spectrum of the limiting operator.
 *
 * # Safety
 * `result` must be valid for writes.
 */
int32_t ff_frak_r(double multiplier, double z, double tol, double *result);

/**
 * Radial spectral projection kernel on the 3-regular tree (`FF_LEVEL_GAMMA`)
 * or its edge graph (`FF_LEVEL_GAMMA0`) at distance `d`.
 *
 * # Safety
 * `result` must be valid for writes.
 */
int32_t ff_tree_kernel(uint32_t level, double lambda, size_t d, double *result);

/**
 * Builds a mesh refined `level` times over one of the `FF_BASE_*` bases.
 * `size` is the ladder length for `FF_BASE_CIRCULAR_LADDER_EDGES`.
 *
 * # Safety
 * `mesh` must be valid for writes. The handle must be released with
 * [`ff_mesh_free`].
 */
int32_t ff_mesh_new(uint32_t base, size_t size, size_t level, struct FfMesh **mesh);

/**
 * Releases a mesh handle. Null is ignored.
 *
 * # Safety
 * `mesh` must be null or a handle from [`ff_mesh_new`] not yet freed.
 */
void ff_mesh_free(struct FfMesh *mesh);

/**
 * Refinement depth of the mesh.
 *
 * # Safety
 * `mesh` must be a live handle and `result` valid for writes.
 */
int32_t ff_mesh_level(const struct FfMesh *mesh, size_t *result);

/**
 * Number of vertices of the level-`level` graph.
 *
 * # Safety
 * `mesh` must be a live handle and `result` valid for writes.
 */
int32_t ff_mesh_vertex_count(const struct FfMesh *mesh, size_t level, size_t *result);

/**
 * Ascending eigenvalues of the mesh operator at `level`. Writes the required
 * count to `len`; returns `FF_ERR_BUFFER` if `cap` is too small.
 *
 * # Safety
 * `mesh` must be a live handle, `buf` valid for `cap` doubles, `len` valid for writes.
 */
int32_t ff_mesh_spectrum(const struct FfMesh *mesh,
                         size_t level,
                         double *buf,
                         size_t cap,
                         size_t *len);

/**
 * Extends an eigenfunction `u` at `level` to `level + 1` with eigenvalue
 * `lambda_next`. Output sizing follows [`ff_mesh_spectrum`].
 *
 * # Safety
 * `u` must be valid for `u_len` doubles; other pointers as in [`ff_mesh_spectrum`].
 */
int32_t ff_mesh_extend(const struct FfMesh *mesh,
                       size_t level,
                       const double *u,
                       size_t u_len,
                       double lambda_next,
                       double *buf,
                       size_t cap,
                       size_t *len);

/**
 * Runs the named check suite and writes 1 to `passed` if every check passed.
 *
 * # Safety
 * `suite` must be a NUL-terminated string and `passed` valid for writes.
 */
int32_t ff_verify_suite(const char *suite, int32_t *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRACTAFOLD_H */
