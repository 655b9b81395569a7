#ifndef SAMKIT_H
#define SAMKIT_H

/* Generated with cbindgen from crates/ffi/src/lib.rs; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SamkitStatus {
  SAMKIT_STATUS_OK = 0,
  SAMKIT_STATUS_NULL_POINTER = 1,
  SAMKIT_STATUS_INVALID_ARGUMENT = 2,
  SAMKIT_STATUS_DIMENSION_MISMATCH = 3,
  SAMKIT_STATUS_INDEX_OUT_OF_RANGE = 4,
  SAMKIT_STATUS_STRUCTURE_MISMATCH = 5,
  SAMKIT_STATUS_ZERO_PIVOT = 6,
  SAMKIT_STATUS_BREAKDOWN = 7,
  SAMKIT_STATUS_ZERO_REFERENCE = 8,
  SAMKIT_STATUS_PARSE = 9,
  SAMKIT_STATUS_IO = 10,
  SAMKIT_STATUS_CONFIG = 11,
  SAMKIT_STATUS_PANIC = 12,
  SAMKIT_STATUS_OTHER = 13,
} SamkitStatus;

// Incomplete LU factors with column pivoting.
typedef struct SamkitFactors SamkitFactors;

// A computed sparse approximate map.
typedef struct SamkitMap SamkitMap;

// Sparse real matrix in compressed column form.
typedef struct SamkitMatrix SamkitMatrix;

// Sparsity pattern (index structure only).
typedef struct SamkitPattern SamkitPattern;

// Summary of one GMRES solve.
typedef struct SamkitSolveInfo {
  size_t iterations;
  // 1 when the explicit relative residual met the tolerance.
  int converged;
  double final_rel_residual;
} SamkitSolveInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len`). Returns the full message length without the NUL.
//
// # Safety
// `buf` must be NULL or point to `len` writable bytes.
size_t samkit_last_error(char *buf, size_t len);

// Builds a matrix from coordinate triplets (0-based); duplicates are summed.
//
// # Safety
// `rows`, `cols` and `vals` must each point to `nnz` elements; `out` must be
// a valid pointer.
enum SamkitStatus samkit_matrix_from_triplets(size_t nrows,
                                              size_t ncols,
                                              size_t nnz,
                                              const size_t *rows,
                                              const size_t *cols,
                                              const double *vals,
                                              struct SamkitMatrix **out);

// Five-point Dirichlet Laplacian on an `nx`×`ny` grid. When `b` is not NULL
// the boundary right-hand side (length `nx*ny`) is written there.
//
// # Safety
// `out` must be valid; `b` must be NULL or hold `nx*ny` doubles.
enum SamkitStatus samkit_laplace2d(size_t nx, size_t ny, struct SamkitMatrix **out, double *b);

// Reads a real Matrix Market coordinate file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be valid.
enum SamkitStatus samkit_matrix_read_mm(const char *path, struct SamkitMatrix **out);

// # Safety
// `m` must be a live handle and `path` a NUL-terminated string.
enum SamkitStatus samkit_matrix_write_mm(const struct SamkitMatrix *m, const char *path);

// Writes rows, columns and stored entries into the non-NULL outputs.
//
// # Safety
// `m` must be a live handle; outputs must be NULL or valid.
enum SamkitStatus samkit_matrix_shape(const struct SamkitMatrix *m,
                                      size_t *nrows,
                                      size_t *ncols,
                                      size_t *nnz);

// `y = A·x` with `x` of length `ncols` and `y` of length `nrows`.
//
// # Safety
// `m` must be a live handle; `x` and `y` must hold the stated lengths.
enum SamkitStatus samkit_matrix_matvec(const struct SamkitMatrix *m, const double *x, double *y);

// # Safety
// `m` must be NULL or a handle not yet freed.
void samkit_matrix_free(struct SamkitMatrix *m);

// Pattern of the stored entries of `m`.
//
// # Safety
// `m` must be a live handle; `out` must be valid.
enum SamkitStatus samkit_pattern_of(const struct SamkitMatrix *m, struct SamkitPattern **out);

// `n`×`n` pattern with entries `(j + offset, j)`; out-of-range entries are clipped.
//
// # Safety
// `offsets` must hold `count` values; `out` must be valid.
enum SamkitStatus samkit_pattern_offsets(size_t n,
                                         const ptrdiff_t *offsets,
                                         size_t count,
                                         struct SamkitPattern **out);

// Structural pattern of `Pᵖ`.
//
// # Safety
// `p` must be a live handle; `out` must be valid.
enum SamkitStatus samkit_pattern_power(const struct SamkitPattern *p,
                                       size_t power,
                                       struct SamkitPattern **out);

// Number of entries, or 0 for NULL.
//
// # Safety
// `p` must be NULL or a live handle.
size_t samkit_pattern_nnz(const struct SamkitPattern *p);

// # Safety
// `p` must be NULL or a handle not yet freed.
void samkit_pattern_free(struct SamkitPattern *p);

// Incomplete LU with threshold dropping and column pivoting.
//
// # Safety
// `m` must be a live handle; `out` must be valid.
enum SamkitStatus samkit_ilutp_factor(const struct SamkitMatrix *m,
                                      size_t lfil,
                                      double droptol,
                                      double pivtol,
                                      struct SamkitFactors **out);

// Applies the factors as a preconditioner, `x ≈ A⁻¹·rhs`; both vectors have
// the factored dimension.
//
// # Safety
// `f` must be a live handle; `rhs` and `x` must hold `dim` doubles.
enum SamkitStatus samkit_ilutp_solve(const struct SamkitFactors *f, const double *rhs, double *x);

// Entries stored in `L` (diagonal excluded) and `U`, or 0 for NULL.
//
// # Safety
// `f` must be NULL or a live handle.
size_t samkit_ilutp_fill(const struct SamkitFactors *f);

// # Safety
// `f` must be NULL or a handle not yet freed.
void samkit_factors_free(struct SamkitFactors *f);

// Computes `N ≈ argmin ‖A_k·N − A_ref‖_F` over `pattern`. `workers` = 0
// uses all cores, 1 runs sequentially; results do not depend on it.
//
// # Safety
// Handles must be live; `out` must be valid.
enum SamkitStatus samkit_sam_compute(const struct SamkitMatrix *a_k,
                                     const struct SamkitMatrix *a_ref,
                                     const struct SamkitPattern *pattern,
                                     size_t workers,
                                     struct SamkitMap **out);

// `‖A_k·N − A_ref‖_F / ‖A_ref‖_F`; fails with `ZeroReference` when `A_ref = 0`.
//
// # Safety
// `m` must be a live handle; `out` must be valid.
enum SamkitStatus samkit_map_rel_residual(const struct SamkitMap *m, double *out);

// Copies the map into a new matrix handle.
//
// # Safety
// `m` must be a live handle; `out` must be valid.
enum SamkitStatus samkit_map_matrix(const struct SamkitMap *m, struct SamkitMatrix **out);

// # Safety
// `m` must be NULL or a handle not yet freed.
void samkit_map_free(struct SamkitMap *m);

// Right-preconditioned restarted GMRES from `x` as initial guess (pass
// zeros for a zero start). The preconditioner is `N·P` with either part
// optional (NULL). `restart` = 0 means full GMRES.
//
// # Safety
// `a` must be a live handle, `map` and `factors` NULL or live, `b` and `x`
// must hold `nrows(a)` doubles, `info` NULL or valid.
enum SamkitStatus samkit_gmres(const struct SamkitMatrix *a,
                               const double *b,
                               double *x,
                               const struct SamkitMap *map,
                               const struct SamkitFactors *factors,
                               size_t restart,
                               double rel_tol,
                               size_t max_iters,
                               struct SamkitSolveInfo *info);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SAMKIT_H */
