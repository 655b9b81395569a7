/* Recycle an ILUTP preconditioner of K0 for K1 = K0 - 0.15 I.
 *
 * cargo build --release -p samkit-ffi
 * cc -Icrates/ffi/include crates/ffi/examples/demo.c target/release/libsamkit_ffi.a -lpthread -ldl -lm
 */
#include <stdio.h>
#include <stdlib.h>

#include "samkit.h"

#define NX 10
#define N (NX * NX)

static int check(SamkitStatus st, const char *what) {
    if (st != SAMKIT_STATUS_OK) {
        char msg[256];
        samkit_last_error(msg, sizeof msg);
        fprintf(stderr, "%s failed (%d): %s\n", what, (int)st, msg);
        return 1;
    }
    return 0;
}

int main(void) {
    static size_t rows[5 * N], cols[5 * N];
    static double vals[5 * N], b[N], x[N];
    size_t nnz = 0;
    for (size_t j = 0; j < NX; j++) {
        for (size_t i = 0; i < NX; i++) {
            size_t p = i + NX * j;
            rows[nnz] = p; cols[nnz] = p; vals[nnz++] = 4.0 - 0.15;
            if (i > 0)      { rows[nnz] = p - 1;  cols[nnz] = p; vals[nnz++] = -1.0; }
            if (i + 1 < NX) { rows[nnz] = p + 1;  cols[nnz] = p; vals[nnz++] = -1.0; }
            if (j > 0)      { rows[nnz] = p - NX; cols[nnz] = p; vals[nnz++] = -1.0; }
            if (j + 1 < NX) { rows[nnz] = p + NX; cols[nnz] = p; vals[nnz++] = -1.0; }
        }
    }

    SamkitMatrix *k0 = NULL, *k1 = NULL;
    SamkitFactors *p0 = NULL;
    SamkitPattern *s = NULL;
    SamkitMap *map = NULL;
    SamkitSolveInfo info;
    double res;

    if (check(samkit_laplace2d(NX, NX, &k0, b), "laplace2d")) return 1;
    if (check(samkit_matrix_from_triplets(N, N, nnz, rows, cols, vals, &k1), "triplets")) return 1;
    if (check(samkit_ilutp_factor(k0, 20, 1e-3, 1.0, &p0), "ilutp")) return 1;
    if (check(samkit_pattern_of(k0, &s), "pattern")) return 1;
    if (check(samkit_sam_compute(k1, k0, s, 0, &map), "sam")) return 1;
    if (check(samkit_map_rel_residual(map, &res), "residual")) return 1;
    if (check(samkit_gmres(k1, b, x, map, p0, 0, 1e-10, 100, &info), "gmres")) return 1;
    printf("map residual %.3e, %zu iterations, converged %d\n", res, info.iterations, info.converged);

    samkit_map_free(map);
    samkit_pattern_free(s);
    samkit_factors_free(p0);
    samkit_matrix_free(k1);
    samkit_matrix_free(k0);
    return 0;
}
