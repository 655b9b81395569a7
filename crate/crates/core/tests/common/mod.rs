#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use samkit::pattern::SparsityPattern;
use samkit::sparse::{SparseMatrix, TripletBuffer};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Roughly `per_col` uniform(-1, 1) entries per column at random rows.
pub fn random_sparse(rng: &mut ChaCha8Rng, n: usize, per_col: usize) -> SparseMatrix<f64> {
    let mut t = TripletBuffer::new(n, n);
    let p = (per_col as f64 / n as f64).min(1.0);
    for j in 0..n {
        for i in 0..n {
            if rng.random_bool(p) {
                t.push(i, j, rng.random_range(-1.0..1.0));
            }
        }
    }
    SparseMatrix::from_triplets(&t).unwrap()
}

/// Random sparse matrix with a dominant diagonal, so well conditioned.
pub fn random_dominant(rng: &mut ChaCha8Rng, n: usize, per_col: usize) -> SparseMatrix<f64> {
    let a = random_sparse(rng, n, per_col);
    let mut t = TripletBuffer::new(n, n);
    for j in 0..n {
        let mut off = 0.0;
        for (i, v) in a.col_iter(j) {
            if i != j {
                t.push(i, j, v);
                off += v.abs();
            }
        }
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        t.push(j, j, sign * (1.0 + off + rng.random_range(0.0..1.0)));
    }
    SparseMatrix::from_triplets(&t).unwrap()
}

pub fn random_pattern(rng: &mut ChaCha8Rng, n: usize, per_col: usize) -> SparsityPattern {
    let p = (per_col as f64 / n as f64).min(1.0);
    let mut entries = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if rng.random_bool(p) {
                entries.push((i, j));
            }
        }
    }
    SparsityPattern::from_entries(n, n, entries).unwrap()
}

pub fn dense(a: &SparseMatrix<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.nrows(), a.ncols());
    for j in 0..a.ncols() {
        for (i, v) in a.col_iter(j) {
            m[(i, j)] += v;
        }
    }
    m
}

pub fn dense_c(a: &SparseMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(a.nrows(), a.ncols());
    for j in 0..a.ncols() {
        for (i, v) in a.col_iter(j) {
            m[(i, j)] += v;
        }
    }
    m
}

/// Minimum-norm least-squares solution, independent of the library's QR.
///
/// A full column rank block has a unique minimizer, taken from a Householder
/// QR. Otherwise the pseudo-inverse is applied through the eigenvectors of
/// `AᵀA` (nalgebra's `SVD::solve` returned non-minimizers on rank-deficient
/// products and only reached about 1e-11 on tall full-rank blocks).
pub fn min_norm_ls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let ata = a.transpose() * a;
    let eig = ata.symmetric_eigen();
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    if lmax == 0.0 {
        return DVector::zeros(n);
    }
    // AᵀA carries rounding near ε·λ_max, so singular values below
    // 1e-6·σ_max count as zero
    let cutoff = 1e-12 * lmax;
    let rank = eig.eigenvalues.iter().filter(|&&l| l > cutoff).count();
    if a.nrows() >= n && rank == n {
        let qr = a.clone().qr();
        let qtb = qr.q().transpose() * b;
        return qr.r().solve_upper_triangular(&qtb).expect("full rank");
    }
    let atb = a.transpose() * b;
    let mut x = DVector::zeros(n);
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l > cutoff {
            let v = eig.eigenvectors.column(i);
            x += v * (v.dot(&atb) / l);
        }
    }
    x
}

pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    a.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}
