//! Small dense column-major blocks and the least-squares kernel used by the
//! sparse approximate map.

use crate::scalar::{norm2, Scalar};

/// Relative rank tolerance: a diagonal entry of the pivoted triangular factor
/// counts as zero when it is at most this fraction of the largest one.
pub const RANK_TOL: f64 = 1e-12;

/// A dense column-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseBlock<T> {
    nrows: usize,
    ncols: usize,
    data: Vec<T>,
}

/// Result of [`DenseBlock::least_squares`].
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares<T> {
    pub solution: Vec<T>,
    /// `‖A·x − b‖₂` evaluated explicitly from the original block.
    pub residual_norm: f64,
    pub rank: usize,
}

impl<T: Scalar> DenseBlock<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        DenseBlock {
            nrows,
            ncols,
            data: vec![T::zero(); nrows * ncols],
        }
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for j in 0..ncols {
            for i in 0..nrows {
                data.push(f(i, j));
            }
        }
        DenseBlock { nrows, ncols, data }
    }

    /// Reuses the allocation for a block of new dimensions, zero-filled.
    pub fn reset(&mut self, nrows: usize, ncols: usize) {
        self.nrows = nrows;
        self.ncols = ncols;
        self.data.clear();
        self.data.resize(nrows * ncols, T::zero());
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[j * self.nrows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[j * self.nrows + i] = v;
    }

    pub fn col(&self, j: usize) -> &[T] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![T::zero(); self.nrows];
        for (j, &xj) in x.iter().enumerate() {
            for (yi, &a) in y.iter_mut().zip(self.col(j)) {
                *yi += a * xj;
            }
        }
        y
    }

    /// `Aᴴ·y`
    pub fn adjoint_matvec(&self, y: &[T]) -> Vec<T> {
        assert_eq!(y.len(), self.nrows);
        (0..self.ncols)
            .map(|j| {
                self.col(j)
                    .iter()
                    .zip(y)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a.conj() * b)
            })
            .collect()
    }

    /// Minimum-norm least-squares solution of `A·x ≈ b`.
    ///
    /// Householder QR with column pivoting determines the numerical rank
    /// (cutoff [`RANK_TOL`] relative to the largest triangular diagonal). A
    /// rank-deficient trapezoidal factor is reduced by a second QR of its
    /// adjoint, giving the minimum-norm solution among all minimizers.
    pub fn least_squares(&self, rhs: &[T]) -> LeastSquares<T> {
        assert_eq!(rhs.len(), self.nrows, "rhs length must match block rows");
        let (m, n) = (self.nrows, self.ncols);
        let mut x = vec![T::zero(); n];
        if m == 0 || n == 0 {
            return LeastSquares {
                solution: x,
                residual_norm: norm2(rhs),
                rank: 0,
            };
        }

        let mut a = self.clone();
        let mut b = rhs.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let steps = m.min(n);
        let mut diag = Vec::with_capacity(steps);

        for k in 0..steps {
            // exact remaining-column norms; blocks are tiny
            let (mut best, mut best_norm) = (k, -1.0);
            for j in k..n {
                let nj = norm2(&a.col(j)[k..]);
                if nj > best_norm {
                    best = j;
                    best_norm = nj;
                }
            }
            if best != k {
                swap_cols(&mut a, k, best);
                perm.swap(k, best);
            }
            let (head, tail) = a.data.split_at_mut((k + 1) * m);
            let pivot_col = &mut head[k * m + k..];
            let alpha = reflect(pivot_col, tail, m, k, &mut b[k..]);
            diag.push(alpha);
            if best_norm == 0.0 {
                break;
            }
        }

        let rmax = diag.first().map_or(0.0, |d| d.modulus());
        let rank = if rmax == 0.0 {
            0
        } else {
            diag.iter()
                .take_while(|d| d.modulus() > RANK_TOL * rmax)
                .count()
        };

        if rank > 0 {
            let c = &b[..rank];
            let y = if rank == n {
                back_substitute(&a, c)
            } else {
                min_norm_trapezoid(&a, rank, c)
            };
            for (k, &p) in perm.iter().enumerate() {
                x[p] = y[k];
            }
        }

        let mut r = self.matvec(&x);
        for (ri, &bi) in r.iter_mut().zip(rhs) {
            *ri -= bi;
        }
        LeastSquares {
            solution: x,
            residual_norm: norm2(&r),
            rank,
        }
    }
}

fn swap_cols<T: Scalar>(a: &mut DenseBlock<T>, i: usize, j: usize) {
    let m = a.nrows;
    for r in 0..m {
        a.data.swap(i * m + r, j * m + r);
    }
}

/// Householder reflector annihilating `col[1..]`; applies it to the trailing
/// columns in `tail` (each of stride `m`, rows from `k`) and to `rhs`.
/// Writes the new diagonal into `col[0]`, zeros below, returns it.
fn reflect<T: Scalar>(col: &mut [T], tail: &mut [T], m: usize, k: usize, rhs: &mut [T]) -> T {
    let len = m - k;
    let x = &mut col[..len];
    let sigma = norm2(x);
    if sigma == 0.0 {
        return T::zero();
    }
    let x0 = x[0];
    let x0_abs = x0.modulus();
    let phase = if x0_abs == 0.0 {
        T::one()
    } else {
        x0.scale(1.0 / x0_abs)
    };
    let alpha = -phase.scale(sigma);
    x[0] = x0 - alpha;
    let vnorm_sqr = 2.0 * sigma * (sigma + x0_abs);
    let v: &[T] = x;
    let apply = |y: &mut [T]| {
        let proj = v
            .iter()
            .zip(y.iter())
            .fold(T::zero(), |acc, (&vi, &yi)| acc + vi.conj() * yi)
            .scale(2.0 / vnorm_sqr);
        for (yi, &vi) in y.iter_mut().zip(v) {
            *yi -= vi * proj;
        }
    };
    for c in tail.chunks_exact_mut(m) {
        apply(&mut c[k..]);
    }
    apply(rhs);
    x[0] = alpha;
    for xi in x[1..].iter_mut() {
        *xi = T::zero();
    }
    alpha
}

/// Solves `R·y = c` with `R` the leading upper-triangular part of `a`.
#[allow(clippy::needless_range_loop)]
fn back_substitute<T: Scalar>(a: &DenseBlock<T>, c: &[T]) -> Vec<T> {
    let r = c.len();
    let mut y = c.to_vec();
    for i in (0..r).rev() {
        let mut s = y[i];
        for j in i + 1..r {
            s -= a.get(i, j) * y[j];
        }
        y[i] = s / a.get(i, i);
    }
    y
}

/// Minimum-norm solution of `[R11 R12]·y = c` where the `rank × n` trapezoid
/// sits in the leading rows of `a`.
#[allow(clippy::needless_range_loop)]
fn min_norm_trapezoid<T: Scalar>(a: &DenseBlock<T>, rank: usize, c: &[T]) -> Vec<T> {
    let n = a.ncols;
    // W = Tᴴ, n × rank
    let mut w = DenseBlock::from_fn(n, rank, |i, j| a.get(j, i).conj());
    let mut reflectors: Vec<(Vec<T>, f64)> = Vec::with_capacity(rank);
    for k in 0..rank {
        let x: Vec<T> = w.col(k)[k..].to_vec();
        let sigma = norm2(&x);
        let x0_abs = x[0].modulus();
        let phase = if x0_abs == 0.0 {
            T::one()
        } else {
            x[0].scale(1.0 / x0_abs)
        };
        let alpha = -phase.scale(sigma);
        let mut v = x;
        v[0] -= alpha;
        let vnorm_sqr = 2.0 * sigma * (sigma + x0_abs);
        for j in k..rank {
            let col = &mut w.col_mut(j)[k..];
            let proj = v
                .iter()
                .zip(col.iter())
                .fold(T::zero(), |acc, (&vi, &yi)| acc + vi.conj() * yi)
                .scale(2.0 / vnorm_sqr);
            for (yi, &vi) in col.iter_mut().zip(&v) {
                *yi -= vi * proj;
            }
        }
        reflectors.push((v, vnorm_sqr));
    }
    // W = Z·[S; 0]  ⇒  T = [Sᴴ 0]·Zᴴ; solve Sᴴ·u = c, y = Z·[u; 0]
    let mut u = vec![T::zero(); n];
    for i in 0..rank {
        let mut s = c[i];
        for j in 0..i {
            s -= w.get(j, i).conj() * u[j];
        }
        u[i] = s / w.get(i, i).conj();
    }
    for (k, (v, vnorm_sqr)) in reflectors.iter().enumerate().rev() {
        let seg = &mut u[k..];
        let proj = v
            .iter()
            .zip(seg.iter())
            .fold(T::zero(), |acc, (&vi, &yi)| acc + vi.conj() * yi)
            .scale(2.0 / vnorm_sqr);
        for (yi, &vi) in seg.iter_mut().zip(v) {
            *yi -= vi * proj;
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn square_nonsingular_is_exact_solve() {
        let a = DenseBlock::from_fn(2, 2, |i, j| [[4.0, 1.0], [1.0, 3.0]][i][j]);
        let ls = a.least_squares(&[1.0, 2.0]);
        assert!((ls.solution[0] - 1.0 / 11.0).abs() < 1e-15);
        assert!((ls.solution[1] - 7.0 / 11.0).abs() < 1e-15);
        assert_eq!(ls.rank, 2);
        assert!(ls.residual_norm < 1e-15);
    }

    #[test]
    fn overdetermined_matches_normal_equations() {
        // column [1,1]ᵀ against rhs [0,1]ᵀ → x = 0.5, residual √0.5
        let a = DenseBlock::from_fn(2, 1, |_, _| 1.0);
        let ls = a.least_squares(&[0.0, 1.0]);
        assert!((ls.solution[0] - 0.5).abs() < 1e-15);
        assert!((ls.residual_norm - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn duplicated_columns_give_minimum_norm() {
        // [1 1] x = 2 → min-norm x = (1, 1)
        let a = DenseBlock::from_fn(1, 2, |_, _| 1.0);
        let ls = a.least_squares(&[2.0]);
        assert_eq!(ls.rank, 1);
        assert!((ls.solution[0] - 1.0).abs() < 1e-14);
        assert!((ls.solution[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_block_gives_zero_solution() {
        let a = DenseBlock::<f64>::zeros(3, 2);
        let ls = a.least_squares(&[1.0, 2.0, 2.0]);
        assert_eq!(ls.rank, 0);
        assert_eq!(ls.solution, vec![0.0, 0.0]);
        assert!((ls.residual_norm - 3.0).abs() < 1e-15);
    }

    #[test]
    fn complex_rank_deficient_minimum_norm() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        // columns c and i·c; rhs = c  → min-norm x = (1, -i)/2
        let c = [one, 2.0 * one, i];
        let a = DenseBlock::from_fn(3, 2, |r, j| if j == 0 { c[r] } else { i * c[r] });
        let ls = a.least_squares(&c);
        assert_eq!(ls.rank, 1);
        assert!((ls.solution[0] - 0.5 * one).norm() < 1e-14);
        assert!((ls.solution[1] + 0.5 * i).norm() < 1e-14);
        assert!(ls.residual_norm < 1e-14);
    }
}
