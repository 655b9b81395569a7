//! Dual-threshold incomplete LU with column pivoting (ILUTP).
//!
//! Row-wise IKJ elimination on the transposed input. For each row:
//!
//! 1. multipliers below `droptol·‖a_i‖₂` (original row norm) are dropped
//!    before they are applied;
//! 2. U entries below the same threshold are dropped;
//! 3. the `lfil` largest entries of the L part and, separately, of the U
//!    part (diagonal excluded and always kept) survive;
//! 4. if `pivtol·|largest U entry| > |diagonal|`, the two columns swap.
//!
//! The factors satisfy `A·Π ≈ L·U` where `(A·Π)(:, k) = A(:, colperm[k])`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::operator::LinearOperator;
use crate::scalar::Scalar;
use crate::sparse::{SparseMatrix, TripletBuffer};

/// Pivots smaller than this are treated as zero.
pub const PIVOT_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IlutpParams {
    /// Entries kept per row in L and, separately, in U (diagonal excluded).
    pub lfil: usize,
    /// Relative drop tolerance.
    pub droptol: f64,
    /// 1 pivots to any larger candidate, 0 never pivots.
    pub pivtol: f64,
}

impl Default for IlutpParams {
    fn default() -> Self {
        IlutpParams {
            lfil: 20,
            droptol: 1e-3,
            pivtol: 1.0,
        }
    }
}

impl IlutpParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.droptol >= 0.0) || !self.droptol.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "droptol must be a finite value >= 0, got {}",
                self.droptol
            )));
        }
        if !(0.0..=1.0).contains(&self.pivtol) {
            return Err(Error::InvalidArgument(format!(
                "pivtol must lie in [0, 1], got {}",
                self.pivtol
            )));
        }
        Ok(())
    }
}

/// Incomplete factors `L` (unit lower, diagonal stored), `U` (upper) and the
/// column permutation.
#[derive(Debug, Clone, PartialEq)]
pub struct IlutpFactors<T> {
    l: SparseMatrix<T>,
    u: SparseMatrix<T>,
    // row-major copies (Lᵀ, Uᵀ in column storage) for the triangular solves
    l_rows: SparseMatrix<T>,
    u_rows: SparseMatrix<T>,
    colperm: Vec<usize>,
    params: IlutpParams,
}

impl<T: Scalar> IlutpFactors<T> {
    pub fn dim(&self) -> usize {
        self.colperm.len()
    }

    pub fn l(&self) -> &SparseMatrix<T> {
        &self.l
    }

    pub fn u(&self) -> &SparseMatrix<T> {
        &self.u
    }

    /// `colperm[k]` is the original column placed at position `k`.
    pub fn colperm(&self) -> &[usize] {
        &self.colperm
    }

    pub fn params(&self) -> IlutpParams {
        self.params
    }

    /// Stored entries of `L` and `U` combined (unit diagonal excluded).
    pub fn fill(&self) -> usize {
        self.l.nnz() - self.dim() + self.u.nnz()
    }

    /// Approximates `A⁻¹·v`: solves `L·y = v`, `U·z = y`, then undoes the
    /// column permutation.
    pub fn apply_solve(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.dim() {
            return Err(Error::dims("apply_solve", self.dim(), v.len()));
        }
        let mut x = vec![T::zero(); v.len()];
        self.solve_into(v, &mut x);
        Ok(x)
    }

    fn solve_into(&self, v: &[T], x: &mut [T]) {
        let n = self.dim();
        let mut y = v.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for (k, lik) in self.l_rows.col_iter(i) {
                if k < i {
                    s -= lik * y[k];
                }
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            let mut diag = T::one();
            for (j, uij) in self.u_rows.col_iter(i) {
                if j > i {
                    s -= uij * y[j];
                } else {
                    diag = uij;
                }
            }
            y[i] = s / diag;
        }
        for (k, &c) in self.colperm.iter().enumerate() {
            x[c] = y[k];
        }
    }
}

impl<T: Scalar> LinearOperator<T> for IlutpFactors<T> {
    fn nrows(&self) -> usize {
        self.dim()
    }

    fn ncols(&self) -> usize {
        self.dim()
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        self.solve_into(x, y);
    }
}

/// Keeps the `keep` largest-magnitude entries, ties broken by the smaller key.
fn keep_largest<T: Scalar>(entries: &mut Vec<(usize, T)>, keep: usize) {
    if entries.len() > keep {
        entries.sort_by(|a, b| {
            b.1.modulus()
                .partial_cmp(&a.1.modulus())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.0.cmp(&b.0))
        });
        entries.truncate(keep);
    }
    entries.sort_by_key(|e| e.0);
}

/// Computes the incomplete factorization of a square matrix.
pub fn factor<T: Scalar>(a: &SparseMatrix<T>, params: IlutpParams) -> Result<IlutpFactors<T>> {
    params.validate()?;
    if !a.is_square() {
        return Err(Error::dims(
            "ilutp::factor",
            format!("{0}x{0}", a.nrows()),
            format!("{:?}", a.shape()),
        ));
    }
    let n = a.nrows();
    let rows = a.transpose();

    let mut perm: Vec<usize> = (0..n).collect();
    let mut iperm: Vec<usize> = (0..n).collect();

    // L rows keyed by elimination step; U rows keyed by original column
    let mut l_entries: Vec<Vec<(usize, T)>> = Vec::with_capacity(n);
    let mut u_diag: Vec<T> = Vec::with_capacity(n);
    let mut u_off: Vec<Vec<(usize, T)>> = Vec::with_capacity(n);

    let mut w = vec![T::zero(); n];
    let mut present = vec![false; n];
    let mut nz: Vec<usize> = Vec::new();
    let mut heap: BinaryHeap<Reverse<usize>> = BinaryHeap::new();

    for i in 0..n {
        nz.clear();
        heap.clear();
        let mut norm_sqr = 0.0;
        for (c, v) in rows.col_iter(i) {
            w[c] = v;
            present[c] = true;
            nz.push(c);
            norm_sqr += v.modulus_sqr();
            if iperm[c] < i {
                heap.push(Reverse(iperm[c]));
            }
        }
        let thr = params.droptol * norm_sqr.sqrt();

        let mut lrow: Vec<(usize, T)> = Vec::new();
        while let Some(Reverse(k)) = heap.pop() {
            let c = perm[k];
            let mult = w[c] / u_diag[k];
            w[c] = T::zero();
            if mult.modulus() < thr || mult.is_zero() {
                continue;
            }
            lrow.push((k, mult));
            for &(c2, u) in &u_off[k] {
                if !present[c2] {
                    present[c2] = true;
                    nz.push(c2);
                    w[c2] = -(mult * u);
                    if iperm[c2] < i {
                        heap.push(Reverse(iperm[c2]));
                    }
                } else {
                    w[c2] -= mult * u;
                }
            }
        }
        keep_largest(&mut lrow, params.lfil);

        let diag_col = perm[i];
        let mut diag = if present[diag_col] {
            w[diag_col]
        } else {
            T::zero()
        };
        // U part keyed by current position for tie-breaking
        let mut upart: Vec<(usize, T)> = nz
            .iter()
            .filter(|&&c| iperm[c] > i)
            .map(|&c| (iperm[c], w[c]))
            .filter(|(_, v)| !(v.modulus() < thr))
            .collect();
        keep_largest(&mut upart, params.lfil);

        if params.pivtol > 0.0 {
            let mut best: Option<usize> = None;
            let mut best_mag = diag.modulus();
            for (idx, &(_, v)) in upart.iter().enumerate() {
                let mag = v.modulus();
                if mag * params.pivtol > diag.modulus() && mag > best_mag {
                    best = Some(idx);
                    best_mag = mag;
                }
            }
            if let Some(idx) = best {
                let (pos, val) = upart[idx];
                let new_col = perm[pos];
                // old diagonal moves to the vacated position
                perm.swap(i, pos);
                iperm[diag_col] = pos;
                iperm[new_col] = i;
                if diag.is_zero() {
                    upart.remove(idx);
                } else {
                    upart[idx] = (pos, diag);
                }
                diag = val;
            }
        }

        for &c in &nz {
            present[c] = false;
            w[c] = T::zero();
        }

        if !(diag.modulus() >= PIVOT_FLOOR) || !diag.is_finite() {
            return Err(Error::ZeroPivot {
                row: i,
                pivot: diag.modulus(),
            });
        }
        u_diag.push(diag);
        u_off.push(upart.into_iter().map(|(pos, v)| (perm[pos], v)).collect());
        l_entries.push(lrow);
    }

    let mut lt =
        TripletBuffer::with_capacity(n, n, n + l_entries.iter().map(Vec::len).sum::<usize>());
    let mut ut = TripletBuffer::with_capacity(n, n, n + u_off.iter().map(Vec::len).sum::<usize>());
    for i in 0..n {
        for &(k, v) in &l_entries[i] {
            lt.push(i, k, v);
        }
        lt.push(i, i, T::one());
        ut.push(i, i, u_diag[i]);
        for &(c, v) in &u_off[i] {
            ut.push(i, iperm[c], v);
        }
    }
    let l = SparseMatrix::from_triplets(&lt)?;
    let u = SparseMatrix::from_triplets(&ut)?;
    Ok(IlutpFactors {
        l_rows: l.transpose(),
        u_rows: u.transpose(),
        l,
        u,
        colperm: perm,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[&[f64]]) -> SparseMatrix<f64> {
        let n = rows.len();
        let mut t = TripletBuffer::new(n, n);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    t.push(i, j, v);
                }
            }
        }
        SparseMatrix::from_triplets(&t).unwrap()
    }

    #[test]
    fn diagonal_matrix_factors_trivially() {
        let a = SparseMatrix::from_diagonal(&[2.0, 4.0, -1.0]);
        let f = factor(&a, IlutpParams::default()).unwrap();
        assert_eq!(f.l(), &SparseMatrix::identity(3));
        assert_eq!(f.u(), &a);
        assert_eq!(f.colperm(), &[0, 1, 2]);
        let f = factor(
            &SparseMatrix::from_diagonal(&[2.0, 4.0]),
            IlutpParams::default(),
        )
        .unwrap();
        assert_eq!(f.apply_solve(&[2.0, 4.0]).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn two_by_two_exact_lu() {
        let a = dense(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let p = IlutpParams {
            lfil: 2,
            droptol: 0.0,
            pivtol: 0.0,
        };
        let f = factor(&a, p).unwrap();
        assert_eq!(f.l(), &dense(&[&[1.0, 0.0], &[0.5, 1.0]]));
        assert_eq!(f.u(), &dense(&[&[2.0, 1.0], &[0.0, 1.5]]));
    }

    #[test]
    fn antidiagonal_needs_pivot() {
        let a = dense(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let p = IlutpParams {
            lfil: 2,
            droptol: 0.0,
            pivtol: 1.0,
        };
        let f = factor(&a, p).unwrap();
        assert_eq!(f.colperm(), &[1, 0]);
        assert_eq!(f.apply_solve(&[3.0, 7.0]).unwrap(), vec![7.0, 3.0]);

        let no_pivot = IlutpParams { pivtol: 0.0, ..p };
        assert!(matches!(
            factor(&a, no_pivot),
            Err(Error::ZeroPivot { row: 0, .. })
        ));
    }

    #[test]
    fn rejects_bad_params_and_shapes() {
        let a = SparseMatrix::<f64>::identity(2);
        let bad = IlutpParams {
            pivtol: 1.5,
            ..IlutpParams::default()
        };
        assert!(factor(&a, bad).is_err());
        let bad = IlutpParams {
            droptol: -1.0,
            ..IlutpParams::default()
        };
        assert!(factor(&a, bad).is_err());
        assert!(factor(&SparseMatrix::<f64>::zeros(2, 3), IlutpParams::default()).is_err());
    }

    #[test]
    fn zero_row_fails_with_row_index() {
        let a = dense(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]);
        assert!(matches!(
            factor(&a, IlutpParams::default()),
            Err(Error::ZeroPivot { row: 1, .. })
        ));
    }

    #[test]
    fn lfil_zero_gives_diagonal_factors() {
        let a = dense(&[&[4.0, 1.0, 0.0], &[1.0, 4.0, 1.0], &[0.0, 1.0, 4.0]]);
        let p = IlutpParams {
            lfil: 0,
            droptol: 0.0,
            pivtol: 0.0,
        };
        let f = factor(&a, p).unwrap();
        assert_eq!(f.l().nnz(), 3);
        assert_eq!(f.u().nnz(), 3);
    }
}
