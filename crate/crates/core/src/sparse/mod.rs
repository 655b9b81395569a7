//! Compressed sparse column storage and the kernels shared by every module.

mod dense;
mod triplet;

pub use dense::{DenseBlock, LeastSquares, RANK_TOL};
pub use triplet::TripletBuffer;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Column-major compressed sparse matrix.
///
/// Row indices strictly increase within each column. Explicitly stored zeros
/// are kept; nothing in this module prunes entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    nrows: usize,
    ncols: usize,
    colptr: Vec<usize>,
    rowind: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> SparseMatrix<T> {
    /// Validates and wraps raw CSC arrays.
    pub fn from_raw_parts(
        nrows: usize,
        ncols: usize,
        colptr: Vec<usize>,
        rowind: Vec<usize>,
        values: Vec<T>,
    ) -> Result<Self> {
        if colptr.len() != ncols + 1 {
            return Err(Error::dims("from_raw_parts", ncols + 1, colptr.len()));
        }
        if colptr[0] != 0 || colptr[ncols] != rowind.len() || rowind.len() != values.len() {
            return Err(Error::InvalidArgument(
                "colptr must start at 0 and end at nnz = rowind.len() = values.len()".into(),
            ));
        }
        for j in 0..ncols {
            if colptr[j] > colptr[j + 1] {
                return Err(Error::InvalidArgument(format!(
                    "colptr decreases at column {j}"
                )));
            }
            let rows = &rowind[colptr[j]..colptr[j + 1]];
            for (k, &r) in rows.iter().enumerate() {
                if r >= nrows {
                    return Err(Error::IndexOutOfRange {
                        row: r,
                        col: j,
                        nrows,
                        ncols,
                    });
                }
                if k > 0 && rows[k - 1] >= r {
                    return Err(Error::InvalidArgument(format!(
                        "row indices not strictly increasing in column {j}"
                    )));
                }
            }
        }
        Ok(SparseMatrix {
            nrows,
            ncols,
            colptr,
            rowind,
            values,
        })
    }

    pub(crate) fn from_parts_unchecked(
        nrows: usize,
        ncols: usize,
        colptr: Vec<usize>,
        rowind: Vec<usize>,
        values: Vec<T>,
    ) -> Self {
        debug_assert_eq!(colptr.len(), ncols + 1);
        debug_assert_eq!(rowind.len(), values.len());
        SparseMatrix {
            nrows,
            ncols,
            colptr,
            rowind,
            values,
        }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            colptr: vec![0; ncols + 1],
            rowind: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![T::one(); n])
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        SparseMatrix {
            nrows: n,
            ncols: n,
            colptr: (0..=n).collect(),
            rowind: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    /// Assembles a canonical matrix from coordinates; duplicates are summed.
    pub fn from_triplets(t: &TripletBuffer<T>) -> Result<Self> {
        t.check_bounds()?;
        let (nrows, ncols) = (t.nrows(), t.ncols());
        let mut count = vec![0usize; ncols + 1];
        for &c in t.cols() {
            count[c + 1] += 1;
        }
        for j in 0..ncols {
            count[j + 1] += count[j];
        }
        // bucket by column, preserving input order within a column
        let mut next = count.clone();
        let mut order = vec![0usize; t.len()];
        for (k, &c) in t.cols().iter().enumerate() {
            order[next[c]] = k;
            next[c] += 1;
        }
        let mut colptr = Vec::with_capacity(ncols + 1);
        let mut rowind = Vec::with_capacity(t.len());
        let mut values = Vec::with_capacity(t.len());
        colptr.push(0);
        let mut scratch: Vec<(usize, T)> = Vec::new();
        for j in 0..ncols {
            scratch.clear();
            scratch.extend(
                order[count[j]..count[j + 1]]
                    .iter()
                    .map(|&k| (t.rows()[k], t.values()[k])),
            );
            // stable sort keeps summation order deterministic
            scratch.sort_by_key(|&(r, _)| r);
            for &(r, v) in &scratch {
                if rowind.len() > colptr[j] && *rowind.last().unwrap() == r {
                    *values.last_mut().unwrap() += v;
                } else {
                    rowind.push(r);
                    values.push(v);
                }
            }
            colptr.push(rowind.len());
        }
        Ok(SparseMatrix {
            nrows,
            ncols,
            colptr,
            rowind,
            values,
        })
    }

    pub fn to_triplets(&self) -> TripletBuffer<T> {
        let mut t = TripletBuffer::with_capacity(self.nrows, self.ncols, self.nnz());
        for j in 0..self.ncols {
            for (r, v) in self.col_iter(j) {
                t.push(r, j, v);
            }
        }
        t
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    /// Number of stored entries, explicit zeros included.
    pub fn nnz(&self) -> usize {
        self.rowind.len()
    }

    pub fn colptr(&self) -> &[usize] {
        &self.colptr
    }

    pub fn rowind(&self) -> &[usize] {
        &self.rowind
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Row indices stored in column `j`.
    pub fn col_rows(&self, j: usize) -> &[usize] {
        &self.rowind[self.colptr[j]..self.colptr[j + 1]]
    }

    pub fn col_values(&self, j: usize) -> &[T] {
        &self.values[self.colptr[j]..self.colptr[j + 1]]
    }

    pub fn col_iter(&self, j: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        self.col_rows(j)
            .iter()
            .copied()
            .zip(self.col_values(j).iter().copied())
    }

    /// Entry `(i, j)`; absent entries read as zero.
    pub fn get(&self, i: usize, j: usize) -> T {
        let rows = self.col_rows(j);
        match rows.binary_search(&i) {
            Ok(k) => self.col_values(j)[k],
            Err(_) => T::zero(),
        }
    }

    /// Whether both matrices store exactly the same positions. On mismatch
    /// returns the first differing column.
    pub fn structure_diff(&self, other: &SparseMatrix<T>) -> Option<usize> {
        let ncols = self.ncols.min(other.ncols);
        for j in 0..ncols {
            if self.col_rows(j) != other.col_rows(j) {
                return Some(j);
            }
        }
        if self.ncols != other.ncols || self.nrows != other.nrows {
            return Some(ncols);
        }
        None
    }

    /// `y = A·x`, column sweep.
    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.ncols {
            return Err(Error::dims("matvec", self.ncols, x.len()));
        }
        let mut y = vec![T::zero(); self.nrows];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    /// `y = A·x` into a caller buffer; panics on length mismatch.
    pub fn matvec_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.ncols, "matvec: x length");
        assert_eq!(y.len(), self.nrows, "matvec: y length");
        y.iter_mut().for_each(|v| *v = T::zero());
        for (j, &xj) in x.iter().enumerate() {
            if xj.is_zero() {
                continue;
            }
            for k in self.colptr[j]..self.colptr[j + 1] {
                y[self.rowind[k]] += self.values[k] * xj;
            }
        }
    }

    /// Sparse product `A·B` (Gustavson, column by column). Entries that
    /// cancel to zero stay stored.
    pub fn spmm(&self, b: &SparseMatrix<T>) -> Result<SparseMatrix<T>> {
        if self.ncols != b.nrows {
            return Err(Error::dims("spmm", self.ncols, b.nrows));
        }
        let m = self.nrows;
        let mut colptr = Vec::with_capacity(b.ncols + 1);
        let mut rowind = Vec::new();
        let mut values = Vec::new();
        let mut acc = vec![T::zero(); m];
        let mut mark = vec![usize::MAX; m];
        let mut touched: Vec<usize> = Vec::new();
        colptr.push(0);
        for j in 0..b.ncols {
            touched.clear();
            for (k, bkj) in b.col_iter(j) {
                for (i, aik) in self.col_iter(k) {
                    if mark[i] != j {
                        mark[i] = j;
                        acc[i] = T::zero();
                        touched.push(i);
                    }
                    acc[i] += aik * bkj;
                }
            }
            touched.sort_unstable();
            for &i in &touched {
                rowind.push(i);
                values.push(acc[i]);
            }
            colptr.push(rowind.len());
        }
        Ok(SparseMatrix {
            nrows: m,
            ncols: b.ncols,
            colptr,
            rowind,
            values,
        })
    }

    /// Plain (non-conjugating) transpose.
    pub fn transpose(&self) -> SparseMatrix<T> {
        let mut count = vec![0usize; self.nrows + 1];
        for &r in &self.rowind {
            count[r + 1] += 1;
        }
        for i in 0..self.nrows {
            count[i + 1] += count[i];
        }
        let mut next = count.clone();
        let mut rowind = vec![0usize; self.nnz()];
        let mut values = vec![T::zero(); self.nnz()];
        for j in 0..self.ncols {
            for (r, v) in self.col_iter(j) {
                let dst = next[r];
                rowind[dst] = j;
                values[dst] = v;
                next[r] += 1;
            }
        }
        SparseMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            colptr: count,
            rowind,
            values,
        }
    }

    /// Dense block `A(rows, cols)`; index sets must be sorted.
    pub fn extract_dense_submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<DenseBlock<T>> {
        let mut block = DenseBlock::zeros(rows.len(), cols.len());
        self.extract_into(rows, cols, &mut block)?;
        Ok(block)
    }

    /// Like [`Self::extract_dense_submatrix`] but reuses `block`'s storage.
    pub fn extract_into(
        &self,
        rows: &[usize],
        cols: &[usize],
        block: &mut DenseBlock<T>,
    ) -> Result<()> {
        if let Some(&r) = rows.iter().find(|&&r| r >= self.nrows) {
            return Err(Error::IndexOutOfRange {
                row: r,
                col: 0,
                nrows: self.nrows,
                ncols: self.ncols,
            });
        }
        if let Some(&c) = cols.iter().find(|&&c| c >= self.ncols) {
            return Err(Error::IndexOutOfRange {
                row: 0,
                col: c,
                nrows: self.nrows,
                ncols: self.ncols,
            });
        }
        if !is_sorted(rows) || !is_sorted(cols) {
            return Err(Error::InvalidArgument(
                "submatrix index sets must be strictly increasing".into(),
            ));
        }
        block.reset(rows.len(), cols.len());
        for (jj, &c) in cols.iter().enumerate() {
            let dst = block.col_mut(jj);
            merge_column(self.col_rows(c), self.col_values(c), rows, dst);
        }
        Ok(())
    }

    /// Gathers `A(rows, j)` into `dst` (rows sorted).
    pub fn gather_column(&self, j: usize, rows: &[usize], dst: &mut [T]) {
        dst.iter_mut().for_each(|v| *v = T::zero());
        merge_column(self.col_rows(j), self.col_values(j), rows, dst);
    }

    pub fn frobenius_norm(&self) -> f64 {
        crate::scalar::norm2(&self.values)
    }

    pub fn to_dense(&self) -> DenseBlock<T> {
        let mut d = DenseBlock::zeros(self.nrows, self.ncols);
        for j in 0..self.ncols {
            for (i, v) in self.col_iter(j) {
                d.set(i, j, v);
            }
        }
        d
    }

    pub fn map_values<U: Scalar>(&self, f: impl Fn(T) -> U) -> SparseMatrix<U> {
        SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            colptr: self.colptr.clone(),
            rowind: self.rowind.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, s: T) -> SparseMatrix<T> {
        self.map_values(|v| v * s)
    }

    /// Diagonal entries (zero where absent).
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i))
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

impl SparseMatrix<f64> {
    /// Promotes a real matrix into the complex field.
    pub fn to_complex(&self) -> SparseMatrix<Complex64> {
        self.map_values(|v| Complex64::new(v, 0.0))
    }
}

fn is_sorted(idx: &[usize]) -> bool {
    idx.windows(2).all(|w| w[0] < w[1])
}

/// Scatters the sorted column `(src_rows, src_vals)` into `dst` positions
/// given by sorted `rows`.
fn merge_column<T: Scalar>(src_rows: &[usize], src_vals: &[T], rows: &[usize], dst: &mut [T]) {
    let (mut a, mut b) = (0, 0);
    while a < src_rows.len() && b < rows.len() {
        match src_rows[a].cmp(&rows[b]) {
            std::cmp::Ordering::Less => a += 1,
            std::cmp::Ordering::Greater => b += 1,
            std::cmp::Ordering::Equal => {
                dst[b] = src_vals[a];
                a += 1;
                b += 1;
            }
        }
    }
}

/// `α·E + A` over the union of both patterns.
pub fn shifted_combine<T: Scalar>(
    alpha: T,
    e: &SparseMatrix<T>,
    a: &SparseMatrix<T>,
) -> Result<SparseMatrix<T>> {
    if e.shape() != a.shape() {
        return Err(Error::dims(
            "shifted_combine",
            format!("{:?}", a.shape()),
            format!("{:?}", e.shape()),
        ));
    }
    let mut colptr = Vec::with_capacity(a.ncols + 1);
    let mut rowind = Vec::with_capacity(a.nnz().max(e.nnz()));
    let mut values = Vec::with_capacity(a.nnz().max(e.nnz()));
    colptr.push(0);
    for j in 0..a.ncols {
        let (er, ev) = (e.col_rows(j), e.col_values(j));
        let (ar, av) = (a.col_rows(j), a.col_values(j));
        let (mut p, mut q) = (0, 0);
        while p < er.len() || q < ar.len() {
            let take_e = q >= ar.len() || (p < er.len() && er[p] <= ar[q]);
            let take_a = p >= er.len() || (q < ar.len() && ar[q] <= er[p]);
            if take_e && take_a {
                rowind.push(er[p]);
                values.push(alpha * ev[p] + av[q]);
                p += 1;
                q += 1;
            } else if take_e {
                rowind.push(er[p]);
                values.push(alpha * ev[p]);
                p += 1;
            } else {
                rowind.push(ar[q]);
                values.push(av[q]);
                q += 1;
            }
        }
        colptr.push(rowind.len());
    }
    Ok(SparseMatrix::from_parts_unchecked(
        a.nrows, a.ncols, colptr, rowind, values,
    ))
}

/// `‖A − B‖_F`, or `‖A‖_F` when `b` is `None`.
pub fn frobenius_norm_diff<T: Scalar>(
    a: &SparseMatrix<T>,
    b: Option<&SparseMatrix<T>>,
) -> Result<f64> {
    let Some(b) = b else {
        return Ok(a.frobenius_norm());
    };
    if a.shape() != b.shape() {
        return Err(Error::dims(
            "frobenius_norm_diff",
            format!("{:?}", a.shape()),
            format!("{:?}", b.shape()),
        ));
    }
    let diff = shifted_combine(-T::one(), b, a)?;
    Ok(diff.frobenius_norm())
}
