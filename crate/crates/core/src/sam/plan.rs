use crate::error::{Error, Result};
use crate::pattern::SparsityPattern;
use crate::scalar::Scalar;
use crate::sparse::SparseMatrix;

/// Per-column index sets for the small least-squares problems of a map.
///
/// For column `ℓ`, `s(ℓ)` lists the unknown positions of the map column and
/// `r(ℓ)` the equation rows that can be nonzero in `A(:, s(ℓ))`. One plan
/// serves every matrix with the planning matrix's nonzero structure.
#[derive(Debug, Clone, PartialEq)]
pub struct SamPlan {
    n: usize,
    s_ptr: Vec<usize>,
    s_idx: Vec<usize>,
    r_ptr: Vec<usize>,
    r_idx: Vec<usize>,
    degenerate: Vec<usize>,
    max_s: usize,
    max_r: usize,
    include_rhs_rows: bool,
    // nonzero structure of the planning matrix
    colptr: Vec<usize>,
    rowind: Vec<usize>,
}

impl SamPlan {
    /// Plans against `a`. With `include_rhs_rows`, each `r(ℓ)` also covers
    /// the stored rows of column `ℓ` of `a` itself, which stands in for the
    /// reference matrix when both share one structure.
    pub fn new<T: Scalar>(
        pattern: &SparsityPattern,
        a: &SparseMatrix<T>,
        include_rhs_rows: bool,
    ) -> Result<Self> {
        let rhs = include_rhs_rows.then_some(a);
        Self::build(pattern, a, rhs)
    }

    /// Plans against `a`, widening each `r(ℓ)` with the stored rows of
    /// column `ℓ` of `reference`.
    pub fn with_reference<T: Scalar>(
        pattern: &SparsityPattern,
        a: &SparseMatrix<T>,
        reference: &SparseMatrix<T>,
    ) -> Result<Self> {
        if reference.shape() != a.shape() {
            return Err(Error::dims(
                "SamPlan::with_reference",
                format!("{:?}", a.shape()),
                format!("{:?}", reference.shape()),
            ));
        }
        Self::build(pattern, a, Some(reference))
    }

    fn build<T: Scalar>(
        pattern: &SparsityPattern,
        a: &SparseMatrix<T>,
        rhs: Option<&SparseMatrix<T>>,
    ) -> Result<Self> {
        let n = a.ncols();
        if !a.is_square() {
            return Err(Error::dims(
                "SamPlan",
                format!("{n}x{n}"),
                format!("{:?}", a.shape()),
            ));
        }
        if pattern.nrows() != n || pattern.ncols() != n {
            return Err(Error::dims(
                "SamPlan pattern",
                format!("{n}x{n}"),
                format!("{}x{}", pattern.nrows(), pattern.ncols()),
            ));
        }

        let mut r_ptr = Vec::with_capacity(n + 1);
        let mut r_idx = Vec::new();
        let mut degenerate = Vec::new();
        let (mut max_s, mut max_r) = (0, 0);
        let mut mark = vec![usize::MAX; n];
        let mut rows: Vec<usize> = Vec::new();
        r_ptr.push(0);
        for l in 0..n {
            let s = pattern.col(l);
            rows.clear();
            if s.is_empty() {
                degenerate.push(l);
            } else {
                for &j in s {
                    for &i in a.col_rows(j) {
                        if mark[i] != l {
                            mark[i] = l;
                            rows.push(i);
                        }
                    }
                }
                if let Some(rhs) = rhs {
                    for &i in rhs.col_rows(l) {
                        if mark[i] != l {
                            mark[i] = l;
                            rows.push(i);
                        }
                    }
                }
                rows.sort_unstable();
            }
            r_idx.extend_from_slice(&rows);
            r_ptr.push(r_idx.len());
            max_s = max_s.max(s.len());
            max_r = max_r.max(rows.len());
        }

        Ok(SamPlan {
            n,
            s_ptr: pattern.colptr().to_vec(),
            s_idx: pattern.rowind().to_vec(),
            r_ptr,
            r_idx,
            degenerate,
            max_s,
            max_r,
            include_rhs_rows: rhs.is_some(),
            colptr: a.colptr().to_vec(),
            rowind: a.rowind().to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Unknown positions of map column `l`.
    pub fn s(&self, l: usize) -> &[usize] {
        &self.s_idx[self.s_ptr[l]..self.s_ptr[l + 1]]
    }

    /// Relevant equation rows of map column `l`.
    pub fn r(&self, l: usize) -> &[usize] {
        &self.r_idx[self.r_ptr[l]..self.r_ptr[l + 1]]
    }

    pub fn max_s(&self) -> usize {
        self.max_s
    }

    pub fn max_r(&self) -> usize {
        self.max_r
    }

    /// Columns whose pattern is empty; their map column is zero.
    pub fn degenerate_columns(&self) -> &[usize] {
        &self.degenerate
    }

    pub fn includes_rhs_rows(&self) -> bool {
        self.include_rhs_rows
    }

    /// Total number of map entries (the pattern size).
    pub fn map_nnz(&self) -> usize {
        self.s_idx.len()
    }

    pub(crate) fn s_offsets(&self) -> &[usize] {
        &self.s_ptr
    }

    pub(crate) fn s_indices(&self) -> &[usize] {
        &self.s_idx
    }

    /// First column whose nonzero structure differs from the planning matrix.
    pub fn structure_mismatch<T: Scalar>(&self, a: &SparseMatrix<T>) -> Option<usize> {
        if a.shape() != (self.n, self.n) {
            return Some(0);
        }
        (0..self.n).find(|&j| a.col_rows(j) != &self.rowind[self.colptr[j]..self.colptr[j + 1]])
    }
}
