//! A-priori sparsity patterns for sparse approximate maps.
//!
//! A pattern is a pure index structure: per column, a sorted set of row
//! indices. It never carries values.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::SparseMatrix;

/// Largest supported exponent for [`symbolic_power`] and [`sparsified_power`].
pub const MAX_POWER: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsityPattern {
    nrows: usize,
    ncols: usize,
    colptr: Vec<usize>,
    rowind: Vec<usize>,
}

/// How [`sparsified_power`] interprets its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Threshold {
    /// Compare against entries of `Aᵖ` scaled to unit maximum magnitude.
    #[default]
    Relative,
    /// Compare against raw magnitudes.
    Absolute,
}

impl SparsityPattern {
    pub fn empty(nrows: usize, ncols: usize) -> Self {
        SparsityPattern {
            nrows,
            ncols,
            colptr: vec![0; ncols + 1],
            rowind: Vec::new(),
        }
    }

    /// Builds a pattern from arbitrary `(row, col)` pairs; duplicates merge.
    pub fn from_entries(
        nrows: usize,
        ncols: usize,
        entries: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut cols: Vec<Vec<usize>> = vec![Vec::new(); ncols];
        for (r, c) in entries {
            if r >= nrows || c >= ncols {
                return Err(Error::IndexOutOfRange {
                    row: r,
                    col: c,
                    nrows,
                    ncols,
                });
            }
            cols[c].push(r);
        }
        Ok(Self::from_columns(nrows, cols))
    }

    fn from_columns(nrows: usize, mut cols: Vec<Vec<usize>>) -> Self {
        let ncols = cols.len();
        let mut colptr = Vec::with_capacity(ncols + 1);
        let mut rowind = Vec::new();
        colptr.push(0);
        for c in cols.iter_mut() {
            c.sort_unstable();
            c.dedup();
            rowind.extend_from_slice(c);
            colptr.push(rowind.len());
        }
        SparsityPattern {
            nrows,
            ncols,
            colptr,
            rowind,
        }
    }

    pub fn diagonal(n: usize) -> Self {
        offset_pattern(n, &[0])
    }

    pub fn tridiagonal(n: usize) -> Self {
        offset_pattern(n, &[-1, 0, 1])
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.rowind.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rowind.is_empty()
    }

    /// Sorted row indices of column `j`.
    pub fn col(&self, j: usize) -> &[usize] {
        &self.rowind[self.colptr[j]..self.colptr[j + 1]]
    }

    pub fn colptr(&self) -> &[usize] {
        &self.colptr
    }

    pub fn rowind(&self) -> &[usize] {
        &self.rowind
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        j < self.ncols && self.col(j).binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.ncols).flat_map(move |j| self.col(j).iter().map(move |&i| (i, j)))
    }

    fn check_same_dims(&self, other: &Self, op: &'static str) -> Result<()> {
        if (self.nrows, self.ncols) != (other.nrows, other.ncols) {
            return Err(Error::dims(
                op,
                format!("{}x{}", self.nrows, self.ncols),
                format!("{}x{}", other.nrows, other.ncols),
            ));
        }
        Ok(())
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other, "pattern union")?;
        let cols = (0..self.ncols)
            .map(|j| merge_sorted(self.col(j), other.col(j)))
            .collect();
        Ok(Self::from_columns(self.nrows, cols))
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other, "pattern intersection")?;
        let cols = (0..self.ncols)
            .map(|j| {
                let b = other.col(j);
                self.col(j)
                    .iter()
                    .copied()
                    .filter(|i| b.binary_search(i).is_ok())
                    .collect()
            })
            .collect();
        Ok(Self::from_columns(self.nrows, cols))
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool> {
        self.check_same_dims(other, "pattern subset")?;
        Ok((0..self.ncols).all(|j| {
            let b = other.col(j);
            self.col(j).iter().all(|i| b.binary_search(i).is_ok())
        }))
    }

    /// Boolean product pattern of `self · other`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.ncols != other.nrows {
            return Err(Error::dims("pattern product", self.ncols, other.nrows));
        }
        let mut mark = vec![usize::MAX; self.nrows];
        let cols = (0..other.ncols)
            .map(|j| {
                let mut rows = Vec::new();
                for &k in other.col(j) {
                    for &i in self.col(k) {
                        if mark[i] != j {
                            mark[i] = j;
                            rows.push(i);
                        }
                    }
                }
                rows
            })
            .collect();
        Ok(Self::from_columns(self.nrows, cols))
    }

    /// Text form: `nrows ncols nnz` then one `row col` line per entry.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.nrows, self.ncols, self.nnz());
        for (i, j) in self.iter() {
            let _ = writeln!(s, "{i} {j}");
        }
        s
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            msg,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('%') && !l.starts_with('#'));
        let (hline, header) = lines
            .next()
            .ok_or_else(|| perr(1, "missing header".into()))?;
        let dims = parse_usizes(header).map_err(|m| perr(hline, m))?;
        let [nrows, ncols, nnz] = dims[..] else {
            return Err(perr(hline, "header must be `nrows ncols nnz`".into()));
        };
        let mut entries = Vec::with_capacity(nnz);
        for (ln, l) in lines {
            let v = parse_usizes(l).map_err(|m| perr(ln, m))?;
            let [r, c] = v[..] else {
                return Err(perr(ln, "entry must be `row col`".into()));
            };
            if r >= nrows || c >= ncols {
                return Err(perr(
                    ln,
                    format!("entry ({r}, {c}) outside {nrows}x{ncols}"),
                ));
            }
            entries.push((r, c));
        }
        if entries.len() != nnz {
            return Err(perr(
                hline,
                format!("header declares {nnz} entries, file has {}", entries.len()),
            ));
        }
        Self::from_entries(nrows, ncols, entries)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

fn parse_usizes(line: &str) -> std::result::Result<Vec<usize>, String> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|e| format!("bad index `{t}`: {e}"))
        })
        .collect()
}

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut p, mut q) = (0, 0);
    while p < a.len() && q < b.len() {
        match a[p].cmp(&b[q]) {
            std::cmp::Ordering::Less => {
                out.push(a[p]);
                p += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[q]);
                q += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[p]);
                p += 1;
                q += 1;
            }
        }
    }
    out.extend_from_slice(&a[p..]);
    out.extend_from_slice(&b[q..]);
    out
}

/// Positions of the stored entries of `a`, explicit zeros included.
pub fn pattern_of<T: Scalar>(a: &SparseMatrix<T>) -> SparsityPattern {
    SparsityPattern {
        nrows: a.nrows(),
        ncols: a.ncols(),
        colptr: a.colptr().to_vec(),
        rowind: a.rowind().to_vec(),
    }
}

/// Band-style pattern: `(s + o, s)` for each column `s` and offset `o`,
/// clipped at the matrix boundary.
pub fn offset_pattern(n: usize, offsets: &[isize]) -> SparsityPattern {
    let mut offs = offsets.to_vec();
    offs.sort_unstable();
    offs.dedup();
    let cols = (0..n)
        .map(|s| {
            offs.iter()
                .filter_map(|&o| {
                    let r = s as isize + o;
                    (0..n as isize).contains(&r).then_some(r as usize)
                })
                .collect()
        })
        .collect();
    SparsityPattern::from_columns(n, cols)
}

fn check_power(p: usize, square: bool, nrows: usize, ncols: usize) -> Result<()> {
    if !square {
        return Err(Error::dims(
            "matrix power",
            format!("{nrows}x{nrows}"),
            format!("{nrows}x{ncols}"),
        ));
    }
    if !(1..=MAX_POWER).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "power {p} outside supported range 1..={MAX_POWER}"
        )));
    }
    Ok(())
}

/// Structural pattern of `Pᵖ` by repeated boolean products.
pub fn symbolic_power(pattern: &SparsityPattern, p: usize) -> Result<SparsityPattern> {
    check_power(
        p,
        pattern.nrows == pattern.ncols,
        pattern.nrows,
        pattern.ncols,
    )?;
    let mut acc = pattern.clone();
    for _ in 1..p {
        acc = pattern.product(&acc)?;
    }
    Ok(acc)
}

/// Pattern of `Aᵖ` keeping entries with magnitude at least `tau`
/// (after unit-max scaling in [`Threshold::Relative`] mode).
pub fn sparsified_power<T: Scalar>(
    a: &SparseMatrix<T>,
    p: usize,
    tau: f64,
    mode: Threshold,
) -> Result<SparsityPattern> {
    check_power(p, a.is_square(), a.nrows(), a.ncols())?;
    if !(tau >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold {tau} must be >= 0"
        )));
    }
    let mut power = a.clone();
    for _ in 1..p {
        power = a.spmm(&power)?;
    }
    let scale = match mode {
        Threshold::Absolute => 1.0,
        Threshold::Relative => {
            let max = power
                .values()
                .iter()
                .fold(0.0f64, |m, v| m.max(v.modulus()));
            if max > 0.0 {
                1.0 / max
            } else {
                1.0
            }
        }
    };
    let cols = (0..power.ncols())
        .map(|j| {
            power
                .col_iter(j)
                .filter(|(_, v)| v.modulus() * scale >= tau)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    Ok(SparsityPattern::from_columns(power.nrows(), cols))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_of_diagonal_and_empty() {
        let p = pattern_of(&SparseMatrix::from_diagonal(&[1.0, 2.0]));
        assert_eq!(p.iter().collect::<Vec<_>>(), vec![(0, 0), (1, 1)]);
        let e = pattern_of(&SparseMatrix::<f64>::zeros(3, 3));
        assert!(e.is_empty());
    }

    #[test]
    fn offsets_diagonal_and_band() {
        assert_eq!(offset_pattern(4, &[0]).nnz(), 4);
        assert_eq!(offset_pattern(3, &[-1, 0, 1]).nnz(), 3 * 3 - 2);
    }

    #[test]
    fn mesh_offset_pattern_interior_counts() {
        let n = 132_300;
        let offs = [0, -1, 1, -300, 300, -6000, 6000];
        let p = offset_pattern(n, &offs);
        assert_eq!(p.col(10_000).len(), 7);
        assert_eq!(p.col(0).len(), 4);
        assert!(p.nnz() < 7 * n);
    }

    #[test]
    fn powers_of_band_and_diagonal() {
        let tri = SparsityPattern::tridiagonal(7);
        assert_eq!(symbolic_power(&tri, 1).unwrap(), tri);
        assert_eq!(
            symbolic_power(&tri, 2).unwrap(),
            offset_pattern(7, &[-2, -1, 0, 1, 2])
        );
        let d = SparsityPattern::diagonal(5);
        assert_eq!(symbolic_power(&d, 4).unwrap(), d);
        assert!(symbolic_power(&d, 0).is_err());
        assert!(symbolic_power(&d, 6).is_err());
        assert!(symbolic_power(&SparsityPattern::empty(2, 3), 2).is_err());
    }

    #[test]
    fn sparsify_extremes() {
        let a = SparseMatrix::from_diagonal(&[1.0, 3.0, 2.0]);
        let all = sparsified_power(&a, 2, 0.0, Threshold::Relative).unwrap();
        assert_eq!(all, SparsityPattern::diagonal(3));
        let top = sparsified_power(&a, 1, 1.0, Threshold::Relative).unwrap();
        assert_eq!(top.iter().collect::<Vec<_>>(), vec![(1, 1)]);
        let none = sparsified_power(&a, 1, 1.5, Threshold::Relative).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn set_operations() {
        let d = SparsityPattern::diagonal(4);
        let t = SparsityPattern::tridiagonal(4);
        assert_eq!(d.union(&d).unwrap(), d);
        assert!(d.is_subset(&t).unwrap());
        assert!(!t.is_subset(&d).unwrap());
        assert_eq!(d.intersection(&t).unwrap(), d);
        assert!(d.union(&SparsityPattern::diagonal(3)).is_err());
    }

    #[test]
    fn text_parse_cases() {
        let p = SparsityPattern::parse("3 3 0\n", Path::new("mem")).unwrap();
        assert_eq!(p, SparsityPattern::empty(3, 3));
        let p = SparsityPattern::parse("3 2 2\n2 1\n0 0\n", Path::new("mem")).unwrap();
        assert_eq!(p.iter().collect::<Vec<_>>(), vec![(0, 0), (2, 1)]);
        assert!(SparsityPattern::parse("3 3 1\n", Path::new("mem")).is_err());
        assert!(SparsityPattern::parse("2 2 1\n2 0\n", Path::new("mem")).is_err());
        assert!(SparsityPattern::parse("2 2\n", Path::new("mem")).is_err());
    }
}
