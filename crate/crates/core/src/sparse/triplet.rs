use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Coordinate-format (COO) assembly buffer.
///
/// Entries may arrive in any order and may repeat; repeated positions are
/// summed when the buffer is converted with [`crate::SparseMatrix::from_triplets`].
#[derive(Debug, Clone, PartialEq)]
pub struct TripletBuffer<T> {
    nrows: usize,
    ncols: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> TripletBuffer<T> {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self::with_capacity(nrows, ncols, 0)
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Self {
        TripletBuffer {
            nrows,
            ncols,
            rows: Vec::with_capacity(cap),
            cols: Vec::with_capacity(cap),
            values: Vec::with_capacity(cap),
        }
    }

    /// Builds a buffer from parallel index/value lists.
    pub fn from_parts(
        nrows: usize,
        ncols: usize,
        rows: Vec<usize>,
        cols: Vec<usize>,
        values: Vec<T>,
    ) -> Result<Self> {
        if rows.len() != cols.len() || rows.len() != values.len() {
            return Err(Error::dims(
                "TripletBuffer::from_parts",
                format!("{} entries in every list", rows.len()),
                format!("{} cols, {} values", cols.len(), values.len()),
            ));
        }
        let buf = TripletBuffer {
            nrows,
            ncols,
            rows,
            cols,
            values,
        };
        buf.check_bounds()?;
        Ok(buf)
    }

    /// Appends one entry. Out-of-range indices are reported at conversion.
    pub fn push(&mut self, row: usize, col: usize, value: T) {
        self.rows.push(row);
        self.cols.push(col);
        self.values.push(value);
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.rows
            .iter()
            .zip(&self.cols)
            .zip(&self.values)
            .map(|((&r, &c), &v)| (r, c, v))
    }

    pub(crate) fn check_bounds(&self) -> Result<()> {
        for (&row, &col) in self.rows.iter().zip(&self.cols) {
            if row >= self.nrows || col >= self.ncols {
                return Err(Error::IndexOutOfRange {
                    row,
                    col,
                    nrows: self.nrows,
                    ncols: self.ncols,
                });
            }
        }
        Ok(())
    }
}
