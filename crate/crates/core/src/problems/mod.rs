//! Test problems, shift lists, and Matrix Market I/O.

mod grid;
mod mm;
mod talbot;

pub use grid::{
    fem_pair_2d, grid_index, helmholtz_sequence, laplace2d_dirichlet, point_source, KappaField,
};
pub use mm::{
    is_complex_file, matrix_market_read, matrix_market_write, parse_matrix_market,
    to_matrix_market, vector_read, vector_write,
};
pub use talbot::{talbot_shifts, TalbotConstants};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::{shifted_combine, SparseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    HelmholtzSweep,
    ShiftedPair,
    MatrixFiles,
}

impl SequenceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SequenceKind::HelmholtzSweep => "helmholtz_sweep",
            SequenceKind::ShiftedPair => "shifted_pair",
            SequenceKind::MatrixFiles => "matrix_files",
        }
    }
}

#[derive(Debug, Clone)]
enum Systems {
    /// `A + z_k·E`
    Shifted {
        a: SparseMatrix<Complex64>,
        e: SparseMatrix<Complex64>,
        shifts: Vec<Complex64>,
    },
    Explicit(Vec<SparseMatrix<Complex64>>),
}

/// A sequence of square systems `A_k x = b` sharing one right-hand side.
///
/// Data is held in complex form; [`SequenceSpec::is_complex`] tells whether
/// the sequence can be solved in real arithmetic.
#[derive(Debug, Clone)]
pub struct SequenceSpec {
    kind: SequenceKind,
    systems: Systems,
    rhs: Vec<Complex64>,
    complex: bool,
}

fn to_c<U: Scalar>(m: &SparseMatrix<U>) -> SparseMatrix<Complex64> {
    m.map_values(Scalar::to_complex)
}

fn has_imag(m: &SparseMatrix<Complex64>) -> bool {
    m.values().iter().any(|v| v.im != 0.0)
}

fn check_square(what: &str, m: &SparseMatrix<Complex64>, n: usize) -> Result<()> {
    if m.shape() != (n, n) {
        return Err(Error::InvalidArgument(format!(
            "{what} is {}x{}, expected {n}x{n}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

impl SequenceSpec {
    /// `K_i = K0 − i·delta_s·I` for `i = 0..=count`. System 0 is `K0` itself.
    pub fn helmholtz<V: Scalar>(
        k0: &SparseMatrix<f64>,
        delta_s: f64,
        count: usize,
        rhs: &[V],
    ) -> Result<Self> {
        if !(delta_s > 0.0) {
            return Err(Error::InvalidArgument("delta_s must be positive".into()));
        }
        let shifts = (0..=count)
            .map(|i| Complex64::new(i as f64 * delta_s, 0.0))
            .collect();
        let eye = SparseMatrix::<f64>::identity(k0.nrows()).scaled(-1.0);
        let mut spec = Self::shifted(k0, &eye, shifts, rhs)?;
        spec.kind = SequenceKind::HelmholtzSweep;
        Ok(spec)
    }

    /// `A_k = A + z_k·E`.
    pub fn shifted<U: Scalar, V: Scalar>(
        a: &SparseMatrix<U>,
        e: &SparseMatrix<U>,
        shifts: Vec<Complex64>,
        rhs: &[V],
    ) -> Result<Self> {
        let (a, e) = (to_c(a), to_c(e));
        let n = a.nrows();
        check_square("A", &a, n)?;
        check_square("E", &e, n)?;
        if shifts.is_empty() {
            return Err(Error::InvalidArgument("shift list is empty".into()));
        }
        let rhs: Vec<Complex64> = rhs.iter().map(|v| v.to_complex()).collect();
        if rhs.len() != n {
            return Err(Error::dims("sequence rhs", n, rhs.len()));
        }
        let complex = has_imag(&a)
            || has_imag(&e)
            || shifts.iter().any(|z| z.im != 0.0)
            || rhs.iter().any(|v| v.im != 0.0);
        Ok(SequenceSpec {
            kind: SequenceKind::ShiftedPair,
            systems: Systems::Shifted { a, e, shifts },
            rhs,
            complex,
        })
    }

    pub fn from_matrices<U: Scalar, V: Scalar>(
        matrices: &[SparseMatrix<U>],
        rhs: &[V],
    ) -> Result<Self> {
        let Some(first) = matrices.first() else {
            return Err(Error::InvalidArgument("matrix list is empty".into()));
        };
        let n = first.nrows();
        let mats: Vec<_> = matrices.iter().map(to_c).collect();
        for (k, m) in mats.iter().enumerate() {
            check_square(&format!("matrix {k}"), m, n)?;
        }
        let rhs: Vec<Complex64> = rhs.iter().map(|v| v.to_complex()).collect();
        if rhs.len() != n {
            return Err(Error::dims("sequence rhs", n, rhs.len()));
        }
        let complex = mats.iter().any(has_imag) || rhs.iter().any(|v| v.im != 0.0);
        Ok(SequenceSpec {
            kind: SequenceKind::MatrixFiles,
            systems: Systems::Explicit(mats),
            rhs,
            complex,
        })
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        match &self.systems {
            Systems::Shifted { shifts, .. } => shifts.len(),
            Systems::Explicit(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_complex(&self) -> bool {
        self.complex
    }

    /// Shift of system `k`; zero for explicit matrix lists.
    pub fn shift(&self, k: usize) -> Complex64 {
        match &self.systems {
            Systems::Shifted { shifts, .. } => shifts[k],
            Systems::Explicit(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// Assembles system `k`. All systems of a shifted sequence share one
    /// nonzero structure.
    pub fn system<T: Scalar>(&self, k: usize) -> Result<SparseMatrix<T>> {
        if k >= self.len() {
            return Err(Error::InvalidArgument(format!(
                "system {k} out of range for a sequence of {}",
                self.len()
            )));
        }
        let m = match &self.systems {
            Systems::Shifted { a, e, shifts } => shifted_combine(shifts[k], e, a)?,
            Systems::Explicit(ms) => ms[k].clone(),
        };
        narrow(&m)
    }

    pub fn rhs<T: Scalar>(&self) -> Result<Vec<T>> {
        self.rhs.iter().map(|v| narrow_value(*v)).collect()
    }
}

fn narrow_value<T: Scalar>(v: Complex64) -> Result<T> {
    T::from_parts(v.re, v.im).ok_or_else(|| {
        Error::InvalidArgument("complex sequence data requested in real arithmetic".into())
    })
}

fn narrow<T: Scalar>(m: &SparseMatrix<Complex64>) -> Result<SparseMatrix<T>> {
    let values = m
        .values()
        .iter()
        .map(|&v| narrow_value(v))
        .collect::<Result<Vec<T>>>()?;
    SparseMatrix::from_raw_parts(
        m.nrows(),
        m.ncols(),
        m.colptr().to_vec(),
        m.rowind().to_vec(),
        values,
    )
}
