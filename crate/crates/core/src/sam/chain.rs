use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ilutp::IlutpFactors;
use crate::operator::LinearOperator;
use crate::scalar::Scalar;
use crate::sparse::SparseMatrix;

/// One factor of a [`PreconditionerChain`].
#[derive(Clone)]
pub enum Stage<T: Scalar> {
    /// Sparse matrix-vector product, e.g. a map `N`.
    Matrix(Arc<SparseMatrix<T>>),
    /// Triangular solves with incomplete factors.
    Factors(Arc<IlutpFactors<T>>),
    /// Any other operator.
    Operator(Arc<dyn LinearOperator<T>>),
}

impl<T: Scalar> Stage<T> {
    fn shape(&self) -> (usize, usize) {
        match self {
            Stage::Matrix(m) => m.shape(),
            Stage::Factors(f) => (f.dim(), f.dim()),
            Stage::Operator(op) => (op.nrows(), op.ncols()),
        }
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        match self {
            Stage::Matrix(m) => m.matvec_into(x, y),
            Stage::Factors(f) => f.apply(x, y),
            Stage::Operator(op) => op.apply(x, y),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Stage::Matrix(_) => "matvec",
            Stage::Factors(_) => "ilutp-solve",
            Stage::Operator(_) => "operator",
        }
    }
}

/// A product of operators `S₀·S₁·…·Sₘ`, applied right to left.
///
/// An empty chain is the identity. `compose(N, P₀)` yields the recycled
/// preconditioner `N·P₀`: a vector is first passed through `P₀`, then
/// multiplied by `N`.
#[derive(Clone)]
pub struct PreconditionerChain<T: Scalar> {
    dim: usize,
    stages: Vec<Stage<T>>,
}

impl<T: Scalar> fmt::Debug for PreconditionerChain<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PreconditionerChain")
            .field("dim", &self.dim)
            .field(
                "stages",
                &self.stages.iter().map(Stage::name).collect::<Vec<_>>(),
            )
            .finish()
    }
}

impl<T: Scalar> PreconditionerChain<T> {
    pub fn identity(dim: usize) -> Self {
        PreconditionerChain {
            dim,
            stages: Vec::new(),
        }
    }

    pub fn from_stage(stage: Stage<T>) -> Result<Self> {
        let (r, c) = stage.shape();
        if r != c {
            return Err(Error::dims(
                "preconditioner stage",
                format!("{r}x{r}"),
                format!("{r}x{c}"),
            ));
        }
        Ok(PreconditionerChain {
            dim: r,
            stages: vec![stage],
        })
    }

    pub fn from_factors(factors: Arc<IlutpFactors<T>>) -> Self {
        PreconditionerChain {
            dim: factors.dim(),
            stages: vec![Stage::Factors(factors)],
        }
    }

    /// Prepends `stage` so that it acts last: returns `stage · self`.
    pub fn then(mut self, stage: Stage<T>) -> Result<Self> {
        let (r, c) = stage.shape();
        if r != self.dim || c != self.dim {
            return Err(Error::dims(
                "compose",
                format!("{}x{}", self.dim, self.dim),
                format!("{r}x{c}"),
            ));
        }
        self.stages.insert(0, stage);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn stages(&self) -> &[Stage<T>] {
        &self.stages
    }

    pub fn is_identity(&self) -> bool {
        self.stages.is_empty()
    }

    /// Short description such as `matvec*ilutp-solve`.
    pub fn describe(&self) -> String {
        if self.stages.is_empty() {
            return "identity".into();
        }
        self.stages
            .iter()
            .map(Stage::name)
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// `N·P`: `P` acts first, then the map `N`. Chains nest.
pub fn compose<T: Scalar>(
    map: Arc<SparseMatrix<T>>,
    prec: PreconditionerChain<T>,
) -> Result<PreconditionerChain<T>> {
    prec.then(Stage::Matrix(map))
}

impl<T: Scalar> LinearOperator<T> for PreconditionerChain<T> {
    fn nrows(&self) -> usize {
        self.dim
    }

    fn ncols(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        match self.stages.len() {
            0 => y.copy_from_slice(x),
            1 => self.stages[0].apply(x, y),
            _ => {
                let mut cur = x.to_vec();
                let mut next = vec![T::zero(); self.dim];
                for stage in self.stages.iter().rev() {
                    stage.apply(&cur, &mut next);
                    std::mem::swap(&mut cur, &mut next);
                }
                y.copy_from_slice(&cur);
            }
        }
    }
}
