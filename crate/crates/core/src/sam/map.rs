use rayon::prelude::*;

use super::plan::SamPlan;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::{frobenius_norm_diff, DenseBlock, SparseMatrix, TripletBuffer};

/// Thread budget for [`compute_map_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Workers {
    /// Rayon's global pool.
    #[default]
    Auto,
    /// Run every column on the calling thread.
    Sequential,
    /// A dedicated pool with this many threads.
    Fixed(usize),
}

impl Workers {
    pub fn from_count(count: usize) -> Self {
        match count {
            0 => Workers::Auto,
            1 => Workers::Sequential,
            k => Workers::Fixed(k),
        }
    }
}

/// A computed sparse approximate map `N ≈ argmin ‖A_k·N − A_ref‖_F`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamMap<T> {
    pub map: SparseMatrix<T>,
    /// `‖A_k·N − A_ref‖_F / ‖A_ref‖_F`; `None` when `A_ref = 0`.
    pub rel_residual: Option<f64>,
    /// `‖A_k·n_ℓ − A_ref(:, ℓ)‖₂` per column.
    pub column_residuals: Vec<f64>,
    pub degenerate_columns: Vec<usize>,
}

struct Workspace<T> {
    block: DenseBlock<T>,
    rhs: Vec<T>,
}

/// Computes the map on the global rayon pool. See [`compute_map_with`].
pub fn compute_map<T: Scalar>(
    a_k: &SparseMatrix<T>,
    a_ref: &SparseMatrix<T>,
    plan: &SamPlan,
) -> Result<SamMap<T>> {
    compute_map_with(a_k, a_ref, plan, Workers::Auto)
}

/// Solves one small least-squares problem per column,
/// `n_ℓ(s_ℓ) = argmin ‖A_k(r_ℓ, s_ℓ)·z − A_ref(r_ℓ, ℓ)‖₂`, and assembles the
/// map from coordinates.
///
/// Each column writes into the slice of the output fixed by the plan, so the
/// result is bit-identical for any worker count.
pub fn compute_map_with<T: Scalar>(
    a_k: &SparseMatrix<T>,
    a_ref: &SparseMatrix<T>,
    plan: &SamPlan,
    workers: Workers,
) -> Result<SamMap<T>> {
    let n = plan.dim();
    if a_ref.shape() != (n, n) {
        return Err(Error::dims(
            "compute_map reference",
            format!("{n}x{n}"),
            format!("{:?}", a_ref.shape()),
        ));
    }
    if let Some(column) = plan.structure_mismatch(a_k) {
        return Err(Error::StructureMismatch { column });
    }

    let mut values = vec![T::zero(); plan.map_nnz()];
    let mut residual_sqr = vec![0.0f64; n];

    let mut slots: Vec<(usize, &mut [T], &mut f64)> = Vec::with_capacity(n);
    {
        let offsets = plan.s_offsets();
        let mut rest: &mut [T] = &mut values;
        for (l, res) in residual_sqr.iter_mut().enumerate() {
            let (head, tail) = rest.split_at_mut(offsets[l + 1] - offsets[l]);
            slots.push((l, head, res));
            rest = tail;
        }
    }

    let init = || Workspace {
        block: DenseBlock::zeros(plan.max_r(), plan.max_s()),
        rhs: Vec::with_capacity(plan.max_r()),
    };
    let solve = |ws: &mut Workspace<T>, (l, out, res): (usize, &mut [T], &mut f64)| {
        *res = solve_column(a_k, a_ref, plan, l, ws, out);
    };

    match workers {
        Workers::Sequential => {
            let mut ws = init();
            slots.into_iter().for_each(|slot| solve(&mut ws, slot));
        }
        Workers::Auto => slots.into_par_iter().for_each_init(init, solve),
        Workers::Fixed(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            pool.install(|| slots.into_par_iter().for_each_init(init, solve));
        }
    }

    let degenerate = plan.degenerate_columns().to_vec();
    if !degenerate.is_empty() {
        log::warn!(
            "sparse approximate map has {} empty pattern column(s); first is {}",
            degenerate.len(),
            degenerate[0]
        );
    }

    // COO assembly followed by canonical conversion
    let offsets = plan.s_offsets();
    let mut cols = Vec::with_capacity(values.len());
    for l in 0..n {
        cols.extend(std::iter::repeat_n(l, offsets[l + 1] - offsets[l]));
    }
    let triplets = TripletBuffer::from_parts(n, n, plan.s_indices().to_vec(), cols, values)?;
    let map = SparseMatrix::from_triplets(&triplets)?;

    let ref_norm = a_ref.frobenius_norm();
    let total: f64 = residual_sqr.iter().sum();
    Ok(SamMap {
        map,
        rel_residual: (ref_norm > 0.0).then(|| total.sqrt() / ref_norm),
        column_residuals: residual_sqr.into_iter().map(f64::sqrt).collect(),
        degenerate_columns: degenerate,
    })
}

/// Returns the squared residual norm of column `l`.
fn solve_column<T: Scalar>(
    a_k: &SparseMatrix<T>,
    a_ref: &SparseMatrix<T>,
    plan: &SamPlan,
    l: usize,
    ws: &mut Workspace<T>,
    out: &mut [T],
) -> f64 {
    let (s, r) = (plan.s(l), plan.r(l));
    let mut outside = 0.0;
    for (i, v) in a_ref.col_iter(l) {
        if r.binary_search(&i).is_err() {
            outside += v.modulus_sqr();
        }
    }
    if s.is_empty() {
        return outside;
    }
    a_k.extract_into(r, s, &mut ws.block)
        .expect("plan indices are in range and sorted");
    ws.rhs.resize(r.len(), T::zero());
    a_ref.gather_column(l, r, &mut ws.rhs);
    let ls = ws.block.least_squares(&ws.rhs);
    out.copy_from_slice(&ls.solution);
    ls.residual_norm * ls.residual_norm + outside
}

/// Relative residual `‖A_k·N − A_ref‖_F / ‖A_ref‖_F` computed from an
/// explicit sparse product.
pub fn map_residual_norm<T: Scalar>(
    a_k: &SparseMatrix<T>,
    map: &SparseMatrix<T>,
    a_ref: &SparseMatrix<T>,
) -> Result<f64> {
    let ref_norm = a_ref.frobenius_norm();
    let product = a_k.spmm(map)?;
    let diff = frobenius_norm_diff(&product, Some(a_ref))?;
    if ref_norm == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok(diff / ref_norm)
}
