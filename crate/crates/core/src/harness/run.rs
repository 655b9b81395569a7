use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;

use super::report::{PrecEvent, ReportRow, SequenceReport};
use super::strategy::{Action, Strategy};
use crate::error::{Error, Result};
use crate::ilutp::{self, IlutpFactors, IlutpParams};
use crate::krylov::{gmres, GmresConfig};
use crate::pattern::{
    offset_pattern, pattern_of, sparsified_power, symbolic_power, SparsityPattern, Threshold,
};
use crate::problems::SequenceSpec;
use crate::sam::{compose, compute_map_with, PreconditionerChain, SamPlan, Workers};
use crate::scalar::Scalar;
use crate::sparse::SparseMatrix;

/// Sparsity pattern used for the maps, resolved against the current
/// reference matrix.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum PatternChoice {
    /// Pattern of the reference matrix.
    #[default]
    OfReference,
    Diagonal,
    Tridiagonal,
    Offsets(Vec<isize>),
    /// Structural pattern of `A_refᵖ`.
    Power(usize),
    /// Pattern of the thresholded numeric power `A_refᵖ`.
    SparsifiedPower {
        power: usize,
        tau: f64,
        threshold: Threshold,
    },
    /// A fixed pattern, e.g. loaded from a file.
    Fixed(SparsityPattern),
    /// Path to a pattern file, loaded on first use.
    File(PathBuf),
}

impl PatternChoice {
    pub fn resolve<T: Scalar>(&self, a_ref: &SparseMatrix<T>) -> Result<SparsityPattern> {
        let n = a_ref.nrows();
        let p = match self {
            PatternChoice::OfReference => pattern_of(a_ref),
            PatternChoice::Diagonal => SparsityPattern::diagonal(n),
            PatternChoice::Tridiagonal => SparsityPattern::tridiagonal(n),
            PatternChoice::Offsets(offs) => offset_pattern(n, offs),
            PatternChoice::Power(k) => symbolic_power(&pattern_of(a_ref), *k)?,
            PatternChoice::SparsifiedPower {
                power,
                tau,
                threshold,
            } => sparsified_power(a_ref, *power, *tau, *threshold)?,
            PatternChoice::Fixed(p) => p.clone(),
            PatternChoice::File(path) => SparsityPattern::read(path)?,
        };
        if p.nrows() != n || p.ncols() != n {
            return Err(Error::dims(
                "map pattern",
                format!("{n}x{n}"),
                format!("{}x{}", p.nrows(), p.ncols()),
            ));
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FactorFailurePolicy {
    /// Record the failure and keep the previous preconditioner.
    #[default]
    Fallback,
    /// Stop the run with the factorization error.
    Abort,
}

/// Everything [`run_sequence`] needs besides the systems and the schedule.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOptions {
    pub ilutp: IlutpParams,
    pub pattern: PatternChoice,
    pub gmres: GmresConfig,
    pub workers: Workers,
    pub on_factor_failure: FactorFailurePolicy,
}

/// Solves every system of `spec` in order, updating the preconditioner as
/// `strategy` prescribes. Each solve starts from a zero vector.
pub fn run_sequence(
    spec: &SequenceSpec,
    strategy: &Strategy,
    opts: &RunOptions,
) -> Result<SequenceReport> {
    strategy.validate()?;
    opts.ilutp.validate()?;
    opts.gmres.validate()?;
    if spec.is_complex() {
        run_typed::<Complex64>(spec, strategy, opts)
    } else {
        run_typed::<f64>(spec, strategy, opts)
    }
}

struct Reference<T: Scalar> {
    matrix: Arc<SparseMatrix<T>>,
    factors: Arc<IlutpFactors<T>>,
}

fn run_typed<T: Scalar>(
    spec: &SequenceSpec,
    strategy: &Strategy,
    opts: &RunOptions,
) -> Result<SequenceReport> {
    let start = Instant::now();
    let b: Vec<T> = spec.rhs()?;
    let n = spec.dim();
    let mut reference: Option<Reference<T>> = None;
    let mut chain = PreconditionerChain::<T>::identity(n);
    // plan for the current reference; dropped whenever the reference changes
    let mut plan: Option<SamPlan> = None;
    let mut pattern: Option<SparsityPattern> = None;
    let mut report = SequenceReport::default();

    for k in 0..spec.len() {
        let a_k = Arc::new(spec.system::<T>(k)?);
        let shift = spec.shift(k);
        let mut sam_rel_residual = None;
        let t0 = Instant::now();
        let event = match strategy.action(k) {
            Action::RecomputePrec => match ilutp::factor(&a_k, opts.ilutp) {
                Ok(f) => {
                    let f = Arc::new(f);
                    chain = PreconditionerChain::from_factors(f.clone());
                    reference = Some(Reference {
                        matrix: a_k.clone(),
                        factors: f,
                    });
                    plan = None;
                    pattern = None;
                    PrecEvent::Recompute
                }
                Err(e) if opts.on_factor_failure == FactorFailurePolicy::Abort => return Err(e),
                Err(e) => {
                    log::warn!("system {k}: {e}; keeping the previous preconditioner");
                    PrecEvent::FactorFailed
                }
            },
            Action::ComputeSam => match &reference {
                None => {
                    log::warn!("system {k}: no reference preconditioner to map onto; reusing");
                    PrecEvent::Reuse
                }
                Some(r) => {
                    if plan
                        .as_ref()
                        .is_some_and(|p| p.structure_mismatch(&a_k).is_some())
                    {
                        plan = None;
                    }
                    let p = match plan.take() {
                        Some(p) => p,
                        None => {
                            if pattern.is_none() {
                                pattern = Some(opts.pattern.resolve(&r.matrix)?);
                            }
                            SamPlan::new(pattern.as_ref().expect("resolved above"), &a_k, false)?
                        }
                    };
                    let map = compute_map_with(&a_k, &r.matrix, &p, opts.workers)?;
                    plan = Some(p);
                    sam_rel_residual = map.rel_residual;
                    chain = compose(
                        Arc::new(map.map),
                        PreconditionerChain::from_factors(r.factors.clone()),
                    )?;
                    PrecEvent::Sam
                }
            },
            Action::Reuse => PrecEvent::Reuse,
        };
        let prec_seconds = match event {
            PrecEvent::Reuse => 0.0,
            _ => t0.elapsed().as_secs_f64(),
        };

        let t1 = Instant::now();
        let (iterations, converged, final_rel_residual) =
            match gmres(&*a_k, &b, &chain, None, &opts.gmres) {
                Ok((_, rep)) => (rep.iterations, rep.converged, rep.final_rel_residual),
                Err(Error::Breakdown {
                    iterations,
                    rel_residual,
                }) => {
                    log::warn!("system {k}: GMRES breakdown at relative residual {rel_residual:e}");
                    (iterations, false, rel_residual)
                }
                Err(e) => return Err(e),
            };
        let gmres_seconds = t1.elapsed().as_secs_f64();
        log::info!(
            "system {k}: {} {iterations} iterations, converged={converged}",
            event.as_str()
        );

        report.rows.push(ReportRow {
            index: k,
            shift_re: shift.re,
            shift_im: shift.im,
            prec_event: event,
            prec_seconds,
            sam_rel_residual,
            gmres_seconds,
            iterations,
            converged,
            final_rel_residual,
        });
    }
    report.total_wall_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}
