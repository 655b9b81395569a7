//! Restarted GMRES with right preconditioning.
//!
//! Solves `A·M·u = b`, `x = x₀ + M·u`. With right preconditioning the
//! Givens-updated least-squares residual is the true residual of `x` (up to
//! rounding), so convergence is judged on `‖b − A·x‖₂ / ‖b‖₂` and re-checked
//! explicitly at every restart.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::operator::LinearOperator;
use crate::scalar::{axpy, dot, norm2, Scalar};

/// Happy-breakdown threshold relative to the norm of the cycle's initial residual.
pub const BREAKDOWN_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresConfig {
    /// Krylov dimension per cycle.
    pub restart: usize,
    pub rel_tol: f64,
    pub max_total_iters: usize,
    /// Second modified Gram–Schmidt pass.
    pub reorthogonalize: bool,
}

impl Default for GmresConfig {
    fn default() -> Self {
        GmresConfig {
            restart: 50,
            rel_tol: 1e-10,
            max_total_iters: 1000,
            reorthogonalize: false,
        }
    }
}

impl GmresConfig {
    /// Unrestarted GMRES: one cycle of up to `max_total_iters` steps.
    pub fn full(max_total_iters: usize, rel_tol: f64) -> Self {
        GmresConfig {
            restart: max_total_iters,
            rel_tol,
            max_total_iters,
            reorthogonalize: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restart == 0 {
            return Err(Error::InvalidArgument("GMRES restart must be >= 1".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidArgument("GMRES rel_tol must be > 0".into()));
        }
        if self.max_total_iters == 0 {
            return Err(Error::InvalidArgument(
                "GMRES max_total_iters must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Recurrence vs. explicit residual at the end of one cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleCheck {
    /// `|g_{k+1}|`, the Givens-updated residual norm.
    pub recurrence: f64,
    /// `‖b − A·x‖₂` recomputed from the iterate.
    pub explicit: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveReport {
    /// Inner iterations over all cycles.
    pub iterations: usize,
    /// Cycles started after the first.
    pub restarts: usize,
    pub converged: bool,
    /// Explicit `‖b − A·x‖₂ / ‖b‖₂` of the returned iterate.
    pub final_rel_residual: f64,
    /// Relative recurrence residual after each inner iteration.
    pub residual_history: Vec<f64>,
    pub cycle_checks: Vec<CycleCheck>,
    pub wall_seconds: f64,
}

fn givens<T: Scalar>(a: T, b: T) -> (f64, T, T) {
    let (aa, bb) = (a.modulus(), b.modulus());
    if bb == 0.0 {
        return (1.0, T::zero(), a);
    }
    if aa == 0.0 {
        // rotate b onto the first component
        return (0.0, b.conj().scale(1.0 / bb), T::from_f64(bb));
    }
    let nu = aa.hypot(bb);
    let phase = a.scale(1.0 / aa);
    (aa / nu, phase * b.conj().scale(1.0 / nu), phase.scale(nu))
}

fn residual<T: Scalar>(a: &dyn LinearOperator<T>, b: &[T], x: &[T], r: &mut [T]) -> f64 {
    a.apply(x, r);
    for (ri, &bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    norm2(r)
}

/// Right-preconditioned GMRES(m). `x0 = None` starts from zero.
///
/// Returns the final iterate even without convergence. A breakdown that does
/// not coincide with convergence is reported as [`Error::Breakdown`].
pub fn gmres<T: Scalar>(
    a: &dyn LinearOperator<T>,
    b: &[T],
    precond: &dyn LinearOperator<T>,
    x0: Option<&[T]>,
    cfg: &GmresConfig,
) -> Result<(Vec<T>, SolveReport)> {
    cfg.validate()?;
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::dims("gmres", n, b.len()));
    }
    if precond.nrows() != n || precond.ncols() != n {
        return Err(Error::dims("gmres preconditioner", n, precond.nrows()));
    }
    if let Some(x0) = x0 {
        if x0.len() != n {
            return Err(Error::dims("gmres x0", n, x0.len()));
        }
    }

    let start = Instant::now();
    let mut report = SolveReport::default();
    let mut x = x0.map_or_else(|| vec![T::zero(); n], <[T]>::to_vec);
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = T::zero());
        report.converged = true;
        report.wall_seconds = start.elapsed().as_secs_f64();
        return Ok((x, report));
    }

    let m = cfg.restart.min(cfg.max_total_iters);
    let mut r = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let mut z = vec![T::zero(); n];
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(m + 1);
    // column-major Hessenberg, (m+1) × m
    let mut h = vec![T::zero(); (m + 1) * m];
    let mut cs = vec![0.0f64; m];
    let mut sn = vec![T::zero(); m];
    let mut g = vec![T::zero(); m + 1];

    let mut beta = residual(a, b, &x, &mut r);
    let mut cycle = 0usize;
    loop {
        report.final_rel_residual = beta / bnorm;
        if beta / bnorm <= cfg.rel_tol {
            report.converged = true;
            break;
        }
        if report.iterations >= cfg.max_total_iters || !beta.is_finite() {
            break;
        }
        if cycle > 0 {
            report.restarts += 1;
        }
        cycle += 1;

        basis.clear();
        basis.push(r.iter().map(|&v| v.scale(1.0 / beta)).collect());
        g.iter_mut().for_each(|v| *v = T::zero());
        g[0] = T::from_f64(beta);
        let mut k = 0;
        let mut broke_down = false;

        while k < m && report.iterations < cfg.max_total_iters {
            precond.apply(&basis[k], &mut z);
            a.apply(&z, &mut w);
            let col = &mut h[k * (m + 1)..(k + 1) * (m + 1)];
            let passes = if cfg.reorthogonalize { 2 } else { 1 };
            for _ in 0..passes {
                for (i, v) in basis.iter().enumerate() {
                    let hij = dot(v, &w);
                    axpy(-hij, v, &mut w);
                    col[i] += hij;
                }
            }
            let hnext = norm2(&w);
            col[k + 1] = T::from_f64(hnext);

            for i in 0..k {
                let (c, s) = (cs[i], sn[i]);
                let (x0, x1) = (col[i], col[i + 1]);
                col[i] = x0.scale(c) + s * x1;
                col[i + 1] = -(s.conj() * x0) + x1.scale(c);
            }
            let (c, s, rr) = givens(col[k], col[k + 1]);
            if rr.modulus() == 0.0 {
                // the new direction adds nothing: stop with the k columns so far
                report.iterations += 1;
                report.residual_history.push(g[k].modulus() / bnorm);
                broke_down = true;
                break;
            }
            cs[k] = c;
            sn[k] = s;
            col[k] = rr;
            col[k + 1] = T::zero();
            let gk = g[k];
            g[k] = gk.scale(c);
            g[k + 1] = -(s.conj() * gk);

            report.iterations += 1;
            k += 1;
            let est = g[k].modulus() / bnorm;
            report.residual_history.push(est);

            if hnext <= BREAKDOWN_TOL * beta {
                broke_down = true;
                break;
            }
            if est <= cfg.rel_tol {
                break;
            }
            basis.push(w.iter().map(|&v| v.scale(1.0 / hnext)).collect());
        }

        // y = H(0..k, 0..k)⁻¹ g(0..k)
        let mut y = g[..k].to_vec();
        for i in (0..k).rev() {
            let mut s = y[i];
            for j in i + 1..k {
                s -= h[j * (m + 1) + i] * y[j];
            }
            y[i] = s / h[i * (m + 1) + i];
        }
        w.iter_mut().for_each(|v| *v = T::zero());
        for (yj, v) in y.iter().zip(&basis) {
            axpy(*yj, v, &mut w);
        }
        precond.apply(&w, &mut z);
        axpy(T::one(), &z, &mut x);
        h.iter_mut().for_each(|v| *v = T::zero());

        let recurrence = g[k].modulus();
        beta = residual(a, b, &x, &mut r);
        report.cycle_checks.push(CycleCheck {
            recurrence,
            explicit: beta,
        });

        if broke_down && beta / bnorm > cfg.rel_tol {
            report.final_rel_residual = beta / bnorm;
            report.wall_seconds = start.elapsed().as_secs_f64();
            return Err(Error::Breakdown {
                iterations: report.iterations,
                rel_residual: beta / bnorm,
            });
        }
    }
    report.wall_seconds = start.elapsed().as_secs_f64();
    Ok((x, report))
}
