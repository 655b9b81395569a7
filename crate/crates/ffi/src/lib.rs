//! C interface to `samkit` for real (`double`) data.
//!
//! Every function returns a [`SamkitStatus`]; on failure the message is
//! available from [`samkit_last_error`] on the same thread. Objects are opaque
//! handles created by `*_new`/`*_read`/`*_compute`-style calls and released
//! with the matching `*_free`. Passing NULL to a `*_free` function is a no-op.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;
use std::slice;
use std::sync::Arc;

use samkit::pattern::{offset_pattern, pattern_of, symbolic_power};
use samkit::problems::{laplace2d_dirichlet, matrix_market_read, matrix_market_write};
use samkit::sam::{compose, compute_map_with, PreconditionerChain, SamPlan, Workers};
use samkit::{
    gmres, Error, GmresConfig, Identity, IlutpFactors, IlutpParams, LinearOperator, SparseMatrix,
    SparsityPattern,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamkitStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    IndexOutOfRange = 4,
    StructureMismatch = 5,
    ZeroPivot = 6,
    Breakdown = 7,
    ZeroReference = 8,
    Parse = 9,
    Io = 10,
    Config = 11,
    Panic = 12,
    Other = 13,
}

/// Sparse real matrix in compressed column form.
pub struct SamkitMatrix(SparseMatrix<f64>);

/// Sparsity pattern (index structure only).
pub struct SamkitPattern(SparsityPattern);

/// Incomplete LU factors with column pivoting.
pub struct SamkitFactors(Arc<IlutpFactors<f64>>);

/// A computed sparse approximate map.
pub struct SamkitMap {
    map: Arc<SparseMatrix<f64>>,
    rel_residual: Option<f64>,
}

/// Summary of one GMRES solve.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SamkitSolveInfo {
    pub iterations: usize,
    /// 1 when the explicit relative residual met the tolerance.
    pub converged: c_int,
    pub final_rel_residual: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> SamkitStatus {
    match e {
        Error::DimensionMismatch { .. } => SamkitStatus::DimensionMismatch,
        Error::IndexOutOfRange { .. } => SamkitStatus::IndexOutOfRange,
        Error::InvalidArgument(_) => SamkitStatus::InvalidArgument,
        Error::StructureMismatch { .. } => SamkitStatus::StructureMismatch,
        Error::ZeroPivot { .. } => SamkitStatus::ZeroPivot,
        Error::Breakdown { .. } => SamkitStatus::Breakdown,
        Error::ZeroReference => SamkitStatus::ZeroReference,
        Error::Parse { .. } => SamkitStatus::Parse,
        Error::Io { .. } => SamkitStatus::Io,
        Error::Config { .. } => SamkitStatus::Config,
        _ => SamkitStatus::Other,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, converting errors and panics into a status plus message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SamkitStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            SamkitStatus::Ok
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("{what} is NULL"));
            SamkitStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            SamkitStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn input<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a, T>(p: *mut T, len: usize, what: &'static str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn path_of(p: *const c_char) -> Result<PathBuf, Fail> {
    if p.is_null() {
        return Err(Fail::Null("path"));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Error::InvalidArgument("path is not valid UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be NULL or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn samkit_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Builds a matrix from coordinate triplets (0-based); duplicates are summed.
///
/// # Safety
/// `rows`, `cols` and `vals` must each point to `nnz` elements; `out` must be
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn samkit_matrix_from_triplets(
    nrows: usize,
    ncols: usize,
    nnz: usize,
    rows: *const usize,
    cols: *const usize,
    vals: *const f64,
    out: *mut *mut SamkitMatrix,
) -> SamkitStatus {
    guard(|| {
        let (r, c, v) = (
            input(rows, nnz, "rows")?,
            input(cols, nnz, "cols")?,
            input(vals, nnz, "vals")?,
        );
        let t = samkit::sparse::TripletBuffer::from_parts(
            nrows,
            ncols,
            r.to_vec(),
            c.to_vec(),
            v.to_vec(),
        )?;
        store(out, SamkitMatrix(SparseMatrix::from_triplets(&t)?))
    })
}

/// Five-point Dirichlet Laplacian on an `nx`×`ny` grid. When `b` is not NULL
/// the boundary right-hand side (length `nx*ny`) is written there.
///
/// # Safety
/// `out` must be valid; `b` must be NULL or hold `nx*ny` doubles.
#[no_mangle]
pub unsafe extern "C" fn samkit_laplace2d(
    nx: usize,
    ny: usize,
    out: *mut *mut SamkitMatrix,
    b: *mut f64,
) -> SamkitStatus {
    guard(|| {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidArgument("grid needs nx, ny >= 2".into()).into());
        }
        let (k, rhs) = laplace2d_dirichlet(nx, ny);
        if !b.is_null() {
            output(b, rhs.len(), "b")?.copy_from_slice(&rhs);
        }
        store(out, SamkitMatrix(k))
    })
}

/// Reads a real Matrix Market coordinate file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn samkit_matrix_read_mm(
    path: *const c_char,
    out: *mut *mut SamkitMatrix,
) -> SamkitStatus {
    guard(|| {
        let m = matrix_market_read::<f64>(path_of(path)?)?;
        store(out, SamkitMatrix(m))
    })
}

/// # Safety
/// `m` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn samkit_matrix_write_mm(
    m: *const SamkitMatrix,
    path: *const c_char,
) -> SamkitStatus {
    guard(|| {
        let m = as_ref(m, "matrix")?;
        matrix_market_write(&m.0, path_of(path)?)?;
        Ok(())
    })
}

/// Writes rows, columns and stored entries into the non-NULL outputs.
///
/// # Safety
/// `m` must be a live handle; outputs must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn samkit_matrix_shape(
    m: *const SamkitMatrix,
    nrows: *mut usize,
    ncols: *mut usize,
    nnz: *mut usize,
) -> SamkitStatus {
    guard(|| {
        let m = &as_ref(m, "matrix")?.0;
        for (p, v) in [(nrows, m.nrows()), (ncols, m.ncols()), (nnz, m.nnz())] {
            if !p.is_null() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// `y = A·x` with `x` of length `ncols` and `y` of length `nrows`.
///
/// # Safety
/// `m` must be a live handle; `x` and `y` must hold the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn samkit_matrix_matvec(
    m: *const SamkitMatrix,
    x: *const f64,
    y: *mut f64,
) -> SamkitStatus {
    guard(|| {
        let m = &as_ref(m, "matrix")?.0;
        let x = input(x, m.ncols(), "x")?;
        let y = output(y, m.nrows(), "y")?;
        m.matvec_into(x, y);
        Ok(())
    })
}

/// # Safety
/// `m` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn samkit_matrix_free(m: *mut SamkitMatrix) {
    free(m)
}

/// Pattern of the stored entries of `m`.
///
/// # Safety
/// `m` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn samkit_pattern_of(
    m: *const SamkitMatrix,
    out: *mut *mut SamkitPattern,
) -> SamkitStatus {
    guard(|| {
        let m = &as_ref(m, "matrix")?.0;
        store(out, SamkitPattern(pattern_of(m)))
    })
}

/// `n`×`n` pattern with entries `(j + offset, j)`; out-of-range entries are clipped.
///
/// # Safety
/// `offsets` must hold `count` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn samkit_pattern_offsets(
    n: usize,
    offsets: *const isize,
    count: usize,
    out: *mut *mut SamkitPattern,
) -> SamkitStatus {
    guard(|| {
        let offs = input(offsets, count, "offsets")?;
        store(out, SamkitPattern(offset_pattern(n, offs)))
    })
}

/// Structural pattern of `Pᵖ`.
///
/// # Safety
/// `p` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn samkit_pattern_power(
    p: *const SamkitPattern,
    power: usize,
    out: *mut *mut SamkitPattern,
) -> SamkitStatus {
    guard(|| {
        let p = &as_ref(p, "pattern")?.0;
        store(out, SamkitPattern(symbolic_power(p, power)?))
    })
}

/// Number of entries, or 0 for NULL.
///
/// # Safety
/// `p` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn samkit_pattern_nnz(p: *const SamkitPattern) -> usize {
    p.as_ref().map_or(0, |p| p.0.nnz())
}

/// # Safety
/// `p` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn samkit_pattern_free(p: *mut SamkitPattern) {
    free(p)
}

/// Incomplete LU with threshold dropping and column pivoting.
///
/// # Safety
/// `m` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn samkit_ilutp_factor(
    m: *const SamkitMatrix,
    lfil: usize,
    droptol: f64,
    pivtol: f64,
    out: *mut *mut SamkitFactors,
) -> SamkitStatus {
    guard(|| {
        let m = &as_ref(m, "matrix")?.0;
        let params = IlutpParams {
            lfil,
            droptol,
            pivtol,
        };
        params.validate()?;
        store(
            out,
            SamkitFactors(Arc::new(samkit::ilutp::factor(m, params)?)),
        )
    })
}

/// Applies the factors as a preconditioner, `x ≈ A⁻¹·rhs`; both vectors have
/// the factored dimension.
///
/// # Safety
/// `f` must be a live handle; `rhs` and `x` must hold `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn samkit_ilutp_solve(
    f: *const SamkitFactors,
    rhs: *const f64,
    x: *mut f64,
) -> SamkitStatus {
    guard(|| {
        let f = &as_ref(f, "factors")?.0;
        let n = f.dim();
        let sol = f.apply_solve(input(rhs, n, "rhs")?)?;
        output(x, n, "x")?.copy_from_slice(&sol);
        Ok(())
    })
}

/// Entries stored in `L` (diagonal excluded) and `U`, or 0 for NULL.
///
/// # Safety
/// `f` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn samkit_ilutp_fill(f: *const SamkitFactors) -> usize {
    f.as_ref().map_or(0, |f| f.0.fill())
}

/// # Safety
/// `f` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn samkit_factors_free(f: *mut SamkitFactors) {
    free(f)
}

/// Computes `N ≈ argmin ‖A_k·N − A_ref‖_F` over `pattern`. `workers` = 0
/// uses all cores, 1 runs sequentially; results do not depend on it.
///
/// # Safety
/// Handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn samkit_sam_compute(
    a_k: *const SamkitMatrix,
    a_ref: *const SamkitMatrix,
    pattern: *const SamkitPattern,
    workers: usize,
    out: *mut *mut SamkitMap,
) -> SamkitStatus {
    guard(|| {
        let a_k = &as_ref(a_k, "a_k")?.0;
        let a_ref = &as_ref(a_ref, "a_ref")?.0;
        let s = &as_ref(pattern, "pattern")?.0;
        let plan = SamPlan::new(s, a_k, true)?;
        let m = compute_map_with(a_k, a_ref, &plan, Workers::from_count(workers))?;
        store(
            out,
            SamkitMap {
                map: Arc::new(m.map),
                rel_residual: m.rel_residual,
            },
        )
    })
}

/// `‖A_k·N − A_ref‖_F / ‖A_ref‖_F`; fails with `ZeroReference` when `A_ref = 0`.
///
/// # Safety
/// `m` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn samkit_map_rel_residual(
    m: *const SamkitMap,
    out: *mut f64,
) -> SamkitStatus {
    guard(|| {
        let m = as_ref(m, "map")?;
        let r = m.rel_residual.ok_or(Error::ZeroReference)?;
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        *out = r;
        Ok(())
    })
}

/// Copies the map into a new matrix handle.
///
/// # Safety
/// `m` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn samkit_map_matrix(
    m: *const SamkitMap,
    out: *mut *mut SamkitMatrix,
) -> SamkitStatus {
    guard(|| {
        let m = as_ref(m, "map")?;
        store(out, SamkitMatrix((*m.map).clone()))
    })
}

/// # Safety
/// `m` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn samkit_map_free(m: *mut SamkitMap) {
    free(m)
}

/// Right-preconditioned restarted GMRES from `x` as initial guess (pass
/// zeros for a zero start). The preconditioner is `N·P` with either part
/// optional (NULL). `restart` = 0 means full GMRES.
///
/// # Safety
/// `a` must be a live handle, `map` and `factors` NULL or live, `b` and `x`
/// must hold `nrows(a)` doubles, `info` NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn samkit_gmres(
    a: *const SamkitMatrix,
    b: *const f64,
    x: *mut f64,
    map: *const SamkitMap,
    factors: *const SamkitFactors,
    restart: usize,
    rel_tol: f64,
    max_iters: usize,
    info: *mut SamkitSolveInfo,
) -> SamkitStatus {
    guard(|| {
        let a = &as_ref(a, "matrix")?.0;
        let n = a.nrows();
        let b = input(b, n, "b")?;
        let x = output(x, n, "x")?;
        let mut chain = match factors.as_ref() {
            Some(f) => PreconditionerChain::from_factors(f.0.clone()),
            None => PreconditionerChain::identity(n),
        };
        if let Some(m) = map.as_ref() {
            chain = compose(m.map.clone(), chain)?;
        }
        let cfg = GmresConfig {
            restart: if restart == 0 { max_iters } else { restart },
            rel_tol,
            max_total_iters: max_iters,
            reorthogonalize: false,
        };
        let prec: &dyn LinearOperator<f64> = if chain.is_identity() {
            &Identity(n)
        } else {
            &chain
        };
        let x0 = x.to_vec();
        match gmres(a, b, prec, Some(&x0), &cfg) {
            Ok((sol, rep)) => {
                x.copy_from_slice(&sol);
                if let Some(info) = info.as_mut() {
                    *info = SamkitSolveInfo {
                        iterations: rep.iterations,
                        converged: rep.converged as c_int,
                        final_rel_residual: rep.final_rel_residual,
                    };
                }
                Ok(())
            }
            Err(e) => {
                if let (
                    Some(info),
                    Error::Breakdown {
                        iterations,
                        rel_residual,
                    },
                ) = (info.as_mut(), &e)
                {
                    *info = SamkitSolveInfo {
                        iterations: *iterations,
                        converged: 0,
                        final_rel_residual: *rel_residual,
                    };
                }
                Err(e.into())
            }
        }
    })
}
