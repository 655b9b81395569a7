//! TOML run descriptions.
//!
//! ```toml
//! [sequence]
//! kind = "helmholtz_sweep"   # or shifted_pair, matrix_files
//! nx = 10
//! ny = 10
//! delta_s = 0.01
//! count = 200
//!
//! [strategy]
//! kind = "events"
//! events = "[0:prec, 15:sam]"
//!
//! [ilutp]
//! lfil = 20
//! droptol = 1e-3
//!
//! [pattern]
//! kind = "of_matrix"
//!
//! [gmres]
//! rel_tol = 1e-10
//! ```
//!
//! Relative file paths are resolved against the directory of the config file.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

use super::run::{FactorFailurePolicy, PatternChoice, RunOptions};
use super::strategy::Strategy;
use crate::error::{Error, Result};
use crate::ilutp::IlutpParams;
use crate::krylov::GmresConfig;
use crate::pattern::{SparsityPattern, Threshold};
use crate::problems::{
    fem_pair_2d, laplace2d_dirichlet, matrix_market_read, point_source, talbot_shifts, vector_read,
    KappaField, SequenceSpec, TalbotConstants,
};
use crate::sam::Workers;
use crate::sparse::SparseMatrix;

/// A fully resolved run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub sequence: SequenceSpec,
    pub strategy: Strategy,
    pub options: RunOptions,
    /// Contour constants when the shifts came from a Talbot contour.
    pub talbot: Option<TalbotConstants>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    sequence: RawSequence,
    #[serde(default)]
    strategy: RawStrategy,
    #[serde(default)]
    ilutp: RawIlutp,
    #[serde(default)]
    pattern: RawPattern,
    #[serde(default)]
    gmres: RawGmres,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
enum SeqKind {
    HelmholtzSweep,
    ShiftedPair,
    MatrixFiles,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
enum RhsKind {
    Default,
    Ones,
    Point,
    File,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
enum KappaKind {
    Constant,
    RandomLog,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSequence {
    kind: SeqKind,
    nx: Option<usize>,
    ny: Option<usize>,
    delta_s: Option<f64>,
    count: Option<usize>,
    // shifted pair from the grid generator
    kappa: Option<KappaKind>,
    kappa_value: Option<f64>,
    kappa_seed: Option<u64>,
    kappa_contrast: Option<f64>,
    // shifted pair from files
    a_file: Option<PathBuf>,
    e_file: Option<PathBuf>,
    // shift list
    shifts: Option<Vec<[f64; 2]>>,
    shifts_file: Option<PathBuf>,
    talbot_nz: Option<usize>,
    talbot_t: Option<f64>,
    talbot_sigma: Option<f64>,
    talbot_mu: Option<f64>,
    talbot_alpha: Option<f64>,
    talbot_nu: Option<f64>,
    // explicit matrices
    matrices: Option<Vec<PathBuf>>,
    rhs: Option<RhsKind>,
    rhs_file: Option<PathBuf>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
enum StrategyKind {
    RecomputeEvery,
    ReuseFirst,
    #[default]
    SamEvery,
    Events,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
enum FailureKind {
    #[default]
    Fallback,
    Abort,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawStrategy {
    #[serde(default)]
    kind: StrategyKind,
    events: Option<String>,
    #[serde(default)]
    on_factor_failure: FailureKind,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawIlutp {
    lfil: Option<usize>,
    droptol: Option<f64>,
    pivtol: Option<f64>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
enum PatternKind {
    #[default]
    OfMatrix,
    Diagonal,
    Tridiagonal,
    Offsets,
    Power,
    SparsifiedPower,
    File,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawPattern {
    #[serde(default)]
    kind: PatternKind,
    offsets: Option<Vec<isize>>,
    power: Option<usize>,
    tau: Option<f64>,
    #[serde(default)]
    absolute: bool,
    file: Option<PathBuf>,
    #[serde(default)]
    workers: usize,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawGmres {
    restart: Option<usize>,
    rel_tol: Option<f64>,
    max_total_iters: Option<usize>,
    #[serde(default)]
    reorthogonalize: bool,
}

/// Iteration cap when the config does not set one.
pub const DEFAULT_MAX_ITERS: usize = 1000;

fn cfg_err<E: std::fmt::Display>(key: impl Into<String>) -> impl FnOnce(E) -> Error {
    let key = key.into();
    move |e| Error::Config {
        key,
        msg: e.to_string(),
    }
}

fn require<T>(v: Option<T>, key: &str, why: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config {
        key: key.to_string(),
        msg: format!("missing, required {why}"),
    })
}

fn forbid<T>(v: &Option<T>, key: &str, why: &str) -> Result<()> {
    match v {
        Some(_) => Err(Error::Config {
            key: key.to_string(),
            msg: format!("not allowed {why}"),
        }),
        None => Ok(()),
    }
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config_str(&text, base)
}

/// Parses config text; relative paths are taken relative to `base`.
pub fn parse_config_str(text: &str, base: &Path) -> Result<RunConfig> {
    let raw: Raw = toml::from_str(text).map_err(|e| Error::Config {
        key: "<document>".into(),
        msg: e.to_string().trim().to_string(),
    })?;
    let resolve = |p: &Path| {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base.join(p)
        }
    };

    let (sequence, talbot) = build_sequence(&raw.sequence, &resolve)?;
    let strategy = build_strategy(&raw.strategy)?;

    let d = IlutpParams::default();
    let ilutp = IlutpParams {
        lfil: raw.ilutp.lfil.unwrap_or(d.lfil),
        droptol: raw.ilutp.droptol.unwrap_or(d.droptol),
        pivtol: raw.ilutp.pivtol.unwrap_or(d.pivtol),
    };
    ilutp.validate().map_err(cfg_err("ilutp"))?;

    let pattern = build_pattern(&raw.pattern, &resolve)?;

    let max_total_iters = raw.gmres.max_total_iters.unwrap_or(DEFAULT_MAX_ITERS);
    let gmres = GmresConfig {
        restart: raw.gmres.restart.unwrap_or(max_total_iters),
        rel_tol: raw.gmres.rel_tol.unwrap_or(1e-10),
        max_total_iters,
        reorthogonalize: raw.gmres.reorthogonalize,
    };
    gmres.validate().map_err(cfg_err("gmres"))?;

    Ok(RunConfig {
        sequence,
        strategy,
        options: RunOptions {
            ilutp,
            pattern,
            gmres,
            workers: Workers::from_count(raw.pattern.workers),
            on_factor_failure: match raw.strategy.on_factor_failure {
                FailureKind::Fallback => FactorFailurePolicy::Fallback,
                FailureKind::Abort => FactorFailurePolicy::Abort,
            },
        },
        talbot,
    })
}

fn build_strategy(raw: &RawStrategy) -> Result<Strategy> {
    match raw.kind {
        StrategyKind::Events => {
            let text = require(
                raw.events.clone(),
                "strategy.events",
                "when kind = \"events\"",
            )?;
            Strategy::parse_events(&text).map_err(cfg_err("strategy.events"))
        }
        ref k => {
            forbid(&raw.events, "strategy.events", "unless kind = \"events\"")?;
            Ok(match k {
                StrategyKind::RecomputeEvery => Strategy::RecomputeEvery,
                StrategyKind::ReuseFirst => Strategy::ReuseFirst,
                _ => Strategy::SamEvery,
            })
        }
    }
}

fn build_pattern(raw: &RawPattern, resolve: &dyn Fn(&Path) -> PathBuf) -> Result<PatternChoice> {
    Ok(match raw.kind {
        PatternKind::OfMatrix => PatternChoice::OfReference,
        PatternKind::Diagonal => PatternChoice::Diagonal,
        PatternKind::Tridiagonal => PatternChoice::Tridiagonal,
        PatternKind::Offsets => PatternChoice::Offsets(require(
            raw.offsets.clone(),
            "pattern.offsets",
            "when kind = \"offsets\"",
        )?),
        PatternKind::Power => PatternChoice::Power(require(
            raw.power,
            "pattern.power",
            "when kind = \"power\"",
        )?),
        PatternKind::SparsifiedPower => PatternChoice::SparsifiedPower {
            power: require(
                raw.power,
                "pattern.power",
                "when kind = \"sparsified_power\"",
            )?,
            tau: require(raw.tau, "pattern.tau", "when kind = \"sparsified_power\"")?,
            threshold: if raw.absolute {
                Threshold::Absolute
            } else {
                Threshold::Relative
            },
        },
        PatternKind::File => {
            let file = require(raw.file.as_deref(), "pattern.file", "when kind = \"file\"")?;
            PatternChoice::Fixed(
                SparsityPattern::read(resolve(file)).map_err(cfg_err("pattern.file"))?,
            )
        }
    })
}

fn read_shifts_file(path: &Path) -> Result<Vec<Complex64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: k + 1,
                msg: format!("bad shift component `{s}`: {e}"),
            })
        };
        let z = match parts[..] {
            [re] => Complex64::new(parse(re)?, 0.0),
            [re, im] => Complex64::new(parse(re)?, parse(im)?),
            _ => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: k + 1,
                    msg: "expected `re im`".into(),
                })
            }
        };
        out.push(z);
    }
    Ok(out)
}

fn build_sequence(
    raw: &RawSequence,
    resolve: &dyn Fn(&Path) -> PathBuf,
) -> Result<(SequenceSpec, Option<TalbotConstants>)> {
    let key = |k: &str| format!("sequence.{k}");
    let seq_err = |k: &str| cfg_err::<Error>(key(k));

    // right-hand side chosen by the generator unless overridden
    let rhs_override =
        |n: usize, default: Vec<f64>, grid: Option<(usize, usize)>| -> Result<Vec<Complex64>> {
            let real = |v: Vec<f64>| v.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
            match raw.rhs.as_ref().unwrap_or(&RhsKind::Default) {
                RhsKind::Default => Ok(real(default)),
                RhsKind::Ones => Ok(vec![Complex64::new(1.0, 0.0); n]),
                RhsKind::Point => match grid {
                    Some((nx, ny)) => Ok(real(point_source(nx, ny))),
                    None => {
                        let mut v = vec![Complex64::new(0.0, 0.0); n];
                        v[n / 2] = Complex64::new(1.0, 0.0);
                        Ok(v)
                    }
                },
                RhsKind::File => {
                    let f = require(
                        raw.rhs_file.as_deref(),
                        &key("rhs_file"),
                        "when rhs = \"file\"",
                    )?;
                    let v: Vec<Complex64> = vector_read(resolve(f))?;
                    if v.len() != n {
                        return Err(Error::config(
                            key("rhs_file"),
                            format!("length {} but systems have dimension {n}", v.len()),
                        ));
                    }
                    Ok(v)
                }
            }
        };
    if raw.rhs_file.is_some() && !matches!(raw.rhs, Some(RhsKind::File)) {
        return Err(Error::config(key("rhs_file"), "requires rhs = \"file\""));
    }

    match raw.kind {
        SeqKind::HelmholtzSweep => {
            for (v, k) in [
                (raw.a_file.is_some(), "a_file"),
                (raw.e_file.is_some(), "e_file"),
                (raw.matrices.is_some(), "matrices"),
                (raw.shifts.is_some(), "shifts"),
                (raw.shifts_file.is_some(), "shifts_file"),
                (raw.talbot_nz.is_some(), "talbot_nz"),
                (raw.kappa.is_some(), "kappa"),
            ] {
                if v {
                    return Err(Error::config(key(k), "not used by helmholtz_sweep"));
                }
            }
            let (nx, ny) = (raw.nx.unwrap_or(10), raw.ny.unwrap_or(10));
            if nx < 2 || ny < 2 {
                return Err(Error::config(key("nx"), "grid must be at least 2x2"));
            }
            let (k0, b) = laplace2d_dirichlet(nx, ny);
            let rhs = rhs_override(nx * ny, b, Some((nx, ny)))?;
            let spec = SequenceSpec::helmholtz(
                &k0,
                raw.delta_s.unwrap_or(0.01),
                raw.count.unwrap_or(200),
                &rhs,
            )
            .map_err(seq_err("delta_s"))?;
            Ok((spec, None))
        }
        SeqKind::ShiftedPair => {
            forbid(&raw.matrices, &key("matrices"), "for shifted_pair")?;
            forbid(&raw.delta_s, &key("delta_s"), "for shifted_pair")?;
            let sources = [
                raw.shifts.is_some(),
                raw.shifts_file.is_some(),
                raw.talbot_nz.is_some(),
            ];
            if sources.iter().filter(|&&s| s).count() > 1 {
                return Err(Error::config(
                    key("shifts"),
                    "give only one of shifts, shifts_file, talbot_nz",
                ));
            }
            let mut talbot = None;
            let shifts = if let Some(list) = &raw.shifts {
                list.iter()
                    .map(|&[re, im]| Complex64::new(re, im))
                    .collect()
            } else if let Some(f) = &raw.shifts_file {
                read_shifts_file(&resolve(f))?
            } else {
                let d = TalbotConstants::default();
                let c = TalbotConstants {
                    sigma: raw.talbot_sigma.unwrap_or(d.sigma),
                    mu: raw.talbot_mu.unwrap_or(d.mu),
                    alpha: raw.talbot_alpha.unwrap_or(d.alpha),
                    nu: raw.talbot_nu.unwrap_or(d.nu),
                };
                talbot = Some(c);
                talbot_shifts(
                    raw.talbot_nz.unwrap_or(40),
                    raw.talbot_t.unwrap_or(DEFAULT_TALBOT_T),
                    c,
                )
                .map_err(seq_err("talbot_nz"))?
            };
            if shifts.is_empty() {
                return Err(Error::config(key("shifts"), "shift list is empty"));
            }

            let (a, e, grid): (SparseMatrix<Complex64>, SparseMatrix<Complex64>, _) =
                match (&raw.a_file, &raw.e_file) {
                    (Some(af), Some(ef)) => {
                        for (v, k) in [(raw.nx.is_some(), "nx"), (raw.kappa.is_some(), "kappa")] {
                            if v {
                                return Err(Error::config(key(k), "conflicts with a_file/e_file"));
                            }
                        }
                        let a = matrix_market_read(resolve(af)).map_err(seq_err("a_file"))?;
                        let e = matrix_market_read(resolve(ef)).map_err(seq_err("e_file"))?;
                        (a, e, None)
                    }
                    (None, None) => {
                        let (nx, ny) = (raw.nx.unwrap_or(32), raw.ny.unwrap_or(32));
                        let field = match raw.kappa.as_ref().unwrap_or(&KappaKind::Constant) {
                            KappaKind::Constant => {
                                KappaField::Constant(raw.kappa_value.unwrap_or(1.0))
                            }
                            KappaKind::RandomLog => KappaField::RandomLog {
                                seed: raw.kappa_seed.unwrap_or(0),
                                contrast: raw.kappa_contrast.unwrap_or(1.0),
                            },
                        };
                        let (k, m) =
                            fem_pair_2d(nx, ny, &*field.sampler()).map_err(seq_err("kappa"))?;
                        (k.to_complex(), m.to_complex(), Some((nx, ny)))
                    }
                    _ => {
                        return Err(Error::config(
                            key("a_file"),
                            "a_file and e_file go together",
                        ))
                    }
                };
            let n = a.nrows();
            let default = match grid {
                Some((nx, ny)) => point_source(nx, ny),
                None => vec![1.0; n],
            };
            let rhs = rhs_override(n, default, grid)?;
            let spec = SequenceSpec::shifted(&a, &e, shifts, &rhs).map_err(seq_err("shifts"))?;
            Ok((spec, talbot))
        }
        SeqKind::MatrixFiles => {
            let files = require(raw.matrices.as_ref(), &key("matrices"), "for matrix_files")?;
            for (v, k) in [
                (raw.a_file.is_some(), "a_file"),
                (raw.shifts.is_some(), "shifts"),
                (raw.shifts_file.is_some(), "shifts_file"),
                (raw.talbot_nz.is_some(), "talbot_nz"),
                (raw.nx.is_some(), "nx"),
            ] {
                if v {
                    return Err(Error::config(key(k), "not used by matrix_files"));
                }
            }
            if files.is_empty() {
                return Err(Error::config(key("matrices"), "list is empty"));
            }
            let mats: Vec<SparseMatrix<Complex64>> = files
                .iter()
                .map(|f| matrix_market_read(resolve(f)))
                .collect::<Result<_>>()
                .map_err(seq_err("matrices"))?;
            let n = mats.first().map_or(0, |m| m.nrows());
            let rhs = rhs_override(n, vec![1.0; n], None)?;
            let spec = SequenceSpec::from_matrices(&mats, &rhs).map_err(seq_err("matrices"))?;
            Ok((spec, None))
        }
    }
}

/// Contour time used when `talbot_t` is not given.
pub const DEFAULT_TALBOT_T: f64 = 0.05;
