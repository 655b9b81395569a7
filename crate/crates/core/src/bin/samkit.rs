#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use samkit::harness::{parse_config, render_report, run_sequence, ReportFormat, DEFAULT_TALBOT_T};
use samkit::problems::{
    fem_pair_2d, laplace2d_dirichlet, matrix_market_write, point_source, talbot_shifts,
    vector_write, KappaField, TalbotConstants,
};
use samkit::{Error, SparseMatrix};

#[derive(Parser)]
#[command(
    name = "samkit",
    version,
    about = "Recycle preconditioners across sequences of sparse linear systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve every system of a configured sequence and print the report.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a test problem as Matrix Market files plus a ready-to-run config.
    Gen {
        #[arg(long, value_enum)]
        problem: Problem,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        nx: Option<usize>,
        #[arg(long)]
        ny: Option<usize>,
        /// Shift increment of the Helmholtz sweep.
        #[arg(long, default_value_t = 0.01)]
        delta_s: f64,
        /// Number of shifted systems after K0 in the Helmholtz sweep.
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Seed of the random log-conductivity; constant conductivity when omitted.
        #[arg(long)]
        kappa_seed: Option<u64>,
        #[arg(long, default_value_t = 1.0)]
        kappa_contrast: f64,
        /// Talbot nodes on the full contour; half of them become shifts.
        #[arg(long, default_value_t = 40)]
        talbot_nz: usize,
        #[arg(long, default_value_t = DEFAULT_TALBOT_T)]
        talbot_t: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Markdown,
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    Helmholtz,
    FemPair,
}

fn write_shifts(path: &Path, shifts: &[Complex64]) -> samkit::Result<()> {
    let mut text = String::from("# re im\n");
    for z in shifts {
        let _ = writeln!(text, "{:.17e} {:.17e}", z.re, z.im);
    }
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> samkit::Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn run(config: &Path, format: Format, out: Option<&Path>) -> samkit::Result<()> {
    let cfg = parse_config(config)?;
    log::info!(
        "{} sequence of {} systems (n = {}), strategy {}",
        cfg.sequence.kind().as_str(),
        cfg.sequence.len(),
        cfg.sequence.dim(),
        cfg.strategy
    );
    if let Some(c) = cfg.talbot {
        log::info!(
            "Talbot constants sigma={} mu={} alpha={} nu={}",
            c.sigma,
            c.mu,
            c.alpha,
            c.nu
        );
    }
    let report = run_sequence(&cfg.sequence, &cfg.strategy, &cfg.options)?;
    let format = match format {
        Format::Csv => ReportFormat::Csv,
        Format::Markdown => ReportFormat::Markdown,
    };
    let text = render_report(&report, format);
    match out {
        Some(path) => write_text(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn gen(
    problem: Problem,
    out: &Path,
    nx: Option<usize>,
    ny: Option<usize>,
    delta_s: f64,
    count: usize,
    kappa: KappaField,
    talbot_nz: usize,
    talbot_t: f64,
) -> samkit::Result<()> {
    fs::create_dir_all(out).map_err(|source| Error::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let (a, e, shifts, b, note) = match problem {
        Problem::Helmholtz => {
            let (nx, ny) = (nx.unwrap_or(10), ny.unwrap_or(10));
            if nx < 2 || ny < 2 || !(delta_s > 0.0) {
                return Err(Error::InvalidArgument(
                    "need nx, ny >= 2 and delta_s > 0".into(),
                ));
            }
            let (k0, b) = laplace2d_dirichlet(nx, ny);
            let e = SparseMatrix::<f64>::identity(k0.nrows()).scaled(-1.0);
            let shifts: Vec<Complex64> = (0..=count)
                .map(|i| Complex64::new(i as f64 * delta_s, 0.0))
                .collect();
            let note = format!("# Helmholtz sweep K_i = K0 - {delta_s}*i*I on a {nx}x{ny} grid\n");
            (k0, e, shifts, b, note)
        }
        Problem::FemPair => {
            let (nx, ny) = (nx.unwrap_or(32), ny.unwrap_or(32));
            if nx < 2 || ny < 2 {
                return Err(Error::InvalidArgument("need nx, ny >= 2".into()));
            }
            let sampler = kappa.sampler();
            let (k, m) = fem_pair_2d(nx, ny, &*sampler)?;
            let c = TalbotConstants::default();
            let shifts = talbot_shifts(talbot_nz, talbot_t, c)?;
            let note = format!(
                "# K + z*M on a {nx}x{ny} grid, Talbot t={talbot_t} n_z={talbot_nz} \
                 sigma={} mu={} alpha={} nu={}\n",
                c.sigma, c.mu, c.alpha, c.nu
            );
            (k, m, shifts, point_source(nx, ny), note)
        }
    };
    let (a_name, e_name) = match problem {
        Problem::Helmholtz => ("K0.mtx", "E.mtx"),
        Problem::FemPair => ("K.mtx", "M.mtx"),
    };
    matrix_market_write(&a, out.join(a_name))?;
    matrix_market_write(&e, out.join(e_name))?;
    vector_write(&b, out.join("b.mtx"))?;
    write_shifts(&out.join("shifts.txt"), &shifts)?;
    let config = format!(
        "{note}[sequence]\nkind = \"shifted_pair\"\na_file = \"{a_name}\"\ne_file = \"{e_name}\"\n\
         shifts_file = \"shifts.txt\"\nrhs = \"file\"\nrhs_file = \"b.mtx\"\n\n[strategy]\nkind = \"sam_every\"\n"
    );
    write_text(&out.join("run.toml"), &config)?;
    log::info!(
        "wrote {} systems of size {} to {}",
        shifts.len(),
        a.nrows(),
        out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            format,
            out,
        } => run(&config, format, out.as_deref()),
        Command::Gen {
            problem,
            out,
            nx,
            ny,
            delta_s,
            count,
            kappa_seed,
            kappa_contrast,
            talbot_nz,
            talbot_t,
        } => {
            let kappa = match kappa_seed {
                Some(seed) => KappaField::RandomLog {
                    seed,
                    contrast: kappa_contrast,
                },
                None => KappaField::Constant(1.0),
            };
            gen(
                problem, &out, nx, ny, delta_s, count, kappa, talbot_nz, talbot_t,
            )
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("samkit: {e}");
            ExitCode::FAILURE
        }
    }
}
