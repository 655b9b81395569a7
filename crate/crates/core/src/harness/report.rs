use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};

/// What the harness did to the preconditioner for one system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecEvent {
    Recompute,
    Sam,
    Reuse,
    /// Factorization failed; the previous preconditioner was kept.
    FactorFailed,
}

impl PrecEvent {
    pub fn as_str(self) -> &'static str {
        match self {
            PrecEvent::Recompute => "prec",
            PrecEvent::Sam => "sam",
            PrecEvent::Reuse => "reuse",
            PrecEvent::FactorFailed => "prec_failed",
        }
    }
}

impl fmt::Display for PrecEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PrecEvent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "prec" => PrecEvent::Recompute,
            "sam" => PrecEvent::Sam,
            "reuse" => PrecEvent::Reuse,
            "prec_failed" => PrecEvent::FactorFailed,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown prec_event `{other}`"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub index: usize,
    pub shift_re: f64,
    pub shift_im: f64,
    pub prec_event: PrecEvent,
    pub prec_seconds: f64,
    pub sam_rel_residual: Option<f64>,
    pub gmres_seconds: f64,
    pub iterations: usize,
    pub converged: bool,
    pub final_rel_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SequenceReport {
    pub rows: Vec<ReportRow>,
    pub total_wall_seconds: f64,
}

impl SequenceReport {
    pub fn total_prec_seconds(&self) -> f64 {
        self.rows.iter().fold(0.0, |acc, r| acc + r.prec_seconds)
    }

    pub fn total_gmres_seconds(&self) -> f64 {
        self.rows.iter().fold(0.0, |acc, r| acc + r.gmres_seconds)
    }

    pub fn total_iterations(&self) -> usize {
        self.rows.iter().map(|r| r.iterations).sum()
    }

    pub fn converged_count(&self) -> usize {
        self.rows.iter().filter(|r| r.converged).count()
    }

    pub fn iterations(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.iterations).collect()
    }
}

pub const CSV_COLUMNS: [&str; 10] = [
    "index",
    "shift_re",
    "shift_im",
    "prec_event",
    "prec_seconds",
    "sam_rel_residual",
    "gmres_seconds",
    "iterations",
    "converged",
    "final_rel_residual",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::InvalidArgument(format!(
                "unknown report format `{other}`"
            ))),
        }
    }
}

pub fn render_report(r: &SequenceReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => render_csv(r),
        ReportFormat::Markdown => render_markdown(r),
    }
}

fn render_csv(r: &SequenceReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = "writing CSV to memory cannot fail";
    w.write_record(CSV_COLUMNS).expect(fail);
    for row in &r.rows {
        w.write_record([
            row.index.to_string(),
            row.shift_re.to_string(),
            row.shift_im.to_string(),
            row.prec_event.to_string(),
            row.prec_seconds.to_string(),
            row.sam_rel_residual
                .map(|v| v.to_string())
                .unwrap_or_default(),
            row.gmres_seconds.to_string(),
            row.iterations.to_string(),
            row.converged.to_string(),
            row.final_rel_residual.to_string(),
        ])
        .expect(fail);
    }
    w.write_record([
        "total".to_string(),
        String::new(),
        String::new(),
        String::new(),
        r.total_prec_seconds().to_string(),
        String::new(),
        r.total_gmres_seconds().to_string(),
        r.total_iterations().to_string(),
        String::new(),
        String::new(),
    ])
    .expect(fail);
    String::from_utf8(w.into_inner().expect(fail)).expect("CSV output is UTF-8")
}

fn render_markdown(r: &SequenceReport) -> String {
    let mut out = String::new();
    out.push_str(
        "| System | Shift | Prec | Prec (s) | SAM res | GMRES (s) | Iter | Conv | Rel res |\n",
    );
    out.push_str("|---:|---|---|---:|---:|---:|---:|:---:|---:|\n");
    for row in &r.rows {
        let shift = if row.shift_im == 0.0 {
            format!("{}", row.shift_re)
        } else {
            format!("{:.4}{:+.4}i", row.shift_re, row.shift_im)
        };
        let sam = row
            .sam_rel_residual
            .map_or_else(|| "-".to_string(), |v| format!("{v:.3e}"));
        let _ = writeln!(
            out,
            "| {} | {} | {} | {:.4} | {} | {:.4} | {} | {} | {:.2e} |",
            row.index,
            shift,
            row.prec_event,
            row.prec_seconds,
            sam,
            row.gmres_seconds,
            row.iterations,
            if row.converged { "yes" } else { "no" },
            row.final_rel_residual
        );
    }
    let _ = writeln!(
        out,
        "| **Totals** | | | {:.4} | | {:.4} | {} | {}/{} | |",
        r.total_prec_seconds(),
        r.total_gmres_seconds(),
        r.total_iterations(),
        r.converged_count(),
        r.rows.len()
    );
    let _ = writeln!(out, "\nTotal wall time: {:.4} s", r.total_wall_seconds);
    out
}

/// Reads the per-system rows back from [`render_report`]'s CSV output.
/// The totals row is checked against the rows.
pub fn parse_report_csv(text: &str) -> Result<SequenceReport> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd.headers()?.clone();
    if header.iter().ne(CSV_COLUMNS) {
        return Err(Error::InvalidArgument(format!(
            "unexpected CSV header {header:?}"
        )));
    }
    let bad = |col: &str, v: &str| Error::InvalidArgument(format!("bad {col} value `{v}`"));
    let float = |col: &str, v: &str| v.parse::<f64>().map_err(|_| bad(col, v));
    let mut report = SequenceReport::default();
    let mut totals = None;
    for rec in rd.records() {
        let rec = rec?;
        if &rec[0] == "total" {
            totals = Some((
                float("prec_seconds", &rec[4])?,
                rec[7]
                    .parse::<usize>()
                    .map_err(|_| bad("iterations", &rec[7]))?,
            ));
            continue;
        }
        report.rows.push(ReportRow {
            index: rec[0].parse().map_err(|_| bad("index", &rec[0]))?,
            shift_re: float("shift_re", &rec[1])?,
            shift_im: float("shift_im", &rec[2])?,
            prec_event: rec[3].parse()?,
            prec_seconds: float("prec_seconds", &rec[4])?,
            sam_rel_residual: match &rec[5] {
                "" => None,
                v => Some(float("sam_rel_residual", v)?),
            },
            gmres_seconds: float("gmres_seconds", &rec[6])?,
            iterations: rec[7].parse().map_err(|_| bad("iterations", &rec[7]))?,
            converged: rec[8].parse().map_err(|_| bad("converged", &rec[8]))?,
            final_rel_residual: float("final_rel_residual", &rec[9])?,
        });
    }
    let Some((_, iters)) = totals else {
        return Err(Error::InvalidArgument(
            "CSV report has no totals row".into(),
        ));
    };
    if iters != report.total_iterations() {
        return Err(Error::InvalidArgument(format!(
            "totals row lists {iters} iterations, rows sum to {}",
            report.total_iterations()
        )));
    }
    Ok(report)
}
