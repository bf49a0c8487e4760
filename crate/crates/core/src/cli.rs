//! Command-line front end: argument model, job execution and rendering.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::convergence_report;
use crate::basis::{BasisContext, ModelSpec};
use crate::error::{Error, Result};
use crate::matrix::build_hamiltonian;
use crate::oracle::shoot_auto;
use crate::solver::{
    converge_to_digits, minimize_over_a, solve_levels, solve_spectrum, SpectrumResult,
};
use crate::tables::{self, TableId};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

/// Default basis size when neither `--dim` nor `--digits` is given.
const DEFAULT_DIM: usize = 30;
/// Largest basis size visited by `--digits` unless `--dim` caps it.
const DEFAULT_DIM_MAX: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SubcommandKind {
    Solve,
    Table,
    Matrix,
    Oracle,
    Converge,
}

#[derive(Debug, Parser)]
#[command(
    name = "spiked-osc",
    version,
    about = "Variational solver for spiked harmonic oscillators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Upper bounds for the lowest levels.
    Solve(ModelArgs),
    /// Recompute a published table next to its reference values.
    Table(TableArgs),
    /// Dump the Hamiltonian matrix.
    Matrix(ModelArgs),
    /// Eigenvalue by direct integration of the radial equation.
    Oracle(ModelArgs),
    /// Second-order estimate and convergence sums (alpha = 4).
    Converge(ModelArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long = "B", default_value_t = 1.0)]
    pub b: f64,
    /// Auxiliary strength: a number, or `opt` to minimise over it.
    #[arg(long = "A", value_parser = parse_a)]
    pub a: Option<AuxStrength>,
    /// Same as `--A opt`.
    #[arg(long = "opt-A")]
    pub opt_a: bool,
    /// Basis size D.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Spatial dimension.
    #[arg(long = "N", default_value_t = 1)]
    pub n: u32,
    #[arg(long, default_value_t = 0)]
    pub l: u32,
    /// Level for `--digits` and `oracle`.
    #[arg(long, default_value_t = 0)]
    pub level: usize,
    /// Number of lowest levels to report (each optimised separately).
    #[arg(long)]
    pub levels: Option<usize>,
    /// Increase D until successive bounds agree to this many decimals.
    #[arg(long)]
    pub digits: Option<u32>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[arg(long, value_parser = parse_table)]
    pub table: TableId,
    /// Basis size for the slow-convergence cells of Tables V and VI.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

/// Value of `--A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AuxStrength {
    Optimize,
    Value(f64),
}

fn parse_a(s: &str) -> std::result::Result<AuxStrength, String> {
    if s.eq_ignore_ascii_case("opt") {
        return Ok(AuxStrength::Optimize);
    }
    s.parse()
        .map(AuxStrength::Value)
        .map_err(|_| format!("expected a number or 'opt', got '{s}'"))
}

fn parse_table(s: &str) -> std::result::Result<TableId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Validated description of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JobConfig {
    pub subcommand: SubcommandKind,
    pub model: ModelSpec,
    #[serde(rename = "D")]
    pub d: Option<usize>,
    #[serde(rename = "optimize_A")]
    pub optimize_a: bool,
    #[serde(rename = "fixed_A")]
    pub fixed_a: Option<f64>,
    pub level: usize,
    pub levels: usize,
    pub digits: Option<u32>,
    pub output_format: OutputFormat,
    pub table_id: Option<TableId>,
}

impl JobConfig {
    pub fn from_model_args(kind: SubcommandKind, args: &ModelArgs) -> Result<Self> {
        let model = ModelSpec::new(args.alpha, args.lambda, args.b, args.n, args.l)?;
        let (optimize_a, fixed_a) = match (args.opt_a, args.a) {
            (true, None) | (_, Some(AuxStrength::Optimize)) => (true, None),
            (false, None) => (false, None),
            (true, Some(_)) => return Err(Error::domain("--opt-A conflicts with a numeric --A")),
            (false, Some(AuxStrength::Value(a))) => (false, Some(a)),
        };
        if matches!(args.dim, Some(0)) {
            return Err(Error::domain("--dim must be >= 1"));
        }
        Ok(JobConfig {
            subcommand: kind,
            model,
            d: args.dim,
            optimize_a,
            fixed_a,
            level: args.level,
            levels: args.levels.unwrap_or(1),
            digits: args.digits,
            output_format: args.format,
            table_id: None,
        })
    }

    pub fn from_table_args(args: &TableArgs) -> Result<Self> {
        Ok(JobConfig {
            subcommand: SubcommandKind::Table,
            model: ModelSpec::half_line(1.0, 0.0),
            d: args.dim,
            optimize_a: true,
            fixed_a: None,
            level: 0,
            levels: 1,
            digits: None,
            output_format: args.format,
            table_id: Some(args.table),
        })
    }

    /// `A` to use when a single value is needed: the given one, or the
    /// minimiser of the ground state at the configured size.
    fn resolve_a(&self, d: usize) -> Result<f64> {
        match (self.optimize_a, self.fixed_a) {
            (false, Some(a)) => Ok(a),
            (true, _) => Ok(minimize_over_a(&self.model, d, 0)?
                .optimal_a
                .expect("optimised")),
            (false, None) => Err(Error::domain("--A <value|opt> is required")),
        }
    }
}

/// Output of a job together with its exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub text: String,
    pub exit_code: i32,
}

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Domain(_) | Error::Divergence(_) => EXIT_DOMAIN,
        _ => EXIT_NOT_CONVERGED,
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

fn csv_text<F>(write: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w).map_err(|e| Error::domain(format!("csv: {e}")))?;
    let bytes = w
        .into_inner()
        .map_err(|e| Error::domain(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Computes the spectrum requested by a `solve` job.
pub fn solve_job(cfg: &JobConfig) -> Result<SpectrumResult> {
    if let Some(digits) = cfg.digits {
        if !cfg.optimize_a {
            return Err(Error::domain("--digits requires --A opt"));
        }
        return converge_to_digits(
            &cfg.model,
            digits,
            cfg.level,
            cfg.d.unwrap_or(DEFAULT_DIM_MAX),
        );
    }
    let d = cfg.d.unwrap_or(DEFAULT_DIM);
    if cfg.optimize_a && cfg.levels > 1 {
        solve_levels(&cfg.model, d, cfg.levels)
    } else {
        solve_spectrum(&cfg.model, d, cfg.optimize_a, cfg.fixed_a)
    }
}

/// Runs a `solve` job and renders the result.
pub fn run_solve(cfg: &JobConfig) -> Result<Rendered> {
    let r = solve_job(cfg)?;
    let exit_code = if r.not_converged {
        EXIT_NOT_CONVERGED
    } else {
        EXIT_OK
    };
    let shown: Vec<usize> = if cfg.digits.is_some() {
        vec![cfg.level]
    } else {
        (0..cfg.levels.min(r.eigenvalues.len())).collect()
    };
    let places = cfg.digits.map_or(7, |d| d as usize + 1);
    let level_a = |k: usize| r.level_a.get(k).copied().or(r.optimal_a).or(cfg.fixed_a);
    let text = match cfg.output_format {
        OutputFormat::Json => json(&r),
        OutputFormat::Csv => csv_text(|w| {
            w.write_record(["level", "energy", "A", "D", "converged_digits"])?;
            for &k in &shown {
                w.write_record([
                    k.to_string(),
                    format!("{:.*}", places, r.eigenvalues[k]),
                    level_a(k).map_or(String::new(), |a| format!("{a:.10}")),
                    r.d_used.to_string(),
                    r.converged_digits
                        .first()
                        .map_or(String::new(), |c| c.to_string()),
                ])?;
            }
            Ok(())
        })?,
        OutputFormat::Text => {
            let mut s = String::new();
            for &k in &shown {
                let _ = write!(s, "E{k} = {:.*}", places, r.eigenvalues[k]);
                if let Some(a) = level_a(k) {
                    let _ = write!(s, "  A = {a:.8}");
                }
                let _ = write!(s, "  D = {}", r.d_used);
                if let Some(c) = r.converged_digits.first() {
                    let _ = write!(s, "  ({c} digits agree)");
                }
                if r.at_boundary {
                    s.push_str("  [A at admissible boundary]");
                }
                if r.not_converged {
                    s.push_str("  [not converged]");
                }
                s.push('\n');
            }
            s
        }
    };
    Ok(Rendered { text, exit_code })
}

/// Runs a `table` job and renders it with the published values alongside.
pub fn run_table(cfg: &JobConfig) -> Result<Rendered> {
    let id = cfg
        .table_id
        .ok_or_else(|| Error::domain("no table selected"))?;
    let rows = tables::run(id, cfg.d)?;
    let text = match cfg.output_format {
        OutputFormat::Json => json(&rows),
        OutputFormat::Csv => csv_text(|w| {
            w.write_record([
                "table",
                "row",
                "column",
                "D",
                "computed",
                "published",
                "abs_diff",
            ])?;
            for r in &rows {
                w.write_record([
                    r.table.clone(),
                    r.row.clone(),
                    r.column.clone(),
                    r.d.to_string(),
                    format!("{:.*}", r.decimals + 1, r.computed),
                    format!("{:.*}", r.decimals, r.published),
                    format!("{:.2e}", r.abs_diff),
                ])?;
            }
            Ok(())
        })?,
        OutputFormat::Text => {
            let mut s = format!(
                "Table {id}\n{:<14} {:<24} {:>5} {:>16} {:>16} {:>10}\n",
                "row", "column", "D", "computed", "published", "|diff|"
            );
            for r in &rows {
                let d = if r.d == 0 {
                    "-".to_string()
                } else {
                    r.d.to_string()
                };
                let _ = writeln!(
                    s,
                    "{:<14} {:<24} {:>5} {:>16.*} {:>16.*} {:>10.2e}",
                    r.row,
                    r.column,
                    d,
                    r.decimals + 1,
                    r.computed,
                    r.decimals,
                    r.published,
                    r.abs_diff
                );
            }
            s
        }
    };
    Ok(Rendered {
        text,
        exit_code: EXIT_OK,
    })
}

/// Runs a `matrix` job.
pub fn run_matrix(cfg: &JobConfig) -> Result<Rendered> {
    let d = cfg.d.unwrap_or(DEFAULT_DIM);
    let a = cfg.resolve_a(d)?;
    let ctx = BasisContext::new(&cfg.model, a, d)?;
    let h = build_hamiltonian(&cfg.model, &ctx)?;
    let text = match cfg.output_format {
        OutputFormat::Text => h.to_text(),
        OutputFormat::Json => {
            let mut s = h.to_json();
            s.push('\n');
            s
        }
        OutputFormat::Csv => csv_text(|w| {
            for row in h.rows() {
                w.write_record(row.iter().map(|v| format!("{v:.16e}")))?;
            }
            Ok(())
        })?,
    };
    Ok(Rendered {
        text,
        exit_code: EXIT_OK,
    })
}

/// Runs an `oracle` job.
pub fn run_oracle(cfg: &JobConfig) -> Result<Rendered> {
    let r = shoot_auto(&cfg.model, cfg.level)?;
    let text = match cfg.output_format {
        OutputFormat::Json => json(&r),
        OutputFormat::Csv => csv_text(|w| {
            w.write_record([
                "level",
                "energy",
                "richardson_estimate",
                "x_min",
                "x_max",
                "steps",
            ])?;
            w.write_record([
                cfg.level.to_string(),
                format!("{:.10}", r.energy),
                format!("{:.10}", r.richardson_estimate),
                format!("{:e}", r.config_used.x_min),
                format!("{:e}", r.config_used.x_max),
                r.config_used.steps.to_string(),
            ])?;
            Ok(())
        })?,
        OutputFormat::Text => format!(
            "E{} = {:.10}  (Richardson {:.10}, nodes {})\n",
            cfg.level, r.energy, r.richardson_estimate, r.node_count
        ),
    };
    Ok(Rendered {
        text,
        exit_code: EXIT_OK,
    })
}

/// Runs a `converge` job: the report at the given (or one-function optimal)
/// `A` and basis size.
pub fn run_converge(cfg: &JobConfig) -> Result<Rendered> {
    let d = cfg.d.unwrap_or(DEFAULT_DIM);
    let a = match (cfg.optimize_a, cfg.fixed_a) {
        (false, Some(a)) => a,
        _ => minimize_over_a(&cfg.model, 1, 0)?
            .optimal_a
            .expect("optimised"),
    };
    let ctx = BasisContext::new(&cfg.model, a, d)?;
    let report = convergence_report(&cfg.model, &ctx, d)?;
    let text = match cfg.output_format {
        OutputFormat::Json => json(&report),
        OutputFormat::Csv => csv_text(|w| {
            w.write_record([
                "perturbation_E",
                "sum_partial",
                "sum_closed",
                "lambda_of_gamma",
                "regime",
            ])?;
            w.write_record([
                format!("{:.12}", report.perturbation_e),
                format!("{:.12}", report.sum_partial),
                report
                    .sum_closed
                    .map_or(String::new(), |v| format!("{v:.12}")),
                format!("{:.12}", report.lambda_of_gamma),
                format!("{:?}", report.regime).to_lowercase(),
            ])?;
            Ok(())
        })?,
        OutputFormat::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "A = {a:.8}  gamma = {:.8}  D = {d}", ctx.gamma);
            let _ = writeln!(s, "perturbation estimate = {:.10}", report.perturbation_e);
            let _ = writeln!(s, "partial sum           = {:.10}", report.sum_partial);
            match report.sum_closed {
                Some(v) => {
                    let _ = writeln!(s, "infinite sum          = {v:.10}");
                }
                None => s.push_str("infinite sum          = divergent (gamma <= 3)\n"),
            }
            let _ = writeln!(s, "lambda(gamma)         = {:.10}", report.lambda_of_gamma);
            let _ = writeln!(s, "regime                = {:?}", report.regime);
            s
        }
    };
    Ok(Rendered {
        text,
        exit_code: EXIT_OK,
    })
}

/// Dispatches a parsed command line.
pub fn run(cli: &Cli) -> Result<Rendered> {
    match &cli.command {
        Command::Solve(a) => run_solve(&JobConfig::from_model_args(SubcommandKind::Solve, a)?),
        Command::Table(a) => run_table(&JobConfig::from_table_args(a)?),
        Command::Matrix(a) => run_matrix(&JobConfig::from_model_args(SubcommandKind::Matrix, a)?),
        Command::Oracle(a) => run_oracle(&JobConfig::from_model_args(SubcommandKind::Oracle, a)?),
        Command::Converge(a) => {
            run_converge(&JobConfig::from_model_args(SubcommandKind::Converge, a)?)
        }
    }
}

/// Applies `SPIKED_OSC_THREADS` to the global thread pool.
pub fn configure_threads() {
    if let Some(n) = std::env::var("SPIKED_OSC_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}
