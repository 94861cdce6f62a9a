//! Command-line front end: configuration, run orchestration and output files.
//!
//! Every subcommand takes the same flags, which override the fields of an
//! optional TOML file given with `--config`.

mod check;
mod config;
mod output;
mod run;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::viscosity::ViscosityKind;

pub use check::{cmd_basis_check, BasisCheckReport, CheckResult};
pub use config::{default_eps_coeff, FluxChoice, RunConfig};
pub use run::{
    cmd_compare, cmd_run, cmd_sweep, simulate, CompareReport, IntegratedNorms, RunRecord,
    RunStatus, SweepReport, SweepRow,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] Error),
    /// The solver gave up; the record holds everything up to the failure and
    /// has already been written out.
    #[error("solver aborted: {message}")]
    Aborted {
        message: String,
        record: Box<RunRecord>,
    },
}

#[derive(Debug, Parser)]
#[command(
    name = "hermite-svm",
    version,
    about = "Hermite spectral viscosity solver for Burgers' equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single run: profile.csv, norms.csv, summary.json.
    Run(Overrides),
    /// Runs every N in sweep_ns: table.csv, growth.json.
    Sweep(Overrides),
    /// Distance to the finite-volume reference: errors.json.
    Compare(Overrides),
    /// Basis and transform self-checks; nonzero exit on failure.
    BasisCheck(Overrides),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    None,
    HighModeQ,
    SturmLiouville,
}

impl From<SchemeArg> for ViscosityKind {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::None => ViscosityKind::None,
            SchemeArg::HighModeQ => ViscosityKind::HighModeQ,
            SchemeArg::SturmLiouville => ViscosityKind::SturmLiouville,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML file with RunConfig fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    #[arg(short = 'N', long = "n")]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eps_coeff: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eps_exp: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub m_coeff: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub m_exp: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub flux: Option<FluxChoice>,
    /// Comma-separated list, e.g. 40,45,50.
    #[arg(long, value_delimiter = ',')]
    pub sweep_ns: Option<Vec<usize>>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub grid_l: Option<f64>,
    #[arg(long)]
    pub grid_dx: Option<f64>,
    #[arg(long)]
    pub oracle_cells: Option<usize>,
    #[arg(long)]
    pub check_quad_nodes: Option<usize>,
}

impl Overrides {
    /// Loads `--config` (or the defaults) and applies the flags on top.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field.clone() {
                    cfg.$field = v;
                }
            )*};
        }
        set!(n, alpha, eps_exp, m_coeff, m_exp, t_final, rel_tol, abs_tol, flux, output_dir);
        set!(grid_l, grid_dx, oracle_cells);
        if let Some(s) = self.scheme {
            cfg.scheme = s.into();
        }
        if self.eps_coeff.is_some() {
            cfg.eps_coeff = self.eps_coeff;
        }
        if self.sweep_ns.is_some() {
            cfg.sweep_ns = self.sweep_ns.clone();
        }
        if self.check_quad_nodes.is_some() {
            cfg.check_quad_nodes = self.check_quad_nodes;
        }
        Ok(cfg)
    }
}

/// Parses `args` (program name first), runs the subcommand and reports.
pub fn run_cli<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

/// Returns `Ok(false)` when the command ran but reported a failed check.
pub fn execute(command: &Command) -> Result<bool, CliError> {
    match command {
        Command::Run(o) => {
            let record = cmd_run(&o.resolve()?)?;
            let n = &record.integrated;
            println!(
                "N = {}: ∫‖u‖² = {:.6}, ∫‖D_x u‖² = {:.6}, ∫‖xu‖² = {:.6}, ∫‖x²u‖_L¹ = {:.6} ({} steps)",
                record.config.n, n.l2_sq, n.dx_sq, n.x_sq, n.x2_l1, record.accepted_steps
            );
            Ok(true)
        }
        Command::Sweep(o) => {
            let report = cmd_sweep(&o.resolve()?)?;
            for row in &report.rows {
                match &row.result {
                    Ok(n) => println!(
                        "N = {:3}: {:.6} {:.6} {:.6} {:.6}",
                        row.n, n.l2_sq, n.dx_sq, n.x_sq, n.x2_l1
                    ),
                    Err(msg) => println!("N = {:3}: failed: {msg}", row.n),
                }
            }
            Ok(report.rows.iter().all(|r| r.result.is_ok()))
        }
        Command::Compare(o) => {
            let r = cmd_compare(&o.resolve()?)?;
            println!(
                "L1 = {:.6e}, L2 = {:.6e}, front L1 = {:.6e}, oscillation = {:.6e}",
                r.l1, r.l2, r.front_l1, r.oscillation
            );
            Ok(true)
        }
        Command::BasisCheck(o) => {
            let report = cmd_basis_check(&o.resolve()?)?;
            for c in &report.checks {
                let status = if c.passed { "ok" } else { "FAILED" };
                match c.worst {
                    Some((m, n)) => println!(
                        "{status:6} {}: max defect {:.3e} at (m, n) = ({m}, {n}), tolerance {:.0e}",
                        c.name, c.max_defect, c.tolerance
                    ),
                    None => println!(
                        "{status:6} {}: max defect {:.3e}, tolerance {:.0e}",
                        c.name, c.max_defect, c.tolerance
                    ),
                }
            }
            Ok(report.passed())
        }
    }
}
