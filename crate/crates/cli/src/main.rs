//! `cg-uncert`: coarse-grained uncertainty relations from the command line.
//!
//! Exit status is 0 when every evaluated relation holds, 1 when one is
//! violated and 2 for input or numerical errors.

mod commands;
mod config;
mod descriptor;
mod error;
mod output;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Outcome, Output};
use config::{ConfigFile, Format, GridFile, RunConfig, SweepFile};
use error::{CliError, CliResult};
use output::{table_json, write_csv, write_csv_records, write_json};

#[derive(Parser)]
#[command(
    name = "cg-uncert",
    version,
    about = "Coarse-grained uncertainty relations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// B_1/2, B_α, B_1, R, L_α and g over a Δδ/ħ sweep.
    Bounds,
    /// M(t), M⁻¹(u), K(u) over a sweep.
    Kfun,
    /// Continuous and coarse-grained relations for one state.
    Check,
    /// Forbidden region of the optimal variance relation.
    Region,
    /// Monte Carlo detections compared with exact bin probabilities.
    Sample,
}

#[derive(Args)]
struct Opts {
    /// JSON file with default settings; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// State descriptor, e.g. `squarewell:n=3,L=1`.
    #[arg(long, global = true)]
    state: Option<String>,
    /// Position bin width Δ.
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Momentum bin width δ.
    #[arg(long = "delta-p", global = true)]
    delta_p: Option<f64>,
    #[arg(long, global = true)]
    hbar: Option<f64>,
    /// Rényi order α in [1/2, 1].
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Position grid origin: bins are centered at offset + jΔ.
    #[arg(long = "offset-x", global = true, allow_hyphen_values = true)]
    offset_x: Option<f64>,
    #[arg(long = "offset-p", global = true, allow_hyphen_values = true)]
    offset_p: Option<f64>,
    /// Position GHF: `rect` or `tgauss:a=<value>`.
    #[arg(long = "ghf-x", global = true, allow_hyphen_values = true)]
    ghf_x: Option<String>,
    #[arg(long = "ghf-p", global = true, allow_hyphen_values = true)]
    ghf_p: Option<String>,
    #[arg(long = "sweep-min", global = true)]
    sweep_min: Option<f64>,
    #[arg(long = "sweep-max", global = true)]
    sweep_max: Option<f64>,
    #[arg(long = "sweep-points", global = true)]
    sweep_points: Option<usize>,
    /// Logarithmic (true) or linear (false) sweep spacing.
    #[arg(long = "sweep-log", global = true)]
    sweep_log: Option<bool>,
    /// Points per axis of the region grid.
    #[arg(long = "grid-n", global = true)]
    grid_n: Option<usize>,
    /// Upper end of both reduced-variance axes.
    #[arg(long = "grid-u-max", global = true)]
    grid_u_max: Option<f64>,
    #[arg(long, global = true)]
    samples: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

impl Opts {
    fn into_config(self) -> (Option<PathBuf>, ConfigFile) {
        let flags = ConfigFile {
            state: self.state,
            delta: self.delta,
            delta_p: self.delta_p,
            hbar: self.hbar,
            alpha: self.alpha,
            offset_x: self.offset_x,
            offset_p: self.offset_p,
            ghf_x: self.ghf_x,
            ghf_p: self.ghf_p,
            sweep: SweepFile {
                min: self.sweep_min,
                max: self.sweep_max,
                points: self.sweep_points,
                log: self.sweep_log,
            },
            grid: GridFile {
                u_max: self.grid_u_max,
                n: self.grid_n,
            },
            samples: self.samples,
            seed: self.seed,
            out: self.out,
            format: self.format,
        };
        (self.config, flags)
    }
}

fn set_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("CG_UNCERT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Field {
            field: "CG_UNCERT_THREADS",
            message: format!("expected a positive integer, got `{v}`"),
        })?;
    // Fails only if a pool already exists, which cannot happen this early.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn emit(outcome: &Outcome, format: Format, w: &mut impl Write) -> CliResult<()> {
    match (&outcome.output, format) {
        (Output::Table(t), Format::Csv) => write_csv(t, w),
        (Output::Table(t), Format::Json) => write_json(&table_json(t), w),
        (Output::Reports(r), Format::Json) => write_json(&serde_json::to_value(r)?, w),
        (Output::Reports(r), Format::Csv) => {
            let rows: Vec<Vec<String>> = r
                .iter()
                .map(|x| {
                    let v = serde_json::to_value(x).expect("reports serialize");
                    vec![
                        v["relation_id"].as_str().unwrap_or_default().to_string(),
                        output::fmt_num(x.lhs),
                        output::fmt_num(x.rhs),
                        output::fmt_num(x.margin),
                        v["verdict"].as_str().unwrap_or_default().to_string(),
                        x.log_domain.to_string(),
                    ]
                })
                .collect();
            write_csv_records(
                &[
                    "relation_id",
                    "lhs",
                    "rhs",
                    "margin",
                    "verdict",
                    "log_domain",
                ],
                &rows,
                w,
            )
        }
        (Output::Sample(s), Format::Json) => write_json(&serde_json::to_value(s)?, w),
        (Output::Sample(s), Format::Csv) => {
            for (k, v) in [
                ("chi2_x", s.chi2_x),
                ("dof_x", s.dof_x as f64),
                ("chi2_p", s.chi2_p),
                ("dof_p", s.dof_p as f64),
                ("verdicts_match", if s.verdicts_match { 1.0 } else { 0.0 }),
            ] {
                writeln!(w, "# {k}={}", output::fmt_num(v))?;
            }
            let rows: Vec<Vec<String>> = s
                .stats
                .iter()
                .map(|r| {
                    vec![
                        r.axis.to_string(),
                        r.quantity.clone(),
                        output::fmt_num(r.exact),
                        output::fmt_num(r.empirical),
                        output::fmt_num(r.std_error),
                        output::fmt_num(r.z_score),
                    ]
                })
                .collect();
            write_csv_records(
                &[
                    "axis",
                    "quantity",
                    "exact",
                    "empirical",
                    "std_error",
                    "z_score",
                ],
                &rows,
                w,
            )
        }
    }
}

fn run(cli: Cli) -> CliResult<bool> {
    set_threads()?;
    let (config_path, flags) = cli.opts.into_config();
    let file = match config_path {
        Some(p) => ConfigFile::load(&p)?,
        None => ConfigFile::default(),
    };
    let cfg = RunConfig::resolve(file, flags)?;
    let outcome = match cli.command {
        Command::Bounds => commands::cmd_bounds(&cfg)?,
        Command::Kfun => commands::cmd_kfun(&cfg)?,
        Command::Check => commands::cmd_check(&cfg)?,
        Command::Region => commands::cmd_region(&cfg)?,
        Command::Sample => commands::cmd_sample(&cfg)?,
    };
    let default_format = match cli.command {
        Command::Check | Command::Sample => Format::Json,
        _ => Format::Csv,
    };
    let format = cfg.format.unwrap_or(default_format);
    match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            emit(&outcome, format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            emit(&outcome, format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(outcome.all_hold)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("cg-uncert: at least one relation is violated");
            ExitCode::from(1)
        }
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cg-uncert: error: {e}");
            ExitCode::from(2)
        }
    }
}
