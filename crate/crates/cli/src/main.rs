//! Batch verification front end: seeded suites over the exact ball-map
//! toolkit with machine-readable reports.
//!
//! Exit codes: 0 all checks pass, 1 a verification failed, 2 usage or input
//! error. Reports are deterministic: the same configuration and seed give
//! byte-identical JSON.

mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crball_core::ballmap::{MapJson, RationalMap};
use crball_core::crjet::{JetJson, JetMode, NormalizedJet};

#[derive(Debug, Parser)]
#[command(name = "crball")]
#[command(about = "exact verification suites for rational proper ball maps")]
struct Cli {
    /// Master seed; every randomized trial derives from it.
    #[arg(long, global = true, default_value_t = 0x0b5e_55ed)]
    seed: u64,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Free,
    Huang,
}

impl From<ModeArg> for JetMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Free => JetMode::Free,
            ModeArg::Huang => JetMode::Huang,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Randomized suites for the adjugate and determinant identities.
    Lemmas {
        /// Trials per suite.
        #[arg(long, default_value_t = 1000)]
        trials: usize,

        /// Corrupt the first trial to exercise counterexample reporting.
        #[arg(long, hide = true)]
        corrupt_fixture: bool,
    },
    /// Degree-bound verdicts over sampled or file-given jets.
    JetVerify {
        /// Source dimension (2..=5); ignored when --input is given.
        #[arg(long, default_value_t = 3)]
        n: usize,

        /// Number of sampled jets; ignored when --input is given.
        #[arg(long, default_value_t = 25)]
        trials: usize,

        /// Sampling mode.
        #[arg(long, value_enum, default_value_t = ModeArg::Free)]
        mode: ModeArg,

        /// Jet JSON files (one jet per file); overrides sampling.
        #[arg(long)]
        input: Vec<PathBuf>,
    },
    /// Propriety, degree, and Segre sweeps for maps.
    MapVerify {
        /// Map JSON files (one map per file).
        #[arg(long)]
        input: Vec<PathBuf>,

        /// Verify the built-in catalog instead of files.
        #[arg(long)]
        catalog: bool,
    },
    /// List the built-in catalog.
    Catalog,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("CRBALL_LOG")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Lemmas {
            trials,
            corrupt_fixture,
        } => {
            log::info!("running lemma suites: {trials} trials, seed {}", cli.seed);
            let report = suites::run_lemmas(cli.seed, trials, corrupt_fixture);
            emit(cli.format, &report, |r| {
                let mut out = String::new();
                for s in &r.suites {
                    out.push_str(&format!(
                        "{:<28} {:>6} trials  {:>6} passed  {:>4} failed\n",
                        s.name, s.trials, s.passes, s.failures
                    ));
                    if let Some(ce) = &s.counterexample {
                        out.push_str(&format!(
                            "  counterexample at trial {}: {} (column {})\n",
                            ce.trial, ce.description, ce.split_column
                        ));
                    }
                }
                out.push_str(if r.all_passed {
                    "all lemma suites passed\n"
                } else {
                    "LEMMA SUITE FAILURE\n"
                });
                out
            });
            Ok(exit_flag(report.all_passed))
        }
        Command::JetVerify {
            n,
            trials,
            mode,
            input,
        } => {
            let report = if input.is_empty() {
                if !(2..=5).contains(&n) {
                    return Err(format!("--n must be in 2..=5, got {n}"));
                }
                if n == 5 {
                    log::warn!("n = 5 uses the line-probe backend and may be slow");
                }
                suites::run_jet_verify_sampled(cli.seed, n, mode.into(), trials)
                    .map_err(|e| e.to_string())?
            } else {
                let mut jets = Vec::new();
                for path in &input {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                    let json: JetJson = serde_json::from_str(&text)
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                    let jet = NormalizedJet::from_json(&json)
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                    jets.push(jet);
                }
                suites::run_jet_verify_files(cli.seed, &jets).map_err(|e| e.to_string())?
            };
            emit(cli.format, &report, |r| {
                let mut out = String::new();
                out.push_str(
                    "trial    n  mode   deg detB  deg (adjB)A  deg numerator  bounds\n",
                );
                for row in &r.rows {
                    out.push_str(&format!(
                        "{:>5} {:>4}  {:<6} {:>8} {:>12} {:>14}  {}\n",
                        row.trial,
                        row.n,
                        row.mode,
                        row.deg_det_b.to_string(),
                        row.deg_adj_b_a.to_string(),
                        row.deg_segre_numerator.to_string(),
                        if row.bounds_hold && row.weak_bounds_hold {
                            "ok"
                        } else {
                            "VIOLATED"
                        }
                    ));
                }
                out.push_str(if r.all_bounds_hold {
                    "all degree bounds hold\n"
                } else {
                    "DEGREE BOUND VIOLATION\n"
                });
                out
            });
            Ok(exit_flag(report.all_bounds_hold))
        }
        Command::MapVerify { input, catalog } => {
            let report = if catalog || input.is_empty() {
                suites::run_map_verify_catalog(cli.seed)
            } else {
                let mut maps = Vec::new();
                for path in &input {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                    let json: MapJson = serde_json::from_str(&text)
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                    let map = RationalMap::from_json(&json)
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                    maps.push(map);
                }
                suites::run_map_verify_files(cli.seed, &maps)
            };
            emit(cli.format, &report, |r| {
                let mut out = String::new();
                out.push_str(
                    "name                    n  N  deg  proper  reduced                 segre\n",
                );
                for row in &r.rows {
                    out.push_str(&format!(
                        "{:<22} {:>2} {:>2} {:>4}  {:<6}  {:<22}  {}\n",
                        row.name,
                        row.n,
                        row.big_n,
                        row.degree.to_string(),
                        if row.proper { "yes" } else { "NO" },
                        row.reducedness,
                        match (row.segre_sweep_max_degree, row.segre_sweep_ok) {
                            (Some(d), Some(true)) => format!("max {d} ok"),
                            (Some(d), Some(false)) => format!("max {d} VIOLATED"),
                            _ => "-".into(),
                        }
                    ));
                }
                out.push_str(if r.all_proper {
                    "all maps verified\n"
                } else {
                    "MAP VERIFICATION FAILURE\n"
                });
                out
            });
            Ok(exit_flag(report.all_proper))
        }
        Command::Catalog => {
            let report = suites::run_catalog();
            emit(cli.format, &report, |r| {
                let mut out = String::new();
                for row in &r.rows {
                    out.push_str(&format!(
                        "{:<22} B{} -> B{}  degree {}  {}{}\n",
                        row.name,
                        row.n,
                        row.big_n,
                        row.degree,
                        if row.proper { "proper" } else { "NOT PROPER" },
                        if row.squared_coefficients {
                            "  (squared coefficients)"
                        } else {
                            ""
                        }
                    ));
                }
                out
            });
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn exit_flag(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn emit<R: Serialize>(format: Format, report: &R, text: impl Fn(&R) -> String) {
    match format {
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(report).expect("report serializes")
            );
        }
        Format::Text => print!("{}", text(report)),
    }
}
