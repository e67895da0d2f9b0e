//! `dgc`: simulate paths, evaluate intensities, run the verification suites
//! and the TVA experiment.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dgc_core::intensity::intensity_report;
use dgc_core::model::{ModelConfig, PortfolioState};
use dgc_core::simulate::{doleans_weight, simulate_batch, write_path_dump, GridSpec, SeedSpec};
use dgc_core::tva::{parse_modes, run_tva, tva_csv, TvaRunSpec};
use dgc_core::verify::{reports_csv, reports_json, run_suite, summary_table, SuiteRun, SUITES};
use dgc_core::{DgcError, Result};

const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser)]
#[command(name = "dgc", version, about = "Dynamic Gaussian copula default model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML model config; the three-name demo model when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; falls back to the config's [seeds] entry for the subcommand.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate paths and write the per-path dump as CSV.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000)]
        paths: u64,
        #[arg(long, default_value_t = 40)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate all intensities of a state given as JSON.
    Intensity {
        #[command(flatten)]
        common: Common,
        /// State file (JSON).
        state: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites; exit 1 when any check comes out wrong.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Suite name, repeatable. All suites when absent.
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Overrides every suite's sample size.
        #[arg(long)]
        paths: Option<u64>,
        /// CSV report; a `.json` extension writes JSON instead.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// TVA of the CDS across correlations and bank hazards.
    Tva {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 50_000)]
        paths: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.2, 0.4, 0.6, 0.8])]
        rho_grid: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.005, 0.01, 0.02])]
        bank_hazards: Vec<f64>,
        /// true, fake or both
        #[arg(long, default_value = "both")]
        mode: String,
        /// Contract spread; par at time 0 when absent.
        #[arg(long)]
        spread: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Common {
    fn load(&self) -> Result<ModelConfig> {
        match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| DgcError::Config(format!("{}: {e}", path.display())))?;
                ModelConfig::from_toml(&text).map_err(|e| match e {
                    DgcError::Config(msg) => DgcError::Config(format!("{}: {msg}", path.display())),
                    other => other,
                })
            }
            None => Ok(ModelConfig::three_name(0.3, 0.01)),
        }
    }

    fn seed(&self, config: &ModelConfig, key: &str) -> u64 {
        self.seed.or_else(|| config.seed(key)).unwrap_or(DEFAULT_SEED)
    }
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| DgcError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate {
            common,
            paths,
            steps,
            out,
        } => {
            let config = common.load()?;
            let seed = SeedSpec::new(common.seed(&config, "simulate"));
            let grid = GridSpec::new(config.horizon, steps)?;
            let rows: Result<Vec<_>> = simulate_batch(&config, &grid, &seed, paths, common.threads, |path| {
                let w = doleans_weight(&path, &config, &grid)?;
                let last = *w.last().expect("weight starts at 1");
                if !last.is_finite() {
                    return Err(DgcError::Numerical(format!("weight of path {} is not finite", path.path_index)));
                }
                Ok((path, last))
            })
            .into_iter()
            .collect();
            let rows = rows?;
            let file = fs::File::create(&out).map_err(|e| DgcError::Io(format!("{}: {e}", out.display())))?;
            let mut w = BufWriter::new(file);
            write_path_dump(&mut w, &rows)?;
            w.flush()?;
            Ok(true)
        }
        Command::Intensity { common, state, out } => {
            let config = common.load()?;
            let text = fs::read_to_string(&state)
                .map_err(|e| DgcError::Config(format!("{}: {e}", state.display())))?;
            let state = PortfolioState::from_json(&text, &config)?;
            let report = intensity_report(&config, &state)?;
            let json = serde_json::to_string_pretty(&report).map_err(|e| DgcError::Numerical(e.to_string()))?;
            write_text(out.as_deref(), &format!("{json}\n"))?;
            Ok(true)
        }
        Command::Verify {
            common,
            suites,
            paths,
            out,
        } => {
            let config = common.load()?;
            let seed = common.seed(&config, "verify");
            let selected: Vec<String> = if suites.is_empty() {
                SUITES.iter().map(|s| s.to_string()).collect()
            } else {
                suites
            };
            for s in &selected {
                if !SUITES.contains(&s.as_str()) {
                    return Err(DgcError::Config(format!(
                        "unknown suite `{s}`; expected one of {}",
                        SUITES.join(", ")
                    )));
                }
            }
            let mut reports = Vec::new();
            for s in &selected {
                let run = SuiteRun {
                    paths,
                    parallelism: common.threads,
                    ..SuiteRun::new(seed)
                };
                reports.extend(run_suite(s, &config, run)?);
            }
            eprint!("{}", summary_table(&reports));
            if let Some(path) = out {
                let text = if path.extension().is_some_and(|e| e == "json") {
                    reports_json(&reports)
                } else {
                    reports_csv(&reports)
                };
                write_text(Some(&path), &text)?;
            }
            Ok(reports.iter().all(|r| r.ok()))
        }
        Command::Tva {
            common,
            paths,
            rho_grid,
            bank_hazards,
            mode,
            spread,
            out,
        } => {
            let config = common.load()?;
            let spec = TvaRunSpec {
                rho_grid,
                bank_hazards,
                spread,
                modes: parse_modes(&mode)?,
                paths,
                seed: common.seed(&config, "tva"),
                parallelism: common.threads,
                ..TvaRunSpec::default()
            };
            let rows = run_tva(&spec, &config)?;
            write_text(out.as_deref(), &tva_csv(&rows))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
