//! `relaylab`: run SER sweeps for bidirectional relay selection scenarios.

mod selftest;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use relaylab_core::experiment::{
    emit_csv, load_scenarios, parse_scenarios, run_scenario, write_csv, Mode, RunOptions, Scenario, SerPoint,
};
use relaylab_core::Error;

const FIGURES: [(&str, &str); 4] = [
    ("fig1", include_str!("../../../scenarios/fig1.toml")),
    ("fig2", include_str!("../../../scenarios/fig2.toml")),
    ("fig3", include_str!("../../../scenarios/fig3.toml")),
    ("fig4", include_str!("../../../scenarios/fig4.toml")),
];

#[derive(Debug, Parser)]
#[command(name = "relaylab", version, about = "SER sweeps for two-way relay selection with outdated and noisy CSI")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every scenario in a file and write one CSV.
    Run {
        #[arg(long, value_name = "FILE")]
        scenario: PathBuf,
        /// Output CSV; standard output when omitted.
        #[arg(long, value_name = "CSV")]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the four built-in figure scenarios into a directory.
    Figures {
        #[arg(long, value_name = "DIR", default_value = "figures")]
        out_dir: PathBuf,
        /// Read figN.toml from this directory instead of the built-in copies.
        #[arg(long, value_name = "DIR")]
        scenario_dir: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check the numerical kernels against reference values.
    Selftest,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Worker threads for Monte-Carlo trials.
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
    /// Override every scenario's base seed.
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// Override every scenario's trials per SNR point.
    #[arg(long, value_name = "T")]
    trials: Option<u64>,
    /// Skip Monte-Carlo; analytic columns only.
    #[arg(long, conflicts_with = "mc_only")]
    analytic_only: bool,
    /// Skip the analytic columns.
    #[arg(long)]
    mc_only: bool,
}

impl CommonArgs {
    fn options(&self) -> RunOptions {
        let mut opts = RunOptions::default();
        if let Some(w) = self.workers {
            opts.workers = w;
        }
        opts.mode = if self.analytic_only {
            Mode::AnalyticOnly
        } else if self.mc_only {
            Mode::MonteCarloOnly
        } else {
            Mode::Both
        };
        opts
    }

    fn apply(&self, scenarios: &mut [Scenario]) {
        for s in scenarios {
            if let Some(seed) = self.seed {
                s.seed = seed;
            }
            if let Some(t) = self.trials {
                s.trials_per_point = t;
            }
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::Io { .. } | Error::Csv { .. } => 1,
        Error::Domain { .. } | Error::Range { .. } | Error::Numeric { .. } => 2,
    }
}

fn sweep(label: &str, scenarios: &[Scenario], opts: &RunOptions) -> Result<Vec<SerPoint>, Error> {
    let mut points = Vec::new();
    for s in scenarios {
        let t = Instant::now();
        let pts = run_scenario(s, opts)?;
        eprintln!("{label}: {} ({} points, {:.1} s)", s.name, pts.len(), t.elapsed().as_secs_f64());
        points.extend(pts);
    }
    Ok(points)
}

fn run(scenario: &Path, out: Option<&Path>, common: &CommonArgs) -> Result<(), Error> {
    let mut scenarios = load_scenarios(scenario)?;
    common.apply(&mut scenarios);
    let label = scenario.file_stem().map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned());
    let points = sweep(&label, &scenarios, &common.options())?;
    match out {
        Some(path) => emit_csv(&points, path),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_csv(&points, &mut lock).map_err(|source| Error::Csv { path: PathBuf::from("<stdout>"), source })?;
            lock.flush().map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}

fn figures(out_dir: &Path, scenario_dir: Option<&Path>, common: &CommonArgs) -> Result<(), Error> {
    std::fs::create_dir_all(out_dir).map_err(|source| Error::Io { path: out_dir.to_path_buf(), source })?;
    let opts = common.options();
    for (name, builtin) in FIGURES {
        let mut scenarios = match scenario_dir {
            Some(dir) => load_scenarios(&dir.join(format!("{name}.toml")))?,
            None => parse_scenarios(builtin)?,
        };
        common.apply(&mut scenarios);
        let points = sweep(name, &scenarios, &opts)?;
        let path = out_dir.join(format!("{name}.csv"));
        emit_csv(&points, &path)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Run { scenario, out, common } => run(scenario, out.as_deref(), common),
        Command::Figures { out_dir, scenario_dir, common } => figures(out_dir, scenario_dir.as_deref(), common),
        Command::Selftest => {
            return if selftest::run() { ExitCode::SUCCESS } else { ExitCode::from(2) };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("relaylab: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
