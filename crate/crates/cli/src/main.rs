//! `ris-align` command-line tool: solve one instance, run a Monte-Carlo sweep,
//! or re-check a stored solution against freshly generated channels.

mod config;
mod solution;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ris_align::netsim::run_sweep;
use ris_align::pursuit::{riemannian_pursuit, verify_alignment};

use crate::config::RunConfig;
use crate::solution::{write_atomic, Dims, SolutionFile};

#[derive(Parser)]
#[command(
    name = "ris-align",
    version,
    about = "RIS-assisted interference alignment by rank pursuit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Dotted-path override such as `pursuit.r_max=6`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads for parallel sweeps.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Detect the minimal alignment rank for one channel draw.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run the configured sweep and write sweep.csv and sweep.json.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Check a stored solution against regenerated channels.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        solution: PathBuf,
    },
}

enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Solve { common, out } => {
            let cfg = load(&common)?;
            solve(&cfg, &out)
        }
        Command::Sweep { common, out } => {
            let cfg = load(&common)?;
            sweep(&cfg, &out)
        }
        Command::Verify { common, solution } => {
            let cfg = load(&common)?;
            verify(&cfg, &solution)
        }
    }
}

fn load(common: &Common) -> Result<RunConfig> {
    if let Some(n) = common.threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot start thread pool")?;
    }
    RunConfig::load(&common.config, &common.set, common.seed)
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn solve(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let scenario = cfg.scenario()?;
    let channels = scenario.channels::<f64>(cfg.seed)?;
    let sol = riemannian_pursuit(&channels, &scenario.pursuit)?;
    let file = SolutionFile::from_solution(cfg.seed, &scenario.network, &sol);
    let path = out.join("solution.json");
    write_atomic(&path, &to_json(&file)?)?;

    println!("seed      {}", cfg.seed);
    println!("feasible  {}", if sol.feasible { "yes" } else { "no" });
    match sol.dof {
        Some(dof) => println!("r = {}, dof = {dof:?}", sol.rank),
        None => println!("no feasible rank up to r_max = {}", scenario.pursuit.r_max),
    }
    println!("residual  {:e}", sol.residual);
    println!("attempts  {}", sol.trace.len());
    println!("wrote     {}", path.display());
    Ok(if sol.feasible { Outcome::Pass } else { Outcome::Fail })
}

fn sweep(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let spec = cfg.sweep_spec().context("config has no sweep section")?;
    let records = run_sweep(&spec)?;

    let mut csv = csv::Writer::from_writer(Vec::new());
    for r in &records {
        csv.serialize(r)?;
    }
    let csv_bytes = csv.into_inner().context("cannot finish CSV")?;
    write_atomic(&out.join("sweep.csv"), &csv_bytes)?;
    write_atomic(&out.join("sweep.json"), &to_json(&records)?)?;

    let failed = records.iter().filter(|r| r.rank < 0).count();
    println!(
        "{} records ({} without a feasible rank) written to {}",
        records.len(),
        failed,
        out.display()
    );
    Ok(Outcome::Pass)
}

fn verify(cfg: &RunConfig, path: &Path) -> Result<Outcome> {
    let file = SolutionFile::read(path)?;
    let scenario = cfg.scenario()?;
    let dims = Dims::from(&scenario.network);
    if file.dims != dims {
        bail!("solution dimensions {:?} do not match the config {:?}", file.dims, dims);
    }
    if file.seed != cfg.seed {
        bail!(
            "solution was produced with seed {}, config resolves to seed {}",
            file.seed,
            cfg.seed
        );
    }
    if !file.feasible {
        println!("solution is marked infeasible; nothing to verify");
        return Ok(Outcome::Fail);
    }
    let channels = scenario.channels::<f64>(file.seed)?;
    let (decoders, precoders) = file.transceivers()?;
    let tol = scenario.pursuit.verification_tol();
    let report = verify_alignment(&channels, &file.phase()?, &decoders, &precoders, tol)?;
    println!("max interference leakage  {:e}", report.max_interference_leakage);
    println!("max identity deviation    {:e}", report.max_identity_deviation);
    println!("tolerance                 {tol:e}");
    println!("{}", if report.pass { "PASS" } else { "FAIL" });
    Ok(if report.pass { Outcome::Pass } else { Outcome::Fail })
}
