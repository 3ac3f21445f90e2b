//! `qcn`: solve, predict and simulate γ-quasi-clique numbers.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use quasiclique::harness::{self, ExperimentConfig, Mode};
use quasiclique::sampler::{self, stream_rng};
use quasiclique::solver::{self, Gamma, DISPATCH_BRUTE_MAX_N};
use quasiclique::{Graph, Kernel, TheoryEstimates};

#[derive(Parser)]
#[command(name = "qcn", version, about = "Quasi-clique numbers of inhomogeneous random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximum γ-quasi-clique of a DIMACS graph.
    Solve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        gamma: Gamma,
        /// Search-node budget for the exact search.
        #[arg(long, default_value_t = harness::DEFAULT_BUDGET)]
        budget: u64,
        /// Heuristic restarts used as the warm start.
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the result as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Print `kl,omega_tilde,refined,window_lo,window_hi` as one CSV row.
    Theory {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        gamma: Gamma,
        #[arg(long)]
        pmax: f64,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Print a header line first.
        #[arg(long)]
        header: bool,
    },
    /// Run a Monte-Carlo experiment and write its CSV report.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Output path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the mode in the config (concentration, coupling, core).
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Sample `G(n, κ)` to DIMACS, with the weights in a JSON sidecar.
    Sample {
        /// Kernel as JSON, e.g. {"type": "constant", "p": 0.3}.
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// DIMACS output; the sidecar goes to the same path with `.json` appended.
        #[arg(long)]
        out: PathBuf,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { code: 1, msg: e.to_string() }
    }
}

fn solve(graph: PathBuf, gamma: Gamma, budget: u64, restarts: usize, seed: u64, json: bool) -> Result<(), Failure> {
    let g = Graph::read_dimacs(BufReader::new(File::open(&graph)?))?;
    let res = if gamma.num() == 0 || g.n() <= DISPATCH_BRUTE_MAX_N {
        solver::qc_number(&g, gamma, budget)
    } else {
        let warm = solver::heuristic(&g, gamma, restarts, &mut stream_rng(seed, 0))?;
        solver::exact_bb_from(&g, gamma, budget, warm)?
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if json {
        let value = serde_json::json!({
            "size": res.size,
            "exact": res.exact,
            "witness": res.witness.to_vec(),
            "witness_edges": res.witness_edges,
            "nodes_explored": res.nodes_explored,
        });
        writeln!(out, "{value}")?;
    } else {
        writeln!(
            out,
            "size={} exact={} witness_edges={} nodes={} time_ms={:.1}",
            res.size,
            res.exact,
            res.witness_edges,
            res.nodes_explored,
            res.wall_time.as_secs_f64() * 1e3
        )?;
    }
    Ok(())
}

fn theory(n: usize, gamma: Gamma, pmax: f64, epsilon: f64, header: bool) -> Result<(), Failure> {
    let est = TheoryEstimates::new(n, gamma, pmax).map_err(|e| Failure { code: 3, msg: e.to_string() })?;
    let (lo, hi) = est.window(epsilon)?;
    if header {
        println!("kl,omega_tilde,refined,window_lo,window_hi");
    }
    println!("{},{},{},{},{}", est.kl, est.omega_tilde, est.refined, lo, hi);
    if est.near_degenerate {
        eprintln!("warning: D(gamma, p_max) is nearly zero; omega_tilde is not meaningful");
    }
    Ok(())
}

fn experiment(config: PathBuf, out: Option<PathBuf>, mode: Option<Mode>, jobs: usize) -> Result<(), Failure> {
    let mut cfg = ExperimentConfig::from_json(&fs::read_to_string(&config)?)?;
    if let Some(mode) = mode {
        cfg.mode = mode;
        cfg.validate()?;
    }
    let report = harness::run(&cfg, jobs).map_err(|e| Failure { code: e.exit_code() as u8, msg: e.to_string() })?;
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            harness::write_report_csv(&report, &mut w)?;
            w.flush()?;
        }
        None => harness::write_report_csv(&report, io::stdout().lock())?,
    }
    Ok(())
}

fn sample(kernel: PathBuf, n: usize, seed: u64, out: PathBuf) -> Result<(), Failure> {
    let kernel = Kernel::from_json(&fs::read_to_string(kernel)?)?;
    let s = sampler::sample(&kernel, n, seed);
    fs::write(&out, s.graph.write_dimacs())?;
    let mut sidecar = out.into_os_string();
    sidecar.push(".json");
    fs::write(sidecar, serde_json::to_string_pretty(&s.sidecar())?)?;
    Ok(())
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Solve { graph, gamma, budget, restarts, seed, json } => {
            solve(graph, gamma, budget, restarts, seed, json)
        }
        Command::Theory { n, gamma, pmax, epsilon, header } => theory(n, gamma, pmax, epsilon, header),
        Command::Experiment { config, out, mode, jobs } => experiment(config, out, mode, jobs),
        Command::Sample { kernel, n, seed, out } => sample(kernel, n, seed, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
