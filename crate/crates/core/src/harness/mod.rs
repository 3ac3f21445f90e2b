//! Monte-Carlo experiments over `G(n, κ)`.
//!
//! Every replication `r` draws its graph from `replication_seed(master_seed, r)`,
//! so results depend on the config alone. Replications run on a rayon pool of
//! `jobs` threads and are reassembled in replication order.

mod report;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{Kernel, KernelError};
use crate::sampler::{self, SamplerError};
use crate::solver::{qc_number, Gamma};
use crate::theory::{TheoryError, TheoryEstimates};

pub use report::{write_report_csv, CSV_HEADER};

/// Largest `n` for which the coupling audit solves all four graphs exactly.
pub const AUDIT_EXACT_MAX_N: usize = 48;
/// The concentration band is `[refined - REFINED_BELOW, refined + REFINED_ABOVE]`.
pub const REFINED_BELOW: f64 = 3.0;
pub const REFINED_ABOVE: f64 = 2.0;
pub const DEFAULT_BUDGET: u64 = 200_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Concentration,
    #[serde(alias = "coupling")]
    CouplingAudit,
    #[serde(alias = "core")]
    CoreAudit,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "concentration" => Ok(Mode::Concentration),
            "coupling" | "coupling_audit" => Ok(Mode::CouplingAudit),
            "core" | "core_audit" => Ok(Mode::CoreAudit),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kernel: Kernel,
    pub n: usize,
    pub gamma: Gamma,
    pub epsilon: f64,
    pub replications: usize,
    pub master_seed: u64,
    /// Search-node budget per exact solve.
    #[serde(default = "default_budget")]
    pub budget: u64,
    /// Core half-width; `1 / ln n` when absent.
    #[serde(default)]
    pub delta_override: Option<f64>,
    #[serde(default)]
    pub mode: Mode,
    /// Coupling audit: also compare exact ω values, not only edge sets.
    #[serde(default = "default_true")]
    pub audit_exact: bool,
    /// Write wall-clock times into the CSV. Off by default so reports are reproducible.
    #[serde(default)]
    pub record_timings: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.replications == 0 {
            return bad("replications must be at least 1".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        if self.n < 3 {
            return bad(format!("n must be at least 3, got {}", self.n));
        }
        if let Some(d) = self.delta_override {
            if !(d > 0.0 && d.is_finite()) {
                return bad(format!("delta_override must be positive, got {d}"));
            }
        }
        if self.mode == Mode::CouplingAudit && self.audit_exact && self.n > AUDIT_EXACT_MAX_N {
            return bad(format!(
                "exact coupling audit needs n <= {AUDIT_EXACT_MAX_N}, got {}; set audit_exact = false",
                self.n
            ));
        }
        self.kernel.validate()?;
        Ok(())
    }

    fn delta(&self) -> Result<f64, HarnessError> {
        match self.delta_override {
            Some(d) => Ok(d),
            None => Ok(sampler::default_delta(self.n)?),
        }
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Hypothesis(TheoryError),
    #[error("audit violation at replication {rep} (seed {seed}): {detail}")]
    AuditViolation { rep: usize, seed: u64, detail: String },
    #[error("replication {rep} (seed {seed}): exact solve of {graph} ran out of budget")]
    AuditInconclusive { rep: usize, seed: u64, graph: &'static str },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Theory(TheoryError),
    #[error("could not build thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    /// Process exit code for the CLI: 2 for audit violations, 3 for a broken hypothesis.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::AuditViolation { .. } => 2,
            HarnessError::Hypothesis(_) => 3,
            _ => 1,
        }
    }
}

impl From<TheoryError> for HarnessError {
    fn from(e: TheoryError) -> Self {
        match e {
            TheoryError::HypothesisViolation { .. } => HarnessError::Hypothesis(e),
            other => HarnessError::Theory(other),
        }
    }
}

/// ω values of the four graphs compared by the coupling audit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CouplingOmegas {
    pub g: usize,
    pub upper: usize,
    pub core: usize,
    pub core_lower: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplicationRow {
    pub rep: usize,
    pub seed: u64,
    /// Quasi-clique number of `G`; a lower bound when `exact` is false.
    pub omega: Option<usize>,
    pub exact: Option<bool>,
    pub core_size: usize,
    pub p_n: f64,
    pub elapsed_ms: f64,
    pub coupling: Option<CouplingOmegas>,
}

impl ReplicationRow {
    /// Inexact values are lower bounds and never count as inside.
    pub fn censored(&self) -> bool {
        self.exact == Some(false)
    }
}

/// Expected core size and the 4σ check on the replication mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoreCheck {
    /// `P(W ∈ [c - δ, c + δ])`, the clipped interval length.
    pub q: f64,
    pub expected: f64,
    /// Standard deviation of one `|S_n| ~ Bin(n, q)`.
    pub sigma: f64,
    pub mean: f64,
    pub within_4_sigma: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub replications: usize,
    pub censored: usize,
    pub omega_mean: Option<f64>,
    pub omega_min: Option<usize>,
    pub omega_max: Option<usize>,
    pub core_mean: f64,
    pub c: f64,
    pub delta: f64,
    pub p_max: f64,
    pub p_n: f64,
    /// Fraction inside `window(ε)` around ω̃.
    pub fraction_in_window: Option<f64>,
    /// Fraction inside `[refined - 3, refined + 2]`.
    pub fraction_in_refined: Option<f64>,
    pub core_check: Option<CoreCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub mode: Mode,
    pub config: ExperimentConfig,
    pub theory: Option<TheoryEstimates>,
    pub rows: Vec<ReplicationRow>,
    pub summary: Summary,
}

impl ExperimentReport {
    /// Fraction of rows with an exact ω in `[lo, hi]`.
    pub fn fraction_in(&self, lo: f64, hi: f64) -> Option<f64> {
        let mut any = false;
        let inside = self
            .rows
            .iter()
            .filter(|r| {
                any |= r.omega.is_some();
                !r.censored() && r.omega.is_some_and(|w| lo <= w as f64 && w as f64 <= hi)
            })
            .count();
        any.then(|| inside as f64 / self.rows.len() as f64)
    }

    /// Fraction of exact ω values inside `window(ε)` around ω̃.
    pub fn fraction_in_window(&self, epsilon: f64) -> Result<Option<f64>, HarnessError> {
        let Some(theory) = &self.theory else { return Ok(None) };
        let (lo, hi) = theory.window(epsilon)?;
        Ok(self.fraction_in(lo, hi))
    }

    pub fn omegas(&self) -> Vec<usize> {
        self.rows.iter().filter_map(|r| r.omega).collect()
    }
}

/// Runs `cfg.mode` on `jobs` threads (`jobs = 0` picks rayon's default).
pub fn run(cfg: &ExperimentConfig, jobs: usize) -> Result<ExperimentReport, HarnessError> {
    match cfg.mode {
        Mode::Concentration => run_concentration(cfg, jobs),
        Mode::CouplingAudit => run_coupling_audit(cfg, jobs),
        Mode::CoreAudit => run_core_audit(cfg, jobs),
    }
}

/// Maps `0..replications` in parallel; the first error by replication index wins.
fn replicate<F>(cfg: &ExperimentConfig, jobs: usize, f: F) -> Result<Vec<ReplicationRow>, HarnessError>
where
    F: Fn(usize, u64) -> Result<ReplicationRow, HarnessError> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let results: Vec<Result<ReplicationRow, HarnessError>> = pool.install(|| {
        (0..cfg.replications)
            .into_par_iter()
            .map(|rep| f(rep, sampler::replication_seed(cfg.master_seed, rep as u64)))
            .collect()
    });
    results.into_iter().collect()
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Samples `G(n, κ)` per replication and solves for ω_γ.
pub fn run_concentration(cfg: &ExperimentConfig, jobs: usize) -> Result<ExperimentReport, HarnessError> {
    cfg.validate()?;
    let mp = cfg.kernel.max_point()?;
    let theory = TheoryEstimates::new(cfg.n, cfg.gamma, mp.p_max)?;
    let delta = cfg.delta()?;
    let p_n = cfg.kernel.inf_on_square(mp.c, delta)?;
    let rows = replicate(cfg, jobs, |rep, seed| {
        let start = Instant::now();
        let s = sampler::sample(&cfg.kernel, cfg.n, seed);
        let res = qc_number(&s.graph, cfg.gamma, cfg.budget);
        Ok(ReplicationRow {
            rep,
            seed,
            omega: Some(res.size),
            exact: Some(res.exact),
            core_size: sampler::dense_core(&s.weights, mp.c, delta).len(),
            p_n,
            elapsed_ms: elapsed_ms(start),
            coupling: None,
        })
    })?;
    let mut report = assemble(cfg, Some(theory), rows, mp.c, delta, mp.p_max, p_n);
    report.summary.fraction_in_window = report.fraction_in_window(cfg.epsilon)?;
    report.summary.fraction_in_refined =
        report.fraction_in(theory.refined - REFINED_BELOW, theory.refined + REFINED_ABOVE);
    Ok(report)
}

/// Checks the couplings on every replication; any failure aborts with its seed.
///
/// Always checks `E(G) ⊆ E(G')` and, on the core, that pairs with
/// `κ >= p_n` present in `G''` are present in `G`. With `audit_exact` it also
/// checks `ω(G''[S]) <= ω(G[S]) <= ω(G) <= ω(G')`.
pub fn run_coupling_audit(cfg: &ExperimentConfig, jobs: usize) -> Result<ExperimentReport, HarnessError> {
    cfg.validate()?;
    let mp = cfg.kernel.max_point()?;
    let delta = cfg.delta()?;
    let p_n = cfg.kernel.inf_on_square(mp.c, delta)?;
    let rows = replicate(cfg, jobs, |rep, seed| {
        let start = Instant::now();
        let t = sampler::sample_coupled(&cfg.kernel, cfg.n, delta, seed)?;
        let violation = |detail: String| HarnessError::AuditViolation { rep, seed, detail };
        if let Some(&(i, j)) = t.upper_violations().first() {
            return Err(violation(format!("edge ({i}, {j}) of G is missing from G'")));
        }
        if let Some(&(i, j)) = t.lower_violations(&cfg.kernel).first() {
            return Err(violation(format!("core edge ({i}, {j}) of G'' is missing from G")));
        }
        let (omega, exact, coupling) = if cfg.audit_exact {
            let solve = |g: &crate::Graph, name: &'static str| {
                let r = qc_number(g, cfg.gamma, cfg.budget);
                if r.exact {
                    Ok(r.size)
                } else {
                    Err(HarnessError::AuditInconclusive { rep, seed, graph: name })
                }
            };
            let w = CouplingOmegas {
                g: solve(&t.g, "G")?,
                upper: solve(&t.g_upper, "G'")?,
                core: solve(&t.g.induced_subgraph(&t.core), "G[S]")?,
                core_lower: solve(&t.g_lower.induced_subgraph(&t.core), "G''[S]")?,
            };
            if !(w.core_lower <= w.core && w.core <= w.g && w.g <= w.upper) {
                return Err(violation(format!(
                    "expected ω(G''[S]) <= ω(G[S]) <= ω(G) <= ω(G'), got {} {} {} {}",
                    w.core_lower, w.core, w.g, w.upper
                )));
            }
            (Some(w.g), Some(true), Some(w))
        } else {
            (None, None, None)
        };
        Ok(ReplicationRow {
            rep,
            seed,
            omega,
            exact,
            core_size: t.core.len(),
            p_n: t.p_n,
            elapsed_ms: elapsed_ms(start),
            coupling,
        })
    })?;
    let theory = TheoryEstimates::new(cfg.n, cfg.gamma, mp.p_max).ok();
    Ok(assemble(cfg, theory, rows, mp.c, delta, mp.p_max, p_n))
}

/// Samples weights only and compares the dense-core size with `Bin(n, q)`.
pub fn run_core_audit(cfg: &ExperimentConfig, jobs: usize) -> Result<ExperimentReport, HarnessError> {
    cfg.validate()?;
    let mp = cfg.kernel.max_point()?;
    let delta = cfg.delta()?;
    let p_n = cfg.kernel.inf_on_square(mp.c, delta)?;
    let rows = replicate(cfg, jobs, |rep, seed| {
        let start = Instant::now();
        let weights = sampler::sample_weights(cfg.n, &mut sampler::stream_rng(seed, sampler::WEIGHT_STREAM));
        Ok(ReplicationRow {
            rep,
            seed,
            omega: None,
            exact: None,
            core_size: sampler::dense_core(&weights, mp.c, delta).len(),
            p_n,
            elapsed_ms: elapsed_ms(start),
            coupling: None,
        })
    })?;
    let mut report = assemble(cfg, None, rows, mp.c, delta, mp.p_max, p_n);
    let q = sampler::core_probability(mp.c, delta);
    let n = cfg.n as f64;
    let sigma = (n * q * (1.0 - q)).sqrt();
    let mean = report.summary.core_mean;
    report.summary.core_check =
        Some(CoreCheck { q, expected: n * q, sigma, mean, within_4_sigma: (mean - n * q).abs() <= 4.0 * sigma });
    Ok(report)
}

fn assemble(
    cfg: &ExperimentConfig,
    theory: Option<TheoryEstimates>,
    rows: Vec<ReplicationRow>,
    c: f64,
    delta: f64,
    p_max: f64,
    p_n: f64,
) -> ExperimentReport {
    let omegas: Vec<usize> = rows.iter().filter_map(|r| r.omega).collect();
    let omega_mean = (!omegas.is_empty()).then(|| omegas.iter().sum::<usize>() as f64 / omegas.len() as f64);
    let core_mean = rows.iter().map(|r| r.core_size as f64).sum::<f64>() / rows.len() as f64;
    let summary = Summary {
        replications: rows.len(),
        censored: rows.iter().filter(|r| r.censored()).count(),
        omega_mean,
        omega_min: omegas.iter().copied().min(),
        omega_max: omegas.iter().copied().max(),
        core_mean,
        c,
        delta,
        p_max,
        p_n,
        fraction_in_window: None,
        fraction_in_refined: None,
        core_check: None,
    };
    ExperimentReport { mode: cfg.mode, config: cfg.clone(), theory, rows, summary }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(mode: Mode) -> ExperimentConfig {
        ExperimentConfig {
            kernel: Kernel::constant(0.2).unwrap(),
            n: 30,
            gamma: "7/10".parse().unwrap(),
            epsilon: 0.5,
            replications: 3,
            master_seed: 11,
            budget: DEFAULT_BUDGET,
            delta_override: None,
            mode,
            audit_exact: true,
            record_timings: false,
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = config(Mode::Concentration);
        assert!(cfg.validate().is_ok());
        cfg.replications = 0;
        assert!(matches!(cfg.validate(), Err(HarnessError::Config(_))));
        let mut cfg = config(Mode::Concentration);
        cfg.epsilon = 1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = config(Mode::CouplingAudit);
        cfg.n = 49;
        assert!(cfg.validate().is_err());
        cfg.audit_exact = false;
        assert!(cfg.validate().is_ok());
        let mut cfg = config(Mode::CoreAudit);
        cfg.delta_override = Some(0.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_json_defaults() {
        let cfg = ExperimentConfig::from_json(
            r#"{"kernel": {"type": "constant", "p": 0.2}, "n": 60, "gamma": "7/10",
                "epsilon": 0.5, "replications": 5, "master_seed": 1, "mode": "core"}"#,
        )
        .unwrap();
        assert_eq!(cfg.mode, Mode::CoreAudit);
        assert_eq!(cfg.budget, DEFAULT_BUDGET);
        assert!(cfg.audit_exact && !cfg.record_timings);
        assert!(ExperimentConfig::from_json(r#"{"n": 5}"#).is_err());
    }

    #[test]
    fn hypothesis_guard() {
        let mut cfg = config(Mode::Concentration);
        cfg.gamma = "1/5".parse().unwrap();
        let err = run(&cfg, 1).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn concentration_rows_in_order() {
        let report = run(&config(Mode::Concentration), 2).unwrap();
        assert_eq!(report.rows.len(), 3);
        for (i, row) in report.rows.iter().enumerate() {
            assert_eq!(row.rep, i);
            assert_eq!(row.seed, sampler::replication_seed(11, i as u64));
            assert_eq!(row.exact, Some(true));
        }
        let f = report.summary.fraction_in_window.unwrap();
        assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn constant_kernel_coupling_is_flat() {
        let report = run(&config(Mode::CouplingAudit), 1).unwrap();
        for row in &report.rows {
            let w = row.coupling.unwrap();
            assert_eq!(w.g, w.upper);
            assert_eq!(w.core, w.core_lower);
        }
    }

    #[test]
    fn censored_rows_never_inside() {
        let mut report = run(&config(Mode::Concentration), 1).unwrap();
        let before = report.fraction_in(0.0, 100.0).unwrap();
        assert_eq!(before, 1.0);
        report.rows[0].exact = Some(false);
        assert!(report.fraction_in(0.0, 100.0).unwrap() < 1.0);
    }

    #[test]
    fn core_audit_boundary_clip() {
        // Rank-1 kernel peaking at the left edge: the core is [0, δ].
        let mut cfg = config(Mode::CoreAudit);
        cfg.kernel = Kernel::rank1(vec![(0.0, 0.9), (1.0, 0.3)]).unwrap();
        cfg.n = 500;
        let report = run(&cfg, 1).unwrap();
        let check = report.summary.core_check.unwrap();
        assert_eq!(report.summary.c, 0.0);
        assert!((check.q - report.summary.delta).abs() < 1e-15);
        assert!(report.rows.iter().all(|r| r.omega.is_none()));
    }
}
