//! Sampling `G(n, κ)` and the coupled graphs used to sandwich it.
//!
//! Randomness comes from ChaCha8, which is counter based: a seed selects the
//! key, `set_stream` selects an independent stream and the word position is
//! the counter. Stream 0 of a seed holds the vertex weights, stream 1 holds
//! one uniform per unordered pair in lexicographic order `(0,1), (0,2), ...,
//! (n-2,n-1)`. Because every graph built from a seed reads the same pair
//! uniforms, `G`, `G'` and `G''` are coupled exactly.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphBuilder, VertexSet};
use crate::kernel::{Kernel, KernelError};

pub const WEIGHT_STREAM: u64 = 0;
pub const PAIR_STREAM: u64 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum SamplerError {
    #[error("need at least 2 vertices for a positive log(n), got {0}")]
    TooFewVertices(usize),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// ChaCha8 generator for `seed`, positioned at the start of `stream`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed of replication `rep` under `master_seed`. Depends only on the pair,
/// never on scheduling.
pub fn replication_seed(master_seed: u64, rep: u64) -> u64 {
    // Stream 2^63 + rep keeps these well away from the weight/pair streams.
    stream_rng(master_seed, (1 << 63) | rep).next_u64()
}

/// A sampled graph together with the vertex weights that produced it.
#[derive(Clone, Debug)]
pub struct WeightedSample {
    pub graph: Graph,
    pub weights: Vec<f64>,
    pub seed: u64,
    pub kernel_id: String,
}

/// JSON sidecar stored next to a sampled graph's DIMACS file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSidecar {
    pub seed: u64,
    pub kernel_id: String,
    pub weights: Vec<f64>,
}

impl WeightedSample {
    pub fn sidecar(&self) -> SampleSidecar {
        SampleSidecar { seed: self.seed, kernel_id: self.kernel_id.clone(), weights: self.weights.clone() }
    }
}

/// `G ~ G(n, κ)` together with `G' ~ G(n, p_max)` and `G'' ~ G(n, p_n)`,
/// all thresholding the same pair uniforms.
#[derive(Clone, Debug)]
pub struct CoupledTriple {
    pub g: Graph,
    pub g_upper: Graph,
    pub g_lower: Graph,
    pub weights: Vec<f64>,
    pub c: f64,
    pub delta: f64,
    pub p_max: f64,
    pub p_n: f64,
    pub core: VertexSet,
}

/// `n` independent `Unif[0, 1)` draws.
pub fn sample_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>()).collect()
}

/// Each pair `i < j` is an edge iff its uniform `U_ij <= κ(W_i, W_j)`; pairs
/// consume the stream in lexicographic order.
pub fn sample_graph<R: Rng + ?Sized>(kernel: &Kernel, weights: &[f64], rng: &mut R) -> Graph {
    assert!(weights.iter().all(|w| (0.0..=1.0).contains(w)), "vertex weights must lie in [0, 1]");
    let n = weights.len();
    let mut b = GraphBuilder::new(n);
    for i in 0..n {
        for j in i + 1..n {
            let u: f64 = rng.random();
            if u <= kernel.eval_unchecked(weights[i], weights[j]) {
                b.add_edge(i, j);
            }
        }
    }
    b.build()
}

/// Weights from stream 0 and the graph from stream 1 of `seed`.
pub fn sample(kernel: &Kernel, n: usize, seed: u64) -> WeightedSample {
    let weights = sample_weights(n, &mut stream_rng(seed, WEIGHT_STREAM));
    let graph = sample_graph(kernel, &weights, &mut stream_rng(seed, PAIR_STREAM));
    WeightedSample { graph, weights, seed, kernel_id: kernel.kernel_id() }
}

/// Vertices whose weight lies in `[c - δ, c + δ] ∩ [0, 1]`.
pub fn dense_core(weights: &[f64], c: f64, delta: f64) -> VertexSet {
    let (lo, hi) = ((c - delta).max(0.0), (c + delta).min(1.0));
    VertexSet::from_vertices(
        weights.len(),
        weights.iter().enumerate().filter(|(_, &w)| lo <= w && w <= hi).map(|(i, _)| i),
    )
}

/// Length of `[c - δ, c + δ] ∩ [0, 1]`, i.e. `P(W ∈ core)` for a uniform weight.
pub fn core_probability(c: f64, delta: f64) -> f64 {
    ((c + delta).min(1.0) - (c - delta).max(0.0)).max(0.0)
}

/// `1 / ln(n)`, capped at 0.5.
pub fn default_delta(n: usize) -> Result<f64, SamplerError> {
    if n <= 1 {
        return Err(SamplerError::TooFewVertices(n));
    }
    Ok((1.0 / (n as f64).ln()).min(0.5))
}

/// Builds the coupled triple for `(kernel, n, δ, master_seed)`.
///
/// `g` is the same graph [`sample`] returns for `master_seed`. The upper graph
/// thresholds at `p_max = κ(c, c)`, the lower one at `p_n`, the infimum of `κ`
/// on the square of half-width `δ` around `(c, c)`.
pub fn sample_coupled(kernel: &Kernel, n: usize, delta: f64, master_seed: u64) -> Result<CoupledTriple, SamplerError> {
    let mp = kernel.max_point()?;
    let p_n = kernel.inf_on_square(mp.c, delta)?;
    let weights = sample_weights(n, &mut stream_rng(master_seed, WEIGHT_STREAM));
    let mut rng = stream_rng(master_seed, PAIR_STREAM);
    let (mut g, mut up, mut low) = (GraphBuilder::new(n), GraphBuilder::new(n), GraphBuilder::new(n));
    for i in 0..n {
        for j in i + 1..n {
            let u: f64 = rng.random();
            if u <= kernel.eval_unchecked(weights[i], weights[j]) {
                g.add_edge(i, j);
            }
            if u <= mp.p_max {
                up.add_edge(i, j);
            }
            if u <= p_n {
                low.add_edge(i, j);
            }
        }
    }
    let core = dense_core(&weights, mp.c, delta);
    Ok(CoupledTriple {
        g: g.build(),
        g_upper: up.build(),
        g_lower: low.build(),
        weights,
        c: mp.c,
        delta,
        p_max: mp.p_max,
        p_n,
        core,
    })
}

impl CoupledTriple {
    /// Pairs violating `E(G) ⊆ E(G')`.
    pub fn upper_violations(&self) -> Vec<(usize, usize)> {
        self.g.edges().filter(|&(i, j)| !self.g_upper.has_edge(i, j)).collect()
    }

    /// Core pairs with `κ(W_i, W_j) >= p_n` that are edges of `G''` but not of `G`.
    pub fn lower_violations(&self, kernel: &Kernel) -> Vec<(usize, usize)> {
        let core = self.core.to_vec();
        let mut bad = Vec::new();
        for (a, &i) in core.iter().enumerate() {
            for &j in &core[a + 1..] {
                let kij = kernel.eval_unchecked(self.weights[i], self.weights[j]);
                if kij >= self.p_n && self.g_lower.has_edge(i, j) && !self.g.has_edge(i, j) {
                    bad.push((i, j));
                }
            }
        }
        bad
    }
}
