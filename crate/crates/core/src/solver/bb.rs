//! Exact branch and bound for ω_γ.
//!
//! Target sizes are tried upward from the warm-start incumbent. For each
//! target `r` a depth-first search decides whether some `r`-set has at least
//! `required_edges(r)` edges. The search stops at the first infeasible `r`:
//! deleting a minimum-degree vertex from a γ-dense `(r+1)`-set leaves a
//! γ-dense `r`-set. That step is re-verified in integers for every level
//! ([`heredity_step_holds`]); if it ever failed the scan would continue.
//!
//! A search node holds the chosen set `P`, its edge count and a candidate
//! list `C`. With `k = r - |P|` still to pick, each candidate `v`
//! gets the doubled score `2·deg_P(v) + min(deg_C(v), k - 1)`; any completion
//! `T` satisfies `2·(e(P ∪ T) - e(P)) <= Σ_T score`, so the top-`k` scores
//! bound the best completion. Candidates whose forced inclusion already
//! misses the target are dropped before branching. Each node then branches
//! on its highest-scoring candidate: include it, or exclude it for good.

use std::time::Instant;

use super::{heuristic, Gamma, QuasiCliqueResult, SolverError};
use crate::graph::{Graph, VertexSet};
use crate::sampler::stream_rng;

const WARM_START_RESTARTS: usize = 16;
const WARM_START_SEED: u64 = 0x5eed;

/// True when every γ-dense `(r+1)`-set contains a γ-dense `r`-set, via
/// deleting a minimum-degree vertex. Checked at the worst case: the edge
/// count `e = required_edges(r+1)`; `e - ⌊2e/(r+1)⌋` is non-decreasing in `e`.
pub fn heredity_step_holds(r: usize, gamma: Gamma) -> bool {
    let e = gamma.required_edges(r + 1);
    let min_deg = 2 * e / (r as u64 + 1);
    e - min_deg >= gamma.required_edges(r)
}

/// Exact ω_γ, warm-started by a deterministic [`heuristic`] run.
pub fn exact_bb(g: &Graph, gamma: Gamma, budget: u64) -> Result<QuasiCliqueResult, SolverError> {
    if gamma.num() == 0 {
        return Err(SolverError::ZeroGamma);
    }
    let warm = heuristic(g, gamma, WARM_START_RESTARTS, &mut stream_rng(WARM_START_SEED, 0))?;
    exact_bb_from(g, gamma, budget, warm)
}

/// How [`exact_bb_with`] explores the search space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStrategy {
    /// One depth-first search over the peeling tree: every node is a γ-dense
    /// set whose parent is the set minus its canonical minimum-degree vertex.
    /// Only sound when the minimum-degree deletion step holds at every level.
    PeelTree,
    /// One decision search per target size, in ascending order.
    SizeScan,
}

/// Exact ω_γ starting from the γ-dense `incumbent`.
///
/// Runs [`SearchStrategy::SizeScan`]. If the node budget runs out, the best
/// set so far comes back with `exact = false`.
pub fn exact_bb_from(
    g: &Graph,
    gamma: Gamma,
    budget: u64,
    incumbent: QuasiCliqueResult,
) -> Result<QuasiCliqueResult, SolverError> {
    exact_bb_with(g, gamma, budget, incumbent, SearchStrategy::SizeScan)
}

/// Exact ω_γ with an explicit search strategy.
pub fn exact_bb_with(
    g: &Graph,
    gamma: Gamma,
    budget: u64,
    incumbent: QuasiCliqueResult,
    strategy: SearchStrategy,
) -> Result<QuasiCliqueResult, SolverError> {
    if gamma.num() == 0 {
        return Err(SolverError::ZeroGamma);
    }
    assert!(incumbent.certificate_holds(g, gamma), "incumbent must be a γ-dense witness of g");
    let start = Instant::now();
    let n = g.n();
    let peel_sound = (1..n).all(|s| heredity_step_holds(s, gamma));
    let (mut best, exact, nodes) = match strategy {
        SearchStrategy::PeelTree if peel_sound => {
            let mut tree = PeelTree::new(g, gamma, budget, incumbent.witness.clone());
            tree.run();
            (tree.best, !tree.exhausted, tree.nodes)
        }
        _ => size_scan(g, gamma, budget, incumbent.witness.clone()),
    };
    if best.is_empty() && n > 0 {
        best = VertexSet::from_vertices(n, [0]);
    }
    let mut res = QuasiCliqueResult::from_witness(g, best, exact);
    res.nodes_explored = nodes;
    res.wall_time = start.elapsed();
    Ok(res)
}

fn size_scan(g: &Graph, gamma: Gamma, budget: u64, mut best: VertexSet) -> (VertexSet, bool, u64) {
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));

    let mut search = Search { g, gamma, budget, nodes: 0, exhausted: false, target: 0, need: 0 };
    let mut exact = true;
    let mut r = best.len().max(1) + 1;
    while r <= n {
        if gamma.required_edges(r) > g.m() as u64 {
            // required_edges is non-decreasing in r: nothing larger fits either.
            break;
        }
        match search.decide(r, &order) {
            Some(found) => best = found,
            None if search.exhausted => {
                exact = false;
                break;
            }
            None if (r..n).all(|s| heredity_step_holds(s, gamma)) => break,
            None => {}
        }
        r += 1;
    }
    (best, exact, search.nodes)
}

/// Reverse search over γ-dense sets.
///
/// The canonical peel vertex of a set is its minimum-degree member, ties
/// going to the largest index. Removing it keeps the set γ-dense, so every
/// γ-dense set is reached exactly once by adding, at each step, a vertex
/// that keeps the set γ-dense and becomes its canonical peel vertex. A node
/// is abandoned when no superset of size `best + 1` can reach the edge target.
struct PeelTree<'g> {
    g: &'g Graph,
    gamma: Gamma,
    budget: u64,
    nodes: u64,
    exhausted: bool,
    best: VertexSet,
    set: VertexSet,
    members: Vec<usize>,
    deg_in: Vec<u64>,
    edges: u64,
}

impl<'g> PeelTree<'g> {
    fn new(g: &'g Graph, gamma: Gamma, budget: u64, best: VertexSet) -> Self {
        let n = g.n();
        PeelTree {
            g,
            gamma,
            budget,
            nodes: 0,
            exhausted: false,
            best,
            set: VertexSet::empty(n),
            members: Vec::new(),
            deg_in: vec![0; n],
            edges: 0,
        }
    }

    fn run(&mut self) {
        self.visit();
    }

    fn push(&mut self, v: usize) {
        self.edges += self.deg_in[v];
        self.set.insert(v);
        self.members.push(v);
        for u in self.g.neighbors(v) {
            self.deg_in[u] += 1;
        }
    }

    fn pop(&mut self) {
        let v = self.members.pop().expect("non-empty");
        self.set.remove(v);
        for u in self.g.neighbors(v) {
            self.deg_in[u] -= 1;
        }
        self.edges -= self.deg_in[v];
    }

    /// Candidates that may still appear in a γ-dense superset of size
    /// `best + 1`, or `None` when no such superset can exist.
    fn candidates(&self) -> Option<Vec<usize>> {
        let n = self.g.n();
        let size = self.members.len();
        let target = self.best.len() + 1;
        if target > n {
            return None;
        }
        let k = target - size;
        let need = self.gamma.required_edges(target);
        if self.edges >= need {
            return Some((0..n).filter(|&v| !self.set.contains(v)).collect());
        }
        let missing = need - self.edges;
        let pairs_k = (k * (k - 1) / 2) as u64;
        let mut cands: Vec<usize> = (0..n).filter(|&v| !self.set.contains(v)).collect();
        loop {
            if cands.len() < k {
                return None;
            }
            let cand_set = VertexSet::from_vertices(n, cands.iter().copied());
            let deg_p: Vec<u64> = cands.iter().map(|&v| self.deg_in[v]).collect();
            let score: Vec<u64> = cands
                .iter()
                .zip(&deg_p)
                .map(|(&v, &dp)| 2 * dp + (self.g.degree_into(v, &cand_set) as u64).min(k as u64 - 1))
                .collect();
            let top = top_sum_thresholds(&score, k);
            let top_p = top_sum_thresholds(&deg_p, k);
            if top.k_sum < 2 * missing || top_p.k_sum + pairs_k < missing {
                return None;
            }
            let before = cands.len();
            let mut keep_idx = 0;
            for i in 0..cands.len() {
                let keep = (score[i] >= top.kth || score[i] + top.without_one >= 2 * missing)
                    && (deg_p[i] >= top_p.kth || deg_p[i] + top_p.without_one + pairs_k >= missing);
                if keep {
                    cands[keep_idx] = cands[i];
                    keep_idx += 1;
                }
            }
            cands.truncate(keep_idx);
            if cands.len() == before {
                return Some(cands);
            }
        }
    }

    /// `v` becomes the canonical peel vertex of `set + v`.
    fn is_canonical_child(&self, v: usize) -> bool {
        let dv = self.deg_in[v];
        self.members.iter().all(|&w| {
            let dw = self.deg_in[w] + self.g.has_edge(v, w) as u64;
            dw > dv || (dw == dv && w < v)
        })
    }

    fn visit(&mut self) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if self.members.len() > self.best.len() {
            self.best = self.set.clone();
        }
        let Some(mut cands) = self.candidates() else { return };
        let next_need = self.gamma.required_edges(self.members.len() + 1);
        cands.sort_by_key(|&v| (std::cmp::Reverse(self.deg_in[v]), v));
        let mut target = self.best.len();
        for v in cands {
            if self.best.len() != target {
                // A larger incumbent raises the bar; re-check this node.
                target = self.best.len();
                if self.candidates().is_none() {
                    return;
                }
            }
            if self.edges + self.deg_in[v] < next_need {
                // Sorted by degree into the set: later vertices fare no better.
                break;
            }
            if !self.is_canonical_child(v) {
                continue;
            }
            self.push(v);
            self.visit();
            self.pop();
            if self.exhausted {
                return;
            }
        }
    }
}

struct Search<'g> {
    g: &'g Graph,
    gamma: Gamma,
    budget: u64,
    nodes: u64,
    exhausted: bool,
    target: usize,
    need: u64,
}

impl Search<'_> {
    /// Some `r`-set meeting `required_edges(r)`, searched in `order`.
    fn decide(&mut self, r: usize, order: &[usize]) -> Option<VertexSet> {
        self.target = r;
        self.need = self.gamma.required_edges(r);
        let mut chosen = VertexSet::empty(self.g.n());
        let mut picked = Vec::with_capacity(r);
        if self.dfs(&mut chosen, &mut picked, 0, order.to_vec()) {
            Some(chosen)
        } else {
            None
        }
    }

    fn dfs(&mut self, chosen: &mut VertexSet, picked: &mut Vec<usize>, edges: u64, mut cands: Vec<usize>) -> bool {
        if self.exhausted {
            return false;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return false;
        }
        let k = self.target - picked.len();
        if k == 0 {
            return edges >= self.need;
        }
        if cands.len() < k {
            return false;
        }
        if edges >= self.need {
            // Any completion works; edges only grow.
            for &v in &cands[..k] {
                chosen.insert(v);
            }
            return true;
        }
        let missing2 = 2 * (self.need - edges);
        let missing = self.need - edges;
        let pairs_k = (k * (k - 1) / 2) as u64;

        // Shrink the candidate list until every remaining vertex can still
        // appear in a completion that meets the target.
        let mut deg_p: Vec<u64>;
        let mut score: Vec<u64>;
        loop {
            let cand_set = VertexSet::from_vertices(self.g.n(), cands.iter().copied());
            deg_p = cands.iter().map(|&v| self.g.degree_into(v, chosen) as u64).collect();
            score = cands
                .iter()
                .zip(&deg_p)
                .map(|(&v, &dp)| 2 * dp + (self.g.degree_into(v, &cand_set) as u64).min(k as u64 - 1))
                .collect();

            let top = top_sum_thresholds(&score, k);
            let top_p = top_sum_thresholds(&deg_p, k);
            if top.k_sum < missing2 || top_p.k_sum + pairs_k < missing {
                return false;
            }
            let before = cands.len();
            let mut keep_idx = 0;
            for i in 0..cands.len() {
                let keep = (score[i] >= top.kth || score[i] + top.without_one >= missing2)
                    && (deg_p[i] >= top_p.kth || deg_p[i] + top_p.without_one + pairs_k >= missing);
                if keep {
                    cands[keep_idx] = cands[i];
                    deg_p[keep_idx] = deg_p[i];
                    score[keep_idx] = score[i];
                    keep_idx += 1;
                }
            }
            cands.truncate(keep_idx);
            if cands.len() < k {
                return false;
            }
            if cands.len() == before {
                break;
            }
        }

        // Branch on the strongest candidate: take it, or drop it for good.
        // Dropping it lowers the top-k sums the most.
        let best = (0..cands.len()).max_by_key(|&i| (score[i], std::cmp::Reverse(i))).expect("k >= 1");
        let v = cands.remove(best);
        let dp = deg_p[best];
        chosen.insert(v);
        picked.push(v);
        if self.dfs(chosen, picked, edges + dp, cands.clone()) {
            return true;
        }
        picked.pop();
        chosen.remove(v);
        if self.exhausted {
            return false;
        }
        self.dfs(chosen, picked, edges, cands)
    }
}

struct TopSums {
    /// Sum of the `k` largest values.
    k_sum: u64,
    /// Sum of the `k - 1` largest values.
    without_one: u64,
    /// The `k`-th largest value; anything at least this large is in some top-`k`.
    kth: u64,
}

fn top_sum_thresholds(values: &[u64], k: usize) -> TopSums {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let without_one: u64 = sorted[..k - 1].iter().sum();
    TopSums { k_sum: without_one + sorted[k - 1], without_one, kth: sorted[k - 1] }
}
