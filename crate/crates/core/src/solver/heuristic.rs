use std::time::Instant;

use rand::Rng;

use super::{Gamma, QuasiCliqueResult, SolverError};
use crate::graph::{Graph, VertexSet};

/// Candidates tried as the second vertex of a drop-one/add-two move.
const PAIR_POOL: usize = 48;

/// Current set with every vertex's degree into it.
struct State<'g> {
    g: &'g Graph,
    inside: Vec<bool>,
    deg_in: Vec<u64>,
    size: usize,
    edges: u64,
}

impl<'g> State<'g> {
    fn new(g: &'g Graph) -> Self {
        State { g, inside: vec![false; g.n()], deg_in: vec![0; g.n()], size: 0, edges: 0 }
    }

    fn add(&mut self, v: usize) {
        debug_assert!(!self.inside[v]);
        self.edges += self.deg_in[v];
        self.inside[v] = true;
        self.size += 1;
        for u in self.g.neighbors(v) {
            self.deg_in[u] += 1;
        }
    }

    fn remove(&mut self, v: usize) {
        debug_assert!(self.inside[v]);
        self.inside[v] = false;
        self.size -= 1;
        self.edges -= self.deg_in[v];
        for u in self.g.neighbors(v) {
            self.deg_in[u] -= 1;
        }
    }

    fn outside(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.g.n()).filter(move |&v| !self.inside[v])
    }

    fn members(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.g.n()).filter(move |&v| self.inside[v])
    }

    fn key(&self) -> (usize, u64) {
        (self.size, self.edges)
    }

    /// Adds the outside vertex with most neighbours inside while the set stays dense.
    fn grow(&mut self, gamma: Gamma) -> bool {
        let mut grew = false;
        loop {
            let best = self.outside().max_by_key(|&v| (self.deg_in[v], self.g.degree(v), usize::MAX - v));
            match best {
                Some(v) if gamma.is_dense(self.size + 1, self.edges + self.deg_in[v]) => {
                    self.add(v);
                    grew = true;
                }
                _ => return grew,
            }
        }
    }

    /// Drop one member, add two outsiders, if the larger set is dense.
    fn drop_one_add_two(&mut self, gamma: Gamma) -> bool {
        let members: Vec<usize> = self.members().collect();
        let need = gamma.required_edges(self.size + 1);
        for u in members {
            self.remove(u);
            let mut pool: Vec<usize> = self.outside().filter(|&v| v != u).collect();
            pool.sort_by_key(|&v| (std::cmp::Reverse(self.deg_in[v]), v));
            pool.truncate(PAIR_POOL);
            for (a, &v) in pool.iter().enumerate() {
                for &w in &pool[a + 1..] {
                    let gain = self.deg_in[v] + self.deg_in[w] + self.g.has_edge(v, w) as u64;
                    if self.edges + gain >= need {
                        self.add(v);
                        self.add(w);
                        return true;
                    }
                }
            }
            self.add(u);
        }
        false
    }

    /// Swap a member for an outsider when that strictly raises the edge count.
    fn swap(&mut self) -> bool {
        let members: Vec<usize> = self.members().collect();
        for u in members {
            let best = self
                .outside()
                .map(|v| (self.deg_in[v] - self.g.has_edge(u, v) as u64, v))
                .max_by_key(|&(d, v)| (d, usize::MAX - v));
            if let Some((d, v)) = best {
                if d > self.deg_in[u] {
                    self.remove(u);
                    self.add(v);
                    return true;
                }
            }
        }
        false
    }
}

/// Greedy growth from random high-degree seeds followed by local search.
///
/// Each restart grows a γ-dense set one vertex at a time, then applies
/// edge-raising swaps and drop-one/add-two moves until neither helps. The
/// best set over all restarts is returned; it is always γ-dense.
pub fn heuristic<R: Rng + ?Sized>(
    g: &Graph,
    gamma: Gamma,
    restarts: usize,
    rng: &mut R,
) -> Result<QuasiCliqueResult, SolverError> {
    if restarts == 0 {
        return Err(SolverError::NoRestarts);
    }
    let start = Instant::now();
    let n = g.n();
    if n == 0 {
        return Ok(QuasiCliqueResult::from_witness(g, VertexSet::empty(0), true));
    }
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let pool = by_degree.len().div_ceil(4).max(1);

    let mut best: Option<(usize, u64, Vec<usize>)> = None;
    let mut moves = 0u64;
    for _ in 0..restarts {
        let seed = by_degree[rng.random_range(0..pool)];
        let mut s = State::new(g);
        s.add(seed);
        s.grow(gamma);
        loop {
            let before = s.key();
            let improved = s.drop_one_add_two(gamma) || s.swap();
            moves += 1;
            s.grow(gamma);
            if !improved || s.key() <= before {
                break;
            }
        }
        if best.as_ref().is_none_or(|b| (s.size, s.edges) > (b.0, b.1)) {
            best = Some((s.size, s.edges, s.members().collect()));
        }
    }
    let (_, _, members) = best.expect("at least one restart");
    let witness = VertexSet::from_vertices(n, members);
    let exact = witness.len() == n;
    let mut res = QuasiCliqueResult::from_witness(g, witness, exact);
    res.nodes_explored = moves;
    res.wall_time = start.elapsed();
    Ok(res)
}
