//! Maximum γ-quasi-clique search.
//!
//! A set `S` is γ-dense when `G[S]` has at least `γ·C(|S|, 2)` edges. With
//! `γ = num/den` the test is done in integers as
//! `2·den·e(S) >= num·|S|·(|S| - 1)`, so ties at equality are exact.
//!
//! * [`brute_force`] scans all subsets (tiny graphs, the reference oracle);
//! * [`exact_bb`] is a branch and bound over target sizes, warm-started by the heuristic;
//! * [`heuristic`] is greedy growth plus local search, a certified lower bound;
//! * [`qc_number`] dispatches between them.

mod bb;
mod brute;
mod heuristic;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, VertexSet};

pub use bb::{exact_bb, exact_bb_from, exact_bb_with, heredity_step_holds, SearchStrategy};
pub use brute::{brute_force, BRUTE_FORCE_MAX_N};
pub use heuristic::heuristic;

/// Graphs up to this order go to [`brute_force`] in [`qc_number`].
pub const DISPATCH_BRUTE_MAX_N: usize = 18;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("brute force is capped at n = {cap}, got n = {n}")]
    TooLarge { n: usize, cap: usize },
    #[error("exact search needs gamma > 0")]
    ZeroGamma,
    #[error("heuristic needs at least one restart")]
    NoRestarts,
    #[error("invalid gamma `{0}`: expected num/den with 0 <= num <= den, den > 0")]
    InvalidGamma(String),
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exact rational density threshold `γ = num/den ∈ [0, 1]`, kept reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Gamma {
    num: u64,
    den: u64,
}

impl Gamma {
    pub const ONE: Gamma = Gamma { num: 1, den: 1 };
    pub const ZERO: Gamma = Gamma { num: 0, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self, SolverError> {
        if den == 0 || num > den {
            return Err(SolverError::InvalidGamma(format!("{num}/{den}")));
        }
        let g = gcd(num, den);
        Ok(Gamma { num: num / g, den: den / g })
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_one(self) -> bool {
        self.num == self.den
    }

    /// `⌈γ·r(r-1)/2⌉`, the fewest edges an `r`-set needs to be γ-dense.
    pub fn required_edges(self, r: usize) -> u64 {
        let pairs2 = r as u128 * r.saturating_sub(1) as u128;
        let top = self.num as u128 * pairs2;
        let bot = 2 * self.den as u128;
        top.div_ceil(bot) as u64
    }

    /// Integer density certificate for a set of `size` vertices and `edges` edges.
    pub fn is_dense(self, size: usize, edges: u64) -> bool {
        2 * self.den as u128 * edges as u128 >= self.num as u128 * size as u128 * size.saturating_sub(1) as u128
    }
}

impl PartialOrd for Gamma {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Gamma {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Gamma {
    type Err = SolverError;

    /// Accepts `num/den` or a bare integer (`0` or `1`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SolverError::InvalidGamma(s.to_string());
        let (n, d) = match s.trim().split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let num = n.parse().map_err(|_| bad())?;
        let den = d.parse().map_err(|_| bad())?;
        Gamma::new(num, den).map_err(|_| bad())
    }
}

impl TryFrom<String> for Gamma {
    type Error = SolverError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Gamma> for String {
    fn from(g: Gamma) -> String {
        g.to_string()
    }
}

/// `⌈num·r·(r−1) / (2·den)⌉`.
pub fn required_edges(r: usize, gamma: Gamma) -> u64 {
    gamma.required_edges(r)
}

/// Best γ-quasi-clique found by a solver.
#[derive(Clone, Debug)]
pub struct QuasiCliqueResult {
    pub size: usize,
    pub witness: VertexSet,
    pub witness_edges: u64,
    /// No `size + 1` set is γ-dense.
    pub exact: bool,
    pub nodes_explored: u64,
    pub wall_time: Duration,
}

impl QuasiCliqueResult {
    pub(crate) fn from_witness(g: &Graph, witness: VertexSet, exact: bool) -> Self {
        let witness_edges = g.edge_count_induced(&witness) as u64;
        QuasiCliqueResult {
            size: witness.len(),
            witness,
            witness_edges,
            exact,
            nodes_explored: 0,
            wall_time: Duration::ZERO,
        }
    }

    /// Re-checks the witness against `g`: size, edge count and density.
    pub fn certificate_holds(&self, g: &Graph, gamma: Gamma) -> bool {
        self.witness.len() == self.size
            && g.edge_count_induced(&self.witness) as u64 == self.witness_edges
            && gamma.is_dense(self.size, self.witness_edges)
    }
}

/// γ-quasi-clique number with the cheapest method that is exact.
///
/// `γ = 0` returns all of `V`; graphs with at most
/// [`DISPATCH_BRUTE_MAX_N`] vertices use [`brute_force`]; larger ones use
/// [`exact_bb`] (warm-started by [`heuristic`]) with `budget` search nodes.
pub fn qc_number(g: &Graph, gamma: Gamma, budget: u64) -> QuasiCliqueResult {
    let start = std::time::Instant::now();
    let mut res = if gamma.num() == 0 {
        QuasiCliqueResult::from_witness(g, VertexSet::full(g.n()), true)
    } else if g.n() <= DISPATCH_BRUTE_MAX_N {
        brute_force(g, gamma).expect("n within brute-force cap")
    } else {
        exact_bb(g, gamma, budget).expect("gamma > 0")
    };
    res.wall_time = start.elapsed();
    res
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn required_edges_examples() {
        let half = Gamma::new(1, 2).unwrap();
        assert_eq!(required_edges(5, half), 5);
        assert_eq!(required_edges(1, half), 0);
        assert_eq!(required_edges(0, Gamma::ONE), 0);
        assert_eq!(required_edges(5, Gamma::new(3, 5).unwrap()), 6);
        assert_eq!(required_edges(10, Gamma::new(7, 10).unwrap()), 32);
        assert_eq!(required_edges(4, Gamma::new(3, 5).unwrap()), 4);
    }

    #[test]
    fn gamma_parsing_and_order() {
        let g: Gamma = "6/10".parse().unwrap();
        assert_eq!((g.num(), g.den()), (3, 5));
        assert_eq!("1".parse::<Gamma>().unwrap(), Gamma::ONE);
        assert_eq!(" 0 ".parse::<Gamma>().unwrap(), Gamma::ZERO);
        assert!("3/2".parse::<Gamma>().is_err());
        assert!("1/0".parse::<Gamma>().is_err());
        assert!("0.7".parse::<Gamma>().is_err());
        assert!(Gamma::new(1, 2).unwrap() < Gamma::new(3, 5).unwrap());
        assert_eq!(g.to_string(), "3/5");
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, "\"3/5\"");
        assert_eq!(serde_json::from_str::<Gamma>(&json).unwrap(), g);
    }

    #[test]
    fn gamma_zero_gives_everything() {
        let g = Graph::empty(25);
        let r = qc_number(&g, Gamma::ZERO, 10);
        assert_eq!(r.size, 25);
        assert!(r.exact);
    }

    #[test]
    fn triangle_plus_isolated_vertex() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (0, 2)]);
        let r = qc_number(&g, Gamma::ONE, 1000);
        assert_eq!(r.size, 3);
        assert_eq!(r.witness.to_vec(), vec![0, 1, 2]);
    }
}
