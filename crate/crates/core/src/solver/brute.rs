use std::time::Instant;

use super::{Gamma, QuasiCliqueResult, SolverError};
use crate::graph::{Graph, VertexSet};

/// Largest order [`brute_force`] accepts.
pub const BRUTE_FORCE_MAX_N: usize = 22;

/// Exact ω_γ by scanning all `2^n` subsets.
///
/// Ties go to the lexicographically smallest sorted vertex list.
pub fn brute_force(g: &Graph, gamma: Gamma) -> Result<QuasiCliqueResult, SolverError> {
    let n = g.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(SolverError::TooLarge { n, cap: BRUTE_FORCE_MAX_N });
    }
    let start = Instant::now();
    let adj: Vec<u32> = (0..n).map(|u| g.neighbors(u).fold(0u32, |m, v| m | 1 << v)).collect();

    // edges[mask] = edges[mask minus its lowest vertex] + that vertex's degree into the rest.
    // C(22, 2) = 231 fits in a byte.
    let total = 1usize << n;
    let mut edges = vec![0u8; total];
    let mut best_mask = 0u32;
    let mut best_size = 0u32;
    for mask in 1..total as u32 {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let e = edges[rest as usize] + (adj[low] & rest).count_ones() as u8;
        edges[mask as usize] = e;
        let size = mask.count_ones();
        if size < best_size || !gamma.is_dense(size as usize, e as u64) {
            continue;
        }
        // Same size: the set holding the lowest differing vertex sorts first.
        let diff = mask ^ best_mask;
        if size > best_size || diff & diff.wrapping_neg() & mask != 0 {
            best_size = size;
            best_mask = mask;
        }
    }

    let witness = VertexSet::from_vertices(n, (0..n).filter(|&v| best_mask >> v & 1 == 1));
    let mut res = QuasiCliqueResult::from_witness(g, witness, true);
    res.nodes_explored = total as u64;
    res.wall_time = start.elapsed();
    Ok(res)
}
