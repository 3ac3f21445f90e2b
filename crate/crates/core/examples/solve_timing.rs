//! Times both exact search strategies on desk-scale experiment instances.
use std::time::Instant;

use quasiclique::sampler::stream_rng;
use quasiclique::sampler::{replication_seed, sample};
use quasiclique::solver::{exact_bb_with, heuristic, Gamma, SearchStrategy};
use quasiclique::Kernel;

fn main() {
    let strategies: Vec<SearchStrategy> = match std::env::args().nth(1).as_deref() {
        Some("peel") => vec![SearchStrategy::PeelTree],
        Some("both") => vec![SearchStrategy::PeelTree, SearchStrategy::SizeScan],
        _ => vec![SearchStrategy::SizeScan],
    };
    let sbm = Kernel::block(vec![0.0, 0.5, 1.0], vec![vec![0.5, 0.2], vec![0.2, 0.4]]).unwrap();
    let cases = [
        ("er60", Kernel::constant(0.2).unwrap(), 60, "7/10"),
        ("sbm80", sbm.clone(), 80, "3/4"),
        ("sbm40", sbm, 40, "3/4"),
        ("er40", Kernel::constant(0.5).unwrap(), 40, "3/4"),
    ];
    let only = std::env::args().nth(2);
    for (name, kernel, n, gamma) in cases {
        if only.as_deref().is_some_and(|o| o != name) {
            continue;
        }
        let gamma: Gamma = gamma.parse().unwrap();
        for rep in 0..5 {
            let g = sample(&kernel, n, replication_seed(1, rep)).graph;
            let warm = heuristic(&g, gamma, 16, &mut stream_rng(0x5eed, 0)).unwrap();
            for &s in &strategies {
                let t = Instant::now();
                let r = exact_bb_with(&g, gamma, u64::MAX, warm.clone(), s).unwrap();
                println!(
                    "{name} rep {rep} {s:?}: warm {} size {} exact {} nodes {} in {:?}",
                    warm.size,
                    r.size,
                    r.exact,
                    r.nodes_explored,
                    t.elapsed()
                );
            }
        }
    }
}
