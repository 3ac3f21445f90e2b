use quasiclique::harness::DEFAULT_BUDGET;
use quasiclique::sampler::{replication_seed, sample, stream_rng};
use quasiclique::solver::{exact_bb, exact_bb_with, heuristic, Gamma, SearchStrategy};
use quasiclique::Kernel;

/// Both exact strategies agree on the n = 60 concentration instances, and the
/// heuristic with 32 restarts is within one of the optimum on at least 90%.
#[test]
fn er60_strategies_agree_and_heuristic_is_close() {
    let kernel = Kernel::constant(0.2).unwrap();
    let gamma: Gamma = "7/10".parse().unwrap();
    let mut close = 0;
    for rep in 0..50 {
        let seed = replication_seed(0xacce_0004, rep);
        let g = sample(&kernel, 60, seed).graph;
        let scan = exact_bb(&g, gamma, DEFAULT_BUDGET).unwrap();
        assert!(scan.exact && scan.certificate_holds(&g, gamma));
        let warm = heuristic(&g, gamma, 32, &mut stream_rng(seed, 7)).unwrap();
        assert!(warm.size <= scan.size);
        if warm.size + 1 >= scan.size {
            close += 1;
        }
        let cold = heuristic(&g, gamma, 1, &mut stream_rng(seed, 8)).unwrap();
        let peel = exact_bb_with(&g, gamma, DEFAULT_BUDGET, cold, SearchStrategy::PeelTree).unwrap();
        assert!(peel.exact);
        assert_eq!(peel.size, scan.size, "rep {rep}");
    }
    assert!(close >= 45, "heuristic within one of exact on {close}/50");
}

#[test]
fn budget_exhaustion_is_reported() {
    let g = sample(&Kernel::constant(0.5).unwrap(), 60, 3).graph;
    let gamma: Gamma = "3/4".parse().unwrap();
    let cold = heuristic(&g, gamma, 1, &mut stream_rng(0, 0)).unwrap();
    let r = exact_bb_with(&g, gamma, 10, cold.clone(), SearchStrategy::SizeScan).unwrap();
    assert!(!r.exact);
    assert!(r.size >= cold.size);
    assert!(r.certificate_holds(&g, gamma));
}
