use std::time::Duration;

use proptest::prelude::*;

use quasiclique::solver::{brute_force, exact_bb_from, heuristic, qc_number, Gamma};
use quasiclique::theory::{kl_bernoulli, typical_qcn};
use quasiclique::{sampler, Graph, Kernel, QuasiCliqueResult, VertexSet};

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if bits[k] {
                        edges.push((i, j));
                    }
                    k += 1;
                }
            }
            Graph::from_edges(n, &edges)
        })
    })
}

fn graph_and_set(max_n: usize) -> impl Strategy<Value = (Graph, VertexSet)> {
    graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        proptest::collection::vec(any::<bool>(), n).prop_map(move |mask| {
            let s = VertexSet::from_vertices(n, (0..n).filter(|&i| mask[i]));
            (g.clone(), s)
        })
    })
}

fn gamma() -> impl Strategy<Value = Gamma> {
    (1u64..=10).prop_flat_map(|den| (1..=den).prop_map(move |num| Gamma::new(num, den).unwrap()))
}

fn prob() -> impl Strategy<Value = f64> {
    0.01f64..0.99
}

fn partition(k: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::btree_set(1u32..1000, k - 1).prop_map(|inner| {
        let mut cuts = vec![0.0];
        cuts.extend(inner.into_iter().map(|c| c as f64 / 1000.0));
        cuts.push(1.0);
        cuts
    })
}

fn symmetric(k: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(prob(), k * k).prop_map(move |v| {
        let mut m = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in i..k {
                m[i][j] = v[i * k + j];
                m[j][i] = v[i * k + j];
            }
        }
        m
    })
}

/// Kernels whose maximum sits on the diagonal, so `max_point` succeeds.
fn kernel() -> impl Strategy<Value = Kernel> {
    let constant = prob().prop_map(|p| Kernel::constant(p).unwrap());
    let rank1 = (2usize..6)
        .prop_flat_map(|k| (partition(k - 1), proptest::collection::vec(0.1f64..0.99, k)))
        .prop_map(|(xs, ys)| Kernel::rank1(xs.into_iter().zip(ys).collect()).unwrap());
    let block = (1usize..5).prop_flat_map(|k| (partition(k), symmetric(k))).prop_filter_map(
        "diagonal maximum",
        |(cuts, mut probs)| {
            let top = probs.iter().flatten().copied().fold(0.0, f64::max);
            let i = probs.len() / 2;
            probs[i][i] = top;
            Kernel::block(cuts, probs).ok()
        },
    );
    let grid = (2usize..6).prop_flat_map(symmetric).prop_filter_map("diagonal maximum", |mut values| {
        let top = values.iter().flatten().copied().fold(0.0, f64::max);
        let i = values.len() / 2;
        values[i][i] = top;
        Kernel::grid(values).ok()
    });
    prop_oneof![constant, rank1, block, grid]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn induced_count_matches_induced_graph((g, s) in graph_and_set(16)) {
        let h = g.induced_subgraph(&s);
        prop_assert_eq!(h.n(), s.len());
        prop_assert_eq!(h.m(), g.edge_count_induced(&s));
    }

    #[test]
    fn induced_count_monotone((g, s) in graph_and_set(16), drop in any::<prop::sample::Index>()) {
        let members = s.to_vec();
        prop_assume!(!members.is_empty());
        let mut t = s.clone();
        t.remove(members[drop.index(members.len())]);
        prop_assert!(g.edge_count_induced(&t) <= g.edge_count_induced(&s));
    }

    #[test]
    fn dimacs_round_trip(g in graph(20)) {
        let text = g.write_dimacs();
        let back = Graph::read_dimacs(text.as_bytes()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn kernel_symmetric_in_unit_interval(k in kernel(), x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        let a = k.eval(x, y).unwrap();
        prop_assert_eq!(a, k.eval(y, x).unwrap());
        prop_assert!(a > 0.0 && a < 1.0);
    }

    #[test]
    fn square_infimum_is_a_lower_bound(
        k in kernel(),
        d1 in 0.001f64..0.5,
        d2 in 0.001f64..0.5,
        u in -1.0f64..=1.0,
        v in -1.0f64..=1.0,
    ) {
        let mp = k.max_point().unwrap();
        let (small, large) = (d1.min(d2), d1.max(d2));
        let inf_small = k.inf_on_square(mp.c, small).unwrap();
        let inf_large = k.inf_on_square(mp.c, large).unwrap();
        prop_assert!(inf_small <= mp.p_max + 1e-12);
        prop_assert!(inf_large <= inf_small + 1e-12);
        let x = (mp.c + u * small).clamp(0.0, 1.0);
        let y = (mp.c + v * small).clamp(0.0, 1.0);
        prop_assert!(k.eval(x, y).unwrap() >= inf_small - 1e-12);
    }

    #[test]
    fn max_point_beats_diagonal_scan(k in kernel()) {
        let mp = k.max_point().unwrap();
        prop_assert!((k.eval(mp.c, mp.c).unwrap() - mp.p_max).abs() < 1e-12);
        let scan = (0..=10_000)
            .map(|i| k.eval(i as f64 / 1e4, i as f64 / 1e4).unwrap())
            .fold(f64::MIN, f64::max);
        prop_assert!(scan <= mp.p_max + 1e-9, "scan {} above p_max {}", scan, mp.p_max);
    }

    #[test]
    fn kernel_json_round_trip(k in kernel()) {
        let json = serde_json::to_string(&k).unwrap();
        let back = Kernel::from_json(&json).unwrap();
        prop_assert_eq!(back.kernel_id(), k.kernel_id());
    }

    #[test]
    fn certificates_hold(g in graph(22), gm in gamma(), seed in any::<u64>()) {
        let exact = qc_number(&g, gm, 10_000_000);
        prop_assert!(exact.exact);
        prop_assert!(exact.certificate_holds(&g, gm));
        prop_assert_eq!(exact.witness_edges, g.edge_count_induced(&exact.witness) as u64);
        let h = heuristic(&g, gm, 3, &mut sampler::stream_rng(seed, 0)).unwrap();
        prop_assert!(h.certificate_holds(&g, gm));
        prop_assert!(h.size <= exact.size);
    }

    #[test]
    fn exact_search_matches_oracle_from_any_start(g in graph(16), gm in gamma(), start in any::<prop::sample::Index>()) {
        let bf = brute_force(&g, gm).unwrap();
        let res = exact_bb_from(&g, gm, 10_000_000, one_vertex(&g, start.index(g.n()))).unwrap();
        prop_assert!(res.exact);
        prop_assert_eq!(res.size, bf.size);
    }

    #[test]
    fn monotone_in_gamma(g in graph(18), a in gamma(), b in gamma()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(qc_number(&g, lo, 10_000_000).size >= qc_number(&g, hi, 10_000_000).size);
    }

    #[test]
    fn monotone_in_edges(g in graph(18), gm in gamma(), i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let n = g.n();
        let (i, j) = (i.index(n), j.index(n));
        prop_assume!(i != j);
        let mut edges: Vec<(usize, usize)> = g.edges().collect();
        edges.push((i.min(j), i.max(j)));
        let h = Graph::from_edges(n, &edges);
        prop_assert!(qc_number(&h, gm, 10_000_000).size >= qc_number(&g, gm, 10_000_000).size);
    }

    #[test]
    fn induced_subgraph_bound((g, s) in graph_and_set(18), gm in gamma()) {
        prop_assume!(!s.is_empty());
        let sub = g.induced_subgraph(&s);
        prop_assert!(qc_number(&sub, gm, 10_000_000).size <= qc_number(&g, gm, 10_000_000).size);
    }

    #[test]
    fn kl_non_negative(gm in gamma(), p in 0.001f64..0.999) {
        let d = kl_bernoulli(gm, p).unwrap();
        prop_assert!(d >= 0.0);
        if (gm.as_f64() - p).abs() > 1e-3 {
            prop_assert!(d > 0.0);
        }
    }

    #[test]
    fn typical_increasing(gm in gamma(), p in 0.01f64..0.99, n in 2usize..10_000) {
        prop_assume!(p + 0.01 < gm.as_f64());
        let base = typical_qcn(n, gm, p).unwrap().value;
        prop_assert!(typical_qcn(n + 1, gm, p).unwrap().value > base);
        prop_assert!(typical_qcn(n, gm, p + 0.005).unwrap().value > base);
    }
}

fn one_vertex(g: &Graph, v: usize) -> QuasiCliqueResult {
    QuasiCliqueResult {
        size: 1,
        witness: VertexSet::from_vertices(g.n(), [v]),
        witness_edges: 0,
        exact: false,
        nodes_explored: 0,
        wall_time: Duration::ZERO,
    }
}
