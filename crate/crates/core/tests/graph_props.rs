//! Properties of graph construction, Laplacians, distances and PD paths.

mod common;

use common::*;
use mwcontrol_core::linalg::{self, Definiteness};
use mwcontrol_core::{DMatrix, Tolerances};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn instance(seed: u64) -> IntGraph {
    let mut r = rng(seed);
    let n = r.gen_range(1..=7);
    let d = r.gen_range(1..=3);
    let p = r.gen_range(0.1..0.9);
    random_graph(&mut r, n, d, p, 0.4)
}

fn int_product(a: &IntMat, b: &IntMat) -> IntMat {
    let d = a.len();
    (0..d)
        .map(|i| (0..d).map(|j| (0..d).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn laplacian_matches_entrywise_assembly(seed in any::<u64>()) {
        let ig = instance(seed);
        let l = ig.graph().laplacian();
        prop_assert_eq!(l.matrix(), &to_dmatrix(&ig.laplacian()));
        prop_assert_eq!(l.matrix(), &(ig.graph().degree_matrix() - ig.graph().adjacency_matrix()));
    }

    #[test]
    fn laplacian_annihilates_consensus_and_is_psd(seed in any::<u64>()) {
        let ig = instance(seed);
        let g = ig.graph();
        let l = g.laplacian();
        let ones = DMatrix::from_fn(g.state_dim(), g.d(), |i, j| if i % g.d() == j { 1.0 } else { 0.0 });
        prop_assert_eq!(l.matrix() * ones, DMatrix::zeros(g.state_dim(), g.d()));
        let class = linalg::classify_definiteness(l.matrix(), &Tolerances::default()).unwrap();
        prop_assert!(matches!(class, Definiteness::Zero | Definiteness::PositiveSemiDefinite));
    }

    #[test]
    fn relabelling_conjugates_the_laplacian(seed in any::<u64>()) {
        let ig = instance(seed);
        let mut r = rng(seed ^ 0x5eed);
        let mut perm: Vec<usize> = (0..ig.n).collect();
        perm.shuffle(&mut r);
        let g = ig.graph();
        let moved = g.relabel(&perm).unwrap();
        let d = ig.d;
        let p = DMatrix::from_fn(g.state_dim(), g.state_dim(), |row, col| {
            if row % d == col % d && row / d == perm[col / d] { 1.0 } else { 0.0 }
        });
        let moved_l = moved.laplacian().into_matrix();
        prop_assert_eq!(&moved_l, &(&p * g.laplacian().matrix() * p.transpose()));
        prop_assert_eq!(&moved_l, &to_dmatrix(&ig.relabel(&perm).laplacian()));
    }

    #[test]
    fn hop_distances_match_bfs_and_form_a_metric(seed in any::<u64>()) {
        let ig = instance(seed);
        let g = ig.graph();
        let adj = ig.neighbours();
        let table: Vec<Vec<Option<usize>>> = (0..ig.n).map(|s| bfs(&adj, s)).collect();
        for i in 0..ig.n {
            prop_assert_eq!(&g.distances_from(i).unwrap(), &table[i]);
            for j in 0..ig.n {
                prop_assert_eq!(table[i][j], table[j][i]);
                prop_assert_eq!(table[i][j] == Some(0), i == j);
                for k in 0..ig.n {
                    if let (Some(a), Some(b)) = (table[i][k], table[k][j]) {
                        prop_assert!(table[i][j].unwrap() <= a + b);
                    }
                }
            }
        }
        let connected = table[0].iter().all(Option::is_some);
        prop_assert_eq!(g.is_connected(), connected);
        if connected {
            let diameter = table.iter().flatten().map(|x| x.unwrap()).max().unwrap();
            prop_assert_eq!(g.diameter().unwrap(), diameter);
        }
    }

    #[test]
    fn pd_shortest_paths_are_shortest_and_nonsingular(seed in any::<u64>()) {
        let ig = instance(seed);
        let g = ig.graph();
        let adj = ig.neighbours();
        for l in 0..ig.n {
            let dist = bfs(&adj, l);
            let pd_only = IntGraph {
                n: ig.n,
                d: ig.d,
                edges: ig.edges.iter().filter(|e| IntGraph { n: 2, d: ig.d, edges: vec![(*e).clone()] }.all_pd()).cloned().collect(),
            };
            let pd_dist = bfs(&pd_only.neighbours(), l);
            for i in 0..ig.n {
                if dist[i].is_none() {
                    prop_assert!(g.pd_shortest_path(l, i).is_err());
                    continue;
                }
                let path = g.pd_shortest_path(l, i).unwrap();
                prop_assert_eq!(path.is_some(), pd_dist[i] == dist[i]);
                prop_assert_eq!(path.is_some(), g.exists_pd_shortest_path(l, i).unwrap());
                let Some(path) = path else { continue };
                prop_assert_eq!((path[0], *path.last().unwrap()), (l, i));
                prop_assert_eq!(Some(path.len() - 1), dist[i]);
                let mut product: IntMat = (0..ig.d).map(|a| (0..ig.d).map(|b| i64::from(a == b)).collect()).collect();
                for step in path.windows(2) {
                    let w = ig.edges.iter().find(|(a, b, _)| (*a, *b) == (step[0].min(step[1]), step[0].max(step[1]))).unwrap();
                    let single = IntGraph { n: 2, d: ig.d, edges: vec![w.clone()] };
                    prop_assert!(single.all_pd());
                    product = int_product(&product, &w.2);
                }
                let float = g.path_weight_product(&path).unwrap();
                prop_assert_eq!(&float, &to_dmatrix(&product));
                prop_assert_eq!(float.rank(1e-9), ig.d);
            }
        }
    }

    #[test]
    fn structure_predicates_follow_generators(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(3..=7);
        let d = r.gen_range(1..=3);
        let tree = random_tree(&mut r, n, d, 0.3).graph();
        prop_assert!(tree.is_tree() && tree.is_connected() && !tree.is_cycle());
        let cycle = random_cycle(&mut r, n, d, 0.3).graph();
        prop_assert!(cycle.is_cycle() && !cycle.is_tree());
        let complete = random_complete(&mut r, n, d, 0.3).graph();
        prop_assert!(complete.is_complete());
        prop_assert_eq!(complete.is_cycle(), n == 3);
        if let Some(order) = tree.path_order() {
            prop_assert!(order.windows(2).all(|p| tree.weight(p[0], p[1]).is_some()));
        }
    }
}
