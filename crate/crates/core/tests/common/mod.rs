//! Shared fixtures and independent oracles for the integration tests.
//!
//! Random instances carry integer weights so that the Laplacian, the
//! controllability matrix and relative degrees can be evaluated exactly.
#![allow(dead_code)]

use mwcontrol_core::graph::MatrixWeightedGraph;
use mwcontrol_core::partition::NodePartition;
use mwcontrol_core::{DMatrix, Tolerances};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;

pub type IntMat = Vec<Vec<i64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn zeros(r: usize, c: usize) -> IntMat {
    vec![vec![0; c]; r]
}

pub fn to_dmatrix(m: &IntMat) -> DMatrix<f64> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows, cols, |i, j| m[i][j] as f64)
}

fn det(m: &IntMat) -> i64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => panic!("det oracle only covers d ≤ 3"),
    }
}

/// `GᵀG` for a random integer `G` with `rows` rows, so the result is PSD with
/// rank `min(rows, d)` generically.
fn gram(rng: &mut impl Rng, rows: usize, d: usize) -> (IntMat, IntMat) {
    let g: IntMat = (0..rows)
        .map(|_| (0..d).map(|_| rng.gen_range(-2..=2)).collect())
        .collect();
    let mut w = zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            w[a][b] = (0..rows).map(|k| g[k][a] * g[k][b]).sum();
        }
    }
    (g, w)
}

/// A random positive definite integer weight.
pub fn pd_weight(rng: &mut impl Rng, d: usize) -> IntMat {
    loop {
        let (g, w) = gram(rng, d, d);
        if det(&g) != 0 {
            return w;
        }
    }
}

/// A random nonzero, singular PSD integer weight (`d ≥ 2`).
pub fn psd_weight(rng: &mut impl Rng, d: usize) -> IntMat {
    assert!(d >= 2);
    loop {
        let rows = rng.gen_range(1..d);
        let (_, w) = gram(rng, rows, d);
        if w.iter().flatten().any(|&x| x != 0) {
            return w;
        }
    }
}

/// PD with probability `1 − psd_prob`, otherwise singular PSD (PD for `d = 1`).
pub fn weight(rng: &mut impl Rng, d: usize, psd_prob: f64) -> IntMat {
    if d >= 2 && rng.gen_bool(psd_prob) {
        psd_weight(rng, d)
    } else {
        pd_weight(rng, d)
    }
}

#[derive(Debug, Clone)]
pub struct IntGraph {
    pub n: usize,
    pub d: usize,
    pub edges: Vec<(usize, usize, IntMat)>,
}

impl IntGraph {
    pub fn graph(&self) -> MatrixWeightedGraph {
        MatrixWeightedGraph::new(
            self.n,
            self.d,
            self.edges.iter().map(|(i, j, w)| (*i, *j, to_dmatrix(w))),
            &Tolerances::default(),
        )
        .expect("generated graphs are valid")
    }

    /// `L = D − A` assembled entry by entry.
    pub fn laplacian(&self) -> IntMat {
        let d = self.d;
        let mut l = zeros(self.n * d, self.n * d);
        for (i, j, w) in &self.edges {
            for a in 0..d {
                for b in 0..d {
                    l[i * d + a][j * d + b] -= w[a][b];
                    l[j * d + a][i * d + b] -= w[a][b];
                    l[i * d + a][i * d + b] += w[a][b];
                    l[j * d + a][j * d + b] += w[a][b];
                }
            }
        }
        l
    }

    pub fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for (i, j, _) in &self.edges {
            adj[*i].push(*j);
            adj[*j].push(*i);
        }
        adj
    }

    /// `Σ_{u ∈ set} A_vu` in exact arithmetic.
    pub fn relative_degree(&self, v: usize, set: &[usize]) -> IntMat {
        let mut out = zeros(self.d, self.d);
        for (i, j, w) in &self.edges {
            let other = if *i == v {
                *j
            } else if *j == v {
                *i
            } else {
                continue;
            };
            if set.contains(&other) {
                for a in 0..self.d {
                    for b in 0..self.d {
                        out[a][b] += w[a][b];
                    }
                }
            }
        }
        out
    }

    /// Exact almost-equitable test: relative degrees into every other cell
    /// agree across each cell.
    pub fn is_aep(&self, cells: &[Vec<usize>]) -> bool {
        cells.iter().enumerate().all(|(i, ci)| {
            cells.iter().enumerate().all(|(j, cj)| {
                i == j || ci.windows(2).all(|p| self.relative_degree(p[0], cj) == self.relative_degree(p[1], cj))
            })
        })
    }

    pub fn relabel(&self, perm: &[usize]) -> IntGraph {
        IntGraph {
            n: self.n,
            d: self.d,
            edges: self
                .edges
                .iter()
                .map(|(i, j, w)| (perm[*i].min(perm[*j]), perm[*i].max(perm[*j]), w.clone()))
                .collect(),
        }
    }

    pub fn all_pd(&self) -> bool {
        self.edges.iter().all(|(_, _, w)| {
            (1..=self.d).all(|k| {
                let minor: IntMat = w[..k].iter().map(|r| r[..k].to_vec()).collect();
                det(&minor) > 0
            })
        })
    }
}

/// Erdős–Rényi style graph; not necessarily connected.
pub fn random_graph(rng: &mut impl Rng, n: usize, d: usize, edge_prob: f64, psd_prob: f64) -> IntGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(edge_prob) {
                edges.push((i, j, weight(rng, d, psd_prob)));
            }
        }
    }
    IntGraph { n, d, edges }
}

/// Random recursive tree over a shuffled labelling.
pub fn random_tree(rng: &mut impl Rng, n: usize, d: usize, psd_prob: f64) -> IntGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for k in 1..n {
        let parent = order[rng.gen_range(0..k)];
        let child = order[k];
        edges.push((parent.min(child), parent.max(child), weight(rng, d, psd_prob)));
    }
    IntGraph { n, d, edges }
}

/// Cycle through a random ordering of the nodes (`n ≥ 3`).
pub fn random_cycle(rng: &mut impl Rng, n: usize, d: usize, psd_prob: f64) -> IntGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let edges = (0..n)
        .map(|k| {
            let (a, b) = (order[k], order[(k + 1) % n]);
            (a.min(b), a.max(b), weight(rng, d, psd_prob))
        })
        .collect();
    IntGraph { n, d, edges }
}

pub fn random_complete(rng: &mut impl Rng, n: usize, d: usize, psd_prob: f64) -> IntGraph {
    random_graph(rng, n, d, 1.0, psd_prob)
}

/// Random partition of `0..n` into at most `max_cells` nonempty cells.
pub fn random_partition(rng: &mut impl Rng, n: usize, max_cells: usize) -> Vec<Vec<usize>> {
    let k = rng.gen_range(1..=max_cells.min(n));
    let mut cells = vec![Vec::new(); k];
    for v in 0..n {
        cells[rng.gen_range(0..k)].push(v);
    }
    cells.retain(|c| !c.is_empty());
    cells
}

/// A graph together with a partition that is almost equitable by
/// construction.
///
/// Edges inside a cell are arbitrary. Between two cells the generator uses
/// either nothing, a complete bipartite block with a single weight, or a
/// regular "fan" where every node of the smaller cell meets the same number
/// of nodes of the larger cell with one shared weight.
pub fn random_aep(rng: &mut impl Rng, sizes: &[usize], d: usize, psd_prob: f64) -> (IntGraph, Vec<Vec<usize>>) {
    let n: usize = sizes.iter().sum();
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    let mut cells = Vec::new();
    let mut next = 0;
    for &s in sizes {
        let mut cell = labels[next..next + s].to_vec();
        cell.sort_unstable();
        cells.push(cell);
        next += s;
    }
    let mut edges = Vec::new();
    let push = |edges: &mut Vec<(usize, usize, IntMat)>, a: usize, b: usize, w: IntMat| {
        edges.push((a.min(b), a.max(b), w));
    };
    for (i, ci) in cells.iter().enumerate() {
        for x in 0..ci.len() {
            for y in x + 1..ci.len() {
                if rng.gen_bool(0.5) {
                    push(&mut edges, ci[x], ci[y], weight(rng, d, psd_prob));
                }
            }
        }
        for cj in cells.iter().skip(i + 1) {
            let w = weight(rng, d, psd_prob);
            let (small, large) = if ci.len() <= cj.len() { (ci, cj) } else { (cj, ci) };
            match rng.gen_range(0..3) {
                0 => {}
                1 => {
                    for &a in ci {
                        for &b in cj {
                            push(&mut edges, a, b, w.clone());
                        }
                    }
                }
                _ if large.len() % small.len() == 0 => {
                    let mut shuffled = large.clone();
                    shuffled.shuffle(rng);
                    let fan = large.len() / small.len();
                    for (k, &a) in small.iter().enumerate() {
                        for &b in &shuffled[k * fan..(k + 1) * fan] {
                            push(&mut edges, a, b, w.clone());
                        }
                    }
                }
                _ => {}
            }
        }
    }
    (IntGraph { n, d, edges }, cells)
}

pub fn partition(n: usize, cells: &[Vec<usize>]) -> NodePartition {
    NodePartition::new(n, cells.to_vec()).expect("generated partitions are valid")
}

/// `δ_{n,S} ⊗ I_d` as an integer matrix.
pub fn block_selector(n: usize, d: usize, leaders: &[usize]) -> IntMat {
    let mut b = zeros(n * d, leaders.len() * d);
    for (k, &l) in leaders.iter().enumerate() {
        for a in 0..d {
            b[l * d + a][k * d + a] = 1;
        }
    }
    b
}

pub fn random_leaders(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let count = rng.gen_range(1..=n);
    let mut nodes: Vec<usize> = (0..n).collect();
    nodes.shuffle(rng);
    let mut leaders = nodes[..count].to_vec();
    leaders.sort_unstable();
    leaders
}

/// Exact rank by fraction-free (Bareiss) elimination.
pub fn exact_rank(m: &[Vec<BigInt>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let (top, rest) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in rest.iter_mut() {
            let factor = row[col].clone();
            for j in col + 1..cols {
                let value = &pivot_row[col] * &row[j] - &factor * &pivot_row[j];
                row[j] = value / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Exact rank of `[B, LB, …, L^{N−1}B]`.
///
/// Blocks are appended until the rank stops growing, which fixes the rank of
/// every longer prefix as well.
pub fn exact_controllability_rank(l: &IntMat, b: &IntMat) -> usize {
    let dim = l.len();
    let m = b.first().map_or(0, Vec::len);
    let big_l: Vec<Vec<BigInt>> = l.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut block: Vec<Vec<BigInt>> = b.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut k: Vec<Vec<BigInt>> = vec![Vec::new(); dim];
    let mut last = 0;
    for _ in 0..dim.max(1) {
        for (row, extra) in k.iter_mut().zip(&block) {
            row.extend(extra.iter().cloned());
        }
        let rank = exact_rank(&k);
        if rank == last || rank == dim {
            return rank;
        }
        last = rank;
        block = (0..dim)
            .map(|i| {
                (0..m)
                    .map(|j| (0..dim).map(|t| &big_l[i][t] * &block[t][j]).sum())
                    .collect()
            })
            .collect();
    }
    last
}

/// Hop distances by breadth-first search.
pub fn bfs(adj: &[Vec<usize>], source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if dist[w].is_none() {
                dist[w] = Some(dist[v].unwrap() + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// `[B, L̂B, …, L̂^{N−1}B]` in floating point with `L̂ = L/‖L‖_F`.
///
/// Scaling each block by a power of a positive constant leaves the column
/// space unchanged, and without it the powers of `L` swamp the tolerance.
pub fn explicit_controllability_matrix(l: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let dim = l.nrows();
    let scaled = l / l.norm().max(1.0);
    let mut k = DMatrix::zeros(dim, dim * b.ncols());
    let mut block = b.clone();
    for step in 0..dim {
        k.columns_mut(step * b.ncols(), b.ncols()).copy_from(&block);
        block = &scaled * block;
    }
    k
}
