//! Matrix-weighted graphs and their block Laplacians.
//!
//! Nodes are `0..n`. Each undirected edge is stored once, so `A_ij = A_ji`
//! holds by construction and self-loops are rejected. Hop distances ignore
//! weight magnitudes entirely.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::linalg::{self, Definiteness};
use crate::{Error, Result, Tolerances};

/// A symmetric `d×d` edge weight together with its definiteness class.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixWeight {
    entries: DMatrix<f64>,
    kind: Definiteness,
}

impl MatrixWeight {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Never [`Definiteness::Indefinite`] for a weight stored in a graph.
    pub fn kind(&self) -> Definiteness {
        self.kind
    }

    pub fn is_positive_definite(&self) -> bool {
        self.kind == Definiteness::PositiveDefinite
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Smaller endpoint.
    pub i: usize,
    /// Larger endpoint.
    pub j: usize,
    pub weight: MatrixWeight,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixWeightedGraph {
    n: usize,
    d: usize,
    edges: Vec<Edge>,
    /// `adjacency[v]` lists `(neighbor, edge index)` sorted by neighbor.
    adjacency: Vec<Vec<(usize, usize)>>,
}

/// The `dn×dn` matrix `L = D − A`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockLaplacian {
    matrix: DMatrix<f64>,
    n: usize,
    d: usize,
}

impl BlockLaplacian {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Block `(i, j)` as an owned `d×d` matrix.
    pub fn block(&self, i: usize, j: usize) -> DMatrix<f64> {
        self.matrix
            .view((i * self.d, j * self.d), (self.d, self.d))
            .into_owned()
    }

    /// Wraps an arbitrary `dn×dn` matrix; no Laplacian structure is checked.
    pub fn from_matrix(matrix: DMatrix<f64>, n: usize, d: usize) -> Result<Self> {
        if matrix.nrows() != n * d || matrix.ncols() != n * d {
            return Err(Error::DimensionMismatch {
                what: "Laplacian size",
                expected: n * d,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { matrix, n, d })
    }
}

impl MatrixWeightedGraph {
    /// Validates and classifies every weight.
    ///
    /// Each entry of `edges` is `(i, j, W)` with `i ≠ j` and `W` a symmetric
    /// PSD or PD `d×d` matrix. Unordered pairs may appear only once.
    pub fn new<I>(n: usize, d: usize, edges: I, tols: &Tolerances) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, DMatrix<f64>)>,
    {
        let mut stored: Vec<Edge> = Vec::new();
        let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (a, b, w) in edges {
            for node in [a, b] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop { node: a });
            }
            if w.nrows() != d || w.ncols() != d {
                return Err(Error::DimensionMismatch {
                    what: "edge weight size",
                    expected: d,
                    found: if w.nrows() != d { w.nrows() } else { w.ncols() },
                });
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if adjacency[i].iter().any(|&(u, _)| u == j) {
                return Err(Error::DuplicateEdge { i, j });
            }
            let deviation = linalg::asymmetry(&w);
            if deviation > tols.sym * linalg::max_abs(&w).max(1.0) {
                return Err(Error::AsymmetricWeight { i, j, deviation });
            }
            let (kind, min_eigenvalue) = linalg::classify_spectrum(&w, tols.class);
            match kind {
                Definiteness::Indefinite => {
                    return Err(Error::IndefiniteWeight {
                        i,
                        j,
                        min_eigenvalue,
                    })
                }
                Definiteness::Zero => return Err(Error::ZeroWeight { i, j }),
                _ => {}
            }
            let index = stored.len();
            adjacency[i].push((j, index));
            adjacency[j].push((i, index));
            stored.push(Edge {
                i,
                j,
                weight: MatrixWeight { entries: w, kind },
            });
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            n,
            d,
            edges: stored,
            adjacency,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `dn`, the dimension of the stacked state.
    pub fn state_dim(&self) -> usize {
        self.n * self.d
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of `v` in ascending order with the shared weight.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, &MatrixWeight)> + '_ {
        self.adjacency[v]
            .iter()
            .map(move |&(u, e)| (u, &self.edges[e].weight))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<&MatrixWeight> {
        self.adjacency
            .get(i)?
            .binary_search_by_key(&j, |&(u, _)| u)
            .ok()
            .map(|k| &self.edges[self.adjacency[i][k].1].weight)
    }

    pub(crate) fn check_node(&self, node: usize) -> Result<()> {
        if node >= self.n {
            Err(Error::NodeOutOfRange { node, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Largest absolute entry over all edge weights.
    pub fn max_weight_entry(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| linalg::max_abs(&e.weight.entries))
            .fold(0.0, f64::max)
    }

    /// `D_i = Σ_{j ∈ N_i} A_ij`.
    pub fn node_degree(&self, v: usize) -> DMatrix<f64> {
        let mut sum = DMatrix::zeros(self.d, self.d);
        for (_, w) in self.neighbors(v) {
            sum += &w.entries;
        }
        sum
    }

    /// Block-diagonal `diag(D_1, …, D_n)`.
    pub fn degree_matrix(&self) -> DMatrix<f64> {
        let d = self.d;
        let mut out = DMatrix::zeros(self.state_dim(), self.state_dim());
        for e in &self.edges {
            let w = &e.weight.entries;
            for v in [e.i, e.j] {
                let mut block = out.view_mut((v * d, v * d), (d, d));
                block += w;
            }
        }
        out
    }

    /// Block adjacency `A`.
    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let d = self.d;
        let mut out = DMatrix::zeros(self.state_dim(), self.state_dim());
        for e in &self.edges {
            let w = &e.weight.entries;
            out.view_mut((e.i * d, e.j * d), (d, d)).copy_from(w);
            out.view_mut((e.j * d, e.i * d), (d, d)).copy_from(w);
        }
        out
    }

    pub fn laplacian(&self) -> BlockLaplacian {
        BlockLaplacian {
            matrix: self.degree_matrix() - self.adjacency_matrix(),
            n: self.n,
            d: self.d,
        }
    }

    fn bfs(&self, source: usize, pd_only: bool) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let next = dist[v].map(|x| x + 1);
            for &(u, e) in &self.adjacency[v] {
                if pd_only && !self.edges[e].weight.is_positive_definite() {
                    continue;
                }
                if dist[u].is_none() {
                    dist[u] = next;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Hop distances from `source`; `None` marks unreachable nodes.
    pub fn distances_from(&self, source: usize) -> Result<Vec<Option<usize>>> {
        self.check_node(source)?;
        Ok(self.bfs(source, false))
    }

    /// Hop distance, `None` when `j` is unreachable from `i`.
    pub fn dist(&self, i: usize, j: usize) -> Result<Option<usize>> {
        self.check_node(j)?;
        Ok(self.distances_from(i)?[j])
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.bfs(0, false).iter().all(Option::is_some)
    }

    pub fn diameter(&self) -> Result<usize> {
        let mut best = 0;
        for v in 0..self.n {
            for dist in self.bfs(v, false) {
                best = best.max(dist.ok_or(Error::Disconnected)?);
            }
        }
        Ok(best)
    }

    /// True iff some shortest `l`–`i` path uses only positive definite edges.
    ///
    /// Equivalent to the hop distance on the PD-edge subgraph matching the
    /// hop distance on the whole graph.
    pub fn exists_pd_shortest_path(&self, l: usize, i: usize) -> Result<bool> {
        Ok(self.pd_shortest_path(l, i)?.is_some())
    }

    /// A shortest `l`–`i` path along PD edges, as a node sequence from `l` to
    /// `i`, if one exists.
    pub fn pd_shortest_path(&self, l: usize, i: usize) -> Result<Option<Vec<usize>>> {
        self.check_node(l)?;
        self.check_node(i)?;
        let full = self.bfs(l, false)[i].ok_or(Error::Unreachable { from: l, to: i })?;
        let from_target = self.bfs(i, true);
        if from_target[l] != Some(full) {
            return Ok(None);
        }
        // Walk down the PD distance field of `i` starting at `l`.
        let mut path = vec![l];
        let mut at = l;
        while at != i {
            let here = from_target[at].expect("on a PD shortest path");
            let next = self.adjacency[at]
                .iter()
                .find(|&&(u, e)| {
                    self.edges[e].weight.is_positive_definite() && from_target[u] == Some(here - 1)
                })
                .map(|&(u, _)| u)
                .expect("distance field decreases along some PD edge");
            path.push(next);
            at = next;
        }
        Ok(Some(path))
    }

    /// Ordered product `A_{v0 v1} · A_{v1 v2} ⋯` along a node sequence.
    /// A single node yields the identity.
    pub fn path_weight_product(&self, nodes: &[usize]) -> Result<DMatrix<f64>> {
        for &v in nodes {
            self.check_node(v)?;
        }
        let mut product = DMatrix::identity(self.d, self.d);
        for pair in nodes.windows(2) {
            let w = self
                .weight(pair[0], pair[1])
                .ok_or(Error::NotAPath {
                    from: pair[0],
                    to: pair[1],
                })?;
            product *= &w.entries;
        }
        Ok(product)
    }

    pub fn is_tree(&self) -> bool {
        self.n > 0 && self.edges.len() == self.n - 1 && self.is_connected()
    }

    /// Node order of a path graph, starting from its smaller endpoint, or
    /// `None` if the graph is not a path. A single node counts as a path.
    pub fn path_order(&self) -> Option<Vec<usize>> {
        if !self.is_tree() || (0..self.n).any(|v| self.degree(v) > 2) {
            return None;
        }
        let start = (0..self.n).find(|&v| self.degree(v) <= 1)?;
        let mut order = vec![start];
        let mut prev = usize::MAX;
        let mut at = start;
        while order.len() < self.n {
            let next = self.adjacency[at]
                .iter()
                .map(|&(u, _)| u)
                .find(|&u| u != prev)?;
            order.push(next);
            prev = at;
            at = next;
        }
        Some(order)
    }

    pub fn is_cycle(&self) -> bool {
        self.n >= 3
            && self.edges.len() == self.n
            && (0..self.n).all(|v| self.degree(v) == 2)
            && self.is_connected()
    }

    pub fn is_complete(&self) -> bool {
        self.n >= 2 && self.edges.len() == self.n * (self.n - 1) / 2
    }

    /// The graph with node `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch {
                what: "permutation length",
                expected: self.n,
                found: perm.len(),
            });
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || seen[p] {
                return Err(Error::InvalidPartition {
                    reason: "not a permutation",
                    node: p,
                });
            }
            seen[p] = true;
        }
        let tols = Tolerances::default();
        let mut out = Self::new(
            self.n,
            self.d,
            self.edges
                .iter()
                .map(|e| (perm[e.i], perm[e.j], e.weight.entries.clone())),
            &tols,
        )?;
        // Keep the original classification even if tolerances differ.
        for (new, old) in out.edges.iter_mut().zip(&self.edges) {
            new.weight.kind = old.weight.kind;
        }
        Ok(out)
    }
}
