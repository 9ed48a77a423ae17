//! Node partitions and the matrix-valued machinery built on them.
//!
//! Cell order is part of every result: distance partitions are ordered by
//! radius and refined partitions by their smallest node.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::graph::{BlockLaplacian, MatrixWeightedGraph};
use crate::linalg;
use crate::{Error, Result, Tolerances};

/// Disjoint nonempty cells covering `0..n`. Members of a cell are kept
/// sorted; the order of cells is preserved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodePartition {
    cells: Vec<Vec<usize>>,
    cell_of: Vec<usize>,
}

impl NodePartition {
    pub fn new(n: usize, cells: Vec<Vec<usize>>) -> Result<Self> {
        let mut cell_of = vec![usize::MAX; n];
        let mut cells = cells;
        for (k, cell) in cells.iter_mut().enumerate() {
            if cell.is_empty() {
                return Err(Error::InvalidPartition {
                    reason: "empty cell",
                    node: k,
                });
            }
            cell.sort_unstable();
            for &v in cell.iter() {
                if v >= n {
                    return Err(Error::NodeOutOfRange { node: v, n });
                }
                if cell_of[v] != usize::MAX {
                    return Err(Error::InvalidPartition {
                        reason: "node appears in more than one cell",
                        node: v,
                    });
                }
                cell_of[v] = k;
            }
        }
        if let Some(v) = cell_of.iter().position(|&c| c == usize::MAX) {
            return Err(Error::InvalidPartition {
                reason: "node not covered by any cell",
                node: v,
            });
        }
        Ok(Self { cells, cell_of })
    }

    /// `{{0}, {1}, …}`.
    pub fn singletons(n: usize) -> Self {
        Self {
            cells: (0..n).map(|v| vec![v]).collect(),
            cell_of: (0..n).collect(),
        }
    }

    /// `{{0, …, n−1}}`.
    pub fn whole(n: usize) -> Self {
        Self {
            cells: if n == 0 { Vec::new() } else { vec![(0..n).collect()] },
            cell_of: vec![0; n],
        }
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn into_cells(self) -> Vec<Vec<usize>> {
        self.cells
    }

    /// Number of cells `s`.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Number of nodes covered.
    pub fn n(&self) -> usize {
        self.cell_of.len()
    }

    pub fn cell_of(&self, v: usize) -> usize {
        self.cell_of[v]
    }

    /// True if every cell of `self` lies inside a cell of `coarser`.
    pub fn refines(&self, coarser: &NodePartition) -> bool {
        self.n() == coarser.n()
            && self.cells.iter().all(|cell| {
                let target = coarser.cell_of(cell[0]);
                cell.iter().all(|&v| coarser.cell_of(v) == target)
            })
    }

    /// Greatest common divisor of the cell sizes (0 for no cells).
    pub fn gcd(&self) -> usize {
        self.cells.iter().map(Vec::len).fold(0, gcd)
    }

    fn check_graph(&self, g: &MatrixWeightedGraph) -> Result<()> {
        if self.n() != g.n() {
            return Err(Error::DimensionMismatch {
                what: "partition node count",
                expected: g.n(),
                found: self.n(),
            });
        }
        Ok(())
    }
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `P(π)`: block `(i, j)` is `I_d` iff node `i` lies in cell `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicMatrix {
    matrix: DMatrix<f64>,
    d: usize,
    cells: usize,
}

impl CharacteristicMatrix {
    pub fn new(partition: &NodePartition, d: usize) -> Self {
        let n = partition.n();
        let s = partition.len();
        let mut matrix = DMatrix::zeros(d * n, d * s);
        for v in 0..n {
            let j = partition.cell_of(v);
            for t in 0..d {
                matrix[(v * d + t, j * d + t)] = 1.0;
            }
        }
        Self {
            matrix,
            d,
            cells: s,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Block column `P_j = δ_{n, V_j}`.
    pub fn block_column(&self, j: usize) -> DMatrix<f64> {
        self.matrix.columns(j * self.d, self.d).into_owned()
    }
}

/// Cells `C_r = {v : dist(leader, v) = r}`, `r = 0, 1, …`.
pub fn distance_partition(g: &MatrixWeightedGraph, leader: usize) -> Result<NodePartition> {
    let dist = g.distances_from(leader)?;
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for (v, r) in dist.into_iter().enumerate() {
        let r = r.ok_or(Error::Disconnected)?;
        if cells.len() <= r {
            cells.resize_with(r + 1, Vec::new);
        }
        cells[r].push(v);
    }
    NodePartition::new(g.n(), cells)
}

/// `D(v, Q) = Σ_{u ∈ Q} A_vu`.
pub fn relative_degree(g: &MatrixWeightedGraph, v: usize, set: &[usize]) -> Result<DMatrix<f64>> {
    g.check_node(v)?;
    let mut member = vec![false; g.n()];
    for &u in set {
        g.check_node(u)?;
        member[u] = true;
    }
    let mut sum = DMatrix::zeros(g.d(), g.d());
    for (u, w) in g.neighbors(v) {
        if member[u] {
            sum += w.entries();
        }
    }
    Ok(sum)
}

/// `signatures[v][j] = D(v, V_j)` for every node and cell.
fn degree_signatures(g: &MatrixWeightedGraph, partition: &NodePartition) -> Vec<Vec<DMatrix<f64>>> {
    let zero = DMatrix::zeros(g.d(), g.d());
    let mut sig = vec![vec![zero; partition.len()]; g.n()];
    for e in g.edges() {
        let w = e.weight.entries();
        sig[e.i][partition.cell_of(e.j)] += w;
        sig[e.j][partition.cell_of(e.i)] += w;
    }
    sig
}

fn aep_threshold(g: &MatrixWeightedGraph, aep_tol: f64) -> f64 {
    aep_tol * g.max_weight_entry().max(1.0)
}

/// Two nodes of one cell whose matrix degrees toward another cell differ.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AepViolation {
    /// Cell holding `v` and `w`.
    pub cell_i: usize,
    /// Cell the degrees point to.
    pub cell_j: usize,
    pub v: usize,
    pub w: usize,
    /// `max|D(v, V_j) − D(w, V_j)|`.
    pub difference: f64,
}

impl From<AepViolation> for Error {
    fn from(v: AepViolation) -> Self {
        Error::NotAep {
            cell_i: v.cell_i,
            cell_j: v.cell_j,
            v: v.v,
            w: v.w,
        }
    }
}

/// Checks the almost-equitable condition: for all cells `i ≠ j` and
/// `v, w ∈ V_i`, `D(v, V_j) = D(w, V_j)` up to
/// `aep·max(1, largest weight entry)` in max-entry norm. Returns the first
/// violation found (cells and nodes in ascending order).
pub fn is_aep(
    g: &MatrixWeightedGraph,
    partition: &NodePartition,
    aep_tol: f64,
) -> Result<core::result::Result<(), AepViolation>> {
    partition.check_graph(g)?;
    let threshold = aep_threshold(g, aep_tol);
    let sig = degree_signatures(g, partition);
    for (i, cell) in partition.cells().iter().enumerate() {
        let v = cell[0];
        for &w in &cell[1..] {
            for j in (0..partition.len()).filter(|&j| j != i) {
                let difference = linalg::max_abs(&(&sig[v][j] - &sig[w][j]));
                if difference > threshold {
                    return Ok(Err(AepViolation {
                        cell_i: i,
                        cell_j: j,
                        v,
                        w,
                        difference,
                    }));
                }
            }
        }
    }
    Ok(Ok(()))
}

/// A directed edge `V_from → V_to` of a quotient graph.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientEdge {
    pub from: usize,
    pub to: usize,
    pub weight: DMatrix<f64>,
}

/// `G/π` for an almost equitable partition.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientGraph {
    cells: usize,
    d: usize,
    /// `relative[i][j] = D(V_i, V_j)`; diagonal entries are unused zeros.
    relative: Vec<Vec<DMatrix<f64>>>,
    edges: Vec<QuotientEdge>,
    laplacian: DMatrix<f64>,
}

impl QuotientGraph {
    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `D(V_i, V_j)`.
    pub fn relative_degree(&self, i: usize, j: usize) -> &DMatrix<f64> {
        &self.relative[i][j]
    }

    /// Edges present where `D(V_i, V_j)` is nonzero, in row-major order.
    pub fn edges(&self) -> &[QuotientEdge] {
        &self.edges
    }

    /// `L^π` (`ds×ds`).
    pub fn laplacian(&self) -> &DMatrix<f64> {
        &self.laplacian
    }
}

fn quotient_laplacian(relative: &[Vec<DMatrix<f64>>], d: usize) -> DMatrix<f64> {
    let s = relative.len();
    let mut out = DMatrix::zeros(d * s, d * s);
    for i in 0..s {
        for j in (0..s).filter(|&j| j != i) {
            let w = &relative[i][j];
            let mut diag = out.view_mut((i * d, i * d), (d, d));
            diag += w;
            let mut off = out.view_mut((i * d, j * d), (d, d));
            off -= w;
        }
    }
    out
}

/// Builds `G/π`. Edge `V_i → V_j` exists iff `D(V_i, V_j)` exceeds
/// `class·max(1, largest weight entry)` in some entry. The result may be
/// directed.
pub fn quotient(
    g: &MatrixWeightedGraph,
    partition: &NodePartition,
    tols: &Tolerances,
) -> Result<QuotientGraph> {
    is_aep(g, partition, tols.aep)?.map_err(Error::from)?;
    let sig = degree_signatures(g, partition);
    let s = partition.len();
    let d = g.d();
    let mut relative = vec![vec![DMatrix::zeros(d, d); s]; s];
    let mut edges = Vec::new();
    let threshold = tols.class * g.max_weight_entry().max(1.0);
    for i in 0..s {
        let rep = partition.cells()[i][0];
        for j in (0..s).filter(|&j| j != i) {
            relative[i][j] = sig[rep][j].clone();
            if linalg::max_abs(&relative[i][j]) > threshold {
                edges.push(QuotientEdge {
                    from: i,
                    to: j,
                    weight: relative[i][j].clone(),
                });
            }
        }
    }
    let laplacian = quotient_laplacian(&relative, d);
    Ok(QuotientGraph {
        cells: s,
        d,
        relative,
        edges,
        laplacian,
    })
}

/// Outcome of [`check_l_invariance`].
#[derive(Debug, Clone, PartialEq)]
pub struct LInvariance {
    /// Frobenius norm of `L·P(π) − P(π)·L^π`.
    pub residual: f64,
    /// Frobenius norm of `L`.
    pub laplacian_norm: f64,
    pub quotient_laplacian: DMatrix<f64>,
}

impl LInvariance {
    /// `residual ≤ tol·max(1, ‖L‖_F)`.
    pub fn holds(&self, tol: f64) -> bool {
        self.residual <= tol * self.laplacian_norm.max(1.0)
    }
}

/// Measures how far `img P(π)` is from being `L`-invariant.
///
/// `L^π` has blocks `(L^π)_ij = −D̄(V_i, V_j)` and
/// `(L^π)_ii = Σ_{j≠i} D̄(V_i, V_j)`, where `D̄` is the cell average of the
/// relative degrees read off `L·P(π)`. For an almost equitable partition the
/// average is exact and the residual vanishes; otherwise this `L^π` is the
/// least-squares solution of `L·P = P·X`, so any nonzero residual certifies
/// that no `L^π` exists.
pub fn check_l_invariance(l: &BlockLaplacian, partition: &NodePartition) -> Result<LInvariance> {
    if partition.n() != l.n() {
        return Err(Error::DimensionMismatch {
            what: "partition node count",
            expected: l.n(),
            found: partition.n(),
        });
    }
    let d = l.d();
    let s = partition.len();
    let p = CharacteristicMatrix::new(partition, d);
    let lp = l.matrix() * p.matrix();
    let mut relative = vec![vec![DMatrix::zeros(d, d); s]; s];
    for (i, cell) in partition.cells().iter().enumerate() {
        let scale = 1.0 / cell.len() as f64;
        for j in (0..s).filter(|&j| j != i) {
            let mut sum = DMatrix::zeros(d, d);
            for &v in cell {
                sum -= lp.view((v * d, j * d), (d, d));
            }
            relative[i][j] = sum * scale;
        }
    }
    let quotient_laplacian = quotient_laplacian(&relative, d);
    let residual = (lp - p.matrix() * &quotient_laplacian).norm();
    Ok(LInvariance {
        residual,
        laplacian_norm: l.matrix().norm(),
        quotient_laplacian,
    })
}

/// Quantized key for grouping matrices that agree within the AEP threshold.
fn quantize(m: &DMatrix<f64>, grid: f64, key: &mut Vec<i64>) {
    for x in m.iter() {
        key.push(libm::round(x / grid) as i64);
    }
}

/// Coarsest almost equitable partition refining `initial`.
///
/// Repeatedly splits every cell by the members' matrix degrees toward all
/// other current cells, until nothing splits. Any AEP finer than `initial`
/// is finer than every intermediate partition, so the fixed point is the
/// coarsest one. Cells of the result are ordered by their smallest node.
pub fn coarsest_aep_refinement(
    g: &MatrixWeightedGraph,
    initial: &NodePartition,
    aep_tol: f64,
) -> Result<NodePartition> {
    initial.check_graph(g)?;
    let grid = aep_threshold(g, aep_tol);
    let mut current = sorted_by_min(initial.cells().to_vec());
    loop {
        let partition = NodePartition::new(g.n(), current.clone())?;
        let sig = degree_signatures(g, &partition);
        let mut next: Vec<Vec<usize>> = Vec::with_capacity(current.len());
        for (i, cell) in current.iter().enumerate() {
            let mut groups: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
            for &v in cell {
                let mut key = Vec::new();
                for (j, m) in sig[v].iter().enumerate() {
                    if j != i {
                        quantize(m, grid, &mut key);
                    }
                }
                groups.entry(key).or_default().push(v);
            }
            next.extend(groups.into_values());
        }
        let next = sorted_by_min(next);
        if next.len() == current.len() {
            return NodePartition::new(g.n(), next);
        }
        current = next;
    }
}

fn sorted_by_min(mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for cell in &mut cells {
        cell.sort_unstable();
    }
    cells.sort_by_key(|c| c[0]);
    cells
}
