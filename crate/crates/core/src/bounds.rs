//! Certificates bounding `dim ⟨L|B⟩`, and inputs that are uncontrollable by
//! construction.
//!
//! Every certificate records the hypotheses it checked. A bound value is
//! attached only when all of them passed; otherwise the certificate makes no
//! claim. Structural preconditions (tree, cycle, complete graph, path graph)
//! are errors rather than failed hypotheses.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::controllability::{self, GeneralInputMatrix};
use crate::graph::MatrixWeightedGraph;
use crate::linalg;
use crate::partition::{self, CharacteristicMatrix, NodePartition};
use crate::{Error, Result, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BoundKind {
    LowerTree,
    LowerCycle,
    LowerComplete,
    PathControllability,
    UpperAep,
    UncontrollableB,
}

/// How `value` relates to `dim ⟨L|B⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Sense {
    AtLeast,
    AtMost,
    Exactly,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Hypothesis {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Hypothesis {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundCertificate {
    kind: BoundKind,
    sense: Sense,
    value: Option<usize>,
    hypotheses: Vec<Hypothesis>,
}

impl BoundCertificate {
    fn conclude(kind: BoundKind, sense: Sense, value: usize, hypotheses: Vec<Hypothesis>) -> Self {
        let value = hypotheses.iter().all(|h| h.passed).then_some(value);
        Self {
            kind,
            sense,
            value,
            hypotheses,
        }
    }

    pub fn kind(&self) -> BoundKind {
        self.kind
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    /// The bound, present only if every hypothesis passed.
    pub fn value(&self) -> Option<usize> {
        self.value
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    /// Whether an exact dimension is consistent with this certificate. A
    /// certificate without a value is consistent with anything.
    pub fn admits(&self, dim: usize) -> bool {
        match (self.value, self.sense) {
            (None, _) => true,
            (Some(v), Sense::AtLeast) => dim >= v,
            (Some(v), Sense::AtMost) => dim <= v,
            (Some(v), Sense::Exactly) => dim == v,
        }
    }
}

/// First node of the farthest distance cell joined to `leader` by a
/// positive definite shortest path, with that path.
fn farthest_pd_witness(
    g: &MatrixWeightedGraph,
    cells: &NodePartition,
    leader: usize,
) -> Result<Option<(usize, Vec<usize>)>> {
    let farthest = cells.cells().last().expect("leader cell exists");
    for &v in farthest {
        if let Some(path) = g.pd_shortest_path(leader, v)? {
            return Ok(Some((v, path)));
        }
    }
    Ok(None)
}

fn witness_hypothesis(witness: &Option<(usize, Vec<usize>)>, radius: usize) -> Hypothesis {
    let detail = match witness {
        Some((v, path)) => format!("node {v} (label {}) via {path:?}", v + 1),
        None => format!("no node at distance {radius} has a positive definite shortest path"),
    };
    Hypothesis::new("pd_path_to_farthest_cell", witness.is_some(), detail)
}

/// Lower bound `d·|π_D(leader)|` for trees whose farthest distance cell is
/// reached by a positive definite path.
pub fn lower_bound_tree(g: &MatrixWeightedGraph, leader: usize) -> Result<BoundCertificate> {
    g.check_node(leader)?;
    if !g.is_tree() {
        return Err(Error::NotATree);
    }
    let cells = partition::distance_partition(g, leader)?;
    let witness = farthest_pd_witness(g, &cells, leader)?;
    let hypotheses = alloc::vec![
        Hypothesis::new("tree", true, format!("{} nodes, {} edges", g.n(), g.edge_count())),
        witness_hypothesis(&witness, cells.len() - 1),
    ];
    Ok(BoundCertificate::conclude(
        BoundKind::LowerTree,
        Sense::AtLeast,
        g.d() * cells.len(),
        hypotheses,
    ))
}

/// Path graph led from an endpoint: controllable iff every edge is positive
/// definite. The verdict is cross-checked against the Krylov dimension and
/// the value is withheld if they disagree.
pub fn path_controllability(
    g: &MatrixWeightedGraph,
    endpoint: usize,
    tols: &Tolerances,
) -> Result<BoundCertificate> {
    g.check_node(endpoint)?;
    let order = g.path_order().ok_or(Error::NotAPathGraph)?;
    if order.first() != Some(&endpoint) && order.last() != Some(&endpoint) {
        return Err(Error::NotAnEndpoint { node: endpoint });
    }
    let psd_edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .filter(|e| !e.weight.is_positive_definite())
        .map(|e| (e.i, e.j))
        .collect();
    let all_pd = psd_edges.is_empty();
    let total = g.state_dim();
    let exact = controllability::is_controllable(g, &[endpoint], tols)?.dim;
    let (sense, value) = if all_pd {
        (Sense::Exactly, total)
    } else {
        (Sense::AtMost, total.saturating_sub(1))
    };
    let agrees = if all_pd { exact == total } else { exact < total };
    let hypotheses = alloc::vec![
        Hypothesis::new("path_graph", true, format!("order {order:?}")),
        Hypothesis::new("endpoint_leader", true, format!("node {endpoint}")),
        Hypothesis::new(
            "positive_definite_path",
            true,
            if all_pd {
                String::from("every edge positive definite: controllable")
            } else {
                format!("semi-definite edges {psd_edges:?}: uncontrollable")
            },
        ),
        Hypothesis::new(
            "exact_dimension_agrees",
            agrees,
            format!("Krylov dimension {exact} of {total}"),
        ),
    ];
    Ok(BoundCertificate::conclude(
        BoundKind::PathControllability,
        sense,
        value,
        hypotheses,
    ))
}

/// Lower bound for cycles: `d·|V|/2 + 1` (even) or `d·(|V|+1)/2` (odd),
/// given a positive definite shortest path from the leader to some node of
/// the farthest distance cell.
pub fn lower_bound_cycle(g: &MatrixWeightedGraph, leader: usize) -> Result<BoundCertificate> {
    g.check_node(leader)?;
    if !g.is_cycle() {
        return Err(Error::NotACycle);
    }
    let n = g.n();
    let cells = partition::distance_partition(g, leader)?;
    let radius = cells.len() - 1;
    debug_assert_eq!(radius, n / 2);
    let witness = farthest_pd_witness(g, &cells, leader)?;
    let value = if n.is_multiple_of(2) {
        g.d() * n / 2 + 1
    } else {
        g.d() * (n + 1) / 2
    };
    let hypotheses = alloc::vec![
        Hypothesis::new("cycle", true, format!("{n} nodes")),
        witness_hypothesis(&witness, radius),
    ];
    Ok(BoundCertificate::conclude(
        BoundKind::LowerCycle,
        Sense::AtLeast,
        value,
        hypotheses,
    ))
}

/// Lower bound `d` for complete graphs with at least one positive definite
/// edge at the leader.
pub fn lower_bound_complete(g: &MatrixWeightedGraph, leader: usize) -> Result<BoundCertificate> {
    g.check_node(leader)?;
    if !g.is_complete() {
        return Err(Error::NotComplete);
    }
    let witness = g
        .neighbors(leader)
        .find(|(_, w)| w.is_positive_definite())
        .map(|(u, _)| u);
    let hypotheses = alloc::vec![
        Hypothesis::new("complete", true, format!("{} nodes", g.n())),
        Hypothesis::new(
            "pd_edge_at_leader",
            witness.is_some(),
            match witness {
                Some(u) => format!("edge ({leader}, {u})"),
                None => String::from("every edge at the leader is semi-definite"),
            },
        ),
    ];
    Ok(BoundCertificate::conclude(
        BoundKind::LowerComplete,
        Sense::AtLeast,
        g.d(),
        hypotheses,
    ))
}

/// True iff, for every column of `b` and every cell, the entries of the
/// cell's nodes agree coordinate by coordinate; equivalently
/// `img B ⊆ img P(π)` for a 0/1 input.
pub fn input_constant_on_cells(b: &DMatrix<f64>, partition: &NodePartition, d: usize) -> bool {
    b.column_iter().all(|col| {
        partition.cells().iter().all(|cell| {
            let first = cell[0];
            cell[1..]
                .iter()
                .all(|&v| (0..d).all(|t| col[v * d + t] == col[first * d + t]))
        })
    })
}

/// Upper bound `d·s` for an almost equitable partition with `s < n` cells,
/// when the input is constant on every cell.
///
/// When the hypotheses hold the certificate also checks numerically that
/// `⟨L|B⟩ ⊆ img P(π)`.
pub fn upper_bound_aep(
    g: &MatrixWeightedGraph,
    partition: &NodePartition,
    b: &DMatrix<f64>,
    tols: &Tolerances,
) -> Result<BoundCertificate> {
    let n = g.n();
    let s = partition.len();
    if s >= n {
        return Err(Error::TrivialPartition { cells: s, n });
    }
    partition::is_aep(g, partition, tols.aep)?.map_err(Error::from)?;
    if b.nrows() != g.state_dim() {
        return Err(Error::DimensionMismatch {
            what: "input matrix rows",
            expected: g.state_dim(),
            found: b.nrows(),
        });
    }
    let d = g.d();
    let constant = input_constant_on_cells(b, partition, d);
    let mut hypotheses = alloc::vec![
        Hypothesis::new("almost_equitable", true, format!("{s} cells for {n} nodes")),
        Hypothesis::new(
            "input_constant_on_cells",
            constant,
            String::from(if constant {
                "every input column is constant on each cell"
            } else {
                "some input column differs inside a cell"
            }),
        ),
    ];
    if constant {
        let reachable = controllability::controllable_subspace(&g.laplacian(), b, tols.rank)?;
        let image = linalg::orthonormal_basis(CharacteristicMatrix::new(partition, d).matrix(), tols.rank);
        let contained = linalg::subspace_contains(&image, &reachable.subspace, tols.rank)?;
        hypotheses.push(Hypothesis::new(
            "controllable_subspace_in_img_p",
            contained,
            format!(
                "dim ⟨L|B⟩ = {}, dim img P = {}",
                reachable.subspace.dim(),
                image.dim()
            ),
        ));
    }
    Ok(BoundCertificate::conclude(
        BoundKind::UpperAep,
        Sense::AtMost,
        d * s,
        hypotheses,
    ))
}

/// An input matrix built from a reducible almost equitable partition.
#[derive(Debug, Clone, PartialEq)]
pub struct UncontrollableInput {
    pub input: GeneralInputMatrix,
    /// Nodes carrying an identity block, ascending.
    pub leaders: Vec<usize>,
    pub gcd: usize,
    /// `q_j = |V_j| / gcd`.
    pub q: Vec<usize>,
    pub c: usize,
}

fn reducible_partition_checks(
    g: &MatrixWeightedGraph,
    partition: &NodePartition,
    c: usize,
    tols: &Tolerances,
) -> Result<(usize, Vec<usize>)> {
    partition::is_aep(g, partition, tols.aep)?.map_err(Error::from)?;
    let s = partition.len();
    if s < 2 || s >= g.n() {
        return Err(Error::TrivialPartition { cells: s, n: g.n() });
    }
    let gcd = partition.gcd();
    if gcd < 2 {
        return Err(Error::NotReducible { gcd });
    }
    if c == 0 || c >= gcd {
        return Err(Error::COutOfRange { c, max: gcd - 1 });
    }
    let q = partition.cells().iter().map(|cell| cell.len() / gcd).collect();
    Ok((gcd, q))
}

/// Places `c·q_j` leaders in each cell `V_j`, choosing the lowest node
/// indices, and returns `B = δ_{n, leaders}`.
///
/// Requires an almost equitable partition with `2 ≤ s < n` cells whose sizes
/// share a divisor `gcd ≥ 2`, and `1 ≤ c ≤ gcd − 1`.
pub fn construct_uncontrollable_input(
    g: &MatrixWeightedGraph,
    partition: &NodePartition,
    c: usize,
    tols: &Tolerances,
) -> Result<UncontrollableInput> {
    let (gcd, q) = reducible_partition_checks(g, partition, c, tols)?;
    let mut leaders: Vec<usize> = partition
        .cells()
        .iter()
        .zip(&q)
        .flat_map(|(cell, &qj)| cell[..c * qj].iter().copied())
        .collect();
    leaders.sort_unstable();
    let input = GeneralInputMatrix::block_selector(g.n(), g.d(), &leaders)?;
    Ok(UncontrollableInput {
        input,
        leaders,
        gcd,
        q,
        c,
    })
}

/// Like [`construct_uncontrollable_input`] with an explicit leader set,
/// which must hold exactly `c·q_j` nodes of every cell `V_j`.
pub fn uncontrollable_input_with_leaders(
    g: &MatrixWeightedGraph,
    partition: &NodePartition,
    c: usize,
    leaders: &[usize],
    tols: &Tolerances,
) -> Result<UncontrollableInput> {
    let (gcd, q) = reducible_partition_checks(g, partition, c, tols)?;
    let input = GeneralInputMatrix::block_selector(g.n(), g.d(), leaders)?;
    let mut counts = alloc::vec![0usize; partition.len()];
    for &v in leaders {
        counts[partition.cell_of(v)] += 1;
    }
    for (cell, (&found, &qj)) in counts.iter().zip(&q).enumerate() {
        if found != c * qj {
            return Err(Error::LeaderCount {
                cell,
                expected: c * qj,
                found,
            });
        }
    }
    let mut leaders = leaders.to_vec();
    leaders.sort_unstable();
    Ok(UncontrollableInput {
        input,
        leaders,
        gcd,
        q,
        c,
    })
}

/// Checks `p_{j1}ᵀ b_1 = ⋯ = p_{jd}ᵀ b_d = c·q_j` for every cell, where
/// `b_k` are the `d` columns of `b`.
pub fn satisfies_leader_condition(
    b: &DMatrix<f64>,
    partition: &NodePartition,
    d: usize,
    c: usize,
) -> bool {
    let gcd = partition.gcd();
    if b.ncols() != d || gcd == 0 || b.nrows() != partition.n() * d {
        return false;
    }
    partition.cells().iter().all(|cell| {
        let target = (c * cell.len() / gcd) as f64;
        (0..d).all(|k| cell.iter().map(|&v| b[(v * d + k, k)]).sum::<f64>() == target)
    })
}

/// Certificate for a constructed input, verified against the Krylov
/// dimension.
pub fn uncontrollable_input_certificate(
    g: &MatrixWeightedGraph,
    partition: &NodePartition,
    built: &UncontrollableInput,
    tols: &Tolerances,
) -> Result<BoundCertificate> {
    let total = g.state_dim();
    let condition = satisfies_leader_condition(built.input.matrix(), partition, g.d(), built.c);
    let exact = controllability::report_for(&g.laplacian(), built.input.matrix(), tols.rank)?.dim;
    let hypotheses = alloc::vec![
        Hypothesis::new("almost_equitable", true, format!("{} cells", partition.len())),
        Hypothesis::new(
            "reducible",
            true,
            format!("gcd {} with q {:?}", built.gcd, built.q),
        ),
        Hypothesis::new(
            "leader_counts",
            condition,
            format!("c = {}, leaders {:?}", built.c, built.leaders),
        ),
        Hypothesis::new(
            "verified_uncontrollable",
            exact < total,
            format!("Krylov dimension {exact} of {total}"),
        ),
    ];
    Ok(BoundCertificate::conclude(
        BoundKind::UncontrollableB,
        Sense::AtMost,
        total.saturating_sub(1),
        hypotheses,
    ))
}

/// Every certificate whose structural precondition `g` meets for this
/// leader set.
///
/// Single leaders get the tree, path, cycle and complete-graph certificates
/// as applicable. Any leader set gets the almost-equitable upper bound from
/// the coarsest AEP refining `{{l_1}, …, {l_m}, followers}`, when that
/// partition is nontrivial.
pub fn applicable_certificates(
    g: &MatrixWeightedGraph,
    leaders: &[usize],
    tols: &Tolerances,
) -> Result<Vec<BoundCertificate>> {
    for &l in leaders {
        g.check_node(l)?;
    }
    let mut out = Vec::new();
    if let [leader] = *leaders {
        if g.is_tree() {
            out.push(lower_bound_tree(g, leader)?);
            if let Some(order) = g.path_order() {
                if g.n() > 1 && (order[0] == leader || order[g.n() - 1] == leader) {
                    out.push(path_controllability(g, leader, tols)?);
                }
            }
        }
        if g.is_cycle() {
            out.push(lower_bound_cycle(g, leader)?);
        }
        if g.is_complete() {
            out.push(lower_bound_complete(g, leader)?);
        }
    }
    if !leaders.is_empty() {
        let mut cells: Vec<Vec<usize>> = leaders.iter().map(|&l| alloc::vec![l]).collect();
        let followers: Vec<usize> = (0..g.n()).filter(|v| !leaders.contains(v)).collect();
        if !followers.is_empty() {
            cells.push(followers);
        }
        let initial = NodePartition::new(g.n(), cells)?;
        let refined = partition::coarsest_aep_refinement(g, &initial, tols.aep)?;
        if refined.len() < g.n() {
            let b = controllability::InputMatrix::new(g.n(), g.d(), leaders)?;
            out.push(upper_bound_aep(g, &refined, b.matrix(), tols)?);
        }
    }
    Ok(out)
}
