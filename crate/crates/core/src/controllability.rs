//! Controllable subspaces of `ẋ = −Lx + Bu` and PBH cross-checks.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::bounds::BoundCertificate;
use crate::graph::{BlockLaplacian, MatrixWeightedGraph};
use crate::linalg::{self, SpectralSubspace, Subspace};
use crate::{Error, Result, Tolerances};

/// Leader-selection input `B ∈ {0, I_d}^{n×m}`: block column `l` carries
/// `I_d` at row block `leaders[l]` and zeros elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct InputMatrix {
    leaders: Vec<usize>,
    matrix: DMatrix<f64>,
}

impl InputMatrix {
    pub fn new(n: usize, d: usize, leaders: &[usize]) -> Result<Self> {
        let mut seen = alloc::vec![false; n];
        for &v in leaders {
            if v >= n {
                return Err(Error::NodeOutOfRange { node: v, n });
            }
            if core::mem::replace(&mut seen[v], true) {
                return Err(Error::DuplicateLeader { node: v });
            }
        }
        let mut matrix = DMatrix::zeros(n * d, leaders.len() * d);
        for (l, &v) in leaders.iter().enumerate() {
            for t in 0..d {
                matrix[(v * d + t, l * d + t)] = 1.0;
            }
        }
        Ok(Self {
            leaders: leaders.to_vec(),
            matrix,
        })
    }

    pub fn leaders(&self) -> &[usize] {
        &self.leaders
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

/// A `dn×k` 0/1 input whose block columns may select several nodes at once.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralInputMatrix {
    matrix: DMatrix<f64>,
    d: usize,
}

impl GeneralInputMatrix {
    /// Validates that every entry is 0 or 1 and the row count is a multiple
    /// of `d`.
    pub fn new(matrix: DMatrix<f64>, d: usize) -> Result<Self> {
        if d == 0 || !matrix.nrows().is_multiple_of(d) {
            return Err(Error::DimensionMismatch {
                what: "input rows (multiple of d)",
                expected: d,
                found: matrix.nrows(),
            });
        }
        if matrix.iter().any(|&x| x != 0.0 && x != 1.0) {
            return Err(Error::DimensionMismatch {
                what: "input entries in {0, 1}",
                expected: 1,
                found: 0,
            });
        }
        Ok(Self { matrix, d })
    }

    /// `δ_{n, Q} = [b_1, …, b_d]`: one block column with `I_d` at every node
    /// of `nodes`.
    pub fn block_selector(n: usize, d: usize, nodes: &[usize]) -> Result<Self> {
        let mut matrix = DMatrix::zeros(n * d, d);
        for &v in nodes {
            if v >= n {
                return Err(Error::NodeOutOfRange { node: v, n });
            }
            if matrix[(v * d, 0)] == 1.0 {
                return Err(Error::DuplicateLeader { node: v });
            }
            for t in 0..d {
                matrix[(v * d + t, t)] = 1.0;
            }
        }
        Ok(Self { matrix, d })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows() / self.d
    }

    /// Nodes with at least one nonzero entry in their row block.
    pub fn led_nodes(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&v| {
                self.matrix
                    .rows(v * self.d, self.d)
                    .iter()
                    .any(|&x| x != 0.0)
            })
            .collect()
    }
}

impl From<InputMatrix> for GeneralInputMatrix {
    fn from(b: InputMatrix) -> Self {
        let d = if b.leaders.is_empty() {
            1
        } else {
            b.matrix.ncols() / b.leaders.len()
        };
        Self {
            matrix: b.matrix,
            d: d.max(1),
        }
    }
}

/// `⟨L|B⟩ = img B + L img B + ⋯`.
///
/// Computed from the eigenspaces of `L` rather than by the Krylov iteration.
/// The two agree in exact arithmetic, but when the Krylov sequence adds one
/// weakly coupled direction after another, rounding errors are amplified at
/// every step until noise passes the rank test. The eigenspace form makes
/// each rank decision once, on cosines of principal angles, which are well
/// conditioned because `L` is symmetric.
pub fn controllable_subspace(
    l: &BlockLaplacian,
    b: &DMatrix<f64>,
    tol: f64,
) -> Result<SpectralSubspace> {
    linalg::spectral_controllable_subspace(l.matrix(), b, tol)
}

/// Controllability verdict for one input matrix.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ControllabilityReport {
    /// `dim ⟨L|B⟩`.
    pub dim: usize,
    /// `dn`.
    pub total: usize,
    pub controllable: bool,
    /// See [`linalg::RankGap::ratio`].
    pub singular_value_gap: f64,
    pub certificates: Vec<BoundCertificate>,
}

/// Analyzes `(L, B)` for the given leader nodes. Works on disconnected
/// graphs as well. Certificates are left empty; see
/// [`crate::bounds::applicable_certificates`].
pub fn is_controllable(
    g: &MatrixWeightedGraph,
    leaders: &[usize],
    tols: &Tolerances,
) -> Result<ControllabilityReport> {
    let b = InputMatrix::new(g.n(), g.d(), leaders)?;
    report_for(&g.laplacian(), b.matrix(), tols.rank)
}

/// Same as [`is_controllable`] for an arbitrary input matrix.
pub fn report_for(l: &BlockLaplacian, b: &DMatrix<f64>, tol: f64) -> Result<ControllabilityReport> {
    let reachable = controllable_subspace(l, b, tol)?;
    let total = l.matrix().nrows();
    let dim = reachable.subspace.dim();
    Ok(ControllabilityReport {
        dim,
        total,
        controllable: dim == total,
        singular_value_gap: reachable.gap.ratio(),
        certificates: Vec::new(),
    })
}

/// An eigenvector of `L` that `B` cannot excite.
#[derive(Debug, Clone, PartialEq)]
pub struct PbhWitness {
    pub eigenvalue: f64,
    /// Unit vector with `L w = λ w` and `‖Q_Bᵀ w‖ ≤ tol`.
    pub vector: DVector<f64>,
}

/// Uncontrollable directions grouped by eigenvalue.
#[derive(Debug, Clone)]
pub struct PbhEigenspace {
    pub eigenvalue: f64,
    /// Orthonormal basis of `{w ∈ ker(L − λI) : w ⊥ img B}`.
    pub witnesses: Subspace,
}

/// Every eigenspace of `L` that meets `img(B)^⊥` nontrivially.
///
/// Eigenvalues within `tol·‖L‖₂` of their neighbor are merged into one
/// eigenspace. Inside each eigenspace `V`, the directions `z` with
/// `‖Q_Bᵀ V z‖ ≤ tol` (with `Q_B` an orthonormal basis of `img B`) are
/// witnesses.
pub fn pbh_eigenspaces(
    l: &DMatrix<f64>,
    b: &DMatrix<f64>,
    tol: f64,
) -> Result<Vec<PbhEigenspace>> {
    linalg::check_symmetric(l, Tolerances::DEFAULT_SYM)?;
    if b.nrows() != l.nrows() {
        return Err(Error::DimensionMismatch {
            what: "input matrix rows",
            expected: l.nrows(),
            found: b.nrows(),
        });
    }
    let input = linalg::orthonormal_basis(b, tol);
    let mut out = Vec::new();
    for cluster in linalg::eigen_clusters(l, tol) {
        let k = cluster.space.ncols();
        // Pad to at least k rows so the SVD returns all k right vectors.
        let coupling = input.basis().transpose() * &cluster.space;
        let mut padded = DMatrix::zeros(coupling.nrows().max(k), k);
        padded.rows_mut(0, coupling.nrows()).copy_from(&coupling);
        let d = linalg::svd(&padded);
        let free: Vec<DVector<f64>> = d
            .values
            .iter()
            .enumerate()
            .filter(|(_, s)| **s <= tol)
            .map(|(r, _)| &cluster.space * d.v.column(r))
            .collect();
        if !free.is_empty() {
            out.push(PbhEigenspace {
                eigenvalue: cluster.eigenvalue,
                witnesses: linalg::orthonormal_basis(&DMatrix::from_columns(&free), tol),
            });
        }
    }
    Ok(out)
}

/// One PBH witness if `(L, B)` is uncontrollable, `None` otherwise.
pub fn pbh_witness(l: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> Result<Option<PbhWitness>> {
    Ok(pbh_eigenspaces(l, b, tol)?
        .into_iter()
        .find(|e| e.witnesses.dim() > 0)
        .map(|e| PbhWitness {
            eigenvalue: e.eigenvalue,
            vector: e.witnesses.basis().column(0).into_owned(),
        }))
}
