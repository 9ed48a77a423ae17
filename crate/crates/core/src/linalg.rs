//! Dense small-matrix numerics.
//!
//! Everything here is a pure function of its inputs. Symmetric
//! eigendecomposition backs definiteness classification and the spectral
//! form of the controllable subspace; the singular value decomposition backs
//! rank decisions. Matrices are `nalgebra` types, while both decompositions
//! come from `faer`: nalgebra's SVD returned singular vectors that do not
//! reconstruct some small rank-deficient inputs, and its symmetric
//! eigensolver left residuals near `1e−5` on some Laplacians.

use alloc::vec::Vec;

use faer::Side;
use nalgebra::{DMatrix, DVector};

use crate::{Error, Result, Tolerances};

/// Definiteness class of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Definiteness {
    Zero,
    PositiveSemiDefinite,
    PositiveDefinite,
    Indefinite,
}

impl Definiteness {
    pub fn as_str(self) -> &'static str {
        match self {
            Definiteness::Zero => "zero",
            Definiteness::PositiveSemiDefinite => "psd",
            Definiteness::PositiveDefinite => "pd",
            Definiteness::Indefinite => "indefinite",
        }
    }
}

/// Largest absolute entry, 0 for an empty matrix.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// `max|M − Mᵀ|`. Panics in debug builds if `m` is not square.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    debug_assert!(m.is_square());
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Checks `max|M − Mᵀ| ≤ sym·max(1, max|M|)`.
pub fn check_symmetric(m: &DMatrix<f64>, sym_tol: f64) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            what: "square matrix columns",
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let deviation = asymmetry(m);
    if deviation > sym_tol * max_abs(m).max(1.0) {
        return Err(Error::NotSymmetric { deviation });
    }
    Ok(())
}

/// Eigenvalues of the symmetric part of `m`, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    symmetric_eigen(m).0
}

/// Eigenvalues of the symmetric part of `m` in ascending order, with the
/// matching orthonormal eigenvectors as columns.
fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let sym = to_faer(&((m + m.transpose()) * 0.5));
    let eig = sym
        .self_adjoint_eigen(Side::Lower)
        .expect("symmetric eigensolver converges on finite input");
    let values = eig.S().column_vector();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let vectors = eig.U();
    (
        order.iter().map(|&k| values[k]).collect(),
        DMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]),
    )
}

/// Thin singular value decomposition with singular values descending.
pub(crate) struct Svd {
    pub values: Vec<f64>,
    /// Left singular vectors as columns.
    pub u: DMatrix<f64>,
    /// Right singular vectors as columns.
    pub v: DMatrix<f64>,
}

pub(crate) fn svd(m: &DMatrix<f64>) -> Svd {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Svd {
            values: Vec::new(),
            u: DMatrix::zeros(rows, 0),
            v: DMatrix::zeros(cols, 0),
        };
    }
    let d = to_faer(m).thin_svd().expect("SVD converges on finite input");
    let values = d.S().column_vector();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let (u, v) = (d.U(), d.V());
    Svd {
        values: order.iter().map(|&j| values[j]).collect(),
        u: DMatrix::from_fn(rows, k, |i, j| u[(i, order[j])]),
        v: DMatrix::from_fn(cols, k, |i, j| v[(i, order[j])]),
    }
}

fn to_faer(m: &DMatrix<f64>) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Classifies a symmetric matrix by thresholding its spectrum.
///
/// With `s = max(1, ‖M‖₂)`: an eigenvalue counts as zero when
/// `|λ| ≤ class·s`. Only an all-zero matrix is [`Definiteness::Zero`].
pub fn classify_definiteness(m: &DMatrix<f64>, tols: &Tolerances) -> Result<Definiteness> {
    check_symmetric(m, tols.sym)?;
    Ok(classify_spectrum(m, tols.class).0)
}

/// Classification plus the smallest eigenvalue, for diagnostics.
pub(crate) fn classify_spectrum(m: &DMatrix<f64>, class_tol: f64) -> (Definiteness, f64) {
    if m.iter().all(|x| *x == 0.0) {
        return (Definiteness::Zero, 0.0);
    }
    let eigenvalues = symmetric_eigenvalues(m);
    let min = eigenvalues.first().copied().unwrap_or(0.0);
    let max = eigenvalues.last().copied().unwrap_or(0.0);
    let threshold = class_tol * min.abs().max(max.abs()).max(1.0);
    let class = if min < -threshold {
        Definiteness::Indefinite
    } else if min > threshold {
        Definiteness::PositiveDefinite
    } else {
        Definiteness::PositiveSemiDefinite
    };
    (class, min)
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    svd(m).values
}

/// Largest singular value (0 for an empty matrix).
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Number of singular values above `tol·σ_max`; 0 for the zero matrix.
pub fn numerical_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    let values = singular_values(m);
    let Some(&largest) = values.first() else {
        return 0;
    };
    if largest == 0.0 {
        return 0;
    }
    values.iter().filter(|s| **s > tol * largest).count()
}

/// Ratio bookkeeping for rank decisions.
///
/// Both fields are relative singular values: `smallest_retained` is the
/// smallest value that was counted towards a rank, `largest_discarded` the
/// largest value that was treated as zero. A wide gap between them means the
/// rank decision is insensitive to the tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RankGap {
    pub smallest_retained: f64,
    pub largest_discarded: f64,
}

impl RankGap {
    pub fn new() -> Self {
        Self {
            smallest_retained: f64::INFINITY,
            largest_discarded: 0.0,
        }
    }

    fn record(&mut self, relative: f64, kept: bool) {
        if kept {
            self.smallest_retained = self.smallest_retained.min(relative);
        } else {
            self.largest_discarded = self.largest_discarded.max(relative);
        }
    }

    /// `smallest_retained / largest_discarded`, with the denominator floored
    /// at machine epsilon and an empty retained set mapped to 0. Always
    /// finite.
    pub fn ratio(&self) -> f64 {
        if !self.smallest_retained.is_finite() {
            return 0.0;
        }
        self.smallest_retained / self.largest_discarded.max(f64::EPSILON)
    }
}

impl Default for RankGap {
    fn default() -> Self {
        Self::new()
    }
}

/// A subspace of `ℝ^ambient_dim` held as an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
    tol: f64,
}

impl Subspace {
    /// The zero subspace.
    pub fn zero(ambient_dim: usize, tol: f64) -> Self {
        Self {
            basis: DMatrix::zeros(ambient_dim, 0),
            tol,
        }
    }

    /// The whole space.
    pub fn full(ambient_dim: usize, tol: f64) -> Self {
        Self {
            basis: DMatrix::identity(ambient_dim, ambient_dim),
            tol,
        }
    }

    /// Columns are orthonormal.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Orthogonal projection of `m`'s columns onto this subspace.
    pub fn project(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        &self.basis * (self.basis.transpose() * m)
    }

    /// Component of `m` orthogonal to this subspace.
    pub fn residual(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        m - self.project(m)
    }
}

/// Orthonormal basis of `img(M)`, keeping left singular vectors whose
/// singular value exceeds `tol·σ_max`.
pub fn orthonormal_basis(m: &DMatrix<f64>, tol: f64) -> Subspace {
    orthonormal_basis_with_gap(m, tol, &mut RankGap::new())
}

fn orthonormal_basis_with_gap(m: &DMatrix<f64>, tol: f64, gap: &mut RankGap) -> Subspace {
    let rows = m.nrows();
    if m.ncols() == 0 || rows == 0 {
        return Subspace::zero(rows, tol);
    }
    let d = svd(m);
    let largest = d.values.first().copied().unwrap_or(0.0);
    if largest == 0.0 {
        return Subspace::zero(rows, tol);
    }
    let mut kept = Vec::new();
    for (k, s) in d.values.iter().enumerate() {
        let relative = s / largest;
        let keep = relative > tol;
        gap.record(relative, keep);
        if keep {
            kept.push(d.u.column(k).into_owned());
        }
    }
    Subspace {
        basis: extend_orthonormal(&DMatrix::zeros(rows, 0), kept),
        tol,
    }
}

/// Orthonormalizes `vectors` against the orthonormal columns of `basis` and
/// each other by modified Gram-Schmidt with one reorthogonalization pass.
fn extend_orthonormal(basis: &DMatrix<f64>, vectors: Vec<DVector<f64>>) -> DMatrix<f64> {
    let mut accepted: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    for mut w in vectors {
        let original = w.norm();
        if original == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for c in basis.column_iter() {
                let overlap = c.dot(&w);
                w.axpy(-overlap, &c, 1.0);
            }
            for c in &accepted {
                let overlap = c.dot(&w);
                w.axpy(-overlap, c, 1.0);
            }
        }
        let norm = w.norm();
        if norm > f64::EPSILON * 64.0 * original {
            accepted.push(w / norm);
        }
    }
    stack_columns(basis.nrows(), &accepted)
}

fn stack_columns(rows: usize, columns: &[DVector<f64>]) -> DMatrix<f64> {
    if columns.is_empty() {
        DMatrix::zeros(rows, 0)
    } else {
        DMatrix::from_columns(columns)
    }
}

fn hstack(left: &DMatrix<f64>, right: &DMatrix<f64>) -> DMatrix<f64> {
    debug_assert_eq!(left.nrows(), right.nrows());
    let mut out = DMatrix::zeros(left.nrows(), left.ncols() + right.ncols());
    out.columns_mut(0, left.ncols()).copy_from(left);
    out.columns_mut(left.ncols(), right.ncols()).copy_from(right);
    out
}

fn check_ambient(u: &Subspace, v: &Subspace) -> Result<()> {
    if u.ambient_dim() != v.ambient_dim() {
        return Err(Error::AmbientMismatch {
            left: u.ambient_dim(),
            right: v.ambient_dim(),
        });
    }
    Ok(())
}

/// `span(U ∪ V)`, using `U`'s tolerance.
pub fn subspace_sum(u: &Subspace, v: &Subspace) -> Result<Subspace> {
    check_ambient(u, v)?;
    Ok(orthonormal_basis(&hstack(&u.basis, &v.basis), u.tol))
}

/// True iff `‖(I − U·Uᵀ)·V‖₂ ≤ tol·√ambient_dim`, i.e. `V ⊆ U`.
pub fn subspace_contains(u: &Subspace, v: &Subspace, tol: f64) -> Result<bool> {
    check_ambient(u, v)?;
    if v.dim() == 0 {
        return Ok(true);
    }
    let residual = u.residual(&v.basis);
    Ok(spectral_norm(&residual) <= tol * libm::sqrt(u.ambient_dim() as f64))
}

/// Result of the Krylov iteration.
#[derive(Debug, Clone)]
pub struct KrylovSubspace {
    pub subspace: Subspace,
    /// `dim S_0, dim S_1, …` up to the fixed point (strictly increasing).
    pub dims: Vec<usize>,
    pub gap: RankGap,
}

/// The smallest `L`-invariant subspace containing `img(B)`.
///
/// Iterates `S_0 = img(B)`, `S_{k+1} = S_k + L·S_k` until the dimension stops
/// growing. Only the directions added in the previous step are multiplied by
/// `L`, since `L·S_{k−1} ⊆ S_k` already. `L` is scaled to unit spectral norm
/// first, so a new direction is kept when its singular value, after
/// projecting out `S_k` twice, exceeds `tol`. Images of `(−L)^k` and `L^k`
/// coincide, so the sign convention of the controllability matrix is
/// irrelevant here.
pub fn krylov_controllable_subspace(
    l: &DMatrix<f64>,
    b: &DMatrix<f64>,
    tol: f64,
) -> Result<KrylovSubspace> {
    if !l.is_square() {
        return Err(Error::DimensionMismatch {
            what: "Laplacian columns",
            expected: l.nrows(),
            found: l.ncols(),
        });
    }
    if b.nrows() != l.nrows() {
        return Err(Error::DimensionMismatch {
            what: "input matrix rows",
            expected: l.nrows(),
            found: b.nrows(),
        });
    }
    let ambient = l.nrows();
    let mut gap = RankGap::new();
    let start = orthonormal_basis_with_gap(b, tol, &mut gap);
    let mut dims = alloc::vec![start.dim()];

    let norm = spectral_norm(l);
    if norm == 0.0 || start.dim() == 0 {
        return Ok(KrylovSubspace {
            subspace: start,
            dims,
            gap,
        });
    }
    let scaled = l / norm;

    let mut basis = start.basis;
    let mut fresh = basis.clone();
    while basis.ncols() < ambient && fresh.ncols() > 0 {
        let mut candidate = &scaled * &fresh;
        for _ in 0..2 {
            let overlap = basis.transpose() * &candidate;
            candidate -= &basis * overlap;
        }
        let d = svd(&candidate);
        let mut kept = Vec::new();
        for (k, s) in d.values.iter().enumerate() {
            let keep = *s > tol;
            gap.record(*s, keep);
            if keep {
                kept.push(d.u.column(k).into_owned());
            }
        }
        let added = extend_orthonormal(&basis, kept);
        if added.ncols() == 0 {
            break;
        }
        basis = hstack(&basis, &added);
        fresh = added;
        dims.push(basis.ncols());
    }

    Ok(KrylovSubspace {
        subspace: Subspace { basis, tol },
        dims,
        gap,
    })
}

/// An eigenvalue cluster of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct EigenCluster {
    /// Mean of the clustered eigenvalues.
    pub eigenvalue: f64,
    /// Orthonormal basis of the summed eigenspaces.
    pub space: DMatrix<f64>,
}

/// Eigenvalues of symmetric `m` in ascending order, grouped so that
/// neighbours within `rel_tol·max(|λ|)` share a cluster.
pub fn eigen_clusters(m: &DMatrix<f64>, rel_tol: f64) -> Vec<EigenCluster> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    let (values, vectors) = symmetric_eigen(m);
    let scale = values.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let threshold = rel_tol * scale;

    let mut out = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= threshold {
            end += 1;
        }
        out.push(EigenCluster {
            eigenvalue: values[start..end].iter().sum::<f64>() / (end - start) as f64,
            space: vectors.columns(start, end - start).into_owned(),
        });
        start = end;
    }
    out
}

/// Result of the spectral computation of `⟨L|B⟩`.
#[derive(Debug, Clone)]
pub struct SpectralSubspace {
    pub subspace: Subspace,
    pub gap: RankGap,
}

/// The smallest `L`-invariant subspace containing `img(B)`, for symmetric
/// `L`, as the direct sum of the projections of `img(B)` onto the
/// eigenspaces of `L`.
///
/// This spans the same space as the Krylov iteration but never builds long
/// chains of nearly dependent directions. Each cluster `V` from
/// [`eigen_clusters`] (relative tolerance `tol`) contributes the directions
/// whose principal-angle cosine with `img(B)` exceeds `tol`.
pub fn spectral_controllable_subspace(
    l: &DMatrix<f64>,
    b: &DMatrix<f64>,
    tol: f64,
) -> Result<SpectralSubspace> {
    if b.nrows() != l.nrows() {
        return Err(Error::DimensionMismatch {
            what: "input matrix rows",
            expected: l.nrows(),
            found: b.nrows(),
        });
    }
    check_symmetric(l, Tolerances::DEFAULT_SYM)?;
    let mut gap = RankGap::new();
    let input = orthonormal_basis_with_gap(b, tol, &mut gap);
    if input.dim() == 0 {
        return Ok(SpectralSubspace { subspace: input, gap });
    }
    let mut kept = Vec::new();
    for cluster in eigen_clusters(l, tol) {
        let coupling = input.basis().transpose() * &cluster.space;
        let d = svd(&coupling);
        for (r, s) in d.values.iter().enumerate() {
            let keep = *s > tol;
            gap.record(*s, keep);
            if keep {
                kept.push(&cluster.space * d.v.column(r));
            }
        }
    }
    let basis = extend_orthonormal(&DMatrix::zeros(l.nrows(), 0), kept);
    Ok(SpectralSubspace {
        subspace: Subspace { basis, tol },
        gap,
    })
}
