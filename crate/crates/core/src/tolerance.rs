/// Numerical thresholds shared by every analysis.
///
/// All values are relative; each consumer documents the scale it multiplies
/// them by.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tolerances {
    /// Rank and subspace-containment threshold, relative to the largest
    /// singular value involved.
    pub rank: f64,
    /// Eigenvalue threshold for weight classification, relative to
    /// `max(1, ‖M‖₂)`.
    pub class: f64,
    /// Matrix-degree equality threshold for almost equitable partitions,
    /// relative to `max(1, largest weight entry)`.
    pub aep: f64,
    /// Symmetry threshold on `max|M − Mᵀ|`, relative to `max(1, max|M|)`.
    pub sym: f64,
}

impl Tolerances {
    pub const DEFAULT_RANK: f64 = 1e-8;
    pub const DEFAULT_CLASS: f64 = 1e-9;
    pub const DEFAULT_AEP: f64 = 1e-9;
    pub const DEFAULT_SYM: f64 = 1e-9;

    /// True when every threshold is finite and strictly positive.
    pub fn is_valid(&self) -> bool {
        [self.rank, self.class, self.aep, self.sym]
            .iter()
            .all(|t| t.is_finite() && *t > 0.0)
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: Self::DEFAULT_RANK,
            class: Self::DEFAULT_CLASS,
            aep: Self::DEFAULT_AEP,
            sym: Self::DEFAULT_SYM,
        }
    }
}
