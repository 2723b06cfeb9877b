use thiserror::Error;

/// Errors surfaced by the geometry, kernel and quadrature layers.
#[derive(Debug, Clone, Error)]
pub enum SymkerError {
    /// A point failed the hyperboloid (or unit-sphere) constraint beyond tolerance.
    #[error("geometry invariant violated: {0}")]
    GeometryInvariant(String),

    /// Busemann evaluation at a boundary point collinear with the base point.
    #[error("boundary degeneracy: |u - b| = {dist:.3e} below tolerance")]
    BoundaryDegeneracy { dist: f64 },

    /// Parameter outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature failure: achieved error {achieved:.3e} above target {target:.3e}")]
    QuadratureFailure { achieved: f64, target: f64 },

    /// A two-sided envelope was queried outside the region where the bound is asserted.
    #[error("estimate not asserted in this region: {0}")]
    EstimateNotAsserted(String),

    /// A translated-criterion quadrature diverged where the symbolic verdict says it must not.
    #[error("consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, SymkerError>;
