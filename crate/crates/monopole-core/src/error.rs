//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go numerically or geometrically wrong.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// The requested point is an exceptional point (degenerate eigenvalues,
    /// non-diagonalizable Hamiltonian) within tolerance.
    #[error("exceptional point: eigenvalues degenerate within tolerance at p = ({0}, {1}, {2})")]
    EPDegenerate(f64, f64, f64),

    /// Closed-form left eigenvectors divide by p_x - i p_y and blow up on the
    /// p_z axis; the robust gauge patch must be used there instead.
    #[error("analytic eigenvectors singular on the p_z axis at p = ({0}, {1}, {2})")]
    AxisSingular(f64, f64, f64),

    /// The angle map of the Hermitian comparison model is 0/0 on the circle
    /// sqrt(x^2+y^2) = r, z = 0.
    #[error("angle map undefined on the degenerate circle at ({0}, {1}, {2})")]
    DegenerateCircle(f64, f64, f64),

    /// A gauge function evaluated to zero; the transformation is not invertible.
    #[error("gauge function vanishes at p = ({0}, {1}, {2})")]
    ZeroGauge(f64, f64, f64),

    /// The point lies on the branch-cut surface within tolerance.
    #[error("point lies on the branch-cut surface at p = ({0}, {1}, {2})")]
    OnCutSurface(f64, f64, f64),

    /// Continuous tracking could not decide between the two candidate
    /// branches even after the maximum number of step refinements.
    #[error("ambiguous branch tracking near path parameter t = {0}")]
    AmbiguousTracking(f64),

    /// A finite-difference stencil straddles the branch-cut surface.
    #[error("finite-difference stencil crosses the branch cut at p = ({0}, {1}, {2})")]
    StencilCrossesCut(f64, f64, f64),

    /// A quadrature surface touches or crosses the branch-cut surface.
    #[error("integration surface touches the branch cut near p = ({0}, {1}, {2})")]
    MeshTouchesCut(f64, f64, f64),

    /// A mesh passed to a closed-surface integral has a boundary or an
    /// inconsistent orientation.
    #[error("mesh is not a closed oriented surface: {0}")]
    NotClosed(String),

    /// Disk/plane charge densities are undefined at (or beyond) the
    /// exceptional-point circle radius.
    #[error("charge density undefined at radial distance {0} (EP circle radius {1})")]
    EdgeOfDisk(f64, f64),

    /// Surface-flux refinement hit the maximum level without meeting the
    /// requested tolerance.
    #[error("flux quadrature did not converge: last increment {0:.3e} above tolerance {1:.3e}")]
    QuadratureNotConverged(f64, f64),

    /// Invalid caller-supplied numerical input (bad radii list, empty loop...).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn ep(p: &crate::spectra::ParamPoint) -> Self {
        Error::EPDegenerate(p.x, p.y, p.z)
    }

    pub(crate) fn axis(p: &crate::spectra::ParamPoint) -> Self {
        Error::AxisSingular(p.x, p.y, p.z)
    }

    pub(crate) fn on_cut(p: &crate::spectra::ParamPoint) -> Self {
        Error::OnCutSurface(p.x, p.y, p.z)
    }
}
