//! Biorthogonal eigensystems, branch cuts and Berry-curvature monopoles for
//! the two-mode non-Hermitian Dirac model `H = p_x sx + p_y sy + (p_z + i s) sz`.
//!
//! The crate is organized around three ideas:
//!
//! - [`spectra`]: the model Hamiltonians, their closed-form biorthonormal
//!   eigensystems (`<phi^m|psi_n> = delta_mn`), GL(1,C) gauge
//!   transformations, and a Hermitian comparison model whose degeneracies
//!   fill a disk.
//! - [`branching`]: branch-cut strategies mapping each off-EP point to a
//!   sheet label, and Möbius-loop detection by continuous branch tracking.
//!   Eigenvalues are square roots of a complex radicand, so any surface
//!   bounded by the exceptional circle can serve as the cut; the physics
//!   (which loops swap sheets) is cut independent.
//! - [`geometry`]: Berry connection/curvature fields (closed form and
//!   finite differences), divergence scans, surface meshes, flux
//!   quadrature, monopole charge densities and the finite-to-infinite-cut
//!   limit study.
//!
//! All operations are pure functions of their inputs; field evaluations
//! parallelize over rayon with fixed reduction order, so results at a given
//! refinement level are reproducible bit for bit.

pub mod branching;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod spectra;

/// Default numerical tolerances, in one place.
///
/// | constant | value | meaning |
/// |---|---|---|
/// | `EP_TOL_REL` | 1e-10 | point is exceptional when the radicand magnitude is below this times s^2 |
/// | `AXIS_TOL_SQ` | 1e-12 | closed-form gauge abandoned when p_x^2 + p_y^2 is below this |
/// | `CUT_TOL_REL` | 1e-9 | on-cut detection distance, times s |
/// | `QUAD_TOL` | 1e-6 | flux refinement stops when successive levels agree this closely |
/// | `DIV_TOL` | 1e-4 | divergence magnitude accepted as zero away from monopoles |
/// | `IM_TOL_REL` | 1e-6 | acceptable imaginary residual of a closed-surface flux, times its magnitude |
/// | `TRACK_TIE_TOL` | 1e-12 | branch candidates closer than this are an ambiguous tracking step |
/// | `MAX_TRACK_REFINEMENTS` | 20 | adaptive halvings before tracking gives up |
/// | `FD_STEP_REL` | 1e-5 | default finite-difference step, times max(s, \|p\|) |
/// | `POLAR_CAP_ANGLE` | 1e-3 | angular radius of the excluded cap in hemisphere integrals |
pub mod defaults {
    pub const EP_TOL_REL: f64 = 1e-10;
    pub const AXIS_TOL_SQ: f64 = 1e-12;
    pub const CUT_TOL_REL: f64 = 1e-9;
    pub const QUAD_TOL: f64 = 1e-6;
    pub const DIV_TOL: f64 = 1e-4;
    pub const IM_TOL_REL: f64 = 1e-6;
    pub const TRACK_TIE_TOL: f64 = 1e-12;
    pub const MAX_TRACK_REFINEMENTS: u32 = 20;
    pub const FD_STEP_REL: f64 = 1e-5;
    pub const POLAR_CAP_ANGLE: f64 = 1e-3;
}

pub use branching::{
    disk_crossings, label_point, labeled_analytic_eigensystem, labeled_eigensystem, trace_loop,
    trace_loop_hermitian, BranchCut, CutKind, MobiusReport, Orientation, ParamLoop,
    RegionPredicate, SheetLabeling,
};
pub use error::{Error, Result};
pub use geometry::{
    connection, connection_field, curvature_analytic, curvature_fd, curvature_fd_field,
    default_step, disk_density, divergence_scan, f_operator, f_operator_completeness,
    f_operator_curl, f_operator_field, field_dump, flux, gauss_legendre, limit_study,
    measured_disk_jump, measured_plane_jump, plane_density, ChernResult, CurvatureSample,
    DivergenceSample, DivergenceScan, DumpQuantity, DumpTable, FluxSurface, LimitStudyResult,
    QuadNode, SampleSet, SurfaceMesh,
};
pub use linalg::{c64, C64, CVec3, Mat2, MatVec3, Vec2};
pub use spectra::{
    analytic_eigensystem, eigensystem, energies, gauge_transform, hamiltonian,
    hermitian_eigensystem, hermitian_hamiltonian, hermitian_theta, is_exceptional, radicand,
    robust_eigensystem, robust_eigensystem_principal, BiorthoSystem, BranchRule,
    ComplexEnergyPair, GaugeFunction, HermitianEigensystem, ModelConfig, ModelKind, ParamPoint,
    Sheet,
};
