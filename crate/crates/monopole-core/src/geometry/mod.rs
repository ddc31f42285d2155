//! Berry connection/curvature fields, surface meshes and flux quadrature,
//! charge densities, and the finite-to-infinite-cut limit study.

mod curvature;
mod density;
mod dump;
mod limit;
mod mesh;
mod quadrature;

pub use curvature::{
    connection, connection_field, curvature_analytic, curvature_fd, curvature_fd_field,
    default_step, divergence_scan, f_operator, f_operator_completeness, f_operator_curl,
    f_operator_field, CurvatureSample, DivergenceSample, DivergenceScan,
};
pub use density::{disk_density, measured_disk_jump, measured_plane_jump, plane_density};
pub use dump::{field_dump, DumpQuantity, DumpTable, SampleSet};
pub use limit::{limit_study, LimitStudyResult};
pub use mesh::{QuadNode, SurfaceMesh};
pub use quadrature::{flux, gauss_legendre, ChernResult, FluxSurface};
