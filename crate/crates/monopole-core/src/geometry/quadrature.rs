//! Surface-flux quadrature and Chern numbers.
//!
//! Closed parametric surfaces (spheres, ellipsoids, cubes) use a product
//! rule: Gauss-Legendre in the polar variable crossed with a uniform
//! trapezoid in azimuth, which is spectrally accurate for the periodic
//! direction. Triangle meshes use the stored per-triangle three-point rule
//! with flat subdivision refinement. Either way the controller doubles the
//! resolution until two successive fluxes agree to the requested tolerance.
//!
//! Node sums are reduced in a fixed order so a given level is bit
//! reproducible regardless of thread count.

use rayon::prelude::*;

use crate::branching::BranchCut;
use crate::error::{Error, Result};
use crate::geometry::curvature::curvature_analytic;
use crate::geometry::mesh::SurfaceMesh;
use crate::linalg::{c64, C64};
use crate::spectra::{ModelConfig, ParamPoint, Sheet};

/// Chern flux of a closed surface.
#[derive(Clone, Copy, Debug)]
pub struct ChernResult {
    /// Total flux of the labeled Berry curvature through the surface.
    pub flux: C64,
    /// flux / 2 pi.
    pub normalized: C64,
    /// |Im flux|.
    pub imag_residual: f64,
    /// Refinement level at which the controller stopped.
    pub mesh_level: u32,
}

impl ChernResult {
    fn from_flux(flux: C64, mesh_level: u32) -> ChernResult {
        ChernResult {
            flux,
            normalized: flux / c64(2.0 * std::f64::consts::PI, 0.0),
            imag_residual: flux.im.abs(),
            mesh_level,
        }
    }
}

/// Closed surfaces the flux integrator understands.
#[derive(Clone, Debug)]
pub enum FluxSurface {
    Sphere { center: ParamPoint, radius: f64 },
    Ellipsoid { center: ParamPoint, semi_axes: [f64; 3] },
    Cube { center: ParamPoint, side: f64 },
    Mesh(SurfaceMesh),
}

const MAX_LEVEL: u32 = 6;

/// Flux of the labeled curvature (chosen `sheet`) through a closed surface,
/// refined until two successive levels agree within `quad_tol`.
///
/// The surface must be closed, keep clear of the EP circle and must not
/// touch or straddle the cut surface; violations surface as `NotClosed`,
/// `EPDegenerate` and `MeshTouchesCut`.
pub fn flux(
    surface: &FluxSurface,
    cfg: &ModelConfig,
    cut: &BranchCut,
    sheet: Sheet,
    quad_tol: f64,
) -> Result<ChernResult> {
    if let FluxSurface::Mesh(mesh) = surface {
        mesh.validate_closed()?;
    }
    let mut previous: Option<C64> = None;
    let mut last_increment = f64::INFINITY;
    for level in 0..=MAX_LEVEL {
        let value = integrate_level(surface, cfg, cut, sheet, level)?;
        if let Some(prev) = previous {
            last_increment = (value - prev).norm();
            if last_increment < quad_tol {
                return Ok(ChernResult::from_flux(value, level));
            }
        }
        previous = Some(value);
    }
    Err(Error::QuadratureNotConverged(last_increment, quad_tol))
}

/// A quadrature node: point, outward area vector (unit normal times weight).
struct FluxNode {
    point: ParamPoint,
    area: [f64; 3],
}

fn integrate_level(
    surface: &FluxSurface,
    cfg: &ModelConfig,
    cut: &BranchCut,
    sheet: Sheet,
    level: u32,
) -> Result<C64> {
    let nodes = match surface {
        FluxSurface::Sphere { center, radius } => {
            parametric_nodes(*center, [*radius; 3], level, cfg, cut)?
        }
        FluxSurface::Ellipsoid { center, semi_axes } => {
            parametric_nodes(*center, *semi_axes, level, cfg, cut)?
        }
        FluxSurface::Cube { center, side } => cube_nodes(*center, *side, level, cfg, cut)?,
        FluxSurface::Mesh(mesh) => mesh_nodes(mesh, level, cfg, cut)?,
    };
    let terms: Vec<Result<C64>> = nodes
        .par_iter()
        .map(|node| {
            let sample = curvature_analytic(&node.point, cfg, cut, sheet).map_err(upgrade_cut_error)?;
            Ok(sample.b.dot_real(node.area))
        })
        .collect();
    let mut total = c64(0.0, 0.0);
    for t in terms {
        total += t?;
    }
    Ok(total)
}

fn upgrade_cut_error(e: Error) -> Error {
    match e {
        Error::OnCutSurface(x, y, z) => Error::MeshTouchesCut(x, y, z),
        other => other,
    }
}

/// Gauss-Legendre x trapezoid nodes on an axis-aligned ellipsoid, with the
/// exact area element. Checks every node against the cut and every
/// polar-adjacent node pair for cut crossings.
fn parametric_nodes(
    center: ParamPoint,
    axes: [f64; 3],
    level: u32,
    cfg: &ModelConfig,
    cut: &BranchCut,
) -> Result<Vec<FluxNode>> {
    let n_u = 12usize << level;
    let n_phi = 2 * n_u;
    let (us, wus) = gauss_legendre(n_u);
    let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
    let [a, b, cax] = axes;

    let mut nodes = Vec::with_capacity(n_u * n_phi);
    for j in 0..n_phi {
        let phi = dphi * j as f64;
        let (sphi, cphi) = phi.sin_cos();
        let mut previous: Option<ParamPoint> = None;
        for (u, wu) in us.iter().zip(&wus) {
            let st = (1.0 - u * u).sqrt();
            let point = ParamPoint::new(
                center.x + a * st * cphi,
                center.y + b * st * sphi,
                center.z + cax * u,
            );
            if cut.on_surface(&point, cfg) {
                return Err(Error::MeshTouchesCut(point.x, point.y, point.z));
            }
            if let Some(prev) = previous {
                if cut.segment_crosses(&prev, &point, cfg) {
                    return Err(Error::MeshTouchesCut(point.x, point.y, point.z));
                }
            }
            previous = Some(point);
            let w = wu * dphi;
            nodes.push(FluxNode {
                point,
                area: [b * cax * st * cphi * w, a * cax * st * sphi * w, a * b * u * w],
            });
        }
    }
    Ok(nodes)
}

/// Tensor-product Gauss-Legendre nodes over the six faces of a cube.
fn cube_nodes(
    center: ParamPoint,
    side: f64,
    level: u32,
    cfg: &ModelConfig,
    cut: &BranchCut,
) -> Result<Vec<FluxNode>> {
    let n = 8usize << level;
    let half = side / 2.0;
    let (xs, ws) = gauss_legendre(n);
    let scaled: Vec<f64> = xs.iter().map(|x| x * half).collect();
    let weights: Vec<f64> = ws.iter().map(|w| w * half).collect();

    let mut nodes = Vec::with_capacity(6 * n * n);
    for axis in 0..3usize {
        for sign in [-1.0, 1.0] {
            let mut normal = [0.0; 3];
            normal[axis] = sign;
            let mut face = Vec::with_capacity(n * n);
            for (i, wi) in scaled.iter().zip(&weights) {
                for (j, wj) in scaled.iter().zip(&weights) {
                    let mut coords = [0.0; 3];
                    coords[axis] = sign * half;
                    coords[(axis + 1) % 3] = *i;
                    coords[(axis + 2) % 3] = *j;
                    let point = ParamPoint::new(
                        center.x + coords[0],
                        center.y + coords[1],
                        center.z + coords[2],
                    );
                    if cut.on_surface(&point, cfg) {
                        return Err(Error::MeshTouchesCut(point.x, point.y, point.z));
                    }
                    face.push(point);
                    let w = wi * wj;
                    nodes.push(FluxNode {
                        point,
                        area: [normal[0] * w, normal[1] * w, normal[2] * w],
                    });
                }
            }
            // Cut crossings between neighbors along both grid directions.
            for i in 0..n {
                for j in 0..n {
                    let p = &face[i * n + j];
                    if j + 1 < n && cut.segment_crosses(p, &face[i * n + j + 1], cfg) {
                        return Err(Error::MeshTouchesCut(p.x, p.y, p.z));
                    }
                    if i + 1 < n && cut.segment_crosses(p, &face[(i + 1) * n + j], cfg) {
                        return Err(Error::MeshTouchesCut(p.x, p.y, p.z));
                    }
                }
            }
        }
    }
    Ok(nodes)
}

fn mesh_nodes(
    mesh: &SurfaceMesh,
    level: u32,
    cfg: &ModelConfig,
    cut: &BranchCut,
) -> Result<Vec<FluxNode>> {
    // Refined levels re-quadrature the same polyhedron with flat subdivision.
    let refined;
    let working = if level == 0 {
        mesh
    } else {
        let mut m = mesh.subdivide_flat();
        for _ in 1..level {
            m = m.subdivide_flat();
        }
        refined = m;
        &refined
    };
    for t in &working.triangles {
        for k in 0..3 {
            let a = &working.vertices[t[k]];
            let b = &working.vertices[t[(k + 1) % 3]];
            if cut.segment_crosses(a, b, cfg) {
                return Err(Error::MeshTouchesCut(a.x, a.y, a.z));
            }
        }
    }
    let sign = if working.outward { 1.0 } else { -1.0 };
    Ok(working
        .nodes
        .iter()
        .map(|n| FluxNode {
            point: n.point,
            area: [
                sign * n.normal[0] * n.weight,
                sign * n.normal[1] * n.weight,
                sign * n.normal[2] * n.weight,
            ],
        })
        .collect())
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let (mut p, mut dp) = legendre_pair(n, x);
        for _ in 0..100 {
            let dx = p / dp;
            x -= dx;
            let next = legendre_pair(n, x);
            p = next.0;
            dp = next.1;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        let (_, dp) = legendre_pair(n, 0.0);
        nodes[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (dp * dp);
    }
    (nodes, weights)
}

/// Value and derivative of the degree-n Legendre polynomial.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = pk;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branching::BranchCut;

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [2usize, 5, 16, 33] {
            let (x, w) = gauss_legendre(n);
            let total: f64 = w.iter().sum();
            assert!((total - 2.0).abs() < 1e-14, "weights at n={n}");
            let quad: f64 = x.iter().zip(&w).map(|(xi, wi)| xi * xi * wi).sum();
            assert!((quad - 2.0 / 3.0).abs() < 1e-13, "x^2 at n={n}");
        }
    }

    #[test]
    fn sphere_flux_is_minus_two_pi() {
        let cfg = ModelConfig::dirac(1.0);
        let cut = BranchCut::natural();
        let surface = FluxSurface::Sphere { center: ParamPoint::default(), radius: 2.0 };
        let result = flux(&surface, &cfg, &cut, Sheet::One, 1e-6).unwrap();
        assert!(
            (result.flux.re + TAU).abs() / TAU < 1e-6,
            "flux {} vs {}",
            result.flux,
            -TAU
        );
        assert!(result.imag_residual < 1e-9);
        assert!((result.normalized.re + 1.0).abs() < 1e-6);

        let result2 = flux(&surface, &cfg, &cut, Sheet::Two, 1e-6).unwrap();
        assert!((result2.flux.re - TAU).abs() / TAU < 1e-6);
    }

    #[test]
    fn flipped_orientation_negates_the_flux() {
        let cfg = ModelConfig::dirac(1.0);
        let surface = FluxSurface::Sphere { center: ParamPoint::default(), radius: 2.0 };
        let flipped = BranchCut::natural()
            .with_orientation(crate::branching::Orientation::Sheet2Outside);
        let result = flux(&surface, &cfg, &flipped, Sheet::One, 1e-6).unwrap();
        assert!((result.flux.re - TAU).abs() / TAU < 1e-6, "flux {}", result.flux);
    }

    #[test]
    fn empty_sphere_has_zero_flux() {
        let cfg = ModelConfig::dirac(1.0);
        let cut = BranchCut::natural();
        let surface = FluxSurface::Sphere {
            center: ParamPoint::new(2.0, 0.0, 0.0),
            radius: 0.4,
        };
        let result = flux(&surface, &cfg, &cut, Sheet::One, 1e-8).unwrap();
        assert!(result.flux.norm() < 1e-6, "flux {}", result.flux);
    }

    #[test]
    fn sphere_under_plane_cut_is_rejected() {
        let cfg = ModelConfig::dirac(1.0);
        let cut = BranchCut::infinite_plane();
        let surface = FluxSurface::Sphere { center: ParamPoint::default(), radius: 2.0 };
        assert!(matches!(
            flux(&surface, &cfg, &cut, Sheet::One, 1e-6),
            Err(Error::MeshTouchesCut(..))
        ));
    }

    #[test]
    fn cube_under_plane_cut_is_rejected() {
        let cfg = ModelConfig::dirac(1.0);
        let cut = BranchCut::infinite_plane();
        let surface = FluxSurface::Cube { center: ParamPoint::default(), side: 4.0 };
        assert!(matches!(
            flux(&surface, &cfg, &cut, Sheet::One, 1e-6),
            Err(Error::MeshTouchesCut(..))
        ));
    }

    #[test]
    fn icosphere_mesh_flux() {
        let cfg = ModelConfig::dirac(1.0);
        let cut = BranchCut::natural();
        let mesh = SurfaceMesh::icosphere(ParamPoint::default(), 2.0, 3);
        let result = flux(&FluxSurface::Mesh(mesh), &cfg, &cut, Sheet::One, 1e-5).unwrap();
        assert!(
            (result.flux.re + TAU).abs() / TAU < 1e-3,
            "mesh flux {}",
            result.flux
        );
    }

    #[test]
    fn open_mesh_is_rejected() {
        let cfg = ModelConfig::dirac(1.0);
        let cut = BranchCut::natural();
        let mesh = SurfaceMesh::hemisphere(ParamPoint::default(), 2.0, 2);
        assert!(matches!(
            flux(&FluxSurface::Mesh(mesh), &cfg, &cut, Sheet::One, 1e-6),
            Err(Error::NotClosed(..))
        ));
    }
}
