//! Branch-cut strategies and Möbius-loop detection.
//!
//! A branch cut assigns to every off-EP point a sheet label, i.e. decides
//! which eigenstate is called "branch 1" there. Every strategy is expressed
//! as the principal-branch labeling composed with a swap region Omega: the
//! labeled field is then discontinuous exactly on the symmetric difference
//! of the boundary of Omega and the natural disk, a surface whose edge is
//! always the exceptional circle.
//!
//! Loop tracing never consults the cut: it follows the energy (or the angle
//! of the Hermitian model) by nearest-value continuation, refining the step
//! adaptively when the two candidates get too close to call.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{c64, C64};
use crate::spectra::{
    self, energies, eigensystem, hermitian_eigensystem, hermitian_theta, BiorthoSystem,
    BranchRule, ModelConfig, ParamPoint, Sheet,
};

/// Which eigenstate is labeled "branch 1" outside the swap region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    Sheet1Outside,
    Sheet2Outside,
}

/// Membership predicate for a user-supplied swap region.
pub type RegionPredicate = Arc<dyn Fn(&ParamPoint) -> bool + Send + Sync>;

/// The supported cut geometries. The boundary of every swap region, combined
/// with the natural disk, is a surface bounded by the EP circle.
#[derive(Clone)]
pub enum CutKind {
    /// No swap region: labels follow the principal square root everywhere;
    /// the labeled field jumps across the disk p_x^2+p_y^2 < s^2, p_z = 0.
    NaturalDisk,
    /// Swap inside the dome-capped region Omega bounded below by the disk
    /// and above by p_x^2+p_y^2+(p_z s/h)^2 = s^2, p_z >= 0; the labeled
    /// field jumps across the dome shell only.
    FiniteDome { height: f64 },
    /// Swap in the upper half-space p_z > 0; the labeled field jumps across
    /// the infinite plane outside the EP circle.
    InfinitePlane,
    /// Swap inside an arbitrary region. Membership is the caller's contract;
    /// the cut surface cannot be located geometrically, only by sampling.
    CustomRegion(RegionPredicate),
}

impl fmt::Debug for CutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutKind::NaturalDisk => write!(f, "NaturalDisk"),
            CutKind::FiniteDome { height } => write!(f, "FiniteDome {{ height: {height} }}"),
            CutKind::InfinitePlane => write!(f, "InfinitePlane"),
            CutKind::CustomRegion(_) => write!(f, "CustomRegion(..)"),
        }
    }
}

/// A branch-cut strategy: geometry plus orientation.
#[derive(Clone, Debug)]
pub struct BranchCut {
    pub kind: CutKind,
    pub orientation: Orientation,
}

impl BranchCut {
    pub fn natural() -> Self {
        BranchCut { kind: CutKind::NaturalDisk, orientation: Orientation::default() }
    }

    pub fn finite_dome(height: f64) -> Self {
        assert!(height > 0.0, "dome height must be positive, got {height}");
        BranchCut { kind: CutKind::FiniteDome { height }, orientation: Orientation::default() }
    }

    pub fn infinite_plane() -> Self {
        BranchCut { kind: CutKind::InfinitePlane, orientation: Orientation::default() }
    }

    pub fn custom(region: RegionPredicate) -> Self {
        BranchCut { kind: CutKind::CustomRegion(region), orientation: Orientation::default() }
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    /// Is `p` inside the swap region Omega of this cut?
    pub fn in_swap_region(&self, p: &ParamPoint, cfg: &ModelConfig) -> bool {
        let s = cfg.s;
        match &self.kind {
            CutKind::NaturalDisk => false,
            CutKind::FiniteDome { height } => {
                p.z >= 0.0 && {
                    let zs = p.z * s / height;
                    p.radial_sq() + zs * zs < s * s
                }
            }
            CutKind::InfinitePlane => p.z > 0.0,
            CutKind::CustomRegion(pred) => pred(p),
        }
    }

    /// Approximate distance from `p` to the surface across which the labeled
    /// field is discontinuous. `None` for custom regions, where the surface
    /// is not known geometrically.
    pub fn surface_distance(&self, p: &ParamPoint, cfg: &ModelConfig) -> Option<f64> {
        let s = cfg.s;
        let rho = p.radial_sq().sqrt();
        match &self.kind {
            CutKind::NaturalDisk => Some(p.z.hypot((rho - s).max(0.0))),
            CutKind::InfinitePlane => Some(p.z.hypot((s - rho).max(0.0))),
            CutKind::FiniteDome { height } => {
                if p.z < 0.0 {
                    // Nearest dome points lie on the rim (the EP circle).
                    Some(p.z.hypot(rho - s))
                } else {
                    // First-order distance |g| / |grad g| to the level set
                    // g = rho^2 + (z s / h)^2 - s^2 = 0.
                    let zh = p.z * s / height;
                    let g = p.radial_sq() + zh * zh - s * s;
                    let grad = 2.0 * rho.hypot(zh * s / height);
                    if grad > 0.0 { Some(g.abs() / grad) } else { Some(s) }
                }
            }
            CutKind::CustomRegion(_) => None,
        }
    }

    /// Is `p` on the labeled-field discontinuity surface within tolerance?
    pub fn on_surface(&self, p: &ParamPoint, cfg: &ModelConfig) -> bool {
        match self.surface_distance(p, cfg) {
            Some(d) => d <= cfg.cut_tol_abs(),
            None => false,
        }
    }

    /// Does the labeled field jump somewhere on the segment [a, b]?
    ///
    /// The labeled field is the principal-branch field with sheets swapped
    /// inside Omega, so it is discontinuous across a segment exactly when
    /// the swap membership changes XOR the segment crosses the natural disk.
    /// (Parity test: intended for short segments such as stencil arms and
    /// quadrature-node spacings.)
    pub fn segment_crosses(&self, a: &ParamPoint, b: &ParamPoint, cfg: &ModelConfig) -> bool {
        let swap_changed = self.in_swap_region(a, cfg) != self.in_swap_region(b, cfg);
        swap_changed != segment_crosses_disk(a, b, cfg.s)
    }
}

/// Does the open segment (a, b) cross the disk p_x^2+p_y^2 < s^2, p_z = 0?
fn segment_crosses_disk(a: &ParamPoint, b: &ParamPoint, s: f64) -> bool {
    if (a.z > 0.0) == (b.z > 0.0) {
        return false;
    }
    let t = a.z / (a.z - b.z);
    let q = a.lerp(*b, t);
    q.radial_sq() < s * s
}

/// Sheet label at `p` under the given cut.
///
/// Fails with `OnCutSurface` when `p` is within `cut_tol` of the labeled
/// field's discontinuity surface and with `EPDegenerate` near the EP circle.
pub fn label_point(p: &ParamPoint, cut: &BranchCut, cfg: &ModelConfig) -> Result<Sheet> {
    if spectra::is_exceptional(p, cfg) {
        return Err(Error::ep(p));
    }
    if cut.on_surface(p, cfg) {
        return Err(Error::on_cut(p));
    }
    let mut sheet = if cut.in_swap_region(p, cfg) { Sheet::Two } else { Sheet::One };
    if cut.orientation == Orientation::Sheet2Outside {
        sheet = sheet.other();
    }
    Ok(sheet)
}

/// A point-to-sheet labeling bound to the cut that generated it.
#[derive(Clone, Debug)]
pub struct SheetLabeling {
    pub cut: BranchCut,
    pub cfg: ModelConfig,
}

impl SheetLabeling {
    pub fn new(cut: BranchCut, cfg: ModelConfig) -> Self {
        SheetLabeling { cut, cfg }
    }

    pub fn label(&self, p: &ParamPoint) -> Result<Sheet> {
        label_point(p, &self.cut, &self.cfg)
    }
}

/// Eigensystem permuted so that index 0 carries the labeled branch. This is
/// the single-valued field all curvature integrals consume.
pub fn labeled_eigensystem(
    p: &ParamPoint,
    cut: &BranchCut,
    cfg: &ModelConfig,
) -> Result<BiorthoSystem> {
    let label = label_point(p, cut, cfg)?;
    let sys = eigensystem(p, cfg, BranchRule::Principal)?;
    Ok(match label {
        Sheet::One => sys,
        Sheet::Two => sys.swapped(),
    })
}

/// Same labeled field restricted to the closed-form gauge (errors on the
/// p_z axis instead of switching to the matrix-inverse patch). Smooth in a
/// neighborhood of any admissible point, which finite differences require.
pub fn labeled_analytic_eigensystem(
    p: &ParamPoint,
    cut: &BranchCut,
    cfg: &ModelConfig,
) -> Result<BiorthoSystem> {
    let label = label_point(p, cut, cfg)?;
    let sys = spectra::analytic_eigensystem(p, cfg, BranchRule::Principal)?;
    Ok(match label {
        Sheet::One => sys,
        Sheet::Two => sys.swapped(),
    })
}

/// How a closed path is parametrized between its stored samples.
#[derive(Clone, Debug)]
enum LoopPath {
    /// Exact circle: center + radius (cos(2 pi t) e1 + sin(2 pi t) e2).
    Circle { center: ParamPoint, radius: f64, e1: [f64; 3], e2: [f64; 3], turns: u32 },
    /// Straight segments between consecutive samples.
    Polyline,
}

/// A sampled closed path, `points[0] == points[N]`, with the continuous
/// parametrization the samples came from so tracking can refine steps.
#[derive(Clone, Debug)]
pub struct ParamLoop {
    points: Vec<ParamPoint>,
    params: Vec<f64>,
    path: LoopPath,
}

impl ParamLoop {
    /// Circle through parameter space. `samples` is the number of segments
    /// (at least 8); the stored point list has `samples + 1` entries with the
    /// first repeated at the end.
    pub fn circle(
        center: ParamPoint,
        radius: f64,
        normal: [f64; 3],
        samples: usize,
    ) -> Result<ParamLoop> {
        ParamLoop::circle_turns(center, radius, normal, samples, 1)
    }

    /// Circle traversed `turns` times in a row.
    pub fn circle_turns(
        center: ParamPoint,
        radius: f64,
        normal: [f64; 3],
        samples: usize,
        turns: u32,
    ) -> Result<ParamLoop> {
        if radius <= 0.0 || radius.is_nan() || samples < 8 || turns == 0 {
            return Err(Error::InvalidInput(format!(
                "circle loop needs radius > 0, samples >= 8 and turns >= 1 (got {radius}, {samples}, {turns})"
            )));
        }
        let n = (normal[0] * normal[0] + normal[1] * normal[1] + normal[2] * normal[2]).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidInput("circle normal must be nonzero and finite".into()));
        }
        let nh = [normal[0] / n, normal[1] / n, normal[2] / n];
        // Any in-plane frame will do; pick the axis least aligned with n.
        let seed = if nh[0].abs() <= nh[1].abs() && nh[0].abs() <= nh[2].abs() {
            [1.0, 0.0, 0.0]
        } else if nh[1].abs() <= nh[2].abs() {
            [0.0, 1.0, 0.0]
        } else {
            [0.0, 0.0, 1.0]
        };
        let mut e1 = [
            seed[1] * nh[2] - seed[2] * nh[1],
            seed[2] * nh[0] - seed[0] * nh[2],
            seed[0] * nh[1] - seed[1] * nh[0],
        ];
        let e1n = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
        for v in e1.iter_mut() {
            *v /= e1n;
        }
        let e2 = [
            nh[1] * e1[2] - nh[2] * e1[1],
            nh[2] * e1[0] - nh[0] * e1[2],
            nh[0] * e1[1] - nh[1] * e1[0],
        ];
        let path = LoopPath::Circle { center, radius, e1, e2, turns };
        let total = samples * turns as usize;
        let mut points = Vec::with_capacity(total + 1);
        let mut params = Vec::with_capacity(total + 1);
        for k in 0..=total {
            let t = k as f64 / total as f64;
            params.push(t);
            points.push(circle_at(&path, t));
        }
        // Exact closure regardless of rounding in the trig evaluations.
        let first = points[0];
        *points.last_mut().unwrap() = first;
        Ok(ParamLoop { points, params, path })
    }

    /// Closed polyline through the given vertices. The path is closed
    /// automatically when the last vertex differs from the first.
    pub fn polyline(mut vertices: Vec<ParamPoint>) -> Result<ParamLoop> {
        if vertices.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "polyline loop needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.first() != vertices.last() {
            let first = vertices[0];
            vertices.push(first);
        }
        let n = vertices.len() - 1;
        let params = (0..=n).map(|k| k as f64 / n as f64).collect();
        Ok(ParamLoop { points: vertices, params, path: LoopPath::Polyline })
    }

    pub fn points(&self) -> &[ParamPoint] {
        &self.points
    }

    /// Path parameter of each stored sample, in [0, 1].
    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Point at path parameter `t` in [0, 1].
    pub fn at(&self, t: f64) -> ParamPoint {
        match &self.path {
            LoopPath::Circle { .. } => circle_at(&self.path, t),
            LoopPath::Polyline => {
                let n = self.points.len() - 1;
                let x = (t.clamp(0.0, 1.0)) * n as f64;
                let k = (x.floor() as usize).min(n - 1);
                self.points[k].lerp(self.points[k + 1], x - k as f64)
            }
        }
    }

    /// Samples must stay clear of the EP circle for tracking to make sense.
    pub fn validate(&self, cfg: &ModelConfig) -> Result<()> {
        for p in &self.points {
            if !p.is_finite() {
                return Err(Error::InvalidInput("loop sample is not finite".into()));
            }
            if spectra::is_exceptional(p, cfg) {
                return Err(Error::ep(p));
            }
        }
        Ok(())
    }
}

fn circle_at(path: &LoopPath, t: f64) -> ParamPoint {
    match path {
        LoopPath::Circle { center, radius, e1, e2, turns } => {
            let ang = 2.0 * std::f64::consts::PI * t * *turns as f64;
            let (sa, ca) = ang.sin_cos();
            ParamPoint::new(
                center.x + radius * (ca * e1[0] + sa * e2[0]),
                center.y + radius * (ca * e1[1] + sa * e2[1]),
                center.z + radius * (ca * e1[2] + sa * e2[2]),
            )
        }
        LoopPath::Polyline => unreachable!(),
    }
}

/// Outcome of tracing a closed loop.
#[derive(Clone, Debug)]
pub struct MobiusReport {
    /// Did continuous tracking return on the other branch?
    pub swapped: bool,
    /// Signed count of crossings through the degenerate disk (EP-circle
    /// linking number for the Dirac model, monopole-disk crossings for the
    /// Hermitian one).
    pub linking_number: i32,
    /// Tracked energy at each stored sample.
    pub energy_trace: Vec<C64>,
    /// Pairing of the transported state at the end point with the two
    /// initial eigenvectors.
    pub final_overlap: [C64; 2],
}

/// Trace the Dirac-model energies around a closed loop by nearest-energy
/// continuation. Tracking never consults any branch cut; the swap flag is a
/// property of the loop alone.
pub fn trace_loop(path: &ParamLoop, cfg: &ModelConfig) -> Result<MobiusReport> {
    cfg_expect_dirac(cfg);
    path.validate(cfg)?;
    let points = path.points();
    let start_pair = energies(&points[0], cfg, BranchRule::Principal);
    let mut tracked = start_pair.e1;
    let mut trace = Vec::with_capacity(points.len());
    trace.push(tracked);

    for k in 1..points.len() {
        tracked = advance_energy(path, cfg, tracked, path.params[k - 1], path.params[k], 0)?;
        trace.push(tracked);
    }

    let swapped = (tracked - start_pair.e2).norm() < (tracked - start_pair.e1).norm();
    let linking_number = disk_crossings(points, cfg.s);

    let sys0 = eigensystem(&points[0], cfg, BranchRule::Principal)?;
    let transported = if swapped { sys0.psi[1] } else { sys0.psi[0] };
    let final_overlap = [
        sys0.phi[0].pairing(&transported),
        sys0.phi[1].pairing(&transported),
    ];

    Ok(MobiusReport { swapped, linking_number, energy_trace: trace, final_overlap })
}

fn advance_energy(
    path: &ParamLoop,
    cfg: &ModelConfig,
    prev: C64,
    t0: f64,
    t1: f64,
    depth: u32,
) -> Result<C64> {
    let pair = energies(&path.at(t1), cfg, BranchRule::Principal);
    let d1 = (pair.e1 - prev).norm();
    let d2 = (pair.e2 - prev).norm();
    if (d1 - d2).abs() > crate::defaults::TRACK_TIE_TOL {
        return Ok(if d1 < d2 { pair.e1 } else { pair.e2 });
    }
    if depth >= crate::defaults::MAX_TRACK_REFINEMENTS {
        return Err(Error::AmbiguousTracking(t1));
    }
    let tm = 0.5 * (t0 + t1);
    let mid = advance_energy(path, cfg, prev, t0, tm, depth + 1)?;
    advance_energy(path, cfg, mid, tm, t1, depth + 1)
}

/// Trace the Hermitian comparison model around a loop in (x, y, z) by
/// continuous unwrapping of the angle map. A net advance by an odd multiple
/// of 2 pi means the "+" band came back as the "-" band.
pub fn trace_loop_hermitian(path: &ParamLoop, r: f64) -> Result<MobiusReport> {
    assert!(r > 0.0, "disk radius must be positive");
    let points = path.points();
    if points.is_empty() {
        return Err(Error::InvalidInput("empty loop".into()));
    }
    let theta0 = hermitian_theta(points[0].x, points[0].y, points[0].z, r)?;
    let mut lifted = theta0;
    let mut trace = Vec::with_capacity(points.len());
    trace.push(c64((lifted / 2.0).cos(), 0.0));

    for k in 1..points.len() {
        lifted = advance_theta(path, r, lifted, path.params[k - 1], path.params[k], 0)?;
        trace.push(c64((lifted / 2.0).cos(), 0.0));
    }

    let tau = 2.0 * std::f64::consts::PI;
    let winding = ((lifted - theta0) / tau).round() as i64;
    let swapped = winding.rem_euclid(2) == 1;
    let linking_number = disk_crossings(points, r);

    // Transported "+" state at the lifted end angle against the two start
    // eigenvectors; real inner products.
    let end = hermitian_eigensystem(lifted);
    let base = hermitian_eigensystem(theta0);
    let dot = |a: [f64; 2], b: [f64; 2]| c64(a[0] * b[0] + a[1] * b[1], 0.0);
    let final_overlap = [dot(base.psi_plus, end.psi_plus), dot(base.psi_minus, end.psi_plus)];

    Ok(MobiusReport { swapped, linking_number, energy_trace: trace, final_overlap })
}

fn advance_theta(
    path: &ParamLoop,
    r: f64,
    prev: f64,
    t0: f64,
    t1: f64,
    depth: u32,
) -> Result<f64> {
    let p = path.at(t1);
    let theta = hermitian_theta(p.x, p.y, p.z, r)?;
    let tau = 2.0 * std::f64::consts::PI;
    // Lift theta to the 2 pi branch nearest the running value.
    let mut delta = (theta - prev).rem_euclid(tau);
    if delta > tau / 2.0 {
        delta -= tau;
    }
    // The two nearest lifts are equidistant when the step is half a turn.
    let ambiguous = (delta.abs() - tau / 2.0).abs() <= crate::defaults::TRACK_TIE_TOL;
    if !ambiguous && delta.abs() <= tau / 4.0 {
        return Ok(prev + delta);
    }
    if depth >= crate::defaults::MAX_TRACK_REFINEMENTS {
        return if ambiguous { Err(Error::AmbiguousTracking(t1)) } else { Ok(prev + delta) };
    }
    let tm = 0.5 * (t0 + t1);
    let mid = advance_theta(path, r, prev, t0, tm, depth + 1)?;
    advance_theta(path, r, mid, tm, t1, depth + 1)
}

/// Signed crossings of the closed polyline through the open disk of the
/// given radius in the z = 0 plane (+1 upward, -1 downward).
pub fn disk_crossings(points: &[ParamPoint], radius: f64) -> i32 {
    let mut total = 0;
    for pair in points.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if (a.z > 0.0) == (b.z > 0.0) {
            continue;
        }
        let t = a.z / (a.z - b.z);
        let q = a.lerp(*b, t);
        if q.radial_sq() < radius * radius {
            total += if b.z > a.z { 1 } else { -1 };
        }
    }
    total
}

fn cfg_expect_dirac(cfg: &ModelConfig) {
    assert!(
        cfg.kind == spectra::ModelKind::NonHermitianDirac,
        "loop tracing over energies is defined for the non-Hermitian Dirac model"
    );
}
