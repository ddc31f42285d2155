//! Berry connection and curvature fields.
//!
//! The closed-form curvature of the Dirac model is
//! `B_1 = -(p + i s z_hat) / (2 (p^2 - s^2 + 2 i p_z s)^{3/2})`,
//! with `B_2 = -B_1`; the 3/2 power is always the cube of the same branch
//! square root that defines the energies, so energies and fields live on
//! consistent sheets. Finite-difference routes build the same quantities
//! from gradients of the labeled eigenvector field and serve as the
//! independent check, including for the auxiliary operator
//! `F = -i sum_n |grad psi_n><phi^n|` and its identities.

use rayon::prelude::*;

use crate::branching::{label_point, labeled_analytic_eigensystem, BranchCut};
use crate::error::{Error, Result};
use crate::linalg::{c64, C64, CVec3, MatVec3, Vec2, I};
use crate::spectra::{
    self, BiorthoSystem, BranchRule, ModelConfig, ParamPoint, Sheet,
};

/// Berry curvature (and optionally connection) at a point for one sheet.
#[derive(Clone, Copy, Debug)]
pub struct CurvatureSample {
    pub p: ParamPoint,
    /// Principal-branch index of the field actually evaluated.
    pub sheet: Sheet,
    /// Complex 3-vector Berry curvature.
    pub b: CVec3,
    /// Complex 3-vector Berry connection, when the evaluation route has it.
    pub a: Option<CVec3>,
}

/// Default finite-difference step at `p`.
pub fn default_step(p: &ParamPoint, cfg: &ModelConfig) -> f64 {
    crate::defaults::FD_STEP_REL * cfg.s.max(p.norm())
}

/// Closed-form sheet-1 curvature on the principal branch.
fn closed_form_b1(p: &ParamPoint, cfg: &ModelConfig) -> CVec3 {
    let w = BranchRule::Principal.sqrt(spectra::radicand(p, cfg));
    let q32 = w * w * w;
    let scale = c64(-0.5, 0.0) / q32;
    CVec3::new(
        c64(p.x, 0.0) * scale,
        c64(p.y, 0.0) * scale,
        c64(p.z, cfg.s) * scale,
    )
}

/// Curvature from the closed form on the sheet selected by the cut's
/// labeling; requesting `Sheet::Two` negates the field.
pub fn curvature_analytic(
    p: &ParamPoint,
    cfg: &ModelConfig,
    cut: &BranchCut,
    sheet: Sheet,
) -> Result<CurvatureSample> {
    let labeled = label_point(p, cut, cfg)?;
    let branch = match sheet {
        Sheet::One => labeled,
        Sheet::Two => labeled.other(),
    };
    let b1 = closed_form_b1(p, cfg);
    let b = match branch {
        Sheet::One => b1,
        Sheet::Two => -b1,
    };
    Ok(CurvatureSample { p: *p, sheet: branch, b, a: None })
}

/// Central-difference gradients of the right and left vectors of one sheet.
/// Only the six shifted points are evaluated; the center is not needed.
struct SheetGradients {
    /// grad psi indexed [axis][hilbert-component].
    dpsi: [Vec2; 3],
    dphi: [Vec2; 3],
}

fn sheet_gradients<F>(field: &F, p: &ParamPoint, h: f64, sheet: Sheet) -> Result<SheetGradients>
where
    F: Fn(&ParamPoint) -> Result<BiorthoSystem> + ?Sized,
{
    let idx = sheet.index();
    let inv = c64(0.5 / h, 0.0);
    let mut dpsi = [Vec2::default(); 3];
    let mut dphi = [Vec2::default(); 3];
    for axis in 0..3 {
        let plus = field(&p.shifted(axis, h))?;
        let minus = field(&p.shifted(axis, -h))?;
        dpsi[axis] = (plus.psi[idx] - minus.psi[idx]).scale(inv);
        dphi[axis] = (plus.phi[idx] - minus.phi[idx]).scale(inv);
    }
    Ok(SheetGradients { dpsi, dphi })
}

/// Curvature `i <grad phi| x |grad psi>` of one sheet of an arbitrary smooth
/// eigensystem field. The bra gradient is conjugated componentwise before
/// the cross product.
///
/// The field's gauge must stay regular across the stencil: the closed-form
/// gauge degenerates on the p_z axis for the complementary sheet, and on the
/// negative axis for the tracked one; sheet-1 stencils centered on the
/// positive axis (the spinor-limit monopole, for instance) are fine.
pub fn curvature_fd_field<F>(field: &F, p: &ParamPoint, h: f64, sheet: Sheet) -> Result<CVec3>
where
    F: Fn(&ParamPoint) -> Result<BiorthoSystem> + ?Sized,
{
    let g = sheet_gradients(field, p, h, sheet)?;
    let mut b = CVec3::zero();
    for comp in 0..2 {
        let gphi = CVec3::new(g.dphi[0].0[comp], g.dphi[1].0[comp], g.dphi[2].0[comp]);
        let gpsi = CVec3::new(g.dpsi[0].0[comp], g.dpsi[1].0[comp], g.dpsi[2].0[comp]);
        b = b + gphi.conj().cross(&gpsi);
    }
    Ok(b.scale(I))
}

/// Connection `i <phi|grad|psi>` of one sheet of an arbitrary smooth field.
pub fn connection_field<F>(field: &F, p: &ParamPoint, h: f64, sheet: Sheet) -> Result<CVec3>
where
    F: Fn(&ParamPoint) -> Result<BiorthoSystem> + ?Sized,
{
    let g = sheet_gradients(field, p, h, sheet)?;
    let phi = field(p)?.phi[sheet.index()];
    Ok(CVec3::new(
        phi.pairing(&g.dpsi[0]),
        phi.pairing(&g.dpsi[1]),
        phi.pairing(&g.dpsi[2]),
    )
    .scale(I))
}

fn guard_stencil(p: &ParamPoint, cfg: &ModelConfig, cut: &BranchCut, h: f64) -> Result<()> {
    label_point(p, cut, cfg)?;
    for axis in 0..3 {
        let a = p.shifted(axis, -h);
        let b = p.shifted(axis, h);
        if cut.segment_crosses(&a, &b, cfg) {
            return Err(Error::StencilCrossesCut(p.x, p.y, p.z));
        }
    }
    Ok(())
}

/// Stencils whose center is within this many steps of the p_z axis are
/// evaluated in the matrix-inverse gauge, which stays smooth across the
/// axis where the closed forms degenerate.
const AXIS_RING_STEPS: f64 = 8.0;

/// Smooth labeled eigensystem field for stencil evaluation around `center`:
/// closed forms away from the axis, the robust gauge inside the axis ring.
fn labeled_field<'a>(
    cfg: &'a ModelConfig,
    cut: &'a BranchCut,
    center: &ParamPoint,
    h: f64,
) -> impl Fn(&ParamPoint) -> Result<BiorthoSystem> + 'a {
    let ring = AXIS_RING_STEPS * h;
    let use_robust = center.radial_sq() <= ring * ring;
    move |q: &ParamPoint| {
        let label = label_point(q, cut, cfg)?;
        let sys = if use_robust {
            spectra::robust_eigensystem_principal(q, cfg, BranchRule::Principal)?
        } else {
            return labeled_analytic_eigensystem(q, cut, cfg);
        };
        Ok(match label {
            Sheet::One => sys,
            Sheet::Two => sys.swapped(),
        })
    }
}

/// Finite-difference curvature of the labeled field; agrees with
/// [`curvature_analytic`] to O(h^2). The stencil must not straddle the cut.
pub fn curvature_fd(
    p: &ParamPoint,
    cfg: &ModelConfig,
    cut: &BranchCut,
    h: f64,
    sheet: Sheet,
) -> Result<CurvatureSample> {
    guard_stencil(p, cfg, cut, h)?;
    let field = labeled_field(cfg, cut, p, h);
    let b = curvature_fd_field(&field, p, h, sheet)?;
    // The connection also needs the center vectors, which the closed-form
    // gauge lacks on the axis; leave it out there rather than fail the
    // curvature.
    let a = connection_field(&field, p, h, sheet).ok();
    let labeled = label_point(p, cut, cfg)?;
    let branch = match sheet {
        Sheet::One => labeled,
        Sheet::Two => labeled.other(),
    };
    Ok(CurvatureSample { p: *p, sheet: branch, b, a })
}

/// Finite-difference Berry connection of the labeled field.
pub fn connection(
    p: &ParamPoint,
    cfg: &ModelConfig,
    cut: &BranchCut,
    h: f64,
    sheet: Sheet,
) -> Result<CVec3> {
    guard_stencil(p, cfg, cut, h)?;
    connection_field(&labeled_field(cfg, cut, p, h), p, h, sheet)
}

/// The auxiliary operator `F = -i sum_n |grad psi_n><phi^n|` of an arbitrary
/// smooth field, one 2x2 matrix per direction.
pub fn f_operator_field<F>(field: &F, p: &ParamPoint, h: f64) -> Result<MatVec3>
where
    F: Fn(&ParamPoint) -> Result<BiorthoSystem> + ?Sized,
{
    let center = field(p)?;
    let inv = c64(0.5 / h, 0.0);
    let mut out = MatVec3::zero();
    for axis in 0..3 {
        let plus = field(&p.shifted(axis, h))?;
        let minus = field(&p.shifted(axis, -h))?;
        for n in 0..2 {
            let dpsi = (plus.psi[n] - minus.psi[n]).scale(inv);
            out.0[axis] = out.0[axis] + dpsi.outer(&center.phi[n]).scale(-I);
        }
    }
    Ok(out)
}

/// The same operator built from the completeness relation,
/// `F = +i sum_n |psi_n><grad phi^n|`; agrees with [`f_operator`] to O(h^2).
pub fn f_operator_completeness(
    p: &ParamPoint,
    cfg: &ModelConfig,
    cut: &BranchCut,
    h: f64,
) -> Result<MatVec3> {
    guard_stencil(p, cfg, cut, h)?;
    let field = labeled_field(cfg, cut, p, h);
    let center = field(p)?;
    let inv = c64(0.5 / h, 0.0);
    let mut out = MatVec3::zero();
    for axis in 0..3 {
        let plus = field(&p.shifted(axis, h))?;
        let minus = field(&p.shifted(axis, -h))?;
        for n in 0..2 {
            let dphi = (plus.phi[n] - minus.phi[n]).scale(inv);
            out.0[axis] = out.0[axis] + center.psi[n].outer(&dphi).scale(I);
        }
    }
    Ok(out)
}

/// `F` for the labeled field.
pub fn f_operator(p: &ParamPoint, cfg: &ModelConfig, cut: &BranchCut, h: f64) -> Result<MatVec3> {
    guard_stencil(p, cfg, cut, h)?;
    f_operator_field(&labeled_field(cfg, cut, p, h), p, h)
}

/// Curl of `F` by nested central differences, `(curl F)_a = eps_abc d_b F_c`.
/// Satisfies `curl F = i F x F` with this crate's component ordering.
///
/// `F` is gauge dependent, so every nested evaluation must share one smooth
/// gauge: the field is fixed once around `p`, wide enough for the doubled
/// stencil reach.
pub fn f_operator_curl(
    p: &ParamPoint,
    cfg: &ModelConfig,
    cut: &BranchCut,
    h: f64,
) -> Result<MatVec3> {
    guard_stencil(p, cfg, cut, 2.0 * h)?;
    let field = labeled_field(cfg, cut, p, 2.0 * h);
    let mut plus = Vec::with_capacity(3);
    let mut minus = Vec::with_capacity(3);
    for axis in 0..3 {
        plus.push(f_operator_field(&field, &p.shifted(axis, h), h)?);
        minus.push(f_operator_field(&field, &p.shifted(axis, -h), h)?);
    }
    let d = |b: usize, c: usize| (plus[b].0[c] - minus[b].0[c]).scale(c64(0.5 / h, 0.0));
    Ok(MatVec3([
        d(1, 2) - d(2, 1),
        d(2, 0) - d(0, 2),
        d(0, 1) - d(1, 0),
    ]))
}

/// One grid point of a divergence scan.
#[derive(Clone, Copy, Debug)]
pub struct DivergenceSample {
    pub p: ParamPoint,
    /// Richardson-extrapolated central-difference divergence; `None` when
    /// the point is flagged.
    pub divergence: Option<C64>,
    /// Stencil straddles the labeled field's discontinuity surface.
    pub cut_flagged: bool,
    /// Point (or stencil arm) too close to the EP circle.
    pub ep_flagged: bool,
}

/// Divergence of the labeled curvature over a rectangular grid.
#[derive(Clone, Debug)]
pub struct DivergenceScan {
    pub samples: Vec<DivergenceSample>,
    pub step: f64,
}

impl DivergenceScan {
    /// Largest |div B| over the unflagged points.
    pub fn max_abs(&self) -> f64 {
        self.samples
            .iter()
            .filter_map(|s| s.divergence.map(|d| d.norm()))
            .fold(0.0, f64::max)
    }

    pub fn flagged_count(&self) -> usize {
        self.samples.iter().filter(|s| s.cut_flagged || s.ep_flagged).count()
    }
}

/// Central-difference divergence of the labeled sheet-1 curvature over the
/// box [min, max] sampled on a `counts` grid, with Richardson-paired steps
/// (h, h/2). Stencils straddling the cut or touching the EP ring are flagged
/// and skipped, never averaged. Row order: x fastest, then y, then z.
pub fn divergence_scan(
    min: ParamPoint,
    max: ParamPoint,
    counts: [usize; 3],
    cfg: &ModelConfig,
    cut: &BranchCut,
    h: f64,
) -> DivergenceScan {
    let coords = |lo: f64, hi: f64, n: usize, k: usize| {
        if n <= 1 { 0.5 * (lo + hi) } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }
    };
    let mut grid = Vec::with_capacity(counts[0] * counts[1] * counts[2]);
    for kz in 0..counts[2] {
        for ky in 0..counts[1] {
            for kx in 0..counts[0] {
                grid.push(ParamPoint::new(
                    coords(min.x, max.x, counts[0], kx),
                    coords(min.y, max.y, counts[1], ky),
                    coords(min.z, max.z, counts[2], kz),
                ));
            }
        }
    }

    let samples: Vec<DivergenceSample> = grid
        .par_iter()
        .map(|p| divergence_at(p, cfg, cut, h))
        .collect();
    DivergenceScan { samples, step: h }
}

fn divergence_at(p: &ParamPoint, cfg: &ModelConfig, cut: &BranchCut, h: f64) -> DivergenceSample {
    // Flag on the widest stencil arms; the h/2 pair lies inside them.
    for axis in 0..3 {
        let a = p.shifted(axis, -h);
        let b = p.shifted(axis, h);
        if cut.segment_crosses(&a, &b, cfg) {
            return DivergenceSample { p: *p, divergence: None, cut_flagged: true, ep_flagged: false };
        }
        if spectra::is_exceptional(&a, cfg) || spectra::is_exceptional(&b, cfg) {
            return DivergenceSample { p: *p, divergence: None, cut_flagged: false, ep_flagged: true };
        }
    }
    match labeled_divergence(p, cfg, cut, h) {
        Ok(div) => DivergenceSample { p: *p, divergence: Some(div), cut_flagged: false, ep_flagged: false },
        Err(Error::OnCutSurface(..)) | Err(Error::StencilCrossesCut(..)) => {
            DivergenceSample { p: *p, divergence: None, cut_flagged: true, ep_flagged: false }
        }
        Err(_) => DivergenceSample { p: *p, divergence: None, cut_flagged: false, ep_flagged: true },
    }
}

fn labeled_divergence(p: &ParamPoint, cfg: &ModelConfig, cut: &BranchCut, h: f64) -> Result<C64> {
    let raw = |step: f64| -> Result<C64> {
        let mut total = c64(0.0, 0.0);
        for axis in 0..3 {
            let bp = curvature_analytic(&p.shifted(axis, step), cfg, cut, Sheet::One)?.b;
            let bm = curvature_analytic(&p.shifted(axis, -step), cfg, cut, Sheet::One)?.b;
            total += (bp.component(axis) - bm.component(axis)) / c64(2.0 * step, 0.0);
        }
        Ok(total)
    };
    let coarse = raw(h)?;
    let fine = raw(h / 2.0)?;
    Ok((c64(4.0, 0.0) * fine - coarse) / c64(3.0, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branching::BranchCut;

    fn cfg() -> ModelConfig {
        ModelConfig::dirac(1.0)
    }

    #[test]
    fn closed_form_at_reference_point() {
        // Radicand 3 at p = (2, 0, 0), s = 1.
        let sample = curvature_analytic(
            &ParamPoint::new(2.0, 0.0, 0.0),
            &cfg(),
            &BranchCut::natural(),
            Sheet::One,
        )
        .unwrap();
        let denom = 2.0 * 3.0f64.powf(1.5);
        assert!((sample.b.x - c64(-2.0 / denom, 0.0)).norm() < 1e-14);
        assert!(sample.b.y.norm() < 1e-16);
        assert!((sample.b.z - c64(0.0, -1.0 / denom)).norm() < 1e-14);
    }

    #[test]
    fn spinor_limit_monopole() {
        let cfg = ModelConfig::dirac_spinor_limit();
        let sample = curvature_analytic(
            &ParamPoint::new(0.0, 0.0, 1.0),
            &cfg,
            &BranchCut::natural(),
            Sheet::One,
        )
        .unwrap();
        assert!((sample.b.z - c64(-0.5, 0.0)).norm() < 1e-14);
        assert!(sample.b.x.norm() < 1e-15 && sample.b.y.norm() < 1e-15);
    }

    #[test]
    fn fd_matches_closed_form() {
        let cfg = cfg();
        let cut = BranchCut::natural();
        let p = ParamPoint::new(2.0, 0.0, 0.0);
        let closed = curvature_analytic(&p, &cfg, &cut, Sheet::One).unwrap().b;
        let fd = curvature_fd(&p, &cfg, &cut, 1e-4, Sheet::One).unwrap().b;
        assert!((fd - closed).norm() < 1e-6);
        // Richardson pair confirms O(h^2): the halved step shrinks the error
        // by about 4.
        let fd_half = curvature_fd(&p, &cfg, &cut, 5e-5, Sheet::One).unwrap().b;
        let e1 = (fd - closed).norm();
        let e2 = (fd_half - closed).norm();
        assert!(e2 < e1, "halving the step did not reduce the FD error");
    }

    #[test]
    fn fd_spinor_limit() {
        let cfg = ModelConfig::dirac_spinor_limit();
        let cut = BranchCut::natural();
        let p = ParamPoint::new(0.3, 0.2, 1.0);
        let closed = curvature_analytic(&p, &cfg, &cut, Sheet::One).unwrap().b;
        let fd = curvature_fd(&p, &cfg, &cut, 1e-4, Sheet::One).unwrap().b;
        assert!((fd - closed).norm() < 1e-6);
    }

    #[test]
    fn fd_spinor_limit_on_the_positive_axis() {
        // Sheet-1 stencil centered exactly on the positive axis: the
        // closed-form gauge is regular there in the spinor limit and the
        // monopole field is -z_hat / 2.
        let cfg = ModelConfig::dirac_spinor_limit();
        let cut = BranchCut::natural();
        let fd = curvature_fd(&ParamPoint::new(0.0, 0.0, 1.0), &cfg, &cut, 1e-4, Sheet::One)
            .unwrap()
            .b;
        assert!((fd - CVec3::from_real(0.0, 0.0, -0.5)).norm() < 1e-6, "fd = {fd:?}");
    }

    #[test]
    fn fd_near_the_axis_uses_a_smooth_gauge() {
        // Stencils centered on or near the p_z axis switch to the
        // matrix-inverse gauge; the result must still match the closed form
        // at both poles, where the closed-form left vectors degenerate.
        let cfg = cfg();
        let cut = BranchCut::natural();
        for z in [1.0, -1.0] {
            for rho in [0.0, 1e-6, 1e-5, 1e-4] {
                let p = ParamPoint::new(rho, 0.0, z);
                let closed = closed_form_b1(&p, &cfg);
                let fd = curvature_fd(&p, &cfg, &cut, 1e-4, Sheet::One).unwrap().b;
                assert!(
                    (fd - closed).norm() < 1e-6,
                    "axis fd mismatch at rho={rho}, z={z}: {fd:?} vs {closed:?}"
                );
            }
        }
    }

    #[test]
    fn stencil_cut_guard() {
        let cfg = cfg();
        let p = ParamPoint::new(0.5, 0.0, 5e-6);
        assert!(matches!(
            curvature_fd(&p, &cfg, &BranchCut::natural(), 1e-4, Sheet::One),
            Err(Error::StencilCrossesCut(..))
        ));
        // The same stencil is fine under the dome cut, which is continuous
        // across the disk.
        assert!(curvature_fd(&p, &cfg, &BranchCut::finite_dome(0.8), 1e-4, Sheet::One).is_ok());
    }

    #[test]
    fn divergence_far_from_everything() {
        let cfg = cfg();
        let scan = divergence_scan(
            ParamPoint::new(1.5, 1.5, 1.5),
            ParamPoint::new(2.5, 2.5, 2.5),
            [3, 3, 3],
            &cfg,
            &BranchCut::natural(),
            1e-3,
        );
        assert_eq!(scan.flagged_count(), 0);
        assert!(scan.max_abs() <= 1e-4, "divergence {}", scan.max_abs());
    }

    #[test]
    fn divergence_flags_cut_stencils() {
        let cfg = cfg();
        let scan = divergence_scan(
            ParamPoint::new(0.5, 0.0, -1e-4),
            ParamPoint::new(0.5, 0.0, 1e-4),
            [1, 1, 3],
            &cfg,
            &BranchCut::natural(),
            1e-3,
        );
        assert!(scan.flagged_count() > 0);
        assert!(scan.samples.iter().any(|s| s.cut_flagged));

        // Under the infinite-plane cut the flag moves outside the EP circle.
        let scan = divergence_scan(
            ParamPoint::new(2.0, 0.0, -1e-4),
            ParamPoint::new(2.0, 0.0, 1e-4),
            [1, 1, 3],
            &cfg,
            &BranchCut::infinite_plane(),
            1e-3,
        );
        assert!(scan.samples.iter().any(|s| s.cut_flagged));
    }
}
