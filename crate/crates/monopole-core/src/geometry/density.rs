//! Monopole charge densities on the two canonical cut surfaces.
//!
//! On the natural disk the sheet-1 density is `s / (s^2 - p^2)^{3/2}` for
//! radial distance p < s; on the infinite-plane cut it is the imaginary
//! `i s / (p^2 - s^2)^{3/2}` for p > s. Neither applies at p = s, the EP
//! circle itself. The `measured_*` routines recover the same numbers as
//! one-sided limits of the curvature jump across the surface and act as the
//! independent cross-check.

use crate::branching::{BranchCut, Orientation};
use crate::error::{Error, Result};
use crate::geometry::curvature::curvature_analytic;
use crate::linalg::{c64, C64};
use crate::spectra::{ModelConfig, ModelKind, ParamPoint, Sheet};

/// Sheet-1 charge density on the natural disk at radial distance
/// `p_radial < s`; sheet 2 is the negation.
pub fn disk_density(p_radial: f64, cfg: &ModelConfig) -> Result<f64> {
    expect_dirac(cfg);
    if p_radial < 0.0 || !p_radial.is_finite() {
        return Err(Error::InvalidInput(format!("radial distance must be >= 0, got {p_radial}")));
    }
    if p_radial >= cfg.s {
        return Err(Error::EdgeOfDisk(p_radial, cfg.s));
    }
    let gap = cfg.s * cfg.s - p_radial * p_radial;
    Ok(cfg.s / gap.powf(1.5))
}

/// Charge density of the infinite-plane cut at radial distance
/// `p_radial > s` (purely imaginary, plus sign for `Sheet1Outside`).
pub fn plane_density(p_radial: f64, cfg: &ModelConfig) -> Result<C64> {
    expect_dirac(cfg);
    if !p_radial.is_finite() {
        return Err(Error::InvalidInput(format!("radial distance must be finite, got {p_radial}")));
    }
    if p_radial <= cfg.s {
        return Err(Error::EdgeOfDisk(p_radial, cfg.s));
    }
    let gap = p_radial * p_radial - cfg.s * cfg.s;
    Ok(c64(0.0, cfg.s / gap.powf(1.5)))
}

/// Numerical one-sided limit of the sheet-1 curvature z-jump across the
/// natural disk at radius `rho`, Richardson-extrapolated from evaluations
/// at `eps` and `eps / 2`. Matches [`disk_density`] for rho < s.
pub fn measured_disk_jump(rho: f64, cfg: &ModelConfig, eps: f64) -> C64 {
    let jump = |e: f64| {
        let above = principal_bz(&ParamPoint::new(rho, 0.0, e), cfg);
        let below = principal_bz(&ParamPoint::new(rho, 0.0, -e), cfg);
        above - below
    };
    c64(2.0, 0.0) * jump(eps / 2.0) - jump(eps)
}

/// Numerical one-sided limit of the labeled curvature z-jump across the
/// infinite-plane cut at radius `rho > s`. Matches [`plane_density`] with
/// the sign fixed by `orientation`.
pub fn measured_plane_jump(
    rho: f64,
    cfg: &ModelConfig,
    orientation: Orientation,
    eps: f64,
) -> Result<C64> {
    let cut = BranchCut::infinite_plane().with_orientation(orientation);
    let jump = |e: f64| -> Result<C64> {
        let above = curvature_analytic(&ParamPoint::new(rho, 0.0, e), cfg, &cut, Sheet::One)?.b.z;
        let below = curvature_analytic(&ParamPoint::new(rho, 0.0, -e), cfg, &cut, Sheet::One)?.b.z;
        Ok(above - below)
    };
    Ok(c64(2.0, 0.0) * jump(eps / 2.0)? - jump(eps)?)
}

fn principal_bz(p: &ParamPoint, cfg: &ModelConfig) -> C64 {
    let w = crate::spectra::radicand(p, cfg).sqrt();
    c64(p.z, cfg.s) * c64(-0.5, 0.0) / (w * w * w)
}

fn expect_dirac(cfg: &ModelConfig) {
    assert!(
        cfg.kind == ModelKind::NonHermitianDirac,
        "charge densities are defined for the non-Hermitian Dirac model"
    );
}
