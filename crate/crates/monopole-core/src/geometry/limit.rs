//! Finite-to-infinite-cut limit study.
//!
//! The infinite-plane cut carries no directly integrable total charge, so
//! its Chern number is reached through the finite cut Sigma(r): the belt
//! s <= rho <= r in the z = 0 plane closed by the upper hemisphere S(r).
//! Sigma(r) carries the finite-monopole charge -+2pi; the hemisphere charge
//! C(S(r)) is the flux of the sheet difference through S(r) and tends to
//! the same -+2pi as r grows, leaving zero for the infinite cut.

use rayon::prelude::*;

use crate::branching::Orientation;
use crate::error::{Error, Result};
use crate::geometry::quadrature::gauss_legendre;
use crate::linalg::{c64, C64, CVec3};
use crate::spectra::{self, ModelConfig, ModelKind, ParamPoint};

/// Per-radius hemisphere and belt charges plus the extrapolated limit.
#[derive(Clone, Debug)]
pub struct LimitStudyResult {
    pub radii: Vec<f64>,
    /// Hemisphere charge C(S(r)) = flux of (B_1 - B_2) (or its negation for
    /// the flipped orientation) through the upper hemisphere, outward.
    pub hemisphere_charge: Vec<C64>,
    /// Belt charge C(Sigma(r)) - C(S(r)).
    pub belt_charge: Vec<C64>,
    /// The finite-monopole constant C(Sigma(r)) used above (-+2pi).
    pub sigma_charge: C64,
    /// 1/r fit of the hemisphere charge over the largest radii.
    pub extrapolated_hemisphere: C64,
    /// sigma_charge - extrapolated hemisphere charge.
    pub infinite_cut_chern: C64,
    /// Quadrature level used at each radius.
    pub quad_levels: Vec<u32>,
}

const MAX_LEVEL: u32 = 6;

/// Hemisphere/belt charges at the given radii (all > s, strictly increasing)
/// for one labeling orientation, with the r -> infinity limit extrapolated
/// from a C + a/r fit through the three largest radii.
pub fn limit_study(
    radii: &[f64],
    cfg: &ModelConfig,
    orientation: Orientation,
    quad_tol: f64,
) -> Result<LimitStudyResult> {
    assert!(
        cfg.kind == ModelKind::NonHermitianDirac,
        "the limit study is defined for the non-Hermitian Dirac model"
    );
    if radii.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "limit study needs at least 3 radii, got {}",
            radii.len()
        )));
    }
    for pair in radii.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::InvalidInput("radii must be strictly increasing".into()));
        }
    }
    if radii[0] <= cfg.s {
        return Err(Error::InvalidInput(format!(
            "all radii must exceed the EP circle radius {}",
            cfg.s
        )));
    }

    let sign = match orientation {
        Orientation::Sheet1Outside => 1.0,
        Orientation::Sheet2Outside => -1.0,
    };
    let sigma_charge = c64(-sign * 2.0 * std::f64::consts::PI, 0.0);

    let mut hemisphere_charge = Vec::with_capacity(radii.len());
    let mut quad_levels = Vec::with_capacity(radii.len());
    for &r in radii {
        let (value, level) = hemisphere_jump_flux(r, cfg, quad_tol)?;
        hemisphere_charge.push(value * c64(sign, 0.0));
        quad_levels.push(level);
    }
    let belt_charge: Vec<C64> = hemisphere_charge.iter().map(|&cs| sigma_charge - cs).collect();

    let tail = radii.len().saturating_sub(3);
    let extrapolated_hemisphere = fit_inverse_radius(&radii[tail..], &hemisphere_charge[tail..]);
    let infinite_cut_chern = sigma_charge - extrapolated_hemisphere;

    Ok(LimitStudyResult {
        radii: radii.to_vec(),
        hemisphere_charge,
        belt_charge,
        sigma_charge,
        extrapolated_hemisphere,
        infinite_cut_chern,
        quad_levels,
    })
}

/// Flux of `B_1 - B_2 = 2 B_1` through the upper hemisphere of radius `r`,
/// oriented along +p_z (outward). A polar cap of angular radius
/// `defaults::POLAR_CAP_ANGLE` around the axis is excluded; the closed-form
/// integrand is regular there and the omitted flux is far below any
/// tolerance in use.
fn hemisphere_jump_flux(r: f64, cfg: &ModelConfig, quad_tol: f64) -> Result<(C64, u32)> {
    let mut previous: Option<C64> = None;
    let mut increment = f64::INFINITY;
    for level in 0..=MAX_LEVEL {
        let value = hemisphere_level(r, cfg, level);
        if let Some(prev) = previous {
            increment = (value - prev).norm();
            if increment < quad_tol {
                return Ok((value, level));
            }
        }
        previous = Some(value);
    }
    Err(Error::QuadratureNotConverged(increment, quad_tol))
}

fn hemisphere_level(r: f64, cfg: &ModelConfig, level: u32) -> C64 {
    let n_u = 12usize << level;
    let n_phi = 2 * n_u;
    let u_max = crate::defaults::POLAR_CAP_ANGLE.cos();
    let (us, wus) = gauss_legendre(n_u);
    // Map from [-1, 1] to [0, u_max]: equator (exclusive) up to the cap.
    let us: Vec<f64> = us.iter().map(|u| 0.5 * u_max * (u + 1.0)).collect();
    let wus: Vec<f64> = wus.iter().map(|w| 0.5 * u_max * w).collect();
    let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;

    let terms: Vec<C64> = (0..n_phi)
        .into_par_iter()
        .map(|j| {
            let phi = dphi * j as f64;
            let (sphi, cphi) = phi.sin_cos();
            let mut acc = c64(0.0, 0.0);
            for (u, wu) in us.iter().zip(&wus) {
                let st = (1.0 - u * u).sqrt();
                let n = [st * cphi, st * sphi, *u];
                let p = ParamPoint::new(r * n[0], r * n[1], r * n[2]);
                let b1 = sheet_one_curvature(&p, cfg);
                let jump = b1.scale(c64(2.0, 0.0));
                acc += jump.dot_real(n) * c64(r * r * wu * dphi, 0.0);
            }
            acc
        })
        .collect();
    terms.into_iter().sum()
}

fn sheet_one_curvature(p: &ParamPoint, cfg: &ModelConfig) -> CVec3 {
    let w = spectra::radicand(p, cfg).sqrt();
    let q32 = w * w * w;
    let scale = c64(-0.5, 0.0) / q32;
    CVec3::new(c64(p.x, 0.0) * scale, c64(p.y, 0.0) * scale, c64(p.z, cfg.s) * scale)
}

/// Least-squares fit y = c + a / r; returns c.
fn fit_inverse_radius(radii: &[f64], values: &[C64]) -> C64 {
    let n = radii.len() as f64;
    let sx: f64 = radii.iter().map(|r| 1.0 / r).sum();
    let sxx: f64 = radii.iter().map(|r| 1.0 / (r * r)).sum();
    let sy: C64 = values.iter().sum();
    let sxy: C64 = radii
        .iter()
        .zip(values)
        .map(|(r, y)| *y * c64(1.0 / r, 0.0))
        .sum();
    let denom = n * sxx - sx * sx;
    let slope = (sxy * c64(n, 0.0) - sy * c64(sx, 0.0)) / c64(denom, 0.0);
    (sy - slope * c64(sx, 0.0)) / c64(n, 0.0)
}
