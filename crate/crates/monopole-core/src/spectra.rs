//! Analytic models and their eigensystems.
//!
//! Two models live here: the two-mode non-Hermitian Dirac Hamiltonian
//! `H = p_x sx + p_y sy + (p_z + i s) sz` over the real parameter space
//! `p = (p_x, p_y, p_z)`, and a Hermitian comparison model built from an
//! angle map `theta(x, y, z)` whose degeneracies fill a disk.
//!
//! For the non-Hermitian model the right/left eigenvectors come in
//! biorthonormal pairs `<phi^m|psi_n> = delta_mn`. The closed forms are
//! evaluated directly and rescaled so the pairing holds to machine
//! precision; on the p_z axis, where the closed-form left vectors are
//! singular, a matrix-inverse gauge patch takes over.

use crate::error::{Error, Result};
use crate::linalg::{c64, C64, CVec3, Mat2, Vec2, I};

/// A point in the three-dimensional parameter space.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ParamPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ParamPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        ParamPoint { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        ParamPoint::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Squared distance from the p_z axis.
    pub fn radial_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn scale(self, t: f64) -> ParamPoint {
        ParamPoint::new(self.x * t, self.y * t, self.z * t)
    }

    /// Point shifted by `h` along coordinate `axis` (0 = x, 1 = y, 2 = z).
    pub fn shifted(self, axis: usize, h: f64) -> ParamPoint {
        let mut q = self;
        match axis {
            0 => q.x += h,
            1 => q.y += h,
            _ => q.z += h,
        }
        q
    }

    pub fn lerp(self, other: ParamPoint, t: f64) -> ParamPoint {
        self + (other - self).scale(t)
    }
}

impl std::ops::Add for ParamPoint {
    type Output = ParamPoint;
    fn add(self, other: ParamPoint) -> ParamPoint {
        ParamPoint::new(self.x + other.x, self.y + other.y, self.z + other.z)
    }
}

impl std::ops::Sub for ParamPoint {
    type Output = ParamPoint;
    fn sub(self, other: ParamPoint) -> ParamPoint {
        ParamPoint::new(self.x - other.x, self.y - other.y, self.z - other.z)
    }
}

/// Which of the two models is being evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    NonHermitianDirac,
    HermitianDisk,
}

/// Model parameters plus the numerical tolerances that scale with them.
#[derive(Clone, Copy, Debug)]
pub struct ModelConfig {
    pub kind: ModelKind,
    /// Non-Hermiticity strength (Dirac model).
    pub s: f64,
    /// Degenerate-disk radius (Hermitian model).
    pub r: f64,
    /// A point is exceptional when |p^2 - s^2 + 2 i p_z s| <= ep_tol_rel * s^2.
    pub ep_tol_rel: f64,
    /// The closed-form gauge is abandoned when p_x^2 + p_y^2 <= axis_tol_sq.
    pub axis_tol_sq: f64,
    /// On-cut detection distance, relative to s.
    pub cut_tol_rel: f64,
}

impl ModelConfig {
    /// Non-Hermitian Dirac model with strength `s > 0`.
    pub fn dirac(s: f64) -> Self {
        assert!(s > 0.0, "non-Hermiticity strength must be positive, got {s}");
        ModelConfig {
            kind: ModelKind::NonHermitianDirac,
            s,
            r: 0.0,
            ep_tol_rel: crate::defaults::EP_TOL_REL,
            axis_tol_sq: crate::defaults::AXIS_TOL_SQ,
            cut_tol_rel: crate::defaults::CUT_TOL_REL,
        }
    }

    /// The `s = 0` limit, where the model reduces to the standard spinor.
    /// Intended for reduction checks only; all branch-cut structure
    /// degenerates to the origin.
    pub fn dirac_spinor_limit() -> Self {
        let mut cfg = ModelConfig::dirac(1.0);
        cfg.s = 0.0;
        cfg
    }

    /// Hermitian comparison model whose degeneracies fill the disk
    /// x^2 + y^2 <= r^2, z = 0.
    pub fn hermitian_disk(r: f64) -> Self {
        assert!(r > 0.0, "disk radius must be positive, got {r}");
        ModelConfig {
            kind: ModelKind::HermitianDisk,
            s: 0.0,
            r,
            ep_tol_rel: crate::defaults::EP_TOL_REL,
            axis_tol_sq: crate::defaults::AXIS_TOL_SQ,
            cut_tol_rel: crate::defaults::CUT_TOL_REL,
        }
    }

    /// Absolute tolerance on the radicand magnitude below which a point is
    /// treated as exceptional.
    pub fn ep_tol_abs(&self) -> f64 {
        self.ep_tol_rel * if self.s > 0.0 { self.s * self.s } else { 1.0 }
    }

    /// Absolute on-cut detection distance.
    pub fn cut_tol_abs(&self) -> f64 {
        self.cut_tol_rel * if self.s > 0.0 { self.s } else { 1.0 }
    }

    fn expect_dirac(&self, what: &str) {
        assert!(
            self.kind == ModelKind::NonHermitianDirac,
            "{what} is defined for the non-Hermitian Dirac model only"
        );
    }
}

/// Rule selecting the square root of the complex radicand. The branch cut of
/// the scalar square root is always the negative real axis; alternative cut
/// *surfaces* in parameter space are the business of the `branching` module,
/// not of this rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BranchRule {
    /// Principal square root (non-negative real part, cut on the negative
    /// real axis). Realizes the natural disk cut p_x^2 + p_y^2 < s^2, p_z = 0.
    #[default]
    Principal,
    /// Negated principal root; globally swaps the two sheets.
    NegatedPrincipal,
}

impl BranchRule {
    pub fn sqrt(self, q: C64) -> C64 {
        match self {
            BranchRule::Principal => q.sqrt(),
            BranchRule::NegatedPrincipal => -q.sqrt(),
        }
    }
}

/// Sheet label: which of the two eigenstates is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sheet {
    One,
    Two,
}

impl Sheet {
    pub fn index(self) -> usize {
        match self {
            Sheet::One => 0,
            Sheet::Two => 1,
        }
    }

    pub fn other(self) -> Sheet {
        match self {
            Sheet::One => Sheet::Two,
            Sheet::Two => Sheet::One,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Sheet::One => 1,
            Sheet::Two => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Sheet> {
        match n {
            1 => Some(Sheet::One),
            2 => Some(Sheet::Two),
            _ => None,
        }
    }
}

/// The paired complex energies of the two sheets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexEnergyPair {
    pub e1: C64,
    pub e2: C64,
}

impl ComplexEnergyPair {
    pub fn as_array(&self) -> [C64; 2] {
        [self.e1, self.e2]
    }

    pub fn swapped(&self) -> ComplexEnergyPair {
        ComplexEnergyPair { e1: self.e2, e2: self.e1 }
    }
}

/// Paired right (`psi`) and left (`phi`) eigenvectors with their energies.
///
/// Left vectors are stored as kets whose conjugate transpose acts in
/// pairings, so `phi[m].pairing(&psi[n])` is the biorthonormal product and
/// equals the identity matrix entrywise.
#[derive(Clone, Copy, Debug)]
pub struct BiorthoSystem {
    pub psi: [Vec2; 2],
    pub phi: [Vec2; 2],
    pub energies: ComplexEnergyPair,
}

impl BiorthoSystem {
    pub fn psi_for(&self, sheet: Sheet) -> &Vec2 {
        &self.psi[sheet.index()]
    }

    pub fn phi_for(&self, sheet: Sheet) -> &Vec2 {
        &self.phi[sheet.index()]
    }

    pub fn energy_for(&self, sheet: Sheet) -> C64 {
        self.energies.as_array()[sheet.index()]
    }

    /// Matrix of pairings `<phi^m|psi_n>`.
    pub fn pairing_matrix(&self) -> Mat2 {
        let mut m = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = self.phi[i].pairing(&self.psi[j]);
            }
        }
        m
    }

    /// Completeness sum `sum_n |psi_n><phi^n|`.
    pub fn completeness(&self) -> Mat2 {
        self.psi[0].outer(&self.phi[0]) + self.psi[1].outer(&self.phi[1])
    }

    /// Largest deviation of the pairing matrix from the identity.
    pub fn pairing_deviation(&self) -> f64 {
        (self.pairing_matrix() - Mat2::identity()).max_abs()
    }

    /// System with the two sheets exchanged.
    pub fn swapped(&self) -> BiorthoSystem {
        BiorthoSystem {
            psi: [self.psi[1], self.psi[0]],
            phi: [self.phi[1], self.phi[0]],
            energies: self.energies.swapped(),
        }
    }
}

/// A nonzero complex scalar field together with its gradient, used for
/// GL(1,C) gauge transformations.
pub struct GaugeFunction {
    value: Box<dyn Fn(&ParamPoint) -> C64 + Send + Sync>,
    gradient: Box<dyn Fn(&ParamPoint) -> CVec3 + Send + Sync>,
}

impl GaugeFunction {
    pub fn new(
        value: impl Fn(&ParamPoint) -> C64 + Send + Sync + 'static,
        gradient: impl Fn(&ParamPoint) -> CVec3 + Send + Sync + 'static,
    ) -> Self {
        GaugeFunction { value: Box::new(value), gradient: Box::new(gradient) }
    }

    /// Constant gauge `f = c`.
    pub fn constant(c: C64) -> Self {
        GaugeFunction::new(move |_| c, |_| CVec3::zero())
    }

    /// Exponential of a complex-linear form, `f(p) = exp(a . p)`. Never zero,
    /// with gradient `a f`.
    pub fn exp_linear(a: CVec3) -> Self {
        let val = move |p: &ParamPoint| (a.x * p.x + a.y * p.y + a.z * p.z).exp();
        GaugeFunction::new(val, move |p: &ParamPoint| a.scale(val(p)))
    }

    pub fn value(&self, p: &ParamPoint) -> C64 {
        (self.value)(p)
    }

    pub fn gradient(&self, p: &ParamPoint) -> CVec3 {
        (self.gradient)(p)
    }

    /// The connection shift `i (grad f) / f` this gauge induces.
    pub fn connection_shift(&self, p: &ParamPoint) -> CVec3 {
        let f = self.value(p);
        self.gradient(p).scale(I / f)
    }
}

/// Complex radicand `p^2 - s^2 + 2 i p_z s` whose square root is the energy.
pub fn radicand(p: &ParamPoint, cfg: &ModelConfig) -> C64 {
    c64(p.norm_sq() - cfg.s * cfg.s, 2.0 * p.z * cfg.s)
}

/// True when `p` is within tolerance of the exceptional circle
/// p_x^2 + p_y^2 = s^2, p_z = 0.
pub fn is_exceptional(p: &ParamPoint, cfg: &ModelConfig) -> bool {
    radicand(p, cfg).norm() <= cfg.ep_tol_abs()
}

/// The 2x2 Hamiltonian at `p`.
///
/// For the Dirac kind this is `p_x sx + p_y sy + (p_z + i s) sz`; for the
/// Hermitian kind it is the real symmetric matrix built from the angle map
/// (panics on the degenerate circle, where the angle is undefined).
pub fn hamiltonian(p: &ParamPoint, cfg: &ModelConfig) -> Mat2 {
    match cfg.kind {
        ModelKind::NonHermitianDirac => {
            let d = c64(p.z, cfg.s);
            Mat2([
                [d, c64(p.x, -p.y)],
                [c64(p.x, p.y), -d],
            ])
        }
        ModelKind::HermitianDisk => {
            let theta = hermitian_theta(p.x, p.y, p.z, cfg.r)
                .expect("Hamiltonian evaluated on the degenerate circle");
            hermitian_hamiltonian(theta)
        }
    }
}

/// Hermitian comparison Hamiltonian as a function of the angle.
pub fn hermitian_hamiltonian(theta: f64) -> Mat2 {
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    Mat2([
        [c64(c * c, 0.0), c64(c * s, 0.0)],
        [c64(c * s, 0.0), c64(-c * c, 0.0)],
    ])
}

/// Energy pair `(+sqrt(Q), -sqrt(Q))` of the Dirac model, with the root
/// picked by `rule`. Exceptional points return the valid degenerate pair
/// (0, 0); no error is raised here.
pub fn energies(p: &ParamPoint, cfg: &ModelConfig, rule: BranchRule) -> ComplexEnergyPair {
    cfg.expect_dirac("energies");
    let e1 = rule.sqrt(radicand(p, cfg));
    ComplexEnergyPair { e1, e2: -e1 }
}

/// Closed-form biorthonormal eigensystem of the Dirac model.
///
/// The right vectors are evaluated directly; the left vectors use the
/// conjugate root so the pairing identities hold identically, and each
/// right vector is rescaled by the inverse of its diagonal pairing so that
/// `<phi^m|psi_n> = delta_mn` to machine precision.
///
/// Fails with `EPDegenerate` near the exceptional circle and with
/// `AxisSingular` near the p_z axis, where the closed-form left vectors
/// divide by `p_x - i p_y`; use [`robust_eigensystem`] there.
pub fn analytic_eigensystem(
    p: &ParamPoint,
    cfg: &ModelConfig,
    rule: BranchRule,
) -> Result<BiorthoSystem> {
    cfg.expect_dirac("analytic_eigensystem");
    let q = radicand(p, cfg);
    if q.norm() <= cfg.ep_tol_abs() {
        return Err(Error::ep(p));
    }
    if p.radial_sq() <= cfg.axis_tol_sq {
        return Err(Error::axis(p));
    }

    let w = rule.sqrt(q);
    let d = c64(p.z, cfg.s);
    let pp = c64(p.x, p.y);
    let wb = w.conj();
    let db = d.conj();
    let ppb = pp.conj();
    let half = c64(0.5, 0.0);

    let mut psi1 = Vec2::new(w + d, pp);
    let mut psi2 = Vec2::new(-w + d, pp);
    let phi1 = Vec2::new(half / wb, (wb - db) * half / (ppb * wb));
    let phi2 = Vec2::new(-half / (wb + db), half / ppb);

    // Enforce exact pairing: divide each right vector by <phi^j|psi_j>.
    psi1 = psi1.scale(c64(1.0, 0.0) / phi1.pairing(&psi1));
    psi2 = psi2.scale(c64(1.0, 0.0) / phi2.pairing(&psi2));

    Ok(BiorthoSystem {
        psi: [psi1, psi2],
        phi: [phi1, phi2],
        energies: ComplexEnergyPair { e1: w, e2: -w },
    })
}

/// Eigensystem by direct 2x2 diagonalization, with left vectors taken from
/// the rows of the inverse right-eigenvector matrix. Valid anywhere off the
/// exceptional set, including on the p_z axis. `sheet_one` decides, given the
/// two eigenvalues, whether the first of them is sheet 1.
pub fn robust_eigensystem<F>(p: &ParamPoint, cfg: &ModelConfig, sheet_one: F) -> Result<BiorthoSystem>
where
    F: Fn(C64, C64) -> bool,
{
    let h = hamiltonian(p, cfg);
    let mean = h.trace() * c64(0.5, 0.0);
    let disc = mean * mean - h.det();
    if disc.norm() <= cfg.ep_tol_abs() {
        return Err(Error::ep(p));
    }
    let root = disc.sqrt();
    let (la, lb) = (mean + root, mean - root);
    let (l1, l2) = if sheet_one(la, lb) { (la, lb) } else { (lb, la) };

    let v1 = eigenvector_for(&h, l1);
    let v2 = eigenvector_for(&h, l2);
    let vmat = Mat2::from_cols(v1, v2);
    let inv = vmat.inverse().ok_or_else(|| Error::ep(p))?;
    // Stored left kets are the conjugated rows of the inverse, so pairings
    // reproduce V^-1 V = 1 exactly.
    let phi1 = Vec2::new(inv.0[0][0].conj(), inv.0[0][1].conj());
    let phi2 = Vec2::new(inv.0[1][0].conj(), inv.0[1][1].conj());

    Ok(BiorthoSystem {
        psi: [v1, v2],
        phi: [phi1, phi2],
        energies: ComplexEnergyPair { e1: l1, e2: l2 },
    })
}

/// [`robust_eigensystem`] with sheet 1 assigned to the eigenvalue nearest
/// `rule`'s root of the radicand (the same convention as the closed forms).
pub fn robust_eigensystem_principal(
    p: &ParamPoint,
    cfg: &ModelConfig,
    rule: BranchRule,
) -> Result<BiorthoSystem> {
    let target = match cfg.kind {
        ModelKind::NonHermitianDirac => rule.sqrt(radicand(p, cfg)),
        // Hermitian comparison model: sheet 1 is the "+" band.
        ModelKind::HermitianDisk => {
            let theta = hermitian_theta(p.x, p.y, p.z, cfg.r)?;
            c64((theta / 2.0).cos(), 0.0)
        }
    };
    robust_eigensystem(p, cfg, move |a, _b| (a - target).norm() <= (-a - target).norm())
}

/// Eigensystem in the gauge used everywhere downstream: closed forms off the
/// p_z axis, matrix-inverse patch on it.
pub fn eigensystem(p: &ParamPoint, cfg: &ModelConfig, rule: BranchRule) -> Result<BiorthoSystem> {
    if p.radial_sq() <= cfg.axis_tol_sq {
        robust_eigensystem_principal(p, cfg, rule)
    } else {
        analytic_eigensystem(p, cfg, rule)
    }
}

fn eigenvector_for(h: &Mat2, lambda: C64) -> Vec2 {
    // (H - lambda) v = 0; take the better-conditioned of the two row kernels.
    let a = Vec2::new(h.0[0][1], lambda - h.0[0][0]);
    let b = Vec2::new(lambda - h.0[1][1], h.0[1][0]);
    let v = if a.norm() >= b.norm() { a } else { b };
    v.normalized()
}

/// Angle map of the Hermitian comparison model.
///
/// Returns the two-branch arccos expression in [0, 2pi]; the whole open disk
/// x^2 + y^2 < r^2, z = 0 maps to exactly pi. The sign bit of `z` selects the
/// branch, so signed zeros give the one-sided limits from above and below.
/// On the degenerate circle sqrt(x^2+y^2) = r, z = 0 the expression is 0/0
/// and `DegenerateCircle` is returned.
pub fn hermitian_theta(x: f64, y: f64, z: f64, r: f64) -> Result<f64> {
    let u = x.hypot(y) - r;
    let den = u.hypot(z);
    if den == 0.0 {
        return Err(Error::DegenerateCircle(x, y, z));
    }
    let base = (u / den).clamp(-1.0, 1.0).acos();
    Ok(if z.is_sign_negative() {
        2.0 * std::f64::consts::PI - base
    } else {
        base
    })
}

/// Real eigenpairs of the Hermitian comparison model at angle `theta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianEigensystem {
    pub e_plus: f64,
    pub e_minus: f64,
    pub psi_plus: [f64; 2],
    pub psi_minus: [f64; 2],
}

/// Eigenpairs `E_+- = +-cos(theta/2)` with the explicit trigonometric
/// eigenvectors, defined for theta in [0, 4pi) without sign re-normalization
/// so that `psi_+(theta + 2pi) = psi_-(theta)` holds literally.
pub fn hermitian_eigensystem(theta: f64) -> HermitianEigensystem {
    let e = (theta / 2.0).cos();
    let (sq, cq) = (theta / 4.0).sin_cos();
    HermitianEigensystem {
        e_plus: e,
        e_minus: -e,
        psi_plus: [cq, sq],
        psi_minus: [-sq, cq],
    }
}

/// GL(1,C) gauge transformation of one sheet: the right vector is multiplied
/// by `f(p)` and the left vector divided by it (in the stored-ket convention,
/// multiplied by `1/conj(f)`), so every pairing is preserved exactly.
pub fn gauge_transform(
    sys: &BiorthoSystem,
    f: &GaugeFunction,
    p: &ParamPoint,
    sheet: Sheet,
) -> Result<BiorthoSystem> {
    let fv = f.value(p);
    if fv.norm() == 0.0 {
        return Err(Error::ZeroGauge(p.x, p.y, p.z));
    }
    let mut out = *sys;
    let i = sheet.index();
    out.psi[i] = out.psi[i].scale(fv);
    out.phi[i] = out.phi[i].scale(c64(1.0, 0.0) / fv.conj());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_c64_close(a: C64, b: C64, tol: f64) {
        assert!((a - b).norm() <= tol, "expected {b}, got {a}");
    }

    #[test]
    fn hamiltonian_termwise() {
        let cfg = ModelConfig::dirac(1.0);
        let h = hamiltonian(&ParamPoint::new(0.0, 0.0, 0.0), &cfg);
        assert_eq!(h.0[0][0], c64(0.0, 1.0));
        assert_eq!(h.0[0][1], c64(0.0, 0.0));
        assert_eq!(h.0[1][1], c64(0.0, -1.0));

        let h = hamiltonian(&ParamPoint::new(1.0, 0.0, 0.0), &cfg);
        assert_eq!(h.0[0][0], c64(0.0, 1.0));
        assert_eq!(h.0[0][1], c64(1.0, 0.0));
        assert_eq!(h.0[1][0], c64(1.0, 0.0));
        assert_eq!(h.0[1][1], c64(0.0, -1.0));

        let cfg2 = ModelConfig::dirac(2.0);
        let h = hamiltonian(&ParamPoint::new(0.0, 1.0, 0.0), &cfg2);
        assert_eq!(h.0[0][0], c64(0.0, 2.0));
        assert_eq!(h.0[0][1], c64(0.0, -1.0));
        assert_eq!(h.0[1][0], c64(0.0, 1.0));
        assert_eq!(h.0[1][1], c64(0.0, -2.0));
    }

    #[test]
    fn energies_on_ep_circle_and_axis() {
        let cfg = ModelConfig::dirac(1.0);
        let ep = energies(&ParamPoint::new(1.0, 0.0, 0.0), &cfg, BranchRule::Principal);
        assert_eq!(ep.e1, c64(0.0, 0.0));
        assert_eq!(ep.e2, c64(0.0, 0.0));

        let origin = energies(&ParamPoint::new(0.0, 0.0, 0.0), &cfg, BranchRule::Principal);
        assert_c64_close(origin.e1, c64(0.0, 1.0), 1e-15);
        assert_c64_close(origin.e2, c64(0.0, -1.0), 1e-15);

        let far = energies(&ParamPoint::new(2.0, 0.0, 0.0), &cfg, BranchRule::Principal);
        assert_c64_close(far.e1, c64(3.0f64.sqrt(), 0.0), 1e-15);
        assert_eq!(far.e1 + far.e2, c64(0.0, 0.0));
    }

    #[test]
    fn hermitian_kind_builds_from_the_angle_map() {
        let cfg = ModelConfig::hermitian_disk(1.0);
        let p = ParamPoint::new(2.0, 0.5, 0.7);
        let h = hamiltonian(&p, &cfg);
        let theta = hermitian_theta(p.x, p.y, p.z, 1.0).unwrap();
        assert_eq!(h, hermitian_hamiltonian(theta));
        // Real symmetric.
        assert_eq!(h.0[0][1], h.0[1][0]);
        for row in h.0 {
            for e in row {
                assert_eq!(e.im, 0.0);
            }
        }
    }

    #[test]
    fn energies_match_numerical_eigenvalues() {
        // Independent route: eigenvalues from direct diagonalization.
        let cfg = ModelConfig::dirac(1.0);
        let p = ParamPoint::new(2.0, 0.0, 0.0);
        let pair = energies(&p, &cfg, BranchRule::Principal);
        let sys = robust_eigensystem_principal(&p, &cfg, BranchRule::Principal).unwrap();
        assert_c64_close(sys.energies.e1, pair.e1, 1e-14);
        assert_c64_close(sys.energies.e2, pair.e2, 1e-14);
    }

    #[test]
    fn analytic_hermitian_limit_vectors() {
        // s -> 0 at p = (1,0,0): spinor of sx, rays (1,1) and (-1,1),
        // with left and right vectors on the same ray.
        let cfg = ModelConfig::dirac_spinor_limit();
        let sys = analytic_eigensystem(&ParamPoint::new(1.0, 0.0, 0.0), &cfg, BranchRule::Principal)
            .unwrap();
        let ratio1 = sys.psi[0].0[0] / sys.psi[0].0[1];
        let ratio2 = sys.psi[1].0[0] / sys.psi[1].0[1];
        assert_c64_close(ratio1, c64(1.0, 0.0), 1e-14);
        assert_c64_close(ratio2, c64(-1.0, 0.0), 1e-14);
        for j in 0..2 {
            let lr = sys.phi[j].0[0] / sys.phi[j].0[1] - sys.psi[j].0[0] / sys.psi[j].0[1];
            assert!(lr.norm() < 1e-14, "left/right rays differ in the Hermitian limit");
        }
    }

    #[test]
    fn analytic_biorthonormal_vs_robust() {
        let cfg = ModelConfig::dirac(1.0);
        let p = ParamPoint::new(2.0, 0.0, 0.0);
        let sys = analytic_eigensystem(&p, &cfg, BranchRule::Principal).unwrap();
        assert!(sys.pairing_deviation() <= 1e-12);
        let robust = robust_eigensystem_principal(&p, &cfg, BranchRule::Principal).unwrap();
        assert_c64_close(sys.energies.e1, robust.energies.e1, 1e-12);
        // Same one-dimensional eigenspaces: cross pairings vanish.
        assert!(robust.phi[0].pairing(&sys.psi[1]).norm() < 1e-12);
        assert!(robust.phi[1].pairing(&sys.psi[0]).norm() < 1e-12);
    }

    #[test]
    fn analytic_rejects_ep_and_axis() {
        let cfg = ModelConfig::dirac(1.0);
        assert!(matches!(
            analytic_eigensystem(&ParamPoint::new(1.0, 0.0, 0.0), &cfg, BranchRule::Principal),
            Err(Error::EPDegenerate(..))
        ));
        assert!(matches!(
            analytic_eigensystem(&ParamPoint::new(0.0, 0.0, 1.0), &cfg, BranchRule::Principal),
            Err(Error::AxisSingular(..))
        ));
    }

    #[test]
    fn robust_on_axis_and_diagonal() {
        let cfg = ModelConfig::dirac(1.0);
        let sys = robust_eigensystem_principal(&ParamPoint::new(0.0, 0.0, 1.0), &cfg, BranchRule::Principal)
            .unwrap();
        assert!(sys.pairing_deviation() <= 1e-12);

        let sys0 = robust_eigensystem_principal(&ParamPoint::new(0.0, 0.0, 0.0), &cfg, BranchRule::Principal)
            .unwrap();
        assert_c64_close(sys0.energies.e1, c64(0.0, 1.0), 1e-14);
        assert_c64_close(sys0.energies.e2, c64(0.0, -1.0), 1e-14);
        // Diagonal matrix: canonical basis vectors.
        assert!(sys0.psi[0].0[1].norm() < 1e-14 && sys0.psi[0].0[0].norm() > 0.9);
        assert!(sys0.psi[1].0[0].norm() < 1e-14 && sys0.psi[1].0[1].norm() > 0.9);
    }

    #[test]
    fn theta_map_branches() {
        assert!((hermitian_theta(0.0, 0.0, 0.0, 1.0).unwrap() - std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(hermitian_theta(2.0, 0.0, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(
            hermitian_theta(2.0, 0.0, -0.0, 1.0).unwrap(),
            2.0 * std::f64::consts::PI
        );
        assert!(matches!(
            hermitian_theta(1.0, 0.0, 0.0, 1.0),
            Err(Error::DegenerateCircle(..))
        ));
    }

    #[test]
    fn hermitian_eigensystem_endpoints() {
        let at0 = hermitian_eigensystem(0.0);
        assert_eq!(at0.e_plus, 1.0);
        assert_eq!(at0.e_minus, -1.0);
        assert_eq!(at0.psi_plus, [1.0, 0.0]);
        assert_eq!(at0.psi_minus, [0.0, 1.0]);

        let at_pi = hermitian_eigensystem(std::f64::consts::PI);
        assert!(at_pi.e_plus.abs() < 1e-15 && at_pi.e_minus.abs() < 1e-15);

        let wrap = hermitian_eigensystem(2.0 * std::f64::consts::PI);
        let base = hermitian_eigensystem(0.0);
        assert!((wrap.psi_plus[0] - base.psi_minus[0]).abs() < 1e-15);
        assert!((wrap.psi_plus[1] - base.psi_minus[1]).abs() < 1e-15);
    }

    #[test]
    fn mobius_identity_random_angles() {
        // psi_+(theta + 2pi) = psi_-(theta) over the extended range.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let theta = next() * 2.0 * std::f64::consts::PI;
            let a = hermitian_eigensystem(theta + 2.0 * std::f64::consts::PI);
            let b = hermitian_eigensystem(theta);
            assert!((a.psi_plus[0] - b.psi_minus[0]).abs() <= 1e-12);
            assert!((a.psi_plus[1] - b.psi_minus[1]).abs() <= 1e-12);
        }
    }

    #[test]
    fn gauge_preserves_pairings() {
        let cfg = ModelConfig::dirac(1.0);
        let p = ParamPoint::new(1.0, 1.0, 0.0);
        let sys = analytic_eigensystem(&p, &cfg, BranchRule::Principal).unwrap();

        let id = GaugeFunction::constant(c64(1.0, 0.0));
        let unchanged = gauge_transform(&sys, &id, &p, Sheet::One).unwrap();
        assert_eq!(unchanged.psi[0], sys.psi[0]);

        let two = GaugeFunction::constant(c64(2.0, 0.0));
        let scaled = gauge_transform(&sys, &two, &p, Sheet::One).unwrap();
        assert!(scaled.pairing_deviation() <= 1e-12);

        let f = GaugeFunction::exp_linear(CVec3::new(c64(1.0, 0.0), c64(0.0, 1.0), c64(0.0, 0.0)));
        let gauged = gauge_transform(&sys, &f, &p, Sheet::Two).unwrap();
        assert!(gauged.pairing_deviation() <= 1e-12);

        let zero = GaugeFunction::constant(c64(0.0, 0.0));
        assert!(matches!(
            gauge_transform(&sys, &zero, &p, Sheet::One),
            Err(Error::ZeroGauge(..))
        ));
    }

    #[test]
    fn spinor_limit_energies_are_real() {
        let cfg = ModelConfig::dirac_spinor_limit();
        let mut state = 123u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
        };
        for _ in 0..100 {
            let p = ParamPoint::new(next(), next(), next());
            if p.norm() < 1e-3 {
                continue;
            }
            let pair = energies(&p, &cfg, BranchRule::Principal);
            assert!((pair.e1 - c64(p.norm(), 0.0)).norm() < 1e-12);
            assert!((pair.e2 + c64(p.norm(), 0.0)).norm() < 1e-12);
        }
    }
}
