//! Acceptance suite: one test per quantitative claim, each printing a
//! pass/fail line with the measured numbers (run with `--nocapture` to see
//! them on success).

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use monopole_core::*;

const TAU: f64 = 2.0 * std::f64::consts::PI;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn admissible_point(
    r: &mut ChaCha8Rng,
    cfg: &ModelConfig,
    q_min: f64,
    radial_min_sq: f64,
    z_min: f64,
) -> ParamPoint {
    loop {
        let p = ParamPoint::new(
            r.gen_range(-3.0..3.0),
            r.gen_range(-3.0..3.0),
            r.gen_range(-3.0..3.0),
        );
        if radicand(&p, cfg).norm() >= q_min
            && p.radial_sq() >= radial_min_sq
            && p.z.abs() >= z_min
        {
            return p;
        }
    }
}

#[test]
fn criterion_01_chern_flux_quantization() {
    let start = Instant::now();
    let cfg = ModelConfig::dirac(1.0);
    let cut = BranchCut::natural();
    let sphere = FluxSurface::Sphere { center: ParamPoint::default(), radius: 2.0 };

    let one = flux(&sphere, &cfg, &cut, Sheet::One, defaults::QUAD_TOL).unwrap();
    let two = flux(&sphere, &cfg, &cut, Sheet::Two, defaults::QUAD_TOL).unwrap();
    let elapsed = start.elapsed().as_secs_f64();

    let rel1 = (one.flux + c64(TAU, 0.0)).norm() / TAU;
    let rel2 = (two.flux - c64(TAU, 0.0)).norm() / TAU;
    println!(
        "criterion 01 chern-flux-quantization: sheet1 flux = {:+.9} (rel err {:.2e}), \
         sheet2 flux = {:+.9} (rel err {:.2e}), imag residual {:.2e}, {:.2} s",
        one.flux.re, rel1, two.flux.re, rel2, one.imag_residual, elapsed
    );
    assert!(rel1 <= 1e-3, "sheet 1 flux {} not within 1e-3 of -2pi", one.flux);
    assert!(rel2 <= 1e-3, "sheet 2 flux {} not within 1e-3 of +2pi", two.flux);
    assert!(one.imag_residual <= defaults::IM_TOL_REL * one.flux.norm());
    assert!(two.imag_residual <= defaults::IM_TOL_REL * two.flux.norm());
    assert!(elapsed < 5.0, "chern run took {elapsed:.2} s");
    println!("criterion 01 chern-flux-quantization: PASS");
}

#[test]
fn criterion_02_finite_cut_universality() {
    let cfg = ModelConfig::dirac(1.0);
    let sphere = FluxSurface::Sphere { center: ParamPoint::default(), radius: 2.0 };
    let dome = BranchCut::finite_dome(0.8);

    let one = flux(&sphere, &cfg, &dome, Sheet::One, defaults::QUAD_TOL).unwrap();
    let two = flux(&sphere, &cfg, &dome, Sheet::Two, defaults::QUAD_TOL).unwrap();

    let rel1 = (one.flux + c64(TAU, 0.0)).norm() / TAU;
    let rel2 = (two.flux - c64(TAU, 0.0)).norm() / TAU;
    println!(
        "criterion 02 finite-cut-universality: dome-cut fluxes {:+.9} / {:+.9} \
         (rel errs {:.2e} / {:.2e})",
        one.flux.re, two.flux.re, rel1, rel2
    );
    assert!(rel1 <= 1e-3 && rel2 <= 1e-3, "dome cut broke the -+2pi quantization");
    println!("criterion 02 finite-cut-universality: PASS");
}

#[test]
fn criterion_03_infinite_cut_limit_study() {
    let start = Instant::now();
    let cfg = ModelConfig::dirac(1.0);
    let radii = [4.0, 8.0, 16.0, 20.0];

    let mut failures = Vec::new();
    for orientation in [Orientation::Sheet1Outside, Orientation::Sheet2Outside] {
        let study = limit_study(&radii, &cfg, orientation, defaults::QUAD_TOL).unwrap();
        let sigma = study.sigma_charge;
        let distances: Vec<f64> = study
            .hemisphere_charge
            .iter()
            .map(|cs| (*cs - sigma).norm())
            .collect();
        println!(
            "criterion 03 limit-study [{orientation:?}]: sigma = {:+.6}, \
             C(S(r)) = {:?}, |C(S(r)) - sigma| = {:?}",
            sigma.re,
            study
                .hemisphere_charge
                .iter()
                .map(|c| format!("{:+.6}{:+.6}i", c.re, c.im))
                .collect::<Vec<_>>(),
            distances.iter().map(|d| format!("{d:.6}")).collect::<Vec<_>>(),
        );
        println!(
            "criterion 03 limit-study [{orientation:?}]: extrapolated C(S) = {:+.6}{:+.6}i, \
             infinite-cut Chern = {:+.6}{:+.6}i (|.| = {:.4e})",
            study.extrapolated_hemisphere.re,
            study.extrapolated_hemisphere.im,
            study.infinite_cut_chern.re,
            study.infinite_cut_chern.im,
            study.infinite_cut_chern.norm(),
        );

        for pair in distances.windows(2) {
            if pair[1] >= pair[0] {
                failures.push(format!(
                    "[{orientation:?}] C(S(r)) not monotone toward {sigma}: {pair:?}"
                ));
            }
        }
        let d20 = *distances.last().unwrap();
        if d20 > 0.05 * TAU {
            failures.push(format!(
                "[{orientation:?}] |C(S(20s)) - sigma| = {d20:.9} exceeds 0.05*2pi = {:.9} \
                 (excess factor {:.5}; the distance is dominated by the intrinsic imaginary \
                 tail 2 pi s / r * (1 + s^2/(2 r^2)), whose leading term alone equals the bound)",
                0.05 * TAU,
                d20 / (0.05 * TAU)
            ));
        }
        if study.infinite_cut_chern.norm() > 0.02 * TAU {
            failures.push(format!(
                "[{orientation:?}] infinite-cut Chern {} exceeds 0.02*2pi",
                study.infinite_cut_chern
            ));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    println!("criterion 03 limit-study: runtime {elapsed:.2} s");
    assert!(elapsed < 60.0);
    assert!(
        failures.is_empty(),
        "criterion 03 limit-study: FAIL\n{}",
        failures.join("\n")
    );
    println!("criterion 03 limit-study: PASS");
}

#[test]
fn criterion_04_divergence_free_field() {
    let cfg = ModelConfig::dirac(1.0);
    let scan = divergence_scan(
        ParamPoint::new(1.5, 1.5, 1.5),
        ParamPoint::new(2.5, 2.5, 2.5),
        [11, 11, 11],
        &cfg,
        &BranchCut::natural(),
        1e-3,
    );
    let max = scan.max_abs();
    println!(
        "criterion 04 divergence-free: max |div B| = {max:.3e} over 11^3 grid, \
         {} flagged",
        scan.flagged_count()
    );
    assert_eq!(scan.flagged_count(), 0, "stencils flagged inside a clean box");
    assert!(max <= defaults::DIV_TOL, "max |div B| = {max:.3e}");
    println!("criterion 04 divergence-free: PASS");
}

#[test]
fn criterion_05_disk_density() {
    let cfg = ModelConfig::dirac(1.0);
    let mut worst_rel: f64 = 0.0;
    for k in 0..20 {
        let rho = 0.95 * k as f64 / 19.0;
        let measured = measured_disk_jump(rho, &cfg, 1e-6);
        let exact = disk_density(rho, &cfg).unwrap();
        let rel = (measured - c64(exact, 0.0)).norm() / exact;
        worst_rel = worst_rel.max(rel);
    }
    let at_half = disk_density(0.5, &cfg).unwrap();
    let target = 0.75f64.powf(-1.5);
    let rel_half = (at_half - target).abs() / target;
    println!(
        "criterion 05 disk-density: worst jump rel err {worst_rel:.3e} over 20 radii, \
         density(0.5) = {at_half:.9} vs 0.75^-1.5 = {target:.9} (rel {rel_half:.3e})"
    );
    assert!(worst_rel <= 1e-4);
    assert!(rel_half <= 1e-4);
    println!("criterion 05 disk-density: PASS");
}

#[test]
fn criterion_06_mobius_detection() {
    let cfg = ModelConfig::dirac(1.0);
    let mut r = rng(601);

    // Loops linking the EP circle once: centered on the circle, in a plane
    // spanned by the radial direction and (tilted) z.
    let mut linked_ok = 0;
    for _ in 0..20 {
        let alpha = r.gen_range(0.0..TAU);
        let center = ParamPoint::new(alpha.cos(), alpha.sin(), 0.0);
        let rho = r.gen_range(0.3..0.7);
        let tilt = r.gen_range(-0.3..0.3f64);
        let tangent = [-alpha.sin(), alpha.cos(), 0.0];
        let normal = [
            tilt.cos() * tangent[0],
            tilt.cos() * tangent[1],
            tilt.sin(),
        ];
        let path = ParamLoop::circle(center, rho, normal, 256).unwrap();
        let report = trace_loop(&path, &cfg).unwrap();
        assert_eq!(
            report.swapped,
            report.linking_number.rem_euclid(2) == 1,
            "swap flag disagrees with linking parity"
        );
        if report.swapped && report.linking_number.abs() == 1 {
            linked_ok += 1;
        }
    }

    // Non-linking loops: floating above the plane or crossing it far outside
    // the EP circle.
    let mut ordinary_ok = 0;
    for k in 0..20 {
        let report = if k % 2 == 0 {
            let dir = r.gen_range(0.0..TAU);
            let center = ParamPoint::new(
                r.gen_range(1.5..3.0) * dir.cos(),
                r.gen_range(1.5..3.0) * dir.sin(),
                r.gen_range(1.0..3.0),
            );
            let normal = [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(0.2..1.0)];
            let path = ParamLoop::circle(center, r.gen_range(0.2..0.5), normal, 256).unwrap();
            trace_loop(&path, &cfg).unwrap()
        } else {
            let dir = r.gen_range(0.0..TAU);
            let center = ParamPoint::new(2.5 * dir.cos(), 2.5 * dir.sin(), 0.0);
            let normal = [-dir.sin(), dir.cos(), 0.0];
            let path = ParamLoop::circle(center, r.gen_range(0.2..0.45), normal, 256).unwrap();
            trace_loop(&path, &cfg).unwrap()
        };
        assert_eq!(report.swapped, report.linking_number.rem_euclid(2) == 1);
        if !report.swapped {
            ordinary_ok += 1;
        }
    }

    let doubled =
        ParamLoop::circle_turns(ParamPoint::new(1.0, 0.0, 0.0), 0.5, [0.0, 1.0, 0.0], 256, 2)
            .unwrap();
    let double_report = trace_loop(&doubled, &cfg).unwrap();

    println!(
        "criterion 06 mobius-detection: {linked_ok}/20 linking loops swapped, \
         {ordinary_ok}/20 ordinary loops unswapped, double traversal swapped = {}",
        double_report.swapped
    );
    assert_eq!(linked_ok, 20);
    assert_eq!(ordinary_ok, 20);
    assert!(!double_report.swapped);
    println!("criterion 06 mobius-detection: PASS");
}

#[test]
fn criterion_07_hermitian_comparison() {
    let mut r = rng(701);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let theta = r.gen_range(0.0..TAU);
        let wrapped = hermitian_eigensystem(theta + TAU);
        let base = hermitian_eigensystem(theta);
        worst = worst
            .max((wrapped.psi_plus[0] - base.psi_minus[0]).abs())
            .max((wrapped.psi_plus[1] - base.psi_minus[1]).abs());
    }

    let through = ParamLoop::circle(ParamPoint::new(1.0, 0.0, 0.0), 0.5, [0.0, 1.0, 0.0], 256)
        .unwrap();
    let through_report = trace_loop_hermitian(&through, 1.0).unwrap();
    let off = ParamLoop::circle(ParamPoint::new(2.5, 0.0, 0.0), 0.4, [0.0, 1.0, 0.0], 256).unwrap();
    let off_report = trace_loop_hermitian(&off, 1.0).unwrap();

    println!(
        "criterion 07 hermitian-comparison: band-exchange identity dev {worst:.3e}, \
         through-disk swapped = {}, off-disk swapped = {}",
        through_report.swapped, off_report.swapped
    );
    assert!(worst <= 1e-12);
    assert!(through_report.swapped);
    assert!(!off_report.swapped);
    println!("criterion 07 hermitian-comparison: PASS");
}

#[test]
fn criterion_08_gauge_invariance() {
    let cfg = ModelConfig::dirac(1.0);
    let cut = BranchCut::natural();
    let mut r = rng(801);
    let h = 1e-4;
    let mut worst_b: f64 = 0.0;
    let mut worst_shift: f64 = 0.0;

    for _ in 0..10 {
        let p = admissible_point(&mut r, &cfg, 0.3, 0.3, 0.1);
        let coeffs = CVec3::new(
            c64(r.gen_range(-0.7..0.7), r.gen_range(-0.7..0.7)),
            c64(r.gen_range(-0.7..0.7), r.gen_range(-0.7..0.7)),
            c64(r.gen_range(-0.7..0.7), r.gen_range(-0.7..0.7)),
        );
        let gauge = GaugeFunction::exp_linear(coeffs);

        let base_field =
            |q: &ParamPoint| labeled_analytic_eigensystem(q, &cut, &cfg);
        let gauged_field = |q: &ParamPoint| {
            let sys = labeled_analytic_eigensystem(q, &cut, &cfg)?;
            gauge_transform(&sys, &gauge, q, Sheet::One)
        };

        let b0 = curvature_fd_field(&base_field, &p, h, Sheet::One).unwrap();
        let b1 = curvature_fd_field(&gauged_field, &p, h, Sheet::One).unwrap();
        worst_b = worst_b.max((b1 - b0).norm());

        let a0 = connection_field(&base_field, &p, h, Sheet::One).unwrap();
        let a1 = connection_field(&gauged_field, &p, h, Sheet::One).unwrap();
        let shift = a1 - a0;
        worst_shift = worst_shift.max((shift - gauge.connection_shift(&p)).norm());
    }

    println!(
        "criterion 08 gauge-invariance: worst curvature change {worst_b:.3e}, \
         worst connection-shift deviation {worst_shift:.3e} over 10 random gauges"
    );
    assert!(worst_b <= 1e-6);
    assert!(worst_shift <= 1e-6);
    println!("criterion 08 gauge-invariance: PASS");
}

#[test]
fn criterion_09_f_operator_identities() {
    let cfg = ModelConfig::dirac(1.0);
    let cut = BranchCut::natural();
    let mut r = rng(901);
    let h = 1e-4;
    let mut worst_dual: f64 = 0.0;
    let mut worst_grad: f64 = 0.0;
    let mut worst_b: f64 = 0.0;
    let mut worst_curl: f64 = 0.0;

    for _ in 0..10 {
        let p = admissible_point(&mut r, &cfg, 0.3, 0.3, 0.1);
        let f = f_operator(&p, &cfg, &cut, h).unwrap();
        let f_dual = f_operator_completeness(&p, &cfg, &cut, h).unwrap();
        worst_dual = worst_dual.max(f.sub(&f_dual).max_abs());

        // grad psi_j = i F psi_j for both sheets of the labeled field.
        let sys = labeled_analytic_eigensystem(&p, &cut, &cfg).unwrap();
        for j in 0..2 {
            for axis in 0..3 {
                let plus = labeled_analytic_eigensystem(&p.shifted(axis, h), &cut, &cfg).unwrap();
                let minus = labeled_analytic_eigensystem(&p.shifted(axis, -h), &cut, &cfg).unwrap();
                let grad = (plus.psi[j] - minus.psi[j]).scale(c64(0.5 / h, 0.0));
                let predicted = f.0[axis].mul_vec(&sys.psi[j]).scale(c64(0.0, 1.0));
                worst_grad = worst_grad.max((grad - predicted).norm());
            }
        }

        // B_j = i <phi^j| F x F |psi_j> against the closed form.
        let fxf = f.cross(&f);
        let b_via_f = fxf.sandwich(&sys.phi[0], &sys.psi[0]).scale(c64(0.0, 1.0));
        let closed = curvature_analytic(&p, &cfg, &cut, Sheet::One).unwrap().b;
        worst_b = worst_b.max((b_via_f - closed).norm());

        // curl F = i F x F (component ordering fixed by this crate's cross).
        let curl = f_operator_curl(&p, &cfg, &cut, h).unwrap();
        worst_curl = worst_curl.max(curl.sub(&fxf.scale(c64(0.0, 1.0))).max_abs());
    }

    println!(
        "criterion 09 f-operator: dual {worst_dual:.3e}, grad-identity {worst_grad:.3e}, \
         B-via-FxF {worst_b:.3e}, curl {worst_curl:.3e} over 10 random points"
    );
    assert!(worst_dual <= 1e-4);
    assert!(worst_grad <= 1e-4);
    assert!(worst_b <= 1e-4);
    assert!(worst_curl <= 1e-4);
    println!("criterion 09 f-operator: PASS");
}

#[test]
fn criterion_10_eigensystem_agreement() {
    let cfg = ModelConfig::dirac(1.0);
    let mut r = rng(1001);
    let mut worst_pairing: f64 = 0.0;
    let mut worst_energy: f64 = 0.0;
    let mut worst_overlap: f64 = 0.0;

    for _ in 0..1000 {
        let p = admissible_point(&mut r, &cfg, 1e-3, 1e-2, 0.0);
        let analytic = analytic_eigensystem(&p, &cfg, BranchRule::Principal).unwrap();
        let robust = robust_eigensystem_principal(&p, &cfg, BranchRule::Principal).unwrap();

        worst_pairing = worst_pairing
            .max(analytic.pairing_deviation())
            .max(robust.pairing_deviation())
            .max((analytic.completeness() - Mat2::identity()).max_abs());
        worst_energy = worst_energy
            .max((analytic.energies.e1 - robust.energies.e1).norm())
            .max((analytic.energies.e2 - robust.energies.e2).norm());

        // Eigenspace agreement: the mixed pairing matrix must be diagonal.
        // Cross terms are normalized by the diagonal magnitude.
        for m in 0..2 {
            let diag = robust.phi[m].pairing(&analytic.psi[m]).norm();
            let cross = robust.phi[m].pairing(&analytic.psi[1 - m]).norm();
            worst_overlap = worst_overlap.max(cross / diag.max(1.0));
        }
    }

    // On-axis points go through the matrix-inverse gauge patch.
    let mut worst_axis: f64 = 0.0;
    for _ in 0..50 {
        let p = ParamPoint::new(0.0, 0.0, r.gen_range(-3.0..3.0));
        let sys = eigensystem(&p, &cfg, BranchRule::Principal).unwrap();
        worst_axis = worst_axis.max(sys.pairing_deviation());
    }

    println!(
        "criterion 10 eigensystems: worst pairing dev {worst_pairing:.3e}, \
         worst energy gap {worst_energy:.3e}, worst eigenspace cross-term {worst_overlap:.3e}, \
         worst on-axis pairing dev {worst_axis:.3e}"
    );
    assert!(worst_pairing <= 1e-10);
    assert!(worst_energy <= 1e-10);
    assert!(worst_overlap <= 1e-10);
    assert!(worst_axis <= 1e-10);
    println!("criterion 10 eigensystems: PASS");
}
