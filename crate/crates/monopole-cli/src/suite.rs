//! Ready-to-run configuration files reproducing the headline numbers: the
//! -+2pi flux quantization (natural and dome cuts), the infinite-cut limit
//! study in both orientations, the divergence scan, both charge densities,
//! the Möbius loop trio and the Hermitian loop pair.

use std::path::Path;

use crate::config::{
    BoxSpec, CutKindSection, CutSection, DensityKind, LoopSpec, ModelKindSection, ModelSection,
    OrientationSection, OutputFormat, OutputSection, StudyConfig, StudySection, SurfaceSpec,
};
use crate::studies::RunError;

fn dirac_model() -> ModelSection {
    ModelSection { kind: ModelKindSection::NonHermitianDirac, s: Some(1.0), r: None }
}

fn natural_cut() -> CutSection {
    CutSection {
        kind: CutKindSection::NaturalDisk,
        height: None,
        orientation: OrientationSection::Sheet1Outside,
    }
}

fn output(name: &str) -> Option<OutputSection> {
    Some(OutputSection { path: format!("{name}.csv"), format: OutputFormat::Csv })
}

fn sphere() -> SurfaceSpec {
    SurfaceSpec::Sphere { center: [0.0, 0.0, 0.0], radius: 2.0 }
}

/// The configs, as (file stem, config) pairs.
pub fn reproduction_configs() -> Vec<(String, StudyConfig)> {
    let mut configs: Vec<(String, StudyConfig)> = Vec::new();
    let mut push = |name: &str, cfg: StudyConfig| configs.push((name.to_string(), cfg));

    push("01_chern_sphere_sheet1", StudyConfig {
        model: dirac_model(),
        cut: natural_cut(),
        study: StudySection::Chern { surface: sphere(), sheet: 1 },
        output: output("01_chern_sphere_sheet1"),
        tolerances: None,
    });
    push("02_chern_sphere_sheet2", StudyConfig {
        model: dirac_model(),
        cut: natural_cut(),
        study: StudySection::Chern { surface: sphere(), sheet: 2 },
        output: output("02_chern_sphere_sheet2"),
        tolerances: None,
    });
    push("03_chern_dome_cut", StudyConfig {
        model: dirac_model(),
        cut: CutSection {
            kind: CutKindSection::FiniteDome,
            height: Some(0.8),
            orientation: OrientationSection::Sheet1Outside,
        },
        study: StudySection::Chern { surface: sphere(), sheet: 1 },
        output: output("03_chern_dome_cut"),
        tolerances: None,
    });

    for (name, orientation) in [
        ("04_limit_study_sheet1_outside", OrientationSection::Sheet1Outside),
        ("05_limit_study_sheet2_outside", OrientationSection::Sheet2Outside),
    ] {
        push(name, StudyConfig {
            model: dirac_model(),
            cut: CutSection {
                kind: CutKindSection::InfinitePlane,
                height: None,
                orientation,
            },
            study: StudySection::LimitStudy { radii: vec![4.0, 8.0, 16.0, 20.0] },
            output: output(name),
            tolerances: None,
        });
    }

    push("06_divergence_scan", StudyConfig {
        model: dirac_model(),
        cut: natural_cut(),
        study: StudySection::DivergenceScan {
            region: BoxSpec { min: [1.5, 1.5, 1.5], max: [2.5, 2.5, 2.5] },
            grid: [11, 11, 11],
            step: Some(1e-3),
        },
        output: output("06_divergence_scan"),
        tolerances: None,
    });

    push("07_disk_density", StudyConfig {
        model: dirac_model(),
        cut: natural_cut(),
        study: StudySection::Density {
            which: DensityKind::Disk,
            count: 20,
            r_min: Some(0.0),
            r_max: Some(0.95),
        },
        output: output("07_disk_density"),
        tolerances: None,
    });
    push("08_plane_density", StudyConfig {
        model: dirac_model(),
        cut: CutSection {
            kind: CutKindSection::InfinitePlane,
            height: None,
            orientation: OrientationSection::Sheet1Outside,
        },
        study: StudySection::Density {
            which: DensityKind::Plane,
            count: 20,
            r_min: Some(1.5),
            r_max: Some(5.0),
        },
        output: output("08_plane_density"),
        tolerances: None,
    });

    push("09_loop_linking", StudyConfig {
        model: dirac_model(),
        cut: natural_cut(),
        study: StudySection::LoopTrace {
            path: LoopSpec::Circle {
                center: [1.0, 0.0, 0.0],
                radius: 0.5,
                normal: [0.0, 1.0, 0.0],
                samples: 256,
            },
        },
        output: output("09_loop_linking"),
        tolerances: None,
    });
    push("10_loop_nonlinking", StudyConfig {
        model: dirac_model(),
        cut: natural_cut(),
        study: StudySection::LoopTrace {
            path: LoopSpec::Circle {
                center: [3.0, 0.0, 3.0],
                radius: 0.3,
                normal: [0.2, 1.0, 0.4],
                samples: 256,
            },
        },
        output: output("10_loop_nonlinking"),
        tolerances: None,
    });
    // Double traversal as an explicit polyline: twice around the linking
    // circle in the (p_x, p_z) plane.
    let double_points: Vec<[f64; 3]> = (0..=512)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * 2.0 * k as f64 / 512.0;
            [1.0 + 0.5 * t.cos(), 0.0, 0.5 * t.sin()]
        })
        .collect();
    push("11_loop_double_traversal", StudyConfig {
        model: dirac_model(),
        cut: natural_cut(),
        study: StudySection::LoopTrace { path: LoopSpec::Polyline { points: double_points } },
        output: output("11_loop_double_traversal"),
        tolerances: None,
    });

    let hermitian_model = ModelSection {
        kind: ModelKindSection::HermitianDisk,
        s: None,
        r: Some(1.0),
    };
    push("12_hermitian_loop_through_disk", StudyConfig {
        model: hermitian_model.clone(),
        cut: natural_cut(),
        study: StudySection::HermitianLoop {
            path: LoopSpec::Circle {
                center: [1.0, 0.0, 0.0],
                radius: 0.5,
                normal: [0.0, 1.0, 0.0],
                samples: 256,
            },
        },
        output: output("12_hermitian_loop_through_disk"),
        tolerances: None,
    });
    push("13_hermitian_loop_off_disk", StudyConfig {
        model: hermitian_model,
        cut: natural_cut(),
        study: StudySection::HermitianLoop {
            path: LoopSpec::Circle {
                center: [2.5, 0.0, 0.0],
                radius: 0.4,
                normal: [0.0, 1.0, 0.0],
                samples: 256,
            },
        },
        output: output("13_hermitian_loop_off_disk"),
        tolerances: None,
    });

    configs
}

/// Write the reproduction configs into `dir`; returns the file paths.
pub fn emit_reproduction_suite(dir: &Path) -> Result<Vec<String>, RunError> {
    std::fs::create_dir_all(dir).map_err(|e| {
        RunError::Config(format!("cannot create suite directory {}: {e}", dir.display()))
    })?;
    let mut written = Vec::new();
    for (name, config) in reproduction_configs() {
        config.validate().expect("suite configs must validate");
        let path = dir.join(format!("{name}.json"));
        let mut text = serde_json::to_string_pretty(&config).expect("config serialization");
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| {
            RunError::Config(format!("cannot write {}: {e}", path.display()))
        })?;
        written.push(path.to_string_lossy().into_owned());
    }
    Ok(written)
}
