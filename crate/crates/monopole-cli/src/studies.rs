//! Study dispatch: validated config in, report plus data files out.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use monopole_core::{
    defaults, disk_density, divergence_scan, field_dump, flux,
    limit_study, measured_disk_jump, measured_plane_jump, plane_density, trace_loop,
    trace_loop_hermitian, DumpQuantity, DumpTable, ParamPoint, SampleSet,
};

use crate::config::{
    build_loop, build_surface, sheet_from_number, ConfigError, DensityKind, DumpKind,
    OutputFormat, SampleSpecSection, StudyConfig, StudySection,
};

/// Failure modes mapped to process exit codes by `main`.
#[derive(Debug)]
pub enum RunError {
    /// Exit code 2: configuration, validation or output-path problems.
    Config(String),
    /// Exit code 3: numerical failure surfaced from the library.
    Numerical(monopole_core::Error),
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e.0)
    }
}

impl From<monopole_core::Error> for RunError {
    fn from(e: monopole_core::Error) -> Self {
        RunError::Numerical(e)
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(msg) => write!(f, "{msg}"),
            RunError::Numerical(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

/// Machine-readable study outcome, printed as JSON on stdout.
#[derive(Debug, Serialize)]
pub struct StudyReport {
    pub study: String,
    pub inputs: StudyConfig,
    pub results: serde_json::Value,
    pub data_files: Vec<String>,
    pub wall_time_s: f64,
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn c64_json(z: monopole_core::C64) -> serde_json::Value {
    json!({ "re": z.re, "im": z.im })
}

/// Run one study. `base_dir` resolves files referenced by the config;
/// `out_dir` receives emitted data files.
pub fn run_study(
    config: &StudyConfig,
    base_dir: &Path,
    out_dir: &Path,
    verbosity: u8,
) -> Result<StudyReport, RunError> {
    let start = Instant::now();
    let cfg = config.model_config();
    let cut = config.branch_cut();
    if verbosity > 0 {
        eprintln!("study `{}` with cut {:?}", config.study.name(), cut);
    }

    let (results, table): (serde_json::Value, Option<DumpTable>) = match &config.study {
        StudySection::Chern { surface, sheet } => {
            let surface = build_surface(surface, base_dir)?;
            let result = flux(&surface, &cfg, &cut, sheet_from_number(*sheet), config.quad_tol())?;
            let table = DumpTable {
                header: ["Re_flux", "Im_flux", "Re_normalized", "Im_normalized", "imag_residual", "mesh_level"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
                rows: vec![vec![
                    fmt17(result.flux.re),
                    fmt17(result.flux.im),
                    fmt17(result.normalized.re),
                    fmt17(result.normalized.im),
                    fmt17(result.imag_residual),
                    result.mesh_level.to_string(),
                ]],
            };
            let im_tol = config
                .tolerances
                .as_ref()
                .and_then(|t| t.im_tol_rel)
                .unwrap_or(defaults::IM_TOL_REL);
            (
                json!({
                    "flux": c64_json(result.flux),
                    "normalized": c64_json(result.normalized),
                    "imag_residual": result.imag_residual,
                    "imag_residual_within_tolerance": result.imag_residual <= im_tol * result.flux.norm(),
                    "mesh_level": result.mesh_level,
                }),
                Some(table),
            )
        }

        StudySection::DivergenceScan { region, grid, step } => {
            let h = step.unwrap_or(1e-3 * cfg.s.max(1.0));
            let scan = divergence_scan(
                ParamPoint::from_array(region.min),
                ParamPoint::from_array(region.max),
                *grid,
                &cfg,
                &cut,
                h,
            );
            let mut rows = Vec::with_capacity(scan.samples.len());
            for s in &scan.samples {
                let (re, im, abs) = match s.divergence {
                    Some(d) => (fmt17(d.re), fmt17(d.im), fmt17(d.norm())),
                    None => ("nan".into(), "nan".into(), "nan".into()),
                };
                let flag = if s.cut_flagged {
                    "cut"
                } else if s.ep_flagged {
                    "ep"
                } else {
                    "ok"
                };
                rows.push(vec![
                    fmt17(s.p.x),
                    fmt17(s.p.y),
                    fmt17(s.p.z),
                    re,
                    im,
                    abs,
                    flag.to_string(),
                ]);
            }
            let table = DumpTable {
                header: ["px", "py", "pz", "Re_div", "Im_div", "abs_div", "flag"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
                rows,
            };
            let div_tol = config
                .tolerances
                .as_ref()
                .and_then(|t| t.div_tol)
                .unwrap_or(defaults::DIV_TOL);
            (
                json!({
                    "max_abs_divergence": scan.max_abs(),
                    "within_tolerance": scan.max_abs() <= div_tol,
                    "div_tol": div_tol,
                    "flagged": scan.flagged_count(),
                    "grid": grid,
                    "step": h,
                }),
                Some(table),
            )
        }

        StudySection::LoopTrace { path } => {
            let loop_path = build_loop(path)?;
            let report = trace_loop(&loop_path, &cfg)?;
            (
                json!({
                    "swapped": report.swapped,
                    "linking_number": report.linking_number,
                    "final_overlap": [c64_json(report.final_overlap[0]), c64_json(report.final_overlap[1])],
                    "samples": loop_path.points().len(),
                }),
                Some(loop_trace_table(&loop_path, &report)),
            )
        }

        StudySection::HermitianLoop { path } => {
            let loop_path = build_loop(path)?;
            let report = trace_loop_hermitian(&loop_path, cfg.r)?;
            (
                json!({
                    "swapped": report.swapped,
                    "linking_number": report.linking_number,
                    "final_overlap": [c64_json(report.final_overlap[0]), c64_json(report.final_overlap[1])],
                    "samples": loop_path.points().len(),
                }),
                Some(loop_trace_table(&loop_path, &report)),
            )
        }

        StudySection::Density { which, count, r_min, r_max } => {
            density_study(&cfg, config, *which, *count, *r_min, *r_max)?
        }

        StudySection::LimitStudy { radii } => {
            let study = limit_study(radii, &cfg, config.orientation(), config.quad_tol())?;
            let mut rows = Vec::with_capacity(radii.len());
            for (k, r) in study.radii.iter().enumerate() {
                rows.push(vec![
                    fmt17(*r),
                    fmt17(study.hemisphere_charge[k].re),
                    fmt17(study.hemisphere_charge[k].im),
                    fmt17(study.belt_charge[k].re),
                    fmt17(study.belt_charge[k].im),
                    study.quad_levels[k].to_string(),
                ]);
            }
            let table = DumpTable {
                header: ["r", "Re_CS", "Im_CS", "Re_belt", "Im_belt", "quad_level"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
                rows,
            };
            (
                json!({
                    "sigma_charge": c64_json(study.sigma_charge),
                    "hemisphere_charge": study.hemisphere_charge.iter().map(|&c| c64_json(c)).collect::<Vec<_>>(),
                    "extrapolated_hemisphere": c64_json(study.extrapolated_hemisphere),
                    "infinite_cut_chern": c64_json(study.infinite_cut_chern),
                    "infinite_cut_chern_abs": study.infinite_cut_chern.norm(),
                    "quad_levels": study.quad_levels,
                }),
                Some(table),
            )
        }

        StudySection::FieldDump { samples, what, step } => {
            let set = match samples {
                SampleSpecSection::Points(pts) => SampleSet::Points(
                    pts.iter().map(|p| ParamPoint::from_array(*p)).collect(),
                ),
                SampleSpecSection::Grid { min, max, counts } => SampleSet::Grid {
                    min: ParamPoint::from_array(*min),
                    max: ParamPoint::from_array(*max),
                    counts: *counts,
                },
                SampleSpecSection::Line { from, to, count } => SampleSet::Line {
                    from: ParamPoint::from_array(*from),
                    to: ParamPoint::from_array(*to),
                    count: *count,
                },
            };
            let h = config.fd_step(step.unwrap_or(defaults::FD_STEP_REL * cfg.s.max(1.0)));
            let what = match what {
                DumpKind::Curvature => DumpQuantity::Curvature,
                DumpKind::Connection => DumpQuantity::Connection { h },
                DumpKind::Energies => DumpQuantity::Energies,
                DumpKind::Labels => DumpQuantity::Labels,
                DumpKind::Divergence => DumpQuantity::Divergence { h },
            };
            let table = field_dump(&set, &cfg, &cut, what);
            (
                json!({
                    "rows": table.rows.len(),
                    "columns": table.header,
                }),
                Some(table),
            )
        }
    };

    let mut data_files = Vec::new();
    if let (Some(table), Some(output)) = (&table, &config.output) {
        let path = out_dir.join(&output.path);
        write_table(table, &path, output.format)?;
        data_files.push(path.to_string_lossy().into_owned());
        if verbosity > 0 {
            eprintln!("wrote {}", path.display());
        }
    }

    Ok(StudyReport {
        study: config.study.name().to_string(),
        inputs: config.clone(),
        results,
        data_files,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

fn loop_trace_table(path: &monopole_core::ParamLoop, report: &monopole_core::MobiusReport) -> DumpTable {
    let mut rows = Vec::with_capacity(report.energy_trace.len());
    for (k, e) in report.energy_trace.iter().enumerate() {
        let p = path.points()[k];
        rows.push(vec![
            k.to_string(),
            fmt17(path.params()[k]),
            fmt17(p.x),
            fmt17(p.y),
            fmt17(p.z),
            fmt17(e.re),
            fmt17(e.im),
        ]);
    }
    DumpTable {
        header: ["k", "t", "px", "py", "pz", "Re_e", "Im_e"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows,
    }
}

fn density_study(
    cfg: &monopole_core::ModelConfig,
    config: &StudyConfig,
    which: DensityKind,
    count: usize,
    r_min: Option<f64>,
    r_max: Option<f64>,
) -> Result<(serde_json::Value, Option<DumpTable>), RunError> {
    let eps = 1e-6 * cfg.s;
    let (lo, hi) = match which {
        DensityKind::Disk => (r_min.unwrap_or(0.0), r_max.unwrap_or(0.95 * cfg.s)),
        DensityKind::Plane => (r_min.unwrap_or(1.5 * cfg.s), r_max.unwrap_or(5.0 * cfg.s)),
    };
    let mut rows = Vec::with_capacity(count);
    let mut max_rel: f64 = 0.0;
    for k in 0..count {
        let rho = lo + (hi - lo) * k as f64 / (count - 1) as f64;
        match which {
            DensityKind::Disk => {
                let exact = disk_density(rho, cfg)?;
                let measured = measured_disk_jump(rho, cfg, eps);
                let rel = (measured - monopole_core::c64(exact, 0.0)).norm() / exact.abs();
                max_rel = max_rel.max(rel);
                rows.push(vec![
                    fmt17(rho),
                    fmt17(exact),
                    fmt17(measured.re),
                    fmt17(measured.im),
                    fmt17(rel),
                ]);
            }
            DensityKind::Plane => {
                let exact = plane_density(rho, cfg)?;
                let measured = measured_plane_jump(rho, cfg, config.orientation(), eps)?;
                let rel = (measured - exact).norm() / exact.norm();
                max_rel = max_rel.max(rel);
                rows.push(vec![
                    fmt17(rho),
                    fmt17(exact.re),
                    fmt17(exact.im),
                    fmt17(measured.re),
                    fmt17(measured.im),
                    fmt17(rel),
                ]);
            }
        }
    }
    let header: Vec<String> = match which {
        DensityKind::Disk => ["radius", "density", "Re_measured", "Im_measured", "rel_err"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        DensityKind::Plane => ["radius", "Re_density", "Im_density", "Re_measured", "Im_measured", "rel_err"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    };
    Ok((
        json!({
            "which": match which { DensityKind::Disk => "disk", DensityKind::Plane => "plane" },
            "count": count,
            "r_min": lo,
            "r_max": hi,
            "max_rel_err": max_rel,
        }),
        Some(DumpTable { header, rows }),
    ))
}

fn write_table(table: &DumpTable, path: &PathBuf, format: OutputFormat) -> Result<(), RunError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| {
                RunError::Config(format!("config error at `output.path`: cannot create {}: {e}", parent.display()))
            })?;
        }
    }
    let bytes = match format {
        OutputFormat::Csv => table.to_csv_string().into_bytes(),
        OutputFormat::Json => {
            let value = json!({ "columns": table.header, "rows": table.rows });
            let mut text = serde_json::to_string_pretty(&value).expect("table serialization");
            text.push('\n');
            text.into_bytes()
        }
    };
    std::fs::write(path, bytes).map_err(|e| {
        RunError::Config(format!("config error at `output.path`: cannot write {}: {e}", path.display()))
    })
}
