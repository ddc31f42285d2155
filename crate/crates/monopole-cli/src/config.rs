//! JSON study configuration: parsing, validation and translation into core
//! types. Unknown keys are rejected; semantic validation errors name the
//! offending key.

use serde::{Deserialize, Serialize};

use monopole_core::{
    BranchCut, ModelConfig, Orientation, ParamLoop, ParamPoint, Sheet, SurfaceMesh,
};

/// A configuration or validation problem; the message names the key.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(key: &str, msg: impl std::fmt::Display) -> Result<T, ConfigError> {
    Err(ConfigError(format!("config error at `{key}`: {msg}")))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub model: ModelSection,
    #[serde(default)]
    pub cut: CutSection,
    pub study: StudySection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceSection>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: ModelKindSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKindSection {
    NonHermitianDirac,
    HermitianDisk,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutSection {
    pub kind: CutKindSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
    #[serde(default)]
    pub orientation: OrientationSection,
}

impl Default for CutSection {
    fn default() -> Self {
        CutSection {
            kind: CutKindSection::NaturalDisk,
            height: None,
            orientation: OrientationSection::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutKindSection {
    NaturalDisk,
    FiniteDome,
    InfinitePlane,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationSection {
    #[default]
    Sheet1Outside,
    Sheet2Outside,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StudySection {
    Chern {
        surface: SurfaceSpec,
        #[serde(default = "default_sheet")]
        sheet: u8,
    },
    DivergenceScan {
        #[serde(rename = "box")]
        region: BoxSpec,
        grid: [usize; 3],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        step: Option<f64>,
    },
    LoopTrace {
        #[serde(rename = "loop")]
        path: LoopSpec,
    },
    Density {
        which: DensityKind,
        #[serde(default = "default_density_count")]
        count: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r_min: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r_max: Option<f64>,
    },
    LimitStudy {
        radii: Vec<f64>,
    },
    HermitianLoop {
        #[serde(rename = "loop")]
        path: LoopSpec,
    },
    FieldDump {
        samples: SampleSpecSection,
        what: DumpKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        step: Option<f64>,
    },
}

fn default_sheet() -> u8 {
    1
}

fn default_density_count() -> usize {
    50
}

impl StudySection {
    pub fn name(&self) -> &'static str {
        match self {
            StudySection::Chern { .. } => "chern",
            StudySection::DivergenceScan { .. } => "divergence-scan",
            StudySection::LoopTrace { .. } => "loop-trace",
            StudySection::Density { .. } => "density",
            StudySection::LimitStudy { .. } => "limit-study",
            StudySection::HermitianLoop { .. } => "hermitian-loop",
            StudySection::FieldDump { .. } => "field-dump",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceSpec {
    Sphere { center: [f64; 3], radius: f64 },
    Ellipsoid { center: [f64; 3], semi_axes: [f64; 3] },
    Cube { center: [f64; 3], side: f64 },
    Icosphere { center: [f64; 3], radius: f64, subdivisions: u32 },
    MeshFile { path: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

/// Loop format: a circle `{center, radius, normal, samples}` or an explicit
/// polyline `{points}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LoopSpec {
    Circle { center: [f64; 3], radius: f64, normal: [f64; 3], samples: usize },
    Polyline { points: Vec<[f64; 3]> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    Disk,
    Plane,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SampleSpecSection {
    Points(Vec<[f64; 3]>),
    Grid { min: [f64; 3], max: [f64; 3], counts: [usize; 3] },
    Line { from: [f64; 3], to: [f64; 3], count: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DumpKind {
    Curvature,
    Connection,
    Energies,
    Labels,
    Divergence,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: String,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub div_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im_tol_rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ep_tol_rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut_tol_rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_step: Option<f64>,
}

impl StudyConfig {
    pub fn from_json(text: &str) -> Result<StudyConfig, ConfigError> {
        let cfg: StudyConfig =
            serde_json::from_str(text).map_err(|e| ConfigError(format!("config parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match self.model.kind {
            ModelKindSection::NonHermitianDirac => match self.model.s {
                None => return err("model.s", "required for non_hermitian_dirac"),
                Some(s) if s <= 0.0 || !s.is_finite() => {
                    return err("model.s", format!("must be positive and finite, got {s}"))
                }
                _ => {}
            },
            ModelKindSection::HermitianDisk => match self.model.r {
                None => return err("model.r", "required for hermitian_disk"),
                Some(r) if r <= 0.0 || !r.is_finite() => {
                    return err("model.r", format!("must be positive and finite, got {r}"))
                }
                _ => {}
            },
        }

        if self.cut.kind == CutKindSection::FiniteDome {
            match self.cut.height {
                None => return err("cut.height", "required for finite_dome"),
                Some(h) if h <= 0.0 => return err("cut.height", format!("must be positive, got {h}")),
                _ => {}
            }
        } else if self.cut.height.is_some() {
            return err("cut.height", "only valid for finite_dome");
        }

        if let Some(t) = &self.tolerances {
            for (key, value) in [
                ("tolerances.quad_tol", t.quad_tol),
                ("tolerances.div_tol", t.div_tol),
                ("tolerances.im_tol_rel", t.im_tol_rel),
                ("tolerances.ep_tol_rel", t.ep_tol_rel),
                ("tolerances.cut_tol_rel", t.cut_tol_rel),
                ("tolerances.fd_step", t.fd_step),
            ] {
                if let Some(v) = value {
                    if v <= 0.0 || !v.is_finite() {
                        return err(key, format!("must be positive and finite, got {v}"));
                    }
                }
            }
        }

        let hermitian_study = matches!(self.study, StudySection::HermitianLoop { .. });
        match (hermitian_study, self.model.kind) {
            (true, ModelKindSection::HermitianDisk) | (false, ModelKindSection::NonHermitianDirac) => {}
            (true, _) => return err("model.kind", "study `hermitian-loop` needs hermitian_disk"),
            (false, _) => {
                return err("model.kind", format!("study `{}` needs non_hermitian_dirac", self.study.name()))
            }
        }

        match &self.study {
            StudySection::Chern { surface, sheet } => {
                if !matches!(sheet, 1 | 2) {
                    return err("study.sheet", format!("must be 1 or 2, got {sheet}"));
                }
                match surface {
                    SurfaceSpec::Sphere { radius, .. } if *radius <= 0.0 => {
                        return err("study.surface.radius", "must be positive")
                    }
                    SurfaceSpec::Ellipsoid { semi_axes, .. }
                        if semi_axes.iter().any(|a| *a <= 0.0) =>
                    {
                        return err("study.surface.semi_axes", "must all be positive")
                    }
                    SurfaceSpec::Cube { side, .. } if *side <= 0.0 => {
                        return err("study.surface.side", "must be positive")
                    }
                    SurfaceSpec::Icosphere { radius, subdivisions, .. } => {
                        if *radius <= 0.0 {
                            return err("study.surface.radius", "must be positive");
                        }
                        if *subdivisions > 7 {
                            return err("study.surface.subdivisions", "at most 7");
                        }
                    }
                    _ => {}
                }
            }
            StudySection::DivergenceScan { region, grid, step } => {
                for axis in 0..3 {
                    if region.max[axis] < region.min[axis] {
                        return err("study.box", "max must dominate min componentwise");
                    }
                }
                if grid.contains(&0) {
                    return err("study.grid", "all counts must be at least 1");
                }
                if let Some(h) = step {
                    if *h <= 0.0 {
                        return err("study.step", "must be positive");
                    }
                }
            }
            StudySection::LoopTrace { path } | StudySection::HermitianLoop { path } => {
                validate_loop(path)?;
            }
            StudySection::Density { which, count, r_min, r_max } => {
                if *count < 2 {
                    return err("study.count", "need at least 2 radii");
                }
                let s = self.model.s.unwrap_or(0.0);
                if let (Some(lo), Some(hi)) = (r_min, r_max) {
                    if hi <= lo {
                        return err("study.r_max", "must exceed r_min");
                    }
                }
                match which {
                    DensityKind::Disk => {
                        if let Some(hi) = r_max {
                            if *hi >= s {
                                return err("study.r_max", format!("disk density needs r_max < s = {s}"));
                            }
                        }
                    }
                    DensityKind::Plane => {
                        if let Some(lo) = r_min {
                            if *lo <= s {
                                return err("study.r_min", format!("plane density needs r_min > s = {s}"));
                            }
                        }
                    }
                }
            }
            StudySection::LimitStudy { radii } => {
                if radii.len() < 3 {
                    return err("study.radii", "need at least 3 radii");
                }
                if radii.windows(2).any(|w| w[1] <= w[0]) {
                    return err("study.radii", "must be strictly increasing");
                }
                let s = self.model.s.unwrap_or(0.0);
                if radii[0] <= s {
                    return err("study.radii", format!("all radii must exceed s = {s}"));
                }
            }
            StudySection::FieldDump { samples, step, .. } => {
                match samples {
                    SampleSpecSection::Points(pts) if pts.is_empty() => {
                        return err("study.samples.points", "must not be empty")
                    }
                    SampleSpecSection::Grid { counts, .. } if counts.contains(&0) => {
                        return err("study.samples.grid.counts", "all counts must be at least 1")
                    }
                    SampleSpecSection::Line { count, .. } if *count < 2 => {
                        return err("study.samples.line.count", "need at least 2 points")
                    }
                    _ => {}
                }
                if let Some(h) = step {
                    if *h <= 0.0 {
                        return err("study.step", "must be positive");
                    }
                }
            }
        }
        Ok(())
    }

    /// Core model config with tolerance overrides applied.
    pub fn model_config(&self) -> ModelConfig {
        let mut cfg = match self.model.kind {
            ModelKindSection::NonHermitianDirac => ModelConfig::dirac(self.model.s.unwrap()),
            ModelKindSection::HermitianDisk => ModelConfig::hermitian_disk(self.model.r.unwrap()),
        };
        if let Some(t) = &self.tolerances {
            if let Some(v) = t.ep_tol_rel {
                cfg.ep_tol_rel = v;
            }
            if let Some(v) = t.cut_tol_rel {
                cfg.cut_tol_rel = v;
            }
        }
        cfg
    }

    pub fn branch_cut(&self) -> BranchCut {
        let cut = match self.cut.kind {
            CutKindSection::NaturalDisk => BranchCut::natural(),
            CutKindSection::FiniteDome => BranchCut::finite_dome(self.cut.height.unwrap()),
            CutKindSection::InfinitePlane => BranchCut::infinite_plane(),
        };
        cut.with_orientation(match self.cut.orientation {
            OrientationSection::Sheet1Outside => Orientation::Sheet1Outside,
            OrientationSection::Sheet2Outside => Orientation::Sheet2Outside,
        })
    }

    pub fn orientation(&self) -> Orientation {
        match self.cut.orientation {
            OrientationSection::Sheet1Outside => Orientation::Sheet1Outside,
            OrientationSection::Sheet2Outside => Orientation::Sheet2Outside,
        }
    }

    pub fn quad_tol(&self) -> f64 {
        self.tolerances
            .as_ref()
            .and_then(|t| t.quad_tol)
            .unwrap_or(monopole_core::defaults::QUAD_TOL)
    }

    pub fn fd_step(&self, fallback: f64) -> f64 {
        self.tolerances.as_ref().and_then(|t| t.fd_step).unwrap_or(fallback)
    }
}

fn validate_loop(spec: &LoopSpec) -> Result<(), ConfigError> {
    match spec {
        LoopSpec::Circle { radius, samples, normal, .. } => {
            if *radius <= 0.0 {
                return err("study.loop.radius", "must be positive");
            }
            if *samples < 8 {
                return err("study.loop.samples", "need at least 8 samples");
            }
            if normal.iter().all(|c| *c == 0.0) {
                return err("study.loop.normal", "must be nonzero");
            }
        }
        LoopSpec::Polyline { points } => {
            if points.len() < 3 {
                return err("study.loop.points", "need at least 3 vertices");
            }
        }
    }
    Ok(())
}

pub fn build_loop(spec: &LoopSpec) -> Result<ParamLoop, ConfigError> {
    match spec {
        LoopSpec::Circle { center, radius, normal, samples } => {
            ParamLoop::circle(ParamPoint::from_array(*center), *radius, *normal, *samples)
                .map_err(|e| ConfigError(format!("config error at `study.loop`: {e}")))
        }
        LoopSpec::Polyline { points } => {
            ParamLoop::polyline(points.iter().map(|p| ParamPoint::from_array(*p)).collect())
                .map_err(|e| ConfigError(format!("config error at `study.loop.points`: {e}")))
        }
    }
}

pub fn build_surface(
    spec: &SurfaceSpec,
    base_dir: &std::path::Path,
) -> Result<monopole_core::FluxSurface, ConfigError> {
    use monopole_core::FluxSurface;
    Ok(match spec {
        SurfaceSpec::Sphere { center, radius } => FluxSurface::Sphere {
            center: ParamPoint::from_array(*center),
            radius: *radius,
        },
        SurfaceSpec::Ellipsoid { center, semi_axes } => FluxSurface::Ellipsoid {
            center: ParamPoint::from_array(*center),
            semi_axes: *semi_axes,
        },
        SurfaceSpec::Cube { center, side } => FluxSurface::Cube {
            center: ParamPoint::from_array(*center),
            side: *side,
        },
        SurfaceSpec::Icosphere { center, radius, subdivisions } => FluxSurface::Mesh(
            SurfaceMesh::icosphere(ParamPoint::from_array(*center), *radius, *subdivisions),
        ),
        SurfaceSpec::MeshFile { path } => {
            let full = base_dir.join(path);
            let text = std::fs::read_to_string(&full).map_err(|e| {
                ConfigError(format!("config error at `study.surface.path`: {}: {e}", full.display()))
            })?;
            FluxSurface::Mesh(SurfaceMesh::from_json(&text).map_err(|e| {
                ConfigError(format!("config error at `study.surface.path`: {e}"))
            })?)
        }
    })
}

pub fn sheet_from_number(n: u8) -> Sheet {
    Sheet::from_number(n).expect("validated sheet number")
}
