//! Plot-ready tabular emission of field samples.
//!
//! Rows come out in a deterministic order (points as given; grids with x
//! fastest, then y, then z; lines from start to end; mesh nodes in stored
//! order) and floats print with 17 significant digits so re-running a dump
//! overwrites byte-identically.

use std::io::{self, Write};

use crate::branching::{label_point, BranchCut};
use crate::error::Result;
use crate::geometry::curvature::{connection, curvature_analytic, divergence_scan};
use crate::geometry::mesh::SurfaceMesh;
use crate::linalg::C64;
use crate::spectra::{energies, BranchRule, ModelConfig, ParamPoint, Sheet};

/// Where to sample.
#[derive(Clone, Debug)]
pub enum SampleSet {
    Points(Vec<ParamPoint>),
    Grid { min: ParamPoint, max: ParamPoint, counts: [usize; 3] },
    Line { from: ParamPoint, to: ParamPoint, count: usize },
    MeshNodes(SurfaceMesh),
}

impl SampleSet {
    fn points(&self) -> Vec<ParamPoint> {
        match self {
            SampleSet::Points(pts) => pts.clone(),
            SampleSet::Grid { min, max, counts } => {
                let coord = |lo: f64, hi: f64, n: usize, k: usize| {
                    if n <= 1 { 0.5 * (lo + hi) } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }
                };
                let mut pts = Vec::with_capacity(counts[0] * counts[1] * counts[2]);
                for kz in 0..counts[2] {
                    for ky in 0..counts[1] {
                        for kx in 0..counts[0] {
                            pts.push(ParamPoint::new(
                                coord(min.x, max.x, counts[0], kx),
                                coord(min.y, max.y, counts[1], ky),
                                coord(min.z, max.z, counts[2], kz),
                            ));
                        }
                    }
                }
                pts
            }
            SampleSet::Line { from, to, count } => {
                let n = (*count).max(2);
                (0..n)
                    .map(|k| from.lerp(*to, k as f64 / (n - 1) as f64))
                    .collect()
            }
            SampleSet::MeshNodes(mesh) => mesh.nodes.iter().map(|n| n.point).collect(),
        }
    }
}

/// Which field goes into the table.
#[derive(Clone, Copy, Debug)]
pub enum DumpQuantity {
    /// Labeled Berry curvature (closed form).
    Curvature,
    /// Finite-difference Berry connection with the given step.
    Connection { h: f64 },
    /// Both sheet energies on the principal branch.
    Energies,
    /// Sheet labels only.
    Labels,
    /// Richardson central-difference divergence with the given step.
    Divergence { h: f64 },
}

/// A CSV table: header plus formatted rows.
#[derive(Clone, Debug)]
pub struct DumpTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl DumpTable {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn push_c64(row: &mut Vec<String>, z: C64) {
    row.push(fmt(z.re));
    row.push(fmt(z.im));
}

/// Sample a field quantity over `set`. Rows where the point is inadmissible
/// (on the cut, at an EP) carry sheet 0 and `nan` values instead of failing
/// the whole dump.
pub fn field_dump(
    set: &SampleSet,
    cfg: &ModelConfig,
    cut: &BranchCut,
    what: DumpQuantity,
) -> DumpTable {
    let mut header = vec!["px".to_string(), "py".to_string(), "pz".to_string(), "sheet".to_string()];
    match what {
        DumpQuantity::Curvature => {
            for name in ["Re_Bx", "Im_Bx", "Re_By", "Im_By", "Re_Bz", "Im_Bz"] {
                header.push(name.to_string());
            }
        }
        DumpQuantity::Connection { .. } => {
            for name in ["Re_Ax", "Im_Ax", "Re_Ay", "Im_Ay", "Re_Az", "Im_Az"] {
                header.push(name.to_string());
            }
        }
        DumpQuantity::Energies => {
            for name in ["Re_e1", "Im_e1", "Re_e2", "Im_e2"] {
                header.push(name.to_string());
            }
        }
        DumpQuantity::Labels => {}
        DumpQuantity::Divergence { .. } => {
            for name in ["Re_div", "Im_div", "abs_div"] {
                header.push(name.to_string());
            }
        }
    }

    let points = set.points();
    let mut rows = Vec::with_capacity(points.len());
    for p in &points {
        let mut row = vec![fmt(p.x), fmt(p.y), fmt(p.z)];
        let label = label_point(p, cut, cfg);
        row.push(match &label {
            Ok(sheet) => sheet.number().to_string(),
            Err(_) => "0".to_string(),
        });
        match what {
            DumpQuantity::Curvature => {
                fill_vec3(&mut row, curvature_analytic(p, cfg, cut, Sheet::One).map(|s| s.b));
            }
            DumpQuantity::Connection { h } => {
                fill_vec3(&mut row, connection(p, cfg, cut, h, Sheet::One));
            }
            DumpQuantity::Energies => {
                let pair = energies(p, cfg, BranchRule::Principal);
                push_c64(&mut row, pair.e1);
                push_c64(&mut row, pair.e2);
            }
            DumpQuantity::Labels => {}
            DumpQuantity::Divergence { h } => {
                let scan = divergence_scan(*p, *p, [1, 1, 1], cfg, cut, h);
                match scan.samples[0].divergence {
                    Some(d) => {
                        push_c64(&mut row, d);
                        row.push(fmt(d.norm()));
                    }
                    None => {
                        for _ in 0..3 {
                            row.push("nan".to_string());
                        }
                    }
                }
            }
        }
        rows.push(row);
    }
    DumpTable { header, rows }
}

fn fill_vec3(row: &mut Vec<String>, value: Result<crate::linalg::CVec3>) {
    match value {
        Ok(v) => {
            push_c64(row, v.x);
            push_c64(row, v.y);
            push_c64(row, v.z);
        }
        Err(_) => {
            for _ in 0..6 {
                row.push("nan".to_string());
            }
        }
    }
}
