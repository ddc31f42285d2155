//! Triangulated surfaces with per-triangle quadrature.
//!
//! Generated spheres and hemispheres carry exact spherical-patch weights
//! (the quadrature weights sum to the analytic area, not the polyhedral
//! one); imported meshes carry flat-triangle weights. Orientation follows
//! the counter-clockwise-outward convention.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::ParamPoint;

/// One quadrature node: a point on the surface, the unit normal there, and
/// the area weight it carries.
#[derive(Clone, Copy, Debug)]
pub struct QuadNode {
    pub point: ParamPoint,
    pub normal: [f64; 3],
    pub weight: f64,
}

/// Oriented triangulated surface with a three-node rule per triangle.
#[derive(Clone, Debug)]
pub struct SurfaceMesh {
    pub vertices: Vec<ParamPoint>,
    pub triangles: Vec<[usize; 3]>,
    /// Three nodes per triangle, in triangle order.
    pub nodes: Vec<QuadNode>,
    /// Normals point out of the enclosed volume.
    pub outward: bool,
}

#[derive(Serialize, Deserialize)]
struct MeshJson {
    vertices: Vec<[f64; 3]>,
    triangles: Vec<[usize; 3]>,
}

impl SurfaceMesh {
    /// Mesh from raw geometry with flat-triangle quadrature (edge-midpoint
    /// nodes, one third of the flat area each, facet normal).
    pub fn from_vertices_triangles(
        vertices: Vec<ParamPoint>,
        triangles: Vec<[usize; 3]>,
    ) -> Result<SurfaceMesh> {
        for t in &triangles {
            for &i in t {
                if i >= vertices.len() {
                    return Err(Error::InvalidInput(format!(
                        "triangle index {i} out of range ({} vertices)",
                        vertices.len()
                    )));
                }
            }
        }
        let nodes = flat_nodes(&vertices, &triangles);
        Ok(SurfaceMesh { vertices, triangles, nodes, outward: true })
    }

    /// Parse the JSON interchange format
    /// `{"vertices":[[x,y,z],...],"triangles":[[i,j,k],...]}`.
    pub fn from_json(text: &str) -> Result<SurfaceMesh> {
        let raw: MeshJson = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("mesh JSON: {e}")))?;
        let vertices = raw.vertices.into_iter().map(ParamPoint::from_array).collect();
        SurfaceMesh::from_vertices_triangles(vertices, raw.triangles)
    }

    pub fn to_json(&self) -> String {
        let raw = MeshJson {
            vertices: self.vertices.iter().map(|v| v.to_array()).collect(),
            triangles: self.triangles.clone(),
        };
        serde_json::to_string(&raw).expect("mesh serialization cannot fail")
    }

    /// Sum of the quadrature weights.
    pub fn area(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    /// Zero-boundary and consistent-orientation check: every undirected edge
    /// must be shared by exactly two triangles traversing it in opposite
    /// directions.
    pub fn validate_closed(&self) -> Result<()> {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let e = (t[k], t[(k + 1) % 3]);
                if e.0 == e.1 {
                    return Err(Error::NotClosed(format!("degenerate edge at vertex {}", e.0)));
                }
                *directed.entry(e).or_insert(0) += 1;
            }
        }
        for (&(a, b), &count) in &directed {
            if count > 1 {
                return Err(Error::NotClosed(format!(
                    "edge ({a}, {b}) traversed {count} times in the same direction"
                )));
            }
            if directed.get(&(b, a)).copied().unwrap_or(0) != 1 {
                return Err(Error::NotClosed(format!("edge ({a}, {b}) has no opposite partner")));
            }
        }
        Ok(())
    }

    /// Flat midpoint subdivision (no reprojection): each triangle splits
    /// into four. Quadrature nodes are rebuilt flat, so repeated subdivision
    /// refines the quadrature on the same polyhedron.
    pub fn subdivide_flat(&self) -> SurfaceMesh {
        let mut vertices = self.vertices.clone();
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut triangles = Vec::with_capacity(self.triangles.len() * 4);
        for &[a, b, c] in &self.triangles {
            let ab = midpoint_index(&mut vertices, &mut cache, a, b);
            let bc = midpoint_index(&mut vertices, &mut cache, b, c);
            let ca = midpoint_index(&mut vertices, &mut cache, c, a);
            triangles.push([a, ab, ca]);
            triangles.push([b, bc, ab]);
            triangles.push([c, ca, bc]);
            triangles.push([ab, bc, ca]);
        }
        let nodes = flat_nodes(&vertices, &triangles);
        SurfaceMesh { vertices, triangles, nodes, outward: self.outward }
    }

    /// Geodesic sphere from a subdivided icosahedron. Nodes sit on the
    /// sphere at projected edge midpoints; each carries a third of the exact
    /// spherical triangle area, so the total weight is 4 pi R^2 to rounding.
    pub fn icosphere(center: ParamPoint, radius: f64, subdivisions: u32) -> SurfaceMesh {
        assert!(radius > 0.0);
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        let mut unit: Vec<[f64; 3]> = vec![
            [-1.0, phi, 0.0], [1.0, phi, 0.0], [-1.0, -phi, 0.0], [1.0, -phi, 0.0],
            [0.0, -1.0, phi], [0.0, 1.0, phi], [0.0, -1.0, -phi], [0.0, 1.0, -phi],
            [phi, 0.0, -1.0], [phi, 0.0, 1.0], [-phi, 0.0, -1.0], [-phi, 0.0, 1.0],
        ];
        for v in unit.iter_mut() {
            normalize3(v);
        }
        let mut triangles: Vec<[usize; 3]> = vec![
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ];
        for _ in 0..subdivisions {
            subdivide_projected(&mut unit, &mut triangles);
        }
        spherical_mesh(center, radius, unit, triangles)
    }

    /// Upper hemisphere (z >= 0) built from the top of an octahedron so the
    /// boundary stays exactly on the equator. Open surface: the equator is
    /// its boundary.
    pub fn hemisphere(center: ParamPoint, radius: f64, subdivisions: u32) -> SurfaceMesh {
        assert!(radius > 0.0);
        let mut unit: Vec<[f64; 3]> = vec![
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, -1.0, 0.0],
        ];
        let mut triangles: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 1]];
        for _ in 0..subdivisions {
            subdivide_projected(&mut unit, &mut triangles);
        }
        spherical_mesh(center, radius, unit, triangles)
    }

    /// Flat annulus (belt) inner <= rho <= outer in the z = 0 plane, normals
    /// along +z. Node weights are exact polar cell areas, so the total
    /// weight equals pi (outer^2 - inner^2) to rounding. Open surface.
    pub fn belt(inner: f64, outer: f64, rings: usize, segments: usize) -> SurfaceMesh {
        assert!(outer > inner && inner >= 0.0 && rings >= 1 && segments >= 3);
        let tau = 2.0 * std::f64::consts::PI;
        let mut vertices = Vec::with_capacity((rings + 1) * segments);
        for i in 0..=rings {
            let rho = inner + (outer - inner) * i as f64 / rings as f64;
            for j in 0..segments {
                let ang = tau * j as f64 / segments as f64;
                vertices.push(ParamPoint::new(rho * ang.cos(), rho * ang.sin(), 0.0));
            }
        }
        let idx = |i: usize, j: usize| i * segments + (j % segments);
        let mut triangles = Vec::with_capacity(rings * segments * 2);
        let mut nodes = Vec::with_capacity(rings * segments * 6);
        for i in 0..rings {
            let r0 = inner + (outer - inner) * i as f64 / rings as f64;
            let r1 = inner + (outer - inner) * (i + 1) as f64 / rings as f64;
            // Exact area of one polar cell, split evenly over its two triangles.
            let cell = 0.5 * (r1 * r1 - r0 * r0) * tau / segments as f64;
            for j in 0..segments {
                let quad = [idx(i, j), idx(i, j + 1), idx(i + 1, j + 1), idx(i + 1, j)];
                for tri in [[quad[0], quad[1], quad[2]], [quad[0], quad[2], quad[3]]] {
                    triangles.push(tri);
                    let w = cell / 6.0;
                    for k in 0..3 {
                        let a = vertices[tri[k]];
                        let b = vertices[tri[(k + 1) % 3]];
                        nodes.push(QuadNode {
                            point: a.lerp(b, 0.5),
                            normal: [0.0, 0.0, 1.0],
                            weight: w,
                        });
                    }
                }
            }
        }
        SurfaceMesh { vertices, triangles, nodes, outward: true }
    }
}

fn flat_nodes(vertices: &[ParamPoint], triangles: &[[usize; 3]]) -> Vec<QuadNode> {
    let mut nodes = Vec::with_capacity(triangles.len() * 3);
    for t in triangles {
        let (a, b, c) = (vertices[t[0]], vertices[t[1]], vertices[t[2]]);
        let u = b - a;
        let v = c - a;
        let cross = [
            u.y * v.z - u.z * v.y,
            u.z * v.x - u.x * v.z,
            u.x * v.y - u.y * v.x,
        ];
        let twice_area = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
        let normal = if twice_area > 0.0 {
            [cross[0] / twice_area, cross[1] / twice_area, cross[2] / twice_area]
        } else {
            [0.0, 0.0, 0.0]
        };
        let w = 0.5 * twice_area / 3.0;
        for (p, q) in [(a, b), (b, c), (c, a)] {
            nodes.push(QuadNode { point: p.lerp(q, 0.5), normal, weight: w });
        }
    }
    nodes
}

fn midpoint_index(
    vertices: &mut Vec<ParamPoint>,
    cache: &mut HashMap<(usize, usize), usize>,
    a: usize,
    b: usize,
) -> usize {
    let key = (a.min(b), a.max(b));
    *cache.entry(key).or_insert_with(|| {
        let m = vertices[a].lerp(vertices[b], 0.5);
        vertices.push(m);
        vertices.len() - 1
    })
}

fn subdivide_projected(unit: &mut Vec<[f64; 3]>, triangles: &mut Vec<[usize; 3]>) {
    let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
    let mut next = Vec::with_capacity(triangles.len() * 4);
    for &[a, b, c] in triangles.iter() {
        let mut mid = |i: usize, j: usize, unit: &mut Vec<[f64; 3]>| {
            let key = (i.min(j), i.max(j));
            *cache.entry(key).or_insert_with(|| {
                let mut m = [
                    unit[i][0] + unit[j][0],
                    unit[i][1] + unit[j][1],
                    unit[i][2] + unit[j][2],
                ];
                normalize3(&mut m);
                unit.push(m);
                unit.len() - 1
            })
        };
        let ab = mid(a, b, unit);
        let bc = mid(b, c, unit);
        let ca = mid(c, a, unit);
        next.push([a, ab, ca]);
        next.push([b, bc, ab]);
        next.push([c, ca, bc]);
        next.push([ab, bc, ca]);
    }
    *triangles = next;
}

fn spherical_mesh(
    center: ParamPoint,
    radius: f64,
    unit: Vec<[f64; 3]>,
    triangles: Vec<[usize; 3]>,
) -> SurfaceMesh {
    let vertices: Vec<ParamPoint> = unit
        .iter()
        .map(|v| ParamPoint::new(
            center.x + radius * v[0],
            center.y + radius * v[1],
            center.z + radius * v[2],
        ))
        .collect();
    let mut nodes = Vec::with_capacity(triangles.len() * 3);
    for t in &triangles {
        let w = spherical_triangle_area(unit[t[0]], unit[t[1]], unit[t[2]]) * radius * radius / 3.0;
        for k in 0..3 {
            let mut m = [
                unit[t[k]][0] + unit[t[(k + 1) % 3]][0],
                unit[t[k]][1] + unit[t[(k + 1) % 3]][1],
                unit[t[k]][2] + unit[t[(k + 1) % 3]][2],
            ];
            normalize3(&mut m);
            nodes.push(QuadNode {
                point: ParamPoint::new(
                    center.x + radius * m[0],
                    center.y + radius * m[1],
                    center.z + radius * m[2],
                ),
                normal: m,
                weight: w,
            });
        }
    }
    SurfaceMesh { vertices, triangles, nodes, outward: true }
}

/// Area of the spherical triangle with unit-vector corners (l'Huilier).
fn spherical_triangle_area(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let side = |u: [f64; 3], v: [f64; 3]| {
        let d = ((u[0] - v[0]).powi(2) + (u[1] - v[1]).powi(2) + (u[2] - v[2]).powi(2)).sqrt();
        2.0 * (d / 2.0).clamp(-1.0, 1.0).asin()
    };
    let (sa, sb, sc) = (side(b, c), side(a, c), side(a, b));
    let s = 0.5 * (sa + sb + sc);
    let t = (s / 2.0).tan()
        * ((s - sa) / 2.0).tan()
        * ((s - sb) / 2.0).tan()
        * ((s - sc) / 2.0).tan();
    4.0 * t.max(0.0).sqrt().atan()
}

fn normalize3(v: &mut [f64; 3]) {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v[0] /= n;
    v[1] /= n;
    v[2] /= n;
}
