//! Triangle meshes: structured generators, validation, uniform refinement
//! with curved-boundary re-projection, and the mesh file format.
//!
//! The file format is a single JSON document with three arrays:
//!
//! ```json
//! {
//!   "nodes": [[x, y], ...],
//!   "triangles": [[i, j, k], ...],
//!   "boundary_edges": [[i, j], ...]
//! }
//! ```
//!
//! Triangle node triples are counterclockwise and zero-based; the boundary
//! edges cover the boundary exactly once.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact boundary a mesh approximates; refinement projects new boundary
/// nodes back onto it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryGeometry {
    /// Circle of the given radius centered at the origin.
    Circle { radius: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<[f64; 2]>,
    /// Counterclockwise node-index triples.
    pub triangles: Vec<[usize; 3]>,
    /// Unordered node-index pairs covering the boundary exactly once.
    pub boundary_edges: Vec<[usize; 2]>,
    /// Set for generated meshes of curved shapes; files carry none.
    pub geometry: Option<BoundaryGeometry>,
}

fn signed_area(p0: [f64; 2], p1: [f64; 2], p2: [f64; 2]) -> f64 {
    0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]))
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Mesh {
    /// Check all structural invariants: indices in range, positive triangle
    /// orientation, boundary edges exactly the once-used triangle edges,
    /// boundary forming closed loops.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        if n < 3 || self.triangles.is_empty() {
            return Err(Error::InvalidMesh("mesh needs at least 3 nodes and 1 triangle".into()));
        }
        for nd in &self.nodes {
            if !nd[0].is_finite() || !nd[1].is_finite() {
                return Err(Error::InvalidMesh(format!("non-finite node ({}, {})", nd[0], nd[1])));
            }
        }
        let mut edge_use: HashMap<(usize, usize), u32> = HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for &i in tri {
                if i >= n {
                    return Err(Error::InvalidMesh(format!(
                        "triangle {t} references node {i} out of range (n={n})"
                    )));
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::InvalidMesh(format!("triangle {t} repeats a node")));
            }
            let a = signed_area(self.nodes[tri[0]], self.nodes[tri[1]], self.nodes[tri[2]]);
            if !(a > 0.0) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} has signed area {a}; must be positive (counterclockwise)"
                )));
            }
            for e in 0..3 {
                *edge_use.entry(edge_key(tri[e], tri[(e + 1) % 3])).or_insert(0) += 1;
            }
        }
        for (&(a, b), &c) in &edge_use {
            if c > 2 {
                return Err(Error::InvalidMesh(format!(
                    "edge ({a},{b}) is shared by {c} triangles"
                )));
            }
        }
        let mut boundary_seen: HashMap<(usize, usize), u32> = HashMap::new();
        for &[a, b] in &self.boundary_edges {
            if a >= n || b >= n {
                return Err(Error::InvalidMesh(format!(
                    "boundary edge ({a},{b}) out of range (n={n})"
                )));
            }
            if a == b {
                return Err(Error::InvalidMesh(format!("degenerate boundary edge ({a},{b})")));
            }
            *boundary_seen.entry(edge_key(a, b)).or_insert(0) += 1;
        }
        for (k, c) in &boundary_seen {
            if *c != 1 {
                return Err(Error::InvalidMesh(format!(
                    "boundary edge ({},{}) listed {c} times",
                    k.0, k.1
                )));
            }
            match edge_use.get(k) {
                Some(1) => {}
                Some(c) => {
                    return Err(Error::InvalidMesh(format!(
                        "boundary edge ({},{}) belongs to {c} triangles, expected exactly 1",
                        k.0, k.1
                    )))
                }
                None => {
                    return Err(Error::InvalidMesh(format!(
                        "boundary edge ({},{}) is not an edge of any triangle",
                        k.0, k.1
                    )))
                }
            }
        }
        for (k, c) in &edge_use {
            if *c == 1 && !boundary_seen.contains_key(k) {
                return Err(Error::InvalidMesh(format!(
                    "triangle edge ({},{}) lies on the boundary but is missing \
                     from boundary_edges",
                    k.0, k.1
                )));
            }
        }
        // closed loops: every boundary node has exactly two boundary edges
        let mut degree: HashMap<usize, u32> = HashMap::new();
        for &[a, b] in &self.boundary_edges {
            *degree.entry(a).or_insert(0) += 1;
            *degree.entry(b).or_insert(0) += 1;
        }
        for (node, d) in degree {
            if d != 2 {
                return Err(Error::InvalidMesh(format!(
                    "boundary node {node} has {d} boundary edges; loops require exactly 2"
                )));
            }
        }
        Ok(())
    }

    pub fn total_area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| signed_area(self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]]))
            .sum()
    }

    pub fn boundary_length(&self) -> f64 {
        self.boundary_edges
            .iter()
            .map(|&[a, b]| {
                let p = self.nodes[a];
                let q = self.nodes[b];
                ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
            })
            .sum()
    }

    /// Sorted list of nodes lying on the boundary.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.boundary_edges.iter().flat_map(|e| e.iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// The mesh under the homothety x ↦ t·x.
    pub fn scaled(&self, t: f64) -> Mesh {
        Mesh {
            nodes: self.nodes.iter().map(|p| [p[0] * t, p[1] * t]).collect(),
            triangles: self.triangles.clone(),
            boundary_edges: self.boundary_edges.clone(),
            geometry: self.geometry.map(|g| match g {
                BoundaryGeometry::Circle { radius } => {
                    BoundaryGeometry::Circle { radius: radius * t }
                }
            }),
        }
    }

    /// Uniform midpoint refinement: each triangle splits into 4. Midpoints
    /// of boundary edges are re-projected onto the exact geometry when one
    /// is attached, so refined disk meshes keep their boundary on the
    /// circle.
    pub fn refine(&self) -> Mesh {
        let mut nodes = self.nodes.clone();
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let boundary: HashMap<(usize, usize), ()> =
            self.boundary_edges.iter().map(|&[a, b]| (edge_key(a, b), ())).collect();

        let mut mid = |a: usize, b: usize, nodes: &mut Vec<[f64; 2]>| -> usize {
            let key = edge_key(a, b);
            if let Some(&id) = midpoint.get(&key) {
                return id;
            }
            let p = nodes[a];
            let q = nodes[b];
            let mut m = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
            if boundary.contains_key(&key) {
                if let Some(BoundaryGeometry::Circle { radius }) = self.geometry {
                    let r = (m[0] * m[0] + m[1] * m[1]).sqrt();
                    if r > 0.0 {
                        m = [m[0] * radius / r, m[1] * radius / r];
                    }
                }
            }
            let id = nodes.len();
            nodes.push(m);
            midpoint.insert(key, id);
            id
        };

        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for tri in &self.triangles {
            let [v0, v1, v2] = *tri;
            let m01 = mid(v0, v1, &mut nodes);
            let m12 = mid(v1, v2, &mut nodes);
            let m20 = mid(v2, v0, &mut nodes);
            triangles.push([v0, m01, m20]);
            triangles.push([v1, m12, m01]);
            triangles.push([v2, m20, m12]);
            triangles.push([m01, m12, m20]);
        }
        let mut boundary_edges = Vec::with_capacity(2 * self.boundary_edges.len());
        for &[a, b] in &self.boundary_edges {
            let m = midpoint[&edge_key(a, b)];
            boundary_edges.push([a, m]);
            boundary_edges.push([m, b]);
        }
        Mesh { nodes, triangles, boundary_edges, geometry: self.geometry }
    }
}

/// Structured crossed-triangle mesh of the rectangle (0,a) × (0,b):
/// an (nx × ny) grid of cells, each split into four triangles around its
/// center node.
pub fn generate_rect_mesh(a: f64, b: f64, nx: usize, ny: usize) -> Mesh {
    assert!(a > 0.0 && b > 0.0 && nx >= 1 && ny >= 1);
    let corner = |i: usize, j: usize| j * (nx + 1) + i;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1) + nx * ny);
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push([a * i as f64 / nx as f64, b * j as f64 / ny as f64]);
        }
    }
    let center_base = nodes.len();
    for j in 0..ny {
        for i in 0..nx {
            nodes.push([a * (i as f64 + 0.5) / nx as f64, b * (j as f64 + 0.5) / ny as f64]);
        }
    }
    let mut triangles = Vec::with_capacity(4 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let ll = corner(i, j);
            let lr = corner(i + 1, j);
            let ur = corner(i + 1, j + 1);
            let ul = corner(i, j + 1);
            let c = center_base + j * nx + i;
            triangles.push([ll, lr, c]);
            triangles.push([lr, ur, c]);
            triangles.push([ur, ul, c]);
            triangles.push([ul, ll, c]);
        }
    }
    let mut boundary_edges = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        boundary_edges.push([corner(i, 0), corner(i + 1, 0)]);
        boundary_edges.push([corner(i + 1, ny), corner(i, ny)]);
    }
    for j in 0..ny {
        boundary_edges.push([corner(nx, j), corner(nx, j + 1)]);
        boundary_edges.push([corner(0, j + 1), corner(0, j)]);
    }
    Mesh { nodes, triangles, boundary_edges, geometry: None }
}

/// Polar mesh of the disk of radius R: a center node, then ring i
/// (i = 1..rings) with 6i nodes at radius iR/rings. All boundary nodes lie
/// exactly on the circle, and the mesh remembers the circle for refinement.
pub fn generate_disk_mesh(radius: f64, rings: usize) -> Mesh {
    assert!(radius > 0.0 && rings >= 1);
    let ring_start = |i: usize| if i == 0 { 0 } else { 1 + 3 * i * (i - 1) };
    let mut nodes = vec![[0.0, 0.0]];
    for i in 1..=rings {
        let r = radius * i as f64 / rings as f64;
        for t in 0..6 * i {
            let th = 2.0 * std::f64::consts::PI * t as f64 / (6 * i) as f64;
            nodes.push([r * th.cos(), r * th.sin()]);
        }
    }
    let mut triangles = Vec::with_capacity(6 * rings * rings);
    // innermost fan
    for t in 0..6 {
        triangles.push([0, 1 + t, 1 + (t + 1) % 6]);
    }
    // annulus between ring i-1 and ring i, six sectors each
    for i in 2..=rings {
        let n_in = 6 * (i - 1);
        let n_out = 6 * i;
        let inner = ring_start(i - 1);
        let outer = ring_start(i);
        for s in 0..6 {
            let a = |t: usize| inner + (s * (i - 1) + t) % n_in;
            let b = |t: usize| outer + (s * i + t) % n_out;
            for t in 0..i {
                triangles.push([b(t), b(t + 1), a(t)]);
                if t + 1 < i {
                    triangles.push([b(t + 1), a(t + 1), a(t)]);
                }
            }
        }
    }
    let n_last = 6 * rings;
    let last = ring_start(rings);
    let boundary_edges =
        (0..n_last).map(|t| [last + t, last + (t + 1) % n_last]).collect();
    Mesh {
        nodes,
        triangles,
        boundary_edges,
        geometry: Some(BoundaryGeometry::Circle { radius }),
    }
}

#[derive(Serialize, Deserialize)]
struct MeshFile {
    nodes: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<[usize; 2]>,
}

/// Read and validate a mesh file (JSON document with `nodes`, `triangles`,
/// `boundary_edges`).
pub fn load_mesh_file(path: &str) -> Result<Mesh> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::MeshFile(format!("cannot read mesh file '{path}': {e}")))?;
    let f: MeshFile = serde_json::from_str(&text)
        .map_err(|e| Error::MeshFile(format!("cannot parse mesh file '{path}': {e}")))?;
    let mesh = Mesh {
        nodes: f.nodes,
        triangles: f.triangles,
        boundary_edges: f.boundary_edges,
        geometry: None,
    };
    mesh.validate()?;
    Ok(mesh)
}

/// Write a mesh file in the same format `load_mesh_file` reads.
pub fn save_mesh_file(mesh: &Mesh, path: &str) -> Result<()> {
    let f = MeshFile {
        nodes: mesh.nodes.clone(),
        triangles: mesh.triangles.clone(),
        boundary_edges: mesh.boundary_edges.clone(),
    };
    let text = serde_json::to_string_pretty(&f)
        .map_err(|e| Error::MeshFile(format!("cannot serialize mesh: {e}")))?;
    std::fs::write(path, text)
        .map_err(|e| Error::MeshFile(format!("cannot write mesh file '{path}': {e}")))?;
    Ok(())
}

/// Mesh for a domain the FEM solver can handle directly (rectangle, disk,
/// or an explicit mesh). `resolution` is cells per side for rectangles and
/// ring count for disks.
pub fn mesh_for_domain(d: &crate::domain::DomainSpec, resolution: usize) -> Result<Arc<Mesh>> {
    use crate::domain::DomainSpec;
    match d {
        DomainSpec::Rectangle { a, b } => {
            // keep cells near-square on anisotropic rectangles
            let (short, long) = if a <= b { (*a, *b) } else { (*b, *a) };
            let ratio = (long / short).round().max(1.0) as usize;
            let (nx, ny) = if a <= b {
                (resolution, (resolution * ratio).min(resolution * 8))
            } else {
                ((resolution * ratio).min(resolution * 8), resolution)
            };
            Ok(Arc::new(generate_rect_mesh(*a, *b, nx, ny)))
        }
        DomainSpec::Disk { radius } | DomainSpec::Ball { dim: 2, radius } => {
            Ok(Arc::new(generate_disk_mesh(*radius, resolution)))
        }
        DomainSpec::MeshDomain { mesh, .. } => Ok(mesh.clone()),
        other => Err(Error::Unsupported(format!(
            "no 2-D mesh route for {other}; FEM handles rectangles, disks and mesh files"
        ))),
    }
}
