//! Triangulations of the square, their audit, and a plain-text reader.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{PlateError, Result};

/// A conforming triangulation with per-vertex boundary flags.
///
/// Triangles are stored counter-clockwise. Interior vertices are numbered
/// `0..N` in vertex order; these are the finite-element unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<bool>,
    unknown_of: Vec<Option<usize>>,
    interior: Vec<usize>,
}

fn signed_area(p: &[[f64; 2]], t: &[usize; 3]) -> f64 {
    let [a, b, c] = [p[t[0]], p[t[1]], p[t[2]]];
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

impl TriMesh {
    /// Validates and orients the input; clockwise triangles are flipped,
    /// degenerate ones rejected.
    pub fn new(
        vertices: Vec<[f64; 2]>,
        mut triangles: Vec<[usize; 3]>,
        boundary: Vec<bool>,
    ) -> Result<Self> {
        if boundary.len() != vertices.len() {
            return Err(PlateError::InvalidMesh(format!(
                "{} vertices but {} boundary flags",
                vertices.len(),
                boundary.len()
            )));
        }
        if triangles.is_empty() {
            return Err(PlateError::InvalidMesh("no triangles".into()));
        }
        let extent = vertices
            .iter()
            .flat_map(|p| p.iter())
            .fold(0.0f64, |m, c| m.max(c.abs()))
            .max(f64::MIN_POSITIVE);
        for (index, t) in triangles.iter_mut().enumerate() {
            if let Some(bad) = t.iter().find(|&&v| v >= vertices.len()) {
                return Err(PlateError::InvalidMesh(format!(
                    "triangle #{index} references vertex {bad} of {}",
                    vertices.len()
                )));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(PlateError::DegenerateTriangle { index, area: 0.0 });
            }
            let area = signed_area(&vertices, t);
            if !(area.abs() > 1e-12 * extent * extent) {
                return Err(PlateError::DegenerateTriangle { index, area });
            }
            if area < 0.0 {
                t.swap(1, 2);
            }
        }

        // each edge belongs to one (boundary) or two (interior) triangles
        let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        for (&(a, b), &count) in &edges {
            if count > 2 {
                return Err(PlateError::InvalidMesh(format!(
                    "edge ({a}, {b}) is shared by {count} triangles"
                )));
            }
            if count == 1 && !(boundary[a] && boundary[b]) {
                return Err(PlateError::InvalidMesh(format!(
                    "edge ({a}, {b}) lies on the hull but has an interior endpoint"
                )));
            }
        }

        let mut unknown_of = vec![None; vertices.len()];
        let mut interior = Vec::new();
        for (v, is_boundary) in boundary.iter().enumerate() {
            if !is_boundary {
                unknown_of[v] = Some(interior.len());
                interior.push(v);
            }
        }
        if interior.is_empty() {
            return Err(PlateError::InvalidMesh(
                "mesh has no interior vertices".into(),
            ));
        }
        Ok(Self {
            vertices,
            triangles,
            boundary,
            unknown_of,
            interior,
        })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn is_boundary(&self, vertex: usize) -> bool {
        self.boundary[vertex]
    }

    /// Number of interior vertices `N`.
    pub fn num_interior(&self) -> usize {
        self.interior.len()
    }

    /// Unknown number of a vertex, `None` on the boundary.
    pub fn unknown_of(&self, vertex: usize) -> Option<usize> {
        self.unknown_of[vertex]
    }

    /// Vertex index of each unknown.
    pub fn interior_vertices(&self) -> &[usize] {
        &self.interior
    }

    pub fn triangle_points(&self, t: usize) -> [[f64; 2]; 3] {
        let tri = &self.triangles[t];
        [
            self.vertices[tri[0]],
            self.vertices[tri[1]],
            self.vertices[tri[2]],
        ]
    }

    pub fn area(&self, t: usize) -> f64 {
        signed_area(&self.vertices, &self.triangles[t])
    }

    /// Longest edge of triangle `t`.
    pub fn diameter(&self, t: usize) -> f64 {
        let p = self.triangle_points(t);
        (0..3)
            .map(|k| {
                let (a, b) = (p[k], p[(k + 1) % 3]);
                ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Number of distinct neighbours of every vertex.
    pub fn valences(&self) -> Vec<usize> {
        let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); self.vertices.len()];
        for t in &self.triangles {
            for k in 0..3 {
                for l in 0..3 {
                    if k != l {
                        nbrs[t[k]].push(t[l]);
                    }
                }
            }
        }
        nbrs.into_iter()
            .map(|mut v| {
                v.sort_unstable();
                v.dedup();
                v.len()
            })
            .collect()
    }
}

/// Uniform `(n+1) x (n+1)` cell grid on `(0, side)^2`, each cell split along
/// its lower-left to upper-right diagonal.
///
/// Vertices are numbered row by row, so interior unknowns follow the same
/// ordering as the finite-difference grid.
pub fn build_structured_mesh(n: usize, side: f64) -> Result<TriMesh> {
    if n < 2 {
        return Err(PlateError::InvalidParameter(format!(
            "structured mesh needs n >= 2, got {n}"
        )));
    }
    if !(side.is_finite() && side > 0.0) {
        return Err(PlateError::InvalidParameter(format!(
            "domain side must be positive, got {side}"
        )));
    }
    let m = n + 2;
    let h = side / (n + 1) as f64;
    let mut vertices = Vec::with_capacity(m * m);
    let mut boundary = Vec::with_capacity(m * m);
    for j in 0..m {
        for i in 0..m {
            vertices.push([i as f64 * h, j as f64 * h]);
            boundary.push(i == 0 || j == 0 || i == m - 1 || j == m - 1);
        }
    }
    let id = |i: usize, j: usize| j * m + i;
    let mut triangles = Vec::with_capacity(2 * (n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    TriMesh::new(vertices, triangles, boundary)
}

/// Shape statistics of a mesh, scaled by the number of unknowns `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshAudit {
    pub max_valence: usize,
    /// `min_K |K| * N` and `max_K |K| * N`.
    pub area_scaled: (f64, f64),
    /// `min_K h_K * sqrt(N)` and `max_K h_K * sqrt(N)`.
    pub diameter_scaled: (f64, f64),
}

/// Constants of a quasi-uniform mesh family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshBounds {
    pub max_valence: usize,
    pub area: (f64, f64),
    pub diameter: (f64, f64),
}

impl MeshBounds {
    /// Constants met by [`build_structured_mesh`] for every `n >= 2`.
    pub fn structured(side: f64) -> Self {
        let a2 = side * side;
        Self {
            max_valence: 6,
            area: (a2 / 8.0, a2 / 2.0),
            diameter: (side * 0.5 * 2f64.sqrt(), side * 2f64.sqrt()),
        }
    }
}

impl MeshAudit {
    pub fn satisfies(&self, b: &MeshBounds) -> bool {
        let within = |(lo, hi): (f64, f64), (blo, bhi): (f64, f64)| {
            lo >= blo * (1.0 - 1e-12) && hi <= bhi * (1.0 + 1e-12)
        };
        self.max_valence <= b.max_valence
            && within(self.area_scaled, b.area)
            && within(self.diameter_scaled, b.diameter)
    }
}

pub fn audit_mesh(mesh: &TriMesh) -> MeshAudit {
    let n = mesh.num_interior() as f64;
    let k = mesh.triangles().len();
    let areas = (0..k).map(|t| mesh.area(t));
    let diams = (0..k).map(|t| mesh.diameter(t));
    let minmax = |it: &mut dyn Iterator<Item = f64>| {
        it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        })
    };
    let (amin, amax) = minmax(&mut areas.into_iter());
    let (dmin, dmax) = minmax(&mut diams.into_iter());
    let valences = mesh.valences();
    MeshAudit {
        max_valence: mesh
            .interior_vertices()
            .iter()
            .map(|&v| valences[v])
            .max()
            .unwrap_or(0),
        area_scaled: (amin * n, amax * n),
        diameter_scaled: (dmin * n.sqrt(), dmax * n.sqrt()),
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(k, line)| {
        let body = line.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then_some((k + 1, body))
    })
}

fn parse_fields<T: std::str::FromStr>(
    file: &str,
    line: usize,
    body: &str,
    count: usize,
) -> Result<Vec<T>> {
    let fields: Vec<&str> = body.split_whitespace().collect();
    let err = |message: String| PlateError::MeshParse {
        file: file.to_string(),
        line,
        message,
    };
    if fields.len() != count {
        return Err(err(format!(
            "expected {count} fields, found {}",
            fields.len()
        )));
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<T>()
                .map_err(|_| err(format!("cannot parse '{f}'")))
        })
        .collect()
}

/// Parses node lines `x y boundary_flag` and element lines `i j k`
/// (zero-based). `#` starts a comment.
pub fn parse_mesh(nodes: &str, elements: &str, names: (&str, &str)) -> Result<TriMesh> {
    let mut vertices = Vec::new();
    let mut boundary = Vec::new();
    for (line, body) in data_lines(nodes) {
        let f: Vec<f64> = parse_fields(names.0, line, body, 3)?;
        if f[2] != 0.0 && f[2] != 1.0 {
            return Err(PlateError::MeshParse {
                file: names.0.to_string(),
                line,
                message: format!("boundary flag must be 0 or 1, got {}", f[2]),
            });
        }
        vertices.push([f[0], f[1]]);
        boundary.push(f[2] == 1.0);
    }
    let mut triangles = Vec::new();
    for (line, body) in data_lines(elements) {
        let t: Vec<usize> = parse_fields(names.1, line, body, 3)?;
        triangles.push([t[0], t[1], t[2]]);
    }
    TriMesh::new(vertices, triangles, boundary)
}

pub fn read_mesh(nodes: &Path, elements: &Path) -> Result<TriMesh> {
    let node_text = std::fs::read_to_string(nodes)?;
    let element_text = std::fs::read_to_string(elements)?;
    parse_mesh(
        &node_text,
        &element_text,
        (
            &nodes.display().to_string(),
            &elements.display().to_string(),
        ),
    )
}
