//! Exact P1 element integrals and global assembly.

use super::mesh::TriMesh;
use crate::error::{PlateError, Result};
use crate::linalg::SparseSpdMatrix;

/// `(area / 12) [[2, 1, 1], [1, 2, 1], [1, 1, 2]]`.
pub fn element_mass(area: f64) -> [[f64; 3]; 3] {
    let mut m = [[area / 12.0; 3]; 3];
    for (k, row) in m.iter_mut().enumerate() {
        row[k] = area / 6.0;
    }
    m
}

/// `(grad phi_i, grad phi_j)` over one triangle, from the constant
/// barycentric gradients.
pub fn element_stiffness(p: &[[f64; 2]; 3]) -> Result<[[f64; 3]; 3]> {
    let area2 =
        (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
    if area2 == 0.0 || !area2.is_finite() {
        return Err(PlateError::DegenerateTriangle {
            index: 0,
            area: 0.5 * area2,
        });
    }
    let mut b = [0.0; 3];
    let mut c = [0.0; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        b[i] = p[j][1] - p[k][1];
        c[i] = p[k][0] - p[j][0];
    }
    let scale = 1.0 / (2.0 * area2.abs());
    let mut s = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            s[i][j] = (b[i] * b[j] + c[i] * c[j]) * scale;
        }
    }
    Ok(s)
}

fn assemble(
    mesh: &TriMesh,
    dim: usize,
    map: impl Fn(usize) -> Option<usize>,
    local: impl Fn(usize) -> Result<[[f64; 3]; 3]>,
) -> Result<SparseSpdMatrix> {
    let mut entries = Vec::with_capacity(9 * mesh.triangles().len());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let k = local(t).map_err(|e| match e {
            PlateError::DegenerateTriangle { area, .. } => {
                PlateError::DegenerateTriangle { index: t, area }
            }
            other => other,
        })?;
        for a in 0..3 {
            let Some(i) = map(tri[a]) else { continue };
            for b in 0..3 {
                if let Some(j) = map(tri[b]) {
                    entries.push((i, j, k[a][b]));
                }
            }
        }
    }
    SparseSpdMatrix::from_triplets(dim, entries)
}

/// Mass matrix over the interior vertices.
pub fn assemble_mass(mesh: &TriMesh) -> Result<SparseSpdMatrix> {
    assemble(
        mesh,
        mesh.num_interior(),
        |v| mesh.unknown_of(v),
        |t| Ok(element_mass(mesh.area(t))),
    )
}

/// Mass matrix over all vertices, boundary rows kept.
pub fn assemble_mass_full(mesh: &TriMesh) -> Result<SparseSpdMatrix> {
    assemble(mesh, mesh.vertices().len(), Some, |t| {
        Ok(element_mass(mesh.area(t)))
    })
}

/// Stiffness matrix over the interior vertices.
pub fn assemble_stiffness(mesh: &TriMesh) -> Result<SparseSpdMatrix> {
    assemble(
        mesh,
        mesh.num_interior(),
        |v| mesh.unknown_of(v),
        |t| element_stiffness(&mesh.triangle_points(t)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::build_structured_mesh;

    fn barycentric(p: &[[f64; 2]; 3], x: [f64; 2]) -> [f64; 3] {
        let det =
            (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
        let l1 =
            ((x[0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (x[1] - p[0][1])) / det;
        let l2 =
            ((p[1][0] - p[0][0]) * (x[1] - p[0][1]) - (x[0] - p[0][0]) * (p[1][1] - p[0][1])) / det;
        [1.0 - l1 - l2, l1, l2]
    }

    #[test]
    fn mass_matches_midpoint_quadrature() {
        // the edge-midpoint rule integrates quadratics exactly
        for p in [
            [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            [[0.3, -0.2], [2.0, 0.5], [0.7, 1.9]],
        ] {
            let area = 0.5
                * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
                    - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]));
            let mids: Vec<[f64; 2]> = (0..3)
                .map(|k| {
                    let (a, b) = (p[k], p[(k + 1) % 3]);
                    [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0]
                })
                .collect();
            let m = element_mass(area);
            for i in 0..3 {
                for j in 0..3 {
                    let q: f64 = mids
                        .iter()
                        .map(|x| {
                            let l = barycentric(&p, *x);
                            l[i] * l[j]
                        })
                        .sum::<f64>()
                        * area
                        / 3.0;
                    assert!((m[i][j] - q).abs() < 1e-14);
                }
            }
        }
        let m = element_mass(0.5);
        assert_eq!(m[0][0], 0.5 / 6.0);
        assert_eq!(m[0][1], 0.5 / 12.0);
    }

    #[test]
    fn stiffness_matches_cotangent_formula() {
        let p = [[0.3, -0.2], [2.0, 0.5], [0.7, 1.9]];
        let s = element_stiffness(&p).unwrap();
        let angle = |k: usize| {
            let (a, b, c) = (p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
            let u = [b[0] - a[0], b[1] - a[1]];
            let v = [c[0] - a[0], c[1] - a[1]];
            (u[0] * v[1] - u[1] * v[0])
                .atan2(u[0] * v[0] + u[1] * v[1])
                .abs()
        };
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    let k = 3 - i - j;
                    let cot = 1.0 / angle(k).tan();
                    assert!((s[i][j] + 0.5 * cot).abs() < 1e-13);
                }
            }
            let row: f64 = s[i].iter().sum();
            assert!(row.abs() < 1e-13);
        }
        // clockwise ordering gives the same matrix
        let q = [p[0], p[2], p[1]];
        let t = element_stiffness(&q).unwrap();
        assert!((t[1][1] - s[2][2]).abs() < 1e-14);
        assert!(element_stiffness(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]).is_err());
    }

    #[test]
    fn full_mass_rows_give_support_area_over_three() {
        let n = 4;
        let a = 2.0;
        let mesh = build_structured_mesh(n, a).unwrap();
        let m = assemble_mass_full(&mesh).unwrap();
        let mut support = vec![0.0; mesh.vertices().len()];
        for t in 0..mesh.triangles().len() {
            for &v in &mesh.triangles()[t] {
                support[v] += mesh.area(t);
            }
        }
        let ones = vec![1.0; mesh.vertices().len()];
        let row_sums = m.apply(&ones).unwrap();
        for (r, s) in row_sums.iter().zip(&support) {
            assert!((r - s / 3.0).abs() < 1e-14);
        }
        let total: f64 = row_sums.iter().sum();
        assert!((total - a * a).abs() < 1e-12);
    }

    #[test]
    fn interior_matrices_are_spd() {
        let mesh = build_structured_mesh(6, 1.0).unwrap();
        assert!(assemble_mass(&mesh).unwrap().factorize().is_ok());
        assert!(assemble_stiffness(&mesh).unwrap().factorize().is_ok());
    }
}
