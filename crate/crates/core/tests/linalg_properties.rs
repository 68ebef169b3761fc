//! SPD solves on every assembled operator recover the generating vector.

use std::f64::consts::PI;

use plate_nc::fdm::{build_dn, FdGrid};
use plate_nc::fem::FemSpace;
use plate_nc::linalg::{solve_spd, SparseSpdMatrix};
use proptest::prelude::*;

fn operators(n: usize) -> Vec<SparseSpdMatrix> {
    let space = FemSpace::structured(n.max(2), PI).unwrap();
    vec![
        build_dn(&FdGrid::new(n, PI).unwrap()),
        space.mass().clone(),
        space.stiffness().clone(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn solve_recovers_x(n in 1usize..=16, seed in any::<u64>()) {
        for a in operators(n) {
            let mut s = seed;
            let x: Vec<f64> = (0..a.dim())
                .map(|_| {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
                })
                .collect();
            let b = a.apply(&x).unwrap();
            let y = solve_spd(&a, &b).unwrap();
            let err = x.iter().zip(&y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            prop_assert!(err <= 1e-10 * scale.max(1.0), "n = {}, err = {}", n, err);
        }
    }
}

#[test]
fn dn_residual_small_case() {
    let a = build_dn(&FdGrid::new(2, 3.0).unwrap());
    let b = vec![1.0, -0.5, 0.25, 2.0];
    let x = solve_spd(&a, &b).unwrap();
    let r = a.apply(&x).unwrap();
    let res = r
        .iter()
        .zip(&b)
        .map(|(p, q)| (p - q).powi(2))
        .sum::<f64>()
        .sqrt();
    assert!(res <= 1e-12 * b.iter().map(|v| v * v).sum::<f64>().sqrt());
}

#[test]
fn fdm_block_system_residual() {
    use plate_nc::linalg::solve_block_2x2;
    let grid = FdGrid::new(4, PI).unwrap();
    let d = build_dn(&grid);
    let (dt, rho) = (0.2, 2.5);
    let eye = SparseSpdMatrix::identity(grid.dim());
    let a12 = d.csr().map(|x| -dt * x);
    let a21 = d.csr().map(|x| dt * x);
    let a22 = eye.combine(1.0, &d, rho * dt).unwrap();
    let b1: Vec<f64> = (0..16).map(|k| (k as f64).sin()).collect();
    let b2: Vec<f64> = (0..16).map(|k| (k as f64 * 0.5).cos()).collect();
    let (x1, x2) = solve_block_2x2(eye.csr(), &a12, &a21, a22.csr(), &b1, &b2).unwrap();
    let dx1 = d.apply(&x1).unwrap();
    let dx2 = d.apply(&x2).unwrap();
    let ax2 = a22.apply(&x2).unwrap();
    for k in 0..16 {
        assert!((x1[k] - dt * dx2[k] - b1[k]).abs() < 1e-10);
        assert!((dt * dx1[k] + ax2[k] - b2[k]).abs() < 1e-10);
    }
}
