//! Homogeneous runs of both schemes against the closed-form modal solution.

use std::f64::consts::PI;

use plate_nc::fdm::{build_dn, dn_eigenvalue, sample_on_grid, FdGrid};
use plate_nc::fem::{interpolate_nodal, FemSpace};
use plate_nc::spectral::{exact_test_solution, ModalEvolution};
use plate_nc::stepper::ImplicitEulerStepper;
use plate_nc::StatePair;

const RHO: f64 = 2.5;

fn test_data(x: f64, y: f64) -> f64 {
    1.5 * (2.0 * x).sin() * (2.0 * y).sin()
}

fn advance(stepper: &ImplicitEulerStepper, mut s: StatePair, steps: usize) -> StatePair {
    for _ in 0..steps {
        s = stepper.step(&s, None).unwrap();
    }
    s
}

fn fdm_at_one(n: usize, dt: f64) -> (FdGrid, StatePair) {
    let grid = FdGrid::new(n, PI).unwrap();
    let stepper = ImplicitEulerStepper::new(&build_dn(&grid), None, dt, RHO).unwrap();
    let init = StatePair::new(vec![0.0; grid.dim()], sample_on_grid(test_data, &grid)).unwrap();
    (grid, advance(&stepper, init, (1.0 / dt).round() as usize))
}

fn fdm_max_error(n: usize, dt: f64) -> f64 {
    let (grid, s) = fdm_at_one(n, dt);
    let ev = sample_on_grid(|x, y| exact_test_solution(x, y, 1.0).0, &grid);
    let ew = sample_on_grid(|x, y| exact_test_solution(x, y, 1.0).1, &grid);
    s.v.iter()
        .zip(&ev)
        .chain(s.w.iter().zip(&ew))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

#[test]
fn fdm_error_decreases_under_simultaneous_refinement() {
    let errs: Vec<f64> = [(8, 0.02), (16, 0.01), (32, 0.005)]
        .iter()
        .map(|&(n, dt)| fdm_max_error(n, dt))
        .collect();
    assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
    assert!(errs[2] < 5e-3, "{errs:?}");
}

#[test]
fn fdm_temporal_order_is_one() {
    // the discrete sine is an exact eigenvector, so the semi-discrete solution
    // is the modal formula with the discrete eigenvalue
    let n = 32;
    let grid = FdGrid::new(n, PI).unwrap();
    let lambda_h = dn_eigenvalue(2, 2, &grid).unwrap();
    let (_, beta) = ModalEvolution::new(lambda_h, RHO, 0.0, 1.0)
        .unwrap()
        .at(1.0);
    let (alpha, _) = ModalEvolution::new(lambda_h, RHO, 0.0, 1.0)
        .unwrap()
        .at(1.0);
    let err = |dt: f64| {
        let (grid, s) = fdm_at_one(n, dt);
        let phi = sample_on_grid(test_data, &grid);
        s.v.iter()
            .zip(&phi)
            .map(|(v, p)| (v - alpha * p).abs())
            .chain(s.w.iter().zip(&phi).map(|(w, p)| (w - beta * p).abs()))
            .fold(0.0, f64::max)
    };
    let order = (err(0.01) / err(0.005)).log2();
    assert!((order - 1.0).abs() < 0.1, "order {order}");
}

fn fem_l2_error(n: usize, dt: f64) -> f64 {
    let space = FemSpace::structured(n, PI).unwrap();
    let stepper =
        ImplicitEulerStepper::new(space.stiffness(), Some(space.mass()), dt, RHO).unwrap();
    let init =
        StatePair::new(vec![0.0; space.dim()], interpolate_nodal(test_data, &space)).unwrap();
    let s = advance(&stepper, init, (1.0 / dt).round() as usize);
    let ev = interpolate_nodal(|x, y| exact_test_solution(x, y, 1.0).0, &space);
    let ew = interpolate_nodal(|x, y| exact_test_solution(x, y, 1.0).1, &space);
    let dv: Vec<f64> = s.v.iter().zip(&ev).map(|(a, b)| a - b).collect();
    let dw: Vec<f64> = s.w.iter().zip(&ew).map(|(a, b)| a - b).collect();
    (space.mass().quad_form(&dv) + space.mass().quad_form(&dw)).sqrt()
}

#[test]
fn fem_error_decreases_under_simultaneous_refinement() {
    let errs: Vec<f64> = [(8, 0.02), (16, 0.01), (32, 0.005)]
        .iter()
        .map(|&(n, dt)| fem_l2_error(n, dt))
        .collect();
    assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
}

#[test]
fn fem_temporal_order_at_least_one() {
    let n = 16;
    let space = FemSpace::structured(n, PI).unwrap();
    let init =
        StatePair::new(vec![0.0; space.dim()], interpolate_nodal(test_data, &space)).unwrap();
    let solve = |dt: f64| {
        let st = ImplicitEulerStepper::new(space.stiffness(), Some(space.mass()), dt, RHO).unwrap();
        advance(&st, init.clone(), (1.0 / dt).round() as usize)
    };
    let reference = solve(0.02 / 64.0);
    let err = |dt: f64| {
        let s = solve(dt);
        let dv: Vec<f64> = s.v.iter().zip(&reference.v).map(|(a, b)| a - b).collect();
        let dw: Vec<f64> = s.w.iter().zip(&reference.w).map(|(a, b)| a - b).collect();
        (space.mass().quad_form(&dv) + space.mass().quad_form(&dw)).sqrt()
    };
    let order = (err(0.02) / err(0.01)).log2();
    assert!(order >= 0.9, "order {order}");
}
