//! Self-contained property suite that needs no table runs.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use plate_nc::control::f_weight;
use plate_nc::fdm::{build_dn, dn_eigenvalue, kalman_check_fdm, FdGrid, FdmNorm, FdmScheme};
use plate_nc::fem::{kalman_check_fem, FemScheme, FemSpace};
use plate_nc::metrics::energy;
use plate_nc::{make_time_grid, run_null_control, NullControlScheme, StatePair};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            name,
            passed,
            detail,
        }
    }

    fn failed(name: &'static str, err: impl std::fmt::Display) -> Self {
        Self::new(name, false, format!("error: {err}"))
    }
}

const RHO: f64 = 2.5;

pub fn kalman_identity() -> CheckResult {
    let name = "kalman identity K K^-1 = I (both schemes, n <= 8)";
    let mut worst = 0.0f64;
    let mut full_rank = true;
    for n in 2..=8 {
        let fdm = match kalman_check_fdm(&FdGrid::new(n, PI).unwrap(), RHO) {
            Ok(r) => r,
            Err(e) => return CheckResult::failed(name, e),
        };
        let fem = match FemSpace::structured(n, PI).and_then(|s| kalman_check_fem(&s, RHO)) {
            Ok(r) => r,
            Err(e) => return CheckResult::failed(name, e),
        };
        worst = worst.max(fdm.identity_error).max(fem.identity_error);
        full_rank &= fdm.rank == fdm.size && fem.rank == fem.size;
    }
    CheckResult::new(
        name,
        worst <= 1e-10 && full_rank,
        format!("max error {worst:.2e}, full rank {full_rank}"),
    )
}

pub fn dn_spectrum() -> CheckResult {
    let mut worst = 0.0f64;
    for n in 1..=8 {
        let grid = FdGrid::new(n, PI).unwrap();
        let mut dense: Vec<f64> = build_dn(&grid)
            .to_dense()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        let mut formula: Vec<f64> = (1..=n)
            .flat_map(|i| (1..=n).map(move |j| (i, j)))
            .map(|(i, j)| dn_eigenvalue(i, j, &grid).unwrap())
            .collect();
        dense.sort_by(f64::total_cmp);
        formula.sort_by(f64::total_cmp);
        for (a, b) in dense.iter().zip(&formula) {
            worst = worst.max((a - b).abs());
        }
    }
    CheckResult::new(
        "D_N eigenvalue formula vs dense eigensolve (n <= 8)",
        worst <= 1e-10,
        format!("max deviation {worst:.2e}"),
    )
}

pub fn first_eigenvalue_trend() -> CheckResult {
    let a = PI;
    let limit = 2.0 * PI * PI / (a * a);
    let values: Vec<f64> = [4, 8, 16, 32, 64]
        .iter()
        .map(|&n| dn_eigenvalue(1, 1, &FdGrid::new(n, a).unwrap()).unwrap())
        .collect();
    let monotone = values.windows(2).all(|p| p[1] > p[0]) && values.iter().all(|v| *v < limit);
    let h = a / 65.0;
    let gap = limit - values[4];
    CheckResult::new(
        "lambda_11(n) -> 2 pi^2 / a^2 (a = pi)",
        monotone && gap <= h * h,
        format!(
            "lambda_11(64) = {:.6}, gap {gap:.2e} vs h^2 = {:.2e}",
            values[4],
            h * h
        ),
    )
}

pub fn weight_normalization() -> CheckResult {
    let mut worst = 0.0f64;
    for t_final in [2f64.powi(-9), 0.25, 1.0, 2.0, 64.0] {
        // Simpson's rule is exact for the quadratic weight
        let m = 2000;
        let h = t_final / m as f64;
        let mut s = 0.0;
        for k in 0..=m {
            let c = match k {
                0 => 1.0,
                k if k == m => 1.0,
                k if k % 2 == 1 => 4.0,
                _ => 2.0,
            };
            let t = (k as f64 * h).min(t_final);
            s += c * f_weight(t, t_final).unwrap();
        }
        worst = worst.max((s * h / 3.0 - 1.0).abs());
    }
    CheckResult::new(
        "f_T normalization, integral = 1",
        worst <= 1e-12,
        format!("max deviation {worst:.2e}"),
    )
}

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> StatePair {
    StatePair {
        v: (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        w: (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    }
}

fn monotone_trials<S: NullControlScheme>(
    rng: &mut ChaCha8Rng,
    build: impl Fn(usize, f64) -> plate_nc::Result<S>,
) -> plate_nc::Result<(usize, f64)> {
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for trial in 0..100 {
        let n = 2 + trial % 7;
        let dt = rng.gen_range(0.005..0.39);
        let scheme = build(n, dt)?;
        let s = random_state(rng, scheme.dim());
        let e0 = energy(&s, scheme.state_norm())?;
        let e1 = energy(&scheme.step(&s, None)?, scheme.state_norm())?;
        let growth = e1 / e0 - 1.0;
        worst = worst.max(growth);
        if growth > 1e-12 {
            violations += 1;
        }
    }
    Ok((violations, worst))
}

pub fn energy_monotonicity() -> CheckResult {
    let name = "homogeneous energy nonincreasing (both schemes, 100 random states each)";
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let fdm = monotone_trials(&mut rng, |n, dt| {
        FdmScheme::new(FdGrid::new(n, PI)?, dt, RHO, FdmNorm::Euclidean)
    });
    let fem = monotone_trials(&mut rng, |n, dt| {
        FemScheme::new(FemSpace::structured(n, PI)?, dt, RHO)
    });
    match (fdm, fem) {
        (Ok((vf, wf)), Ok((ve, we))) => CheckResult::new(
            name,
            vf == 0 && ve == 0,
            format!(
                "violations fdm {vf}, fem {ve}; max relative growth {:.2e}",
                wf.max(we)
            ),
        ),
        (Err(e), _) | (_, Err(e)) => CheckResult::failed(name, e),
    }
}

fn doubling_error<S: NullControlScheme>(scheme: &S, init: &StatePair) -> plate_nc::Result<f64> {
    let grid = make_time_grid(1.0, (1.0 / scheme.dt()).round() as usize)?;
    let one = run_null_control(scheme, &grid, init)?;
    let two = run_null_control(scheme, &grid, &init.scaled(2.0))?;
    let scale = one
        .controls
        .controls
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let err = one
        .controls
        .controls
        .iter()
        .flatten()
        .zip(two.controls.controls.iter().flatten())
        .map(|(a, b)| (2.0 * a - b).abs())
        .fold(0.0, f64::max);
    Ok(err / scale.max(f64::MIN_POSITIVE))
}

pub fn control_linearity() -> CheckResult {
    let name = "control linear in initial data (both schemes, n <= 8)";
    let v0 = |x: f64, y: f64| x * (PI - x) * y.sin();
    let w0 = |x: f64, y: f64| 1.5 * (2.0 * x).sin() * (2.0 * y).sin();
    let mut worst = 0.0f64;
    for n in [2, 4, 8] {
        let result = (|| -> plate_nc::Result<f64> {
            let fdm = FdmScheme::new(FdGrid::new(n, PI)?, 0.1, RHO, FdmNorm::Euclidean)?;
            let fi = StatePair::new(fdm.sample(v0), fdm.sample(w0))?;
            let fem = FemScheme::new(FemSpace::structured(n, PI)?, 0.1, RHO)?;
            let ei = StatePair::new(fem.interpolate(v0), fem.interpolate(w0))?;
            Ok(doubling_error(&fdm, &fi)?.max(doubling_error(&fem, &ei)?))
        })();
        match result {
            Ok(e) => worst = worst.max(e),
            Err(e) => return CheckResult::failed(name, e),
        }
    }
    CheckResult::new(
        name,
        worst <= 1e-10,
        format!("max relative deviation {worst:.2e}"),
    )
}

/// Runs every check in a fixed order.
pub fn run_property_suite() -> Vec<CheckResult> {
    vec![
        kalman_identity(),
        dn_spectrum(),
        first_eigenvalue_trend(),
        weight_normalization(),
        energy_monotonicity(),
        control_linearity(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        for r in run_property_suite() {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }
}
