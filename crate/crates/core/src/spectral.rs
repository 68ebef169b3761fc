//! Closed-form modal solution of the homogeneous system for `rho > 2`.
//!
//! Each Dirichlet eigenpair `(lambda, phi)` of the square decouples into the
//! 2x2 system `(alpha, beta)' = [[0, lambda], [-lambda, -rho lambda]] (alpha, beta)`,
//! solved by diagonalization.

use std::f64::consts::PI;

use crate::error::{PlateError, Result};

/// One eigenmode of the Dirichlet Laplacian on `(0, side)^2` with initial
/// coefficients against the orthonormal eigenfunction
/// `(2/side) sin(m pi x / side) sin(n pi y / side)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub m: usize,
    pub n: usize,
    pub side: f64,
    pub alpha0: f64,
    pub beta0: f64,
}

impl Mode {
    pub fn new(m: usize, n: usize, side: f64, alpha0: f64, beta0: f64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(PlateError::InvalidParameter(format!(
                "wave numbers must be positive, got ({m}, {n})"
            )));
        }
        if !(side.is_finite() && side > 0.0) {
            return Err(PlateError::InvalidParameter(format!(
                "domain side must be positive, got {side}"
            )));
        }
        Ok(Self {
            m,
            n,
            side,
            alpha0,
            beta0,
        })
    }

    pub fn lambda(&self) -> f64 {
        (PI / self.side).powi(2) * ((self.m * self.m + self.n * self.n) as f64)
    }

    /// Orthonormal eigenfunction at `(x, y)`.
    pub fn eigenfunction(&self, x: f64, y: f64) -> f64 {
        let k = PI / self.side;
        2.0 / self.side * (self.m as f64 * k * x).sin() * (self.n as f64 * k * y).sin()
    }
}

/// Rates, constants and similarity matrix of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalEvolution {
    pub eta1: f64,
    pub eta2: f64,
    pub c1: f64,
    pub c2: f64,
    /// Row-major `S` with columns the eigenvectors for `eta1`, `eta2`.
    pub similarity: [[f64; 2]; 2],
}

impl ModalEvolution {
    pub fn new(lambda: f64, rho: f64, alpha0: f64, beta0: f64) -> Result<Self> {
        let (eta1, eta2) = modal_rates(lambda, rho)?;
        let (c1, c2) = modal_constants(alpha0, beta0, rho)?;
        Ok(Self {
            eta1,
            eta2,
            c1,
            c2,
            similarity: similarity(rho),
        })
    }

    pub fn at(&self, t: f64) -> (f64, f64) {
        let z1 = self.c1 * (self.eta1 * t).exp();
        let z2 = self.c2 * (self.eta2 * t).exp();
        let s = &self.similarity;
        (s[0][0] * z1 + s[0][1] * z2, s[1][0] * z1 + s[1][1] * z2)
    }
}

fn discriminant(rho: f64) -> Result<f64> {
    if !(rho.is_finite() && rho > 2.0) {
        return Err(PlateError::InvalidParameter(format!(
            "closed-form modes need rho > 2, got {rho}"
        )));
    }
    Ok((rho * rho - 4.0).sqrt())
}

fn similarity(rho: f64) -> [[f64; 2]; 2] {
    let s = (rho * rho - 4.0).sqrt();
    [[0.5 * (s - rho), -0.5 * (rho + s)], [1.0, 1.0]]
}

/// `eta1 = -(lambda/2)(rho + s)`, `eta2 = -(lambda/2)(rho - s)`, `s = sqrt(rho^2 - 4)`.
pub fn modal_rates(lambda: f64, rho: f64) -> Result<(f64, f64)> {
    let s = discriminant(rho)?;
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(PlateError::InvalidParameter(format!(
            "eigenvalue must be positive, got {lambda}"
        )));
    }
    Ok((-0.5 * lambda * (rho + s), -0.5 * lambda * (rho - s)))
}

/// Coordinates of `(alpha0, beta0)` in the eigenbasis.
pub fn modal_constants(alpha0: f64, beta0: f64, rho: f64) -> Result<(f64, f64)> {
    let s = discriminant(rho)?;
    Ok((
        (alpha0 + 0.5 * beta0 * (rho + s)) / s,
        (-alpha0 - 0.5 * beta0 * (rho - s)) / s,
    ))
}

/// Modal coefficients `(alpha(t), beta(t))`.
pub fn modal_evolve(mode: &Mode, rho: f64, t: f64) -> Result<(f64, f64)> {
    if !(t >= 0.0) {
        return Err(PlateError::InvalidParameter(format!(
            "time must be nonnegative, got {t}"
        )));
    }
    Ok(ModalEvolution::new(mode.lambda(), rho, mode.alpha0, mode.beta0)?.at(t))
}

/// Exact solution for `rho = 5/2`, side `pi`, `v0 = 0`, `w0 = (3/2) sin 2x sin 2y`.
pub fn exact_test_solution(x: f64, y: f64, t: f64) -> (f64, f64) {
    let shape = (2.0 * x).sin() * (2.0 * y).sin();
    let (slow, fast) = ((-4.0 * t).exp(), (-16.0 * t).exp());
    ((slow - fast) * shape, (2.0 * fast - 0.5 * slow) * shape)
}

/// Truncated modal expansion at `(x, y, t)`.
pub fn evaluate_modal_sum(modes: &[Mode], rho: f64, x: f64, y: f64, t: f64) -> Result<(f64, f64)> {
    modes.iter().try_fold((0.0, 0.0), |(v, w), mode| {
        let (a, b) = modal_evolve(mode, rho, t)?;
        let phi = mode.eigenfunction(x, y);
        Ok((v + a * phi, w + b * phi))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rate_examples() {
        let (e1, e2) = modal_rates(8.0, 2.5).unwrap();
        assert!((e1 + 16.0).abs() < 1e-12 && (e2 + 4.0).abs() < 1e-12);
        let (e1, e2) = modal_rates(1.0, 2.5).unwrap();
        assert!((e1 + 2.0).abs() < 1e-12 && (e2 + 0.5).abs() < 1e-12);
        assert!(modal_rates(8.0, 2.0).is_err());
        assert!(modal_rates(8.0, 1.0).is_err());
        assert!(modal_rates(0.0, 2.5).is_err());
    }

    #[test]
    fn constant_examples() {
        assert_eq!(modal_constants(0.0, 0.0, 2.5).unwrap(), (0.0, 0.0));
        let (c1, c2) = modal_constants(0.0, 1.0, 2.5).unwrap();
        assert!((c1 - 4.0 / 3.0).abs() < 1e-12 && (c2 + 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn evolve_reproduces_test_coefficients() {
        let mode = Mode::new(2, 2, PI, 0.0, 1.5).unwrap();
        assert!((mode.lambda() - 8.0).abs() < 1e-12);
        for t in [0.0, 0.05, 0.3, 1.0, 2.5] {
            let (a, b) = modal_evolve(&mode, 2.5, t).unwrap();
            let ea = (-4.0 * t).exp() - (-16.0 * t).exp();
            let eb = 2.0 * (-16.0 * t).exp() - 0.5 * (-4.0 * t).exp();
            assert!((a - ea).abs() < 1e-12 && (b - eb).abs() < 1e-12, "t = {t}");
        }
        assert!(modal_evolve(&mode, 2.5, -1.0).is_err());
    }

    #[test]
    fn test_solution_examples() {
        let (v, w) = exact_test_solution(0.7, 1.3, 0.0);
        assert_eq!(v, 0.0);
        assert!((w - 1.5 * (1.4f64).sin() * (2.6f64).sin()).abs() < 1e-15);
        let (v, _) = exact_test_solution(PI / 4.0, PI / 4.0, 0.25);
        assert!((v - ((-1.0f64).exp() - (-4.0f64).exp())).abs() < 1e-15);
        assert!((v - 0.349564).abs() < 1e-6);
        for t in [0.0, 0.5, 3.0] {
            let (v, w) = exact_test_solution(PI, 1.0, t);
            assert!(v.abs() < 1e-14 && w.abs() < 1e-14);
        }
    }

    #[test]
    fn single_mode_sum_matches_test_solution() {
        let mode = Mode::new(2, 2, PI, 0.0, PI / 2.0 * 1.5).unwrap();
        for &(x, y, t) in &[(0.3, 0.9, 0.0), (1.1, 2.0, 0.2), (2.9, 0.4, 1.7)] {
            let (v, w) = evaluate_modal_sum(&[mode], 2.5, x, y, t).unwrap();
            let (ev, ew) = exact_test_solution(x, y, t);
            assert!((v - ev).abs() < 1e-12 && (w - ew).abs() < 1e-12);
        }
        assert_eq!(
            evaluate_modal_sum(&[], 2.5, 1.0, 1.0, 1.0).unwrap(),
            (0.0, 0.0)
        );
    }

    #[test]
    fn derivative_matches_modal_system() {
        let mode = Mode::new(1, 3, 2.0, 0.4, -0.7).unwrap();
        let (l, rho, t, eps) = (mode.lambda(), 3.0, 0.05, 1e-6);
        let (a_p, b_p) = modal_evolve(&mode, rho, t + eps).unwrap();
        let (a_m, b_m) = modal_evolve(&mode, rho, t - eps).unwrap();
        let (a, b) = modal_evolve(&mode, rho, t).unwrap();
        let da = (a_p - a_m) / (2.0 * eps);
        let db = (b_p - b_m) / (2.0 * eps);
        let scale = l * (a.abs() + b.abs()) * rho;
        assert!((da - l * b).abs() < 1e-5 * scale);
        assert!((db - (-l * a - rho * l * b)).abs() < 1e-5 * scale);
    }

    proptest! {
        #[test]
        fn vieta(lambda in 0.01f64..100.0, rho in 2.001f64..10.0) {
            let (e1, e2) = modal_rates(lambda, rho).unwrap();
            prop_assert!(e1 < e2 && e2 < 0.0);
            prop_assert!((e1 * e2 - lambda * lambda).abs() <= 1e-12 * lambda * lambda);
            prop_assert!((e1 + e2 + rho * lambda).abs() <= 1e-12 * rho * lambda);
        }

        #[test]
        fn reconstruction(a0 in -5.0f64..5.0, b0 in -5.0f64..5.0, rho in 2.01f64..10.0) {
            let (c1, c2) = modal_constants(a0, b0, rho).unwrap();
            let s = similarity(rho);
            prop_assert!((s[0][0] * c1 + s[0][1] * c2 - a0).abs() < 1e-12 * (1.0 + a0.abs() + b0.abs()) * rho);
            prop_assert!((s[1][0] * c1 + s[1][1] * c2 - b0).abs() < 1e-12 * (1.0 + a0.abs() + b0.abs()) * rho);
        }

        #[test]
        fn superposition(b1 in -2.0f64..2.0, b2 in -2.0f64..2.0, x in 0.0f64..3.0, y in 0.0f64..3.0, t in 0.0f64..2.0) {
            let first = [Mode::new(1, 1, 3.0, 0.5, b1).unwrap()];
            let second = [Mode::new(2, 1, 3.0, -0.2, b2).unwrap(), Mode::new(1, 2, 3.0, 0.0, 1.0).unwrap()];
            let all: Vec<Mode> = first.iter().chain(&second).copied().collect();
            let (v1, w1) = evaluate_modal_sum(&first, 2.5, x, y, t).unwrap();
            let (v2, w2) = evaluate_modal_sum(&second, 2.5, x, y, t).unwrap();
            let (v, w) = evaluate_modal_sum(&all, 2.5, x, y, t).unwrap();
            prop_assert!((v - v1 - v2).abs() < 1e-12 && (w - w1 - w2).abs() < 1e-12);
        }

        #[test]
        fn envelope_decays(a0 in -3.0f64..3.0, b0 in -3.0f64..3.0, rho in 2.05f64..6.0, t in 0.0f64..5.0) {
            let ev = ModalEvolution::new(2.0, rho, a0, b0).unwrap();
            let env = |t: f64| ev.c1.abs() * (ev.eta1 * t).exp() + ev.c2.abs() * (ev.eta2 * t).exp();
            prop_assert!(env(t + 0.1) <= env(t));
        }
    }
}
