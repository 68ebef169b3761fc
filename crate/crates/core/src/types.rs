//! Configuration, state and reporting types shared by both schemes.

use crate::error::{check_len, PlateError, Result};

/// Physical and discretization parameters of one run.
///
/// The domain is the square `(0, side)^2`; `steps` uniform time steps cover
/// `[0, t_final]` and `n` is the interior resolution per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateParams {
    pub rho: f64,
    pub side: f64,
    pub t_final: f64,
    pub steps: usize,
    pub n: usize,
}

impl PlateParams {
    pub fn new(rho: f64, side: f64, t_final: f64, steps: usize, n: usize) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(PlateError::InvalidParameter(format!(
                "damping rho must be positive, got {rho}"
            )));
        }
        if rho == 2.0 {
            return Err(PlateError::InvalidParameter(
                "damping rho = 2 is excluded (repeated modal rate)".into(),
            ));
        }
        if !(side.is_finite() && side > 0.0) {
            return Err(PlateError::InvalidParameter(format!(
                "domain side must be positive, got {side}"
            )));
        }
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(PlateError::InvalidParameter(format!(
                "terminal time must be positive, got {t_final}"
            )));
        }
        if steps < 2 {
            return Err(PlateError::InvalidParameter(format!(
                "need at least 2 time steps, got {steps}"
            )));
        }
        if n < 2 {
            return Err(PlateError::InvalidParameter(format!(
                "need at least 2 interior points per axis, got {n}"
            )));
        }
        Ok(Self {
            rho,
            side,
            t_final,
            steps,
            n,
        })
    }

    /// Builds parameters from a step size; `t_final / dt` must be an integer.
    pub fn with_time_step(rho: f64, side: f64, t_final: f64, dt: f64, n: usize) -> Result<Self> {
        let steps = steps_for(t_final, dt)?;
        Self::new(rho, side, t_final, steps, n)
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.steps as f64
    }

    pub fn time_grid(&self) -> TimeGrid {
        TimeGrid::new(self.t_final, self.steps).expect("validated on construction")
    }

    /// Unique solvability condition of the fully-discrete finite element scheme.
    pub fn satisfies_fem_step_bound(&self) -> bool {
        self.dt() < 1.0 / self.rho
    }

    /// The closed-form modal solution needs real, distinct rates.
    pub fn has_real_modal_rates(&self) -> bool {
        self.rho > 2.0
    }
}

/// Number of steps `t_final / dt`, rejecting non-integral ratios.
pub fn steps_for(t_final: f64, dt: f64) -> Result<usize> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(PlateError::InvalidParameter(format!(
            "time step must be positive, got {dt}"
        )));
    }
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(PlateError::InvalidParameter(format!(
            "terminal time must be positive, got {t_final}"
        )));
    }
    let ratio = t_final / dt;
    let steps = ratio.round();
    if (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
        return Err(PlateError::InvalidParameter(format!(
            "terminal time {t_final} is not an integer multiple of dt = {dt}"
        )));
    }
    Ok(steps as usize)
}

/// Uniform time grid `t_j = j * dt`, `j = 0..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    dt: f64,
    nodes: Vec<f64>,
}

impl TimeGrid {
    pub fn new(t_final: f64, steps: usize) -> Result<Self> {
        make_time_grid(t_final, steps)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn t_final(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn node(&self, j: usize) -> f64 {
        self.nodes[j]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
}

pub fn make_time_grid(t_final: f64, steps: usize) -> Result<TimeGrid> {
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(PlateError::InvalidParameter(format!(
            "terminal time must be positive, got {t_final}"
        )));
    }
    if steps < 2 {
        return Err(PlateError::InvalidParameter(format!(
            "need at least 2 time steps, got {steps}"
        )));
    }
    let m = steps as f64;
    // j * T / m keeps the last node exactly at T
    let nodes = (0..=steps).map(|j| j as f64 * t_final / m).collect();
    Ok(TimeGrid {
        dt: t_final / m,
        nodes,
    })
}

/// Coefficient vectors `(v, w)` of the first-order system at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePair {
    pub v: Vec<f64>,
    pub w: Vec<f64>,
}

impl StatePair {
    pub fn new(v: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        check_len(v.len(), w.len())?;
        Ok(Self { v, w })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            v: vec![0.0; dim],
            w: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            v: self.v.iter().map(|x| alpha * x).collect(),
            w: self.w.iter().map(|x| alpha * x).collect(),
        }
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        check_len(dim, self.v.len())?;
        check_len(dim, self.w.len())
    }
}

/// Discrete null-control vectors `u^{j+1}`, one per time step.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlTrajectory {
    pub controls: Vec<Vec<f64>>,
    pub grid: TimeGrid,
}

impl ControlTrajectory {
    /// Right-endpoint rectangle rule: `(dt * sum_j |u^{j+1}|^2)^{1/2}`.
    pub fn l2_norm(&self, norm_sq: impl Fn(&[f64]) -> f64) -> f64 {
        let sum: f64 = self.controls.iter().map(|u| norm_sq(u)).sum();
        (self.grid.dt() * sum).sqrt()
    }

    /// Time of the control vector at `index`, i.e. `t_{index+1}`.
    pub fn time_of(&self, index: usize) -> f64 {
        self.grid.node(index + 1)
    }
}

/// Norms measured at the end of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunReport {
    /// `|v(T)|^2 + |w(T)|^2` in the scheme's norm (not halved).
    pub terminal_energy: f64,
    /// Discrete `L^2(0,T)` norm of the control.
    pub control_norm: f64,
    pub t_final: f64,
    pub dt: f64,
    pub dim: usize,
}
