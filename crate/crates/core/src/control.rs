//! Scheme-independent pieces of the steering control and the time loop that
//! drives either discretization to rest.
//!
//! With the weight `f_T(t) = 6 t (T - t) / T^3` the control at level `j+1` is
//! `u = mu0 + mu1'`, where `mu0 = -(rho v + w) f_T` is built from a homogeneous
//! twin trajectory and `mu1'` solves an elliptic problem with right-hand side
//! `-G`, `G ~ (v f_T)'` approximated by a forward difference.

use crate::error::{check_len, PlateError, Result};
use crate::metrics::{energy, StateNorm};
use crate::types::{ControlTrajectory, RunReport, StatePair, TimeGrid};

fn check_window(t: f64, t_final: f64) -> Result<()> {
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(PlateError::InvalidParameter(format!(
            "terminal time must be positive, got {t_final}"
        )));
    }
    // grid nodes j*T/m can land a rounding error past T
    let slack = 1e-12 * t_final;
    if !(t >= -slack && t <= t_final + slack) {
        return Err(PlateError::InvalidParameter(format!(
            "time {t} outside [0, {t_final}]"
        )));
    }
    Ok(())
}

/// `f_T(t) = 6 t (T - t) / T^3`, normalized to unit mass on `[0, T]`.
pub fn f_weight(t: f64, t_final: f64) -> Result<f64> {
    check_window(t, t_final)?;
    Ok(6.0 * t * (t_final - t) / t_final.powi(3))
}

/// `f_T'(t) = 6 (T - 2t) / T^3`.
pub fn f_weight_prime(t: f64, t_final: f64) -> Result<f64> {
    check_window(t, t_final)?;
    Ok(6.0 * (t_final - 2.0 * t) / t_final.powi(3))
}

/// `-(rho vh + wh) f_T(t)`.
pub fn mu_zero(vh: &[f64], wh: &[f64], rho: f64, t: f64, t_final: f64) -> Result<Vec<f64>> {
    check_len(vh.len(), wh.len())?;
    let f = f_weight(t, t_final)?;
    Ok(vh.iter().zip(wh).map(|(v, w)| -(rho * v + w) * f).collect())
}

/// `(vh_next2 - vh_next) / dt * f_T(t_next) + vh_next * f_T'(t_next)`.
pub fn g_vector(
    vh_next2: &[f64],
    vh_next: &[f64],
    dt: f64,
    t_next: f64,
    t_final: f64,
) -> Result<Vec<f64>> {
    check_len(vh_next.len(), vh_next2.len())?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(PlateError::InvalidParameter(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let f = f_weight(t_next, t_final)?;
    let fp = f_weight_prime(t_next, t_final)?;
    Ok(vh_next2
        .iter()
        .zip(vh_next)
        .map(|(a, b)| (a - b) / dt * f + b * fp)
        .collect())
}

/// A fully-discrete implicit-Euler scheme that the control loop can drive.
///
/// Implementations hold their factorizations and are shared read-only across
/// concurrent runs.
pub trait NullControlScheme: Sync {
    fn dim(&self) -> usize;
    fn rho(&self) -> f64;
    fn dt(&self) -> f64;
    /// One step; `forcing` is the control at the new time level.
    fn step(&self, state: &StatePair, forcing: Option<&[f64]>) -> Result<StatePair>;
    /// `mu1'` for a given `G`.
    fn mu1_prime(&self, g: &[f64]) -> Result<Vec<f64>>;
    /// Norm used for the terminal energy and the control norm.
    fn state_norm(&self) -> &dyn StateNorm;
}

/// `u^{j+1} = mu0 + mu1'` from the twin values at `t_{j+1}` and `t_{j+2}`.
pub fn control_at_step<S: NullControlScheme + ?Sized>(
    scheme: &S,
    vh_next2: &[f64],
    vh_next: &[f64],
    wh_next: &[f64],
    t_next: f64,
    t_final: f64,
) -> Result<Vec<f64>> {
    let n = scheme.dim();
    check_len(n, vh_next2.len())?;
    check_len(n, vh_next.len())?;
    check_len(n, wh_next.len())?;
    let mut u = mu_zero(vh_next, wh_next, scheme.rho(), t_next, t_final)?;
    let g = g_vector(vh_next2, vh_next, scheme.dt(), t_next, t_final)?;
    let mu1 = scheme.mu1_prime(&g)?;
    for (a, b) in u.iter_mut().zip(&mu1) {
        *a += b;
    }
    Ok(u)
}

/// Output of one controlled run.
#[derive(Debug, Clone)]
pub struct NullControlRun {
    pub report: RunReport,
    pub controls: ControlTrajectory,
    pub terminal: StatePair,
}

/// Runs the controlled loop on `grid` starting from `initial`.
///
/// Each step advances the homogeneous twin so that levels `j+1` and `j+2` are
/// available, builds `u^{j+1}` and then advances the controlled state.
pub fn run_null_control<S: NullControlScheme + ?Sized>(
    scheme: &S,
    grid: &TimeGrid,
    initial: &StatePair,
) -> Result<NullControlRun> {
    let dim = scheme.dim();
    initial.check_dim(dim)?;
    if (grid.dt() - scheme.dt()).abs() > 1e-12 * scheme.dt() {
        return Err(PlateError::InvalidParameter(format!(
            "time grid step {} does not match the factorized step {}",
            grid.dt(),
            scheme.dt()
        )));
    }
    let t_final = grid.t_final();
    let m = grid.steps();

    let mut twin_next = scheme.step(initial, None)?;
    let mut twin_next2 = scheme.step(&twin_next, None)?;
    let mut state = initial.clone();
    let mut controls = Vec::with_capacity(m);

    for j in 0..m {
        let t_next = grid.node(j + 1);
        let u = control_at_step(
            scheme,
            &twin_next2.v,
            &twin_next.v,
            &twin_next.w,
            t_next,
            t_final,
        )?;
        state = scheme.step(&state, Some(&u))?;
        controls.push(u);
        if j + 1 < m {
            let advanced = scheme.step(&twin_next2, None)?;
            twin_next = std::mem::replace(&mut twin_next2, advanced);
        }
    }

    let norm = scheme.state_norm();
    let controls = ControlTrajectory {
        controls,
        grid: grid.clone(),
    };
    let report = RunReport {
        terminal_energy: energy(&state, norm)?,
        control_norm: controls.l2_norm(|u| norm.norm_sq(u)),
        t_final,
        dt: grid.dt(),
        dim,
    };
    Ok(NullControlRun {
        report,
        controls,
        terminal: state,
    })
}
