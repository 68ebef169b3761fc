//! Five-point finite differences on a uniform grid of `(0, a)^2`.
//!
//! Interior unknowns are ordered row by row: `index(i, j) = (j - 1) n + (i - 1)`
//! with `i` running fastest. The semi-discrete generator is
//! `D_N = (I (x) E + E (x) I) / h^2`, `E = tridiag(-1, 2, -1)`.

use crate::control::{control_at_step, run_null_control, NullControlRun, NullControlScheme};
use crate::error::{check_len, PlateError, Result};
use crate::kalman::{check_dense_dim, kalman_check_dense, KalmanReport};
use crate::linalg::{SparseSpdMatrix, SpdSolver};
use crate::metrics::{DiagonalWeights, Euclidean, StateNorm};
use crate::stepper::ImplicitEulerStepper;
use crate::types::{PlateParams, StatePair};

/// Uniform interior grid with `n` points per axis and mesh width `h = a / (n + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdGrid {
    n: usize,
    side: f64,
    h: f64,
}

impl FdGrid {
    pub fn new(n: usize, side: f64) -> Result<Self> {
        if n < 1 {
            return Err(PlateError::InvalidParameter(
                "grid needs at least one interior point per axis".into(),
            ));
        }
        if !(side.is_finite() && side > 0.0) {
            return Err(PlateError::InvalidParameter(format!(
                "domain side must be positive, got {side}"
            )));
        }
        Ok(Self {
            n,
            side,
            h: side / (n + 1) as f64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of unknowns `N = n^2`.
    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    /// Linear index of the interior point `(x_i, y_j)`, `1 <= i, j <= n`.
    pub fn index(&self, i: usize, j: usize) -> Result<usize> {
        self.check_pair(i, j)?;
        Ok((j - 1) * self.n + (i - 1))
    }

    /// Inverse of [`FdGrid::index`].
    pub fn pair(&self, k: usize) -> (usize, usize) {
        (k % self.n + 1, k / self.n + 1)
    }

    /// Coordinates of unknown `k`.
    pub fn point(&self, k: usize) -> (f64, f64) {
        let (i, j) = self.pair(k);
        (i as f64 * self.h, j as f64 * self.h)
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i < 1 || j < 1 || i > self.n || j > self.n {
            return Err(PlateError::IndexOutOfRange(format!(
                "grid index ({i}, {j}) outside 1..={}",
                self.n
            )));
        }
        Ok(())
    }
}

/// The five-point Dirichlet Laplacian `D_N`.
pub fn build_dn(grid: &FdGrid) -> SparseSpdMatrix {
    let n = grid.n;
    let s = 1.0 / (grid.h * grid.h);
    let mut entries = Vec::with_capacity(5 * n * n);
    for j in 0..n {
        for i in 0..n {
            let k = j * n + i;
            entries.push((k, k, 4.0 * s));
            if i > 0 {
                entries.push((k, k - 1, -s));
            }
            if i + 1 < n {
                entries.push((k, k + 1, -s));
            }
            if j > 0 {
                entries.push((k, k - n, -s));
            }
            if j + 1 < n {
                entries.push((k, k + n, -s));
            }
        }
    }
    SparseSpdMatrix::from_triplets(n * n, entries).expect("five-point stencil is symmetric")
}

/// Closed-form eigenvalue `lambda_{i,j}` of `D_N`.
pub fn dn_eigenvalue(i: usize, j: usize, grid: &FdGrid) -> Result<f64> {
    grid.check_pair(i, j)?;
    let theta = std::f64::consts::PI / (grid.n + 1) as f64;
    let c = (i as f64 * theta).cos() + (j as f64 * theta).cos();
    Ok((4.0 - 2.0 * c) / (grid.h * grid.h))
}

/// Samples `f` at the interior grid points in unknown order.
pub fn sample_on_grid(f: impl Fn(f64, f64) -> f64, grid: &FdGrid) -> Vec<f64> {
    (0..grid.dim())
        .map(|k| {
            let (x, y) = grid.point(k);
            f(x, y)
        })
        .collect()
}

/// One homogeneous implicit-Euler step (factors on every call).
pub fn fdm_homogeneous_step(
    state: &StatePair,
    dt: f64,
    rho: f64,
    dn: &SparseSpdMatrix,
) -> Result<StatePair> {
    ImplicitEulerStepper::new(dn, None, dt, rho)?.step(state, None)
}

/// One controlled implicit-Euler step with forcing `u` at the new level.
pub fn fdm_controlled_step(
    state: &StatePair,
    u: &[f64],
    dt: f64,
    rho: f64,
    dn: &SparseSpdMatrix,
) -> Result<StatePair> {
    ImplicitEulerStepper::new(dn, None, dt, rho)?.step(state, Some(u))
}

/// `u^{j+1} = mu0 + mu1'` with `D_N mu1' = -G`.
#[allow(clippy::too_many_arguments)]
pub fn fdm_control_at_step(
    vh_next2: &[f64],
    vh_next: &[f64],
    wh_next: &[f64],
    t_next: f64,
    dt: f64,
    t_final: f64,
    rho: f64,
    dn: &SparseSpdMatrix,
) -> Result<Vec<f64>> {
    let dim = dn.dim();
    check_len(dim, vh_next.len())?;
    let mut u = crate::control::mu_zero(vh_next, wh_next, rho, t_next, t_final)?;
    let g = crate::control::g_vector(vh_next2, vh_next, dt, t_next, t_final)?;
    let minus_g: Vec<f64> = g.iter().map(|x| -x).collect();
    let mu1 = crate::linalg::solve_spd(dn, &minus_g)?;
    for (a, b) in u.iter_mut().zip(&mu1) {
        *a += b;
    }
    Ok(u)
}

/// Norm used for terminal energies and control norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FdmNorm {
    /// Plain Euclidean norm on `R^N`.
    #[default]
    Euclidean,
    /// Discrete `L^2` norm, weights `h^2`.
    GridL2,
}

#[derive(Debug, Clone)]
enum FdmNormImpl {
    Euclidean(Euclidean),
    Weighted(DiagonalWeights),
}

/// Everything needed to run the controlled loop on one grid with one step
/// size; cheap to share across threads.
#[derive(Debug, Clone)]
pub struct FdmScheme {
    grid: FdGrid,
    dn: SparseSpdMatrix,
    stepper: ImplicitEulerStepper,
    dn_solver: SpdSolver,
    norm: FdmNormImpl,
}

impl FdmScheme {
    pub fn new(grid: FdGrid, dt: f64, rho: f64, norm: FdmNorm) -> Result<Self> {
        let dn = build_dn(&grid);
        let stepper = ImplicitEulerStepper::new(&dn, None, dt, rho)?;
        let dn_solver = SpdSolver::new(&dn)?;
        let norm = match norm {
            FdmNorm::Euclidean => FdmNormImpl::Euclidean(Euclidean(grid.dim())),
            FdmNorm::GridL2 => {
                FdmNormImpl::Weighted(DiagonalWeights::uniform(grid.dim(), grid.h * grid.h))
            }
        };
        Ok(Self {
            grid,
            dn,
            stepper,
            dn_solver,
            norm,
        })
    }

    pub fn grid(&self) -> &FdGrid {
        &self.grid
    }

    pub fn dn(&self) -> &SparseSpdMatrix {
        &self.dn
    }

    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        sample_on_grid(f, &self.grid)
    }
}

impl NullControlScheme for FdmScheme {
    fn dim(&self) -> usize {
        self.grid.dim()
    }

    fn rho(&self) -> f64 {
        self.stepper.rho()
    }

    fn dt(&self) -> f64 {
        self.stepper.dt()
    }

    fn step(&self, state: &StatePair, forcing: Option<&[f64]>) -> Result<StatePair> {
        self.stepper.step(state, forcing)
    }

    fn mu1_prime(&self, g: &[f64]) -> Result<Vec<f64>> {
        let minus_g: Vec<f64> = g.iter().map(|x| -x).collect();
        self.dn_solver.solve(&minus_g)
    }

    fn state_norm(&self) -> &dyn StateNorm {
        match &self.norm {
            FdmNormImpl::Euclidean(e) => e,
            FdmNormImpl::Weighted(w) => w,
        }
    }
}

/// Runs the finite-difference null-control loop with Euclidean norms.
pub fn run_fdm_null_control(
    params: &PlateParams,
    v0: impl Fn(f64, f64) -> f64,
    w0: impl Fn(f64, f64) -> f64,
) -> Result<NullControlRun> {
    if !params.satisfies_fem_step_bound() {
        log::warn!(
            "dt = {} is not below 1/rho = {}",
            params.dt(),
            1.0 / params.rho
        );
    }
    let grid = FdGrid::new(params.n, params.side)?;
    let scheme = FdmScheme::new(grid, params.dt(), params.rho, FdmNorm::Euclidean)?;
    let initial = StatePair::new(scheme.sample(v0), scheme.sample(w0))?;
    run_null_control(&scheme, &params.time_grid(), &initial)
}

/// `u^{j+1}` for an already factored scheme.
pub fn fdm_scheme_control_at_step(
    scheme: &FdmScheme,
    vh_next2: &[f64],
    vh_next: &[f64],
    wh_next: &[f64],
    t_next: f64,
    t_final: f64,
) -> Result<Vec<f64>> {
    control_at_step(scheme, vh_next2, vh_next, wh_next, t_next, t_final)
}

/// Dense audit of the Kalman matrix with `A = D_N`.
pub fn kalman_check_fdm(grid: &FdGrid, rho: f64) -> Result<KalmanReport> {
    check_dense_dim(grid.dim())?;
    let d = build_dn(grid).to_dense();
    let d_inv = d
        .clone()
        .cholesky()
        .ok_or_else(|| PlateError::Factorization("D_N is not positive definite".into()))?
        .inverse();
    Ok(kalman_check_dense(&d, &d_inv, rho))
}
