//! Continuous P1 finite elements with homogeneous Dirichlet conditions.
//!
//! Boundary vertices are eliminated, so the unknowns are the nodal values at
//! interior vertices and the mass and stiffness matrices `M`, `S` are SPD.

pub mod assembly;
pub mod mesh;

pub use assembly::{
    assemble_mass, assemble_mass_full, assemble_stiffness, element_mass, element_stiffness,
};
pub use mesh::{
    audit_mesh, build_structured_mesh, parse_mesh, read_mesh, MeshAudit, MeshBounds, TriMesh,
};

use crate::control::{run_null_control, NullControlRun, NullControlScheme};
use crate::error::{check_len, PlateError, Result};
use crate::kalman::{check_dense_dim, kalman_check_dense, KalmanReport};
use crate::linalg::{solve_spd, SparseSpdMatrix, SpdSolver};
use crate::metrics::StateNorm;
use crate::stepper::ImplicitEulerStepper;
use crate::types::{PlateParams, StatePair};

/// A mesh together with its assembled mass and stiffness matrices.
#[derive(Debug, Clone)]
pub struct FemSpace {
    mesh: TriMesh,
    mass: SparseSpdMatrix,
    stiffness: SparseSpdMatrix,
}

impl FemSpace {
    pub fn new(mesh: TriMesh) -> Result<Self> {
        let mass = assemble_mass(&mesh)?;
        let stiffness = assemble_stiffness(&mesh)?;
        Ok(Self {
            mesh,
            mass,
            stiffness,
        })
    }

    pub fn structured(n: usize, side: f64) -> Result<Self> {
        Self::new(build_structured_mesh(n, side)?)
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn mass(&self) -> &SparseSpdMatrix {
        &self.mass
    }

    pub fn stiffness(&self) -> &SparseSpdMatrix {
        &self.stiffness
    }

    pub fn dim(&self) -> usize {
        self.mesh.num_interior()
    }
}

/// Nodal interpolant: `f` evaluated at each interior vertex.
pub fn interpolate_nodal(f: impl Fn(f64, f64) -> f64, space: &FemSpace) -> Vec<f64> {
    let mesh = space.mesh();
    mesh.interior_vertices()
        .iter()
        .map(|&v| {
            let [x, y] = mesh.vertices()[v];
            f(x, y)
        })
        .collect()
}

fn warn_step_bound(dt: f64, rho: f64) {
    if dt >= 1.0 / rho {
        log::warn!("dt = {dt} is not below 1/rho = {}", 1.0 / rho);
    }
}

/// One homogeneous step (factors on every call).
pub fn fem_homogeneous_step(
    state: &StatePair,
    dt: f64,
    rho: f64,
    space: &FemSpace,
) -> Result<StatePair> {
    warn_step_bound(dt, rho);
    ImplicitEulerStepper::new(space.stiffness(), Some(space.mass()), dt, rho)?.step(state, None)
}

/// One controlled step; `u` holds nodal coefficients of the control.
pub fn fem_controlled_step(
    state: &StatePair,
    u: &[f64],
    dt: f64,
    rho: f64,
    space: &FemSpace,
) -> Result<StatePair> {
    warn_step_bound(dt, rho);
    ImplicitEulerStepper::new(space.stiffness(), Some(space.mass()), dt, rho)?.step(state, Some(u))
}

/// `u^{j+1} = mu0 + mu1'` with `S mu1' = -M G`.
#[allow(clippy::too_many_arguments)]
pub fn fem_control_at_step(
    vh_next2: &[f64],
    vh_next: &[f64],
    wh_next: &[f64],
    t_next: f64,
    dt: f64,
    t_final: f64,
    rho: f64,
    space: &FemSpace,
) -> Result<Vec<f64>> {
    check_len(space.dim(), vh_next.len())?;
    let mut u = crate::control::mu_zero(vh_next, wh_next, rho, t_next, t_final)?;
    let g = crate::control::g_vector(vh_next2, vh_next, dt, t_next, t_final)?;
    let rhs: Vec<f64> = space.mass().apply(&g)?.iter().map(|x| -x).collect();
    let mu1 = solve_spd(space.stiffness(), &rhs)?;
    for (a, b) in u.iter_mut().zip(&mu1) {
        *a += b;
    }
    Ok(u)
}

/// Factored finite-element scheme for one step size; norms are `M`-weighted.
#[derive(Debug, Clone)]
pub struct FemScheme {
    space: FemSpace,
    stepper: ImplicitEulerStepper,
    stiffness_solver: SpdSolver,
}

impl FemScheme {
    pub fn new(space: FemSpace, dt: f64, rho: f64) -> Result<Self> {
        warn_step_bound(dt, rho);
        let stepper = ImplicitEulerStepper::new(space.stiffness(), Some(space.mass()), dt, rho)?;
        let stiffness_solver = SpdSolver::new(space.stiffness())?;
        Ok(Self {
            space,
            stepper,
            stiffness_solver,
        })
    }

    pub fn space(&self) -> &FemSpace {
        &self.space
    }

    pub fn interpolate(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        interpolate_nodal(f, &self.space)
    }
}

impl NullControlScheme for FemScheme {
    fn dim(&self) -> usize {
        self.space.dim()
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
        let rhs: Vec<f64> = self.space.mass().apply(g)?.iter().map(|x| -x).collect();
        self.stiffness_solver.solve(&rhs)
    }

    fn state_norm(&self) -> &dyn StateNorm {
        self.space.mass()
    }
}

/// Runs the finite-element null-control loop on the structured mesh with
/// `params.n` interior vertices per axis.
pub fn run_fem_null_control(
    params: &PlateParams,
    v0: impl Fn(f64, f64) -> f64,
    w0: impl Fn(f64, f64) -> f64,
) -> Result<NullControlRun> {
    let space = FemSpace::structured(params.n, params.side)?;
    let scheme = FemScheme::new(space, params.dt(), params.rho)?;
    let initial = StatePair::new(scheme.interpolate(v0), scheme.interpolate(w0))?;
    run_null_control(&scheme, &params.time_grid(), &initial)
}

/// Dense audit of the Kalman matrix with `A = M^{-1} S`.
pub fn kalman_check_fem(space: &FemSpace, rho: f64) -> Result<KalmanReport> {
    check_dense_dim(space.dim())?;
    let m = space.mass().to_dense();
    let s = space.stiffness().to_dense();
    let not_spd =
        |what: &str| PlateError::Factorization(format!("{what} is not positive definite"));
    let m_chol = m.clone().cholesky().ok_or_else(|| not_spd("mass matrix"))?;
    let s_chol = s
        .clone()
        .cholesky()
        .ok_or_else(|| not_spd("stiffness matrix"))?;
    let a = m_chol.solve(&s);
    let a_inv = s_chol.solve(&m);
    Ok(kalman_check_dense(&a, &a_inv, rho))
}
