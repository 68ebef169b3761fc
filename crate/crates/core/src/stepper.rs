//! Factored implicit-Euler stepping shared by both discretizations.

use sprs::CsMat;

use crate::error::{check_len, PlateError, Result};
use crate::linalg::{BlockSystem, SparseSpdMatrix};
use crate::types::StatePair;

/// Factored implicit-Euler step for a generator `A` (stiffness-like) and a
/// mass-like matrix `B`:
///
/// ```text
/// B v+ - dt A w+             = B v
/// dt A v+ + (B + rho dt A) w+ = B w + dt B u
/// ```
///
/// `B = I` gives the finite-difference step, `B = M`, `A = S` the finite-element one.
#[derive(Debug, Clone)]
pub struct ImplicitEulerStepper {
    mass: Option<SparseSpdMatrix>,
    system: BlockSystem,
    dim: usize,
    dt: f64,
    rho: f64,
}

impl ImplicitEulerStepper {
    /// `mass = None` means the identity.
    pub fn new(
        generator: &SparseSpdMatrix,
        mass: Option<&SparseSpdMatrix>,
        dt: f64,
        rho: f64,
    ) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(PlateError::InvalidParameter(format!(
                "time step must be positive, got {dt}"
            )));
        }
        if !(rho.is_finite() && rho > 0.0) {
            return Err(PlateError::InvalidParameter(format!(
                "damping rho must be positive, got {rho}"
            )));
        }
        let dim = generator.dim();
        let b = match mass {
            Some(m) => {
                check_len(dim, m.dim())?;
                m.clone()
            }
            None => SparseSpdMatrix::identity(dim),
        };
        let a12: CsMat<f64> = generator.csr().map(|x| -dt * x);
        let a21: CsMat<f64> = generator.csr().map(|x| dt * x);
        let a22 = b.combine(1.0, generator, rho * dt)?;
        let system = BlockSystem::new(b.csr(), &a12, &a21, a22.csr())?;
        Ok(Self {
            mass: mass.cloned(),
            system,
            dim,
            dt,
            rho,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn step(&self, state: &StatePair, forcing: Option<&[f64]>) -> Result<StatePair> {
        state.check_dim(self.dim)?;
        let mut b2 = state.w.clone();
        if let Some(u) = forcing {
            check_len(self.dim, u.len())?;
            for (b, u) in b2.iter_mut().zip(u) {
                *b += self.dt * u;
            }
        }
        let (b1, b2) = match &self.mass {
            Some(m) => (m.apply(&state.v)?, m.apply(&b2)?),
            None => (state.v.clone(), b2),
        };
        let (v, w) = self.system.solve(&b1, &b2)?;
        Ok(StatePair { v, w })
    }
}
