//! Dense verification of the Kalman matrix of the controlled system.
//!
//! For a generator block `A` (the scheme's discrete Laplacian) the control
//! operator acts on the second component only, so
//! `K = [B, A_sys B] = [[0, A], [I, -rho A]]` with the closed-form inverse
//! `[[rho I, I], [A^{-1}, 0]]`.

use nalgebra::DMatrix;

use crate::error::{PlateError, Result};

/// Largest interior resolution per axis accepted by the dense checks.
pub const KALMAN_DENSE_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KalmanReport {
    /// `max |K K^{-1} - I|` entrywise.
    pub identity_error: f64,
    /// Spectral norm of `A^{-1}`.
    pub inverse_norm: f64,
    /// Numerical rank of `K`.
    pub rank: usize,
    /// Size of `K`, i.e. `2N`.
    pub size: usize,
}

impl KalmanReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.identity_error <= tolerance && self.rank == self.size
    }
}

/// Rejects systems with more than `KALMAN_DENSE_LIMIT^2` unknowns.
pub(crate) fn check_dense_dim(dim: usize) -> Result<()> {
    let limit = KALMAN_DENSE_LIMIT * KALMAN_DENSE_LIMIT;
    if dim > limit {
        return Err(PlateError::InvalidParameter(format!(
            "dense Kalman check is limited to {limit} unknowns, got {dim}"
        )));
    }
    Ok(())
}

/// Builds `K` and its closed-form inverse from `A` and `A^{-1}` and audits them.
pub fn kalman_check_dense(a: &DMatrix<f64>, a_inv: &DMatrix<f64>, rho: f64) -> KalmanReport {
    let n = a.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let mut k = DMatrix::<f64>::zeros(2 * n, 2 * n);
    k.view_mut((0, n), (n, n)).copy_from(a);
    k.view_mut((n, 0), (n, n)).copy_from(&eye);
    k.view_mut((n, n), (n, n)).copy_from(&(a * -rho));

    let mut k_inv = DMatrix::<f64>::zeros(2 * n, 2 * n);
    k_inv.view_mut((0, 0), (n, n)).copy_from(&(&eye * rho));
    k_inv.view_mut((0, n), (n, n)).copy_from(&eye);
    k_inv.view_mut((n, 0), (n, n)).copy_from(a_inv);

    let product = &k * &k_inv;
    let identity_error = (product - DMatrix::<f64>::identity(2 * n, 2 * n)).amax();

    let sv = k.singular_values();
    let cutoff = sv.max() * (2 * n) as f64 * f64::EPSILON;
    let rank = sv.iter().filter(|s| **s > cutoff).count();

    let inverse_norm = a_inv.singular_values().max();
    KalmanReport {
        identity_error,
        inverse_norm,
        rank,
        size: 2 * n,
    }
}
