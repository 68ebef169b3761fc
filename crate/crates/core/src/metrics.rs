//! Energies, norms and convergence rates.

use crate::error::{check_len, PlateError, Result};
use crate::types::StatePair;

/// A squared norm on coefficient vectors of one scheme.
pub trait StateNorm {
    fn dim(&self) -> usize;
    fn norm_sq(&self, x: &[f64]) -> f64;
}

/// Plain Euclidean norm on `R^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Euclidean(pub usize);

impl StateNorm for Euclidean {
    fn dim(&self) -> usize {
        self.0
    }

    fn norm_sq(&self, x: &[f64]) -> f64 {
        x.iter().map(|a| a * a).sum()
    }
}

/// Diagonally weighted norm `sum_i c_i x_i^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalWeights(pub Vec<f64>);

impl DiagonalWeights {
    /// Discrete `L^2` norm on a uniform grid with cell area `h^2`.
    pub fn uniform(dim: usize, cell_area: f64) -> Self {
        Self(vec![cell_area; dim])
    }
}

impl StateNorm for DiagonalWeights {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn norm_sq(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(c, a)| c * a * a).sum()
    }
}

/// `|v|^2 + |w|^2` in the given norm, without the factor 1/2.
pub fn energy(state: &StatePair, norm: &dyn StateNorm) -> Result<f64> {
    check_len(norm.dim(), state.v.len())?;
    check_len(norm.dim(), state.w.len())?;
    Ok(norm.norm_sq(&state.v) + norm.norm_sq(&state.w))
}

/// `log2(values[k] / values[k+1])` for consecutive entries.
///
/// Intended for tables whose horizons double (or halve) row to row.
pub fn rate_sequence(values: &[f64]) -> Result<Vec<f64>> {
    if let Some(bad) = values.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(PlateError::InvalidParameter(format!(
            "rates need positive values, got {bad}"
        )));
    }
    Ok(values.windows(2).map(|p| (p[0] / p[1]).log2()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn energy_examples() {
        let zero = StatePair::zeros(3);
        assert_eq!(energy(&zero, &Euclidean(3)).unwrap(), 0.0);
        let e1 = StatePair::new(vec![1.0, 0.0, 0.0], vec![0.0; 3]).unwrap();
        assert_eq!(energy(&e1, &Euclidean(3)).unwrap(), 1.0);
        assert!(energy(&e1, &Euclidean(4)).is_err());
    }

    #[test]
    fn rate_examples() {
        assert_eq!(rate_sequence(&[8.0, 2.0]).unwrap(), vec![2.0]);
        let r = rate_sequence(&[2.8778e-01, 8.0441e-02]).unwrap();
        assert!((r[0] - 1.838).abs() < 1e-2);
        assert_eq!(rate_sequence(&[3.5, 3.5]).unwrap(), vec![0.0]);
        assert!(rate_sequence(&[1.0, 0.0]).is_err());
        assert!(rate_sequence(&[-1.0, 1.0]).is_err());
    }

    proptest! {
        #[test]
        fn energy_permutation_invariant(
            data in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0, 0.1f64..5.0), 1..20),
            seed in any::<u64>(),
        ) {
            let v: Vec<f64> = data.iter().map(|d| d.0).collect();
            let w: Vec<f64> = data.iter().map(|d| d.1).collect();
            let c: Vec<f64> = data.iter().map(|d| d.2).collect();
            let e = energy(&StatePair::new(v.clone(), w.clone()).unwrap(), &DiagonalWeights(c.clone())).unwrap();

            let mut perm: Vec<usize> = (0..v.len()).collect();
            let mut s = seed;
            for i in (1..perm.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let pv = perm.iter().map(|&i| v[i]).collect();
            let pw = perm.iter().map(|&i| w[i]).collect();
            let pc = perm.iter().map(|&i| c[i]).collect();
            let ep = energy(&StatePair::new(pv, pw).unwrap(), &DiagonalWeights(pc)).unwrap();
            prop_assert!((e - ep).abs() <= 1e-12 * e.max(1.0));
        }

        #[test]
        fn geometric_quarter_rates_are_two(start in 1e-3f64..1e3, len in 2usize..10) {
            let values: Vec<f64> = (0..len).map(|k| start * 0.25f64.powi(k as i32)).collect();
            for r in rate_sequence(&values).unwrap() {
                prop_assert!((r - 2.0).abs() < 1e-12);
            }
        }
    }
}
