//! Sparse symmetric storage, SPD solves and the coupled 2x2 block solve used
//! by the implicit time steps.
//!
//! Factorizations are LDL^T with reverse Cuthill-McKee ordering. An SPD
//! matrix is certified by a strictly positive `D`. Block systems of the form
//!
//! ```text
//! [ A11  A12 ] [x1]   [b1]
//! [ A21  A22 ] [x2] = [b2],   A21 = -A12^T,  A11, A22 SPD
//! ```
//!
//! are rewritten as the symmetric quasi-definite matrix
//! `[[-A11, -A12], [A21, A22]]`, which factors without pivoting. Its inertia is
//! `(n1 negative, n2 positive)` exactly when the Schur complement
//! `A22 - A21 A11^{-1} A12` is positive definite, so the pivot signs double as
//! the invertibility check.

use nalgebra::DMatrix;
use sprs::{CsMat, FillInReduction, SymmetryCheck, TriMat};
use sprs_ldl::{Ldl, LdlNumeric};

use crate::error::{check_len, PlateError, Result};
use crate::metrics::StateNorm;

/// Above this dimension SPD solves switch to conjugate gradients.
pub const DIRECT_SOLVE_LIMIT: usize = 10_000;
/// Relative residual target of the conjugate-gradient fallback.
pub const CG_TOLERANCE: f64 = 1e-12;
/// Post-hoc relative residual bound for every SPD solve.
pub const SPD_RESIDUAL_TOLERANCE: f64 = 1e-10;
/// Post-hoc relative residual bound for every block solve.
pub const BLOCK_RESIDUAL_TOLERANCE: f64 = 1e-10;

const SYMMETRY_TOLERANCE: f64 = 1e-13;

/// Symmetric sparse matrix stored in full CSR form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSpdMatrix {
    csr: CsMat<f64>,
}

impl SparseSpdMatrix {
    /// Assembles from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut tri = TriMat::new((dim, dim));
        for (i, j, v) in entries {
            if i >= dim || j >= dim {
                return Err(PlateError::IndexOutOfRange(format!(
                    "entry ({i}, {j}) in a {dim}x{dim} matrix"
                )));
            }
            tri.add_triplet(i, j, v);
        }
        Self::from_csr(tri.to_csr())
    }

    pub fn from_csr(mat: CsMat<f64>) -> Result<Self> {
        if mat.rows() != mat.cols() {
            return Err(PlateError::DimensionMismatch {
                expected: mat.rows(),
                found: mat.cols(),
            });
        }
        let csr = if mat.is_csr() { mat } else { mat.to_csr() };
        check_symmetric(&csr)?;
        Ok(Self { csr })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            csr: CsMat::eye(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.csr.rows()
    }

    pub fn nnz(&self) -> usize {
        self.csr.nnz()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.csr.get(i, j).copied().unwrap_or(0.0)
    }

    pub fn csr(&self) -> &CsMat<f64> {
        &self.csr
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), x.len())?;
        Ok(csr_mul(&self.csr, x))
    }

    /// `x^T A x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.csr
            .outer_iterator()
            .zip(x)
            .map(|(row, xi)| xi * row.iter().map(|(j, a)| a * x[j]).sum::<f64>())
            .sum()
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        check_len(self.dim(), other.dim())?;
        let entries = self
            .csr
            .iter()
            .map(|(v, (i, j))| (i, j, alpha * v))
            .chain(other.csr.iter().map(|(v, (i, j))| (i, j, beta * v)))
            .collect::<Vec<_>>();
        Self::from_triplets(self.dim(), entries)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            csr: self.csr.map(|v| alpha * v),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.dim(), self.dim());
        for (v, (i, j)) in self.csr.iter() {
            d[(i, j)] += v;
        }
        d
    }

    pub fn factorize(&self) -> Result<SpdSolver> {
        SpdSolver::new(self)
    }
}

impl StateNorm for SparseSpdMatrix {
    fn dim(&self) -> usize {
        SparseSpdMatrix::dim(self)
    }

    fn norm_sq(&self, x: &[f64]) -> f64 {
        self.quad_form(x)
    }
}

fn check_symmetric(csr: &CsMat<f64>) -> Result<()> {
    let scale = csr.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (v, (i, j)) in csr.iter() {
        let t = csr.get(j, i).copied().unwrap_or(0.0);
        if (v - t).abs() > SYMMETRY_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
            return Err(PlateError::InvalidParameter(format!(
                "matrix is not symmetric: a[{i},{j}] = {v}, a[{j},{i}] = {t}"
            )));
        }
    }
    Ok(())
}

pub(crate) fn csr_mul(csr: &CsMat<f64>, x: &[f64]) -> Vec<f64> {
    csr.outer_iterator()
        .map(|row| row.iter().map(|(j, a)| a * x[j]).sum())
        .collect()
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn relative_residual(csr: &CsMat<f64>, x: &[f64], b: &[f64]) -> f64 {
    let ax = csr_mul(csr, x);
    let r: f64 = ax
        .iter()
        .zip(b)
        .map(|(a, bi)| (a - bi) * (a - bi))
        .sum::<f64>()
        .sqrt();
    r / norm2(b)
}

/// LDL^T factor; sprs-ldl cannot handle 1x1 systems, which are kept as a
/// scalar pivot.
#[derive(Debug, Clone)]
enum Factor {
    Ldl(LdlNumeric<f64, usize>),
    Scalar(f64),
}

impl Factor {
    fn new(csr: &CsMat<f64>) -> std::result::Result<Self, String> {
        if csr.rows() == 1 {
            let d = csr.get(0, 0).copied().unwrap_or(0.0);
            if d == 0.0 {
                return Err("singular 1x1 matrix".into());
            }
            return Ok(Factor::Scalar(d));
        }
        Ldl::new()
            .fill_in_reduction(FillInReduction::ReverseCuthillMcKee)
            .check_symmetry(SymmetryCheck::DontCheckSymmetry)
            .numeric(csr.view())
            .map(Factor::Ldl)
            .map_err(|e| format!("{e:?}"))
    }

    fn pivots(&self) -> &[f64] {
        match self {
            Factor::Ldl(l) => l.d(),
            Factor::Scalar(d) => std::slice::from_ref(d),
        }
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        match self {
            Factor::Ldl(l) => l.solve(b),
            Factor::Scalar(d) => vec![b[0] / d],
        }
    }
}

/// How an [`SpdSolver`] picks its method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverChoice {
    /// Direct below [`DIRECT_SOLVE_LIMIT`], conjugate gradients above.
    #[default]
    Auto,
    Direct,
    ConjugateGradient,
}

#[derive(Debug, Clone)]
enum Method {
    Direct(Factor),
    Iterative { inv_diag: Vec<f64> },
}

/// A prepared SPD solver; immutable once built and shareable across threads.
#[derive(Debug, Clone)]
pub struct SpdSolver {
    matrix: CsMat<f64>,
    method: Method,
}

impl SpdSolver {
    pub fn new(a: &SparseSpdMatrix) -> Result<Self> {
        Self::with_choice(a, SolverChoice::Auto)
    }

    pub fn with_choice(a: &SparseSpdMatrix, choice: SolverChoice) -> Result<Self> {
        let direct = match choice {
            SolverChoice::Auto => a.dim() <= DIRECT_SOLVE_LIMIT,
            SolverChoice::Direct => true,
            SolverChoice::ConjugateGradient => false,
        };
        let method = if direct {
            let ldl = Factor::new(a.csr()).map_err(PlateError::Factorization)?;
            if let Some((k, d)) = ldl
                .pivots()
                .iter()
                .enumerate()
                .find(|(_, d)| !(d.is_finite() && **d > 0.0))
            {
                return Err(PlateError::Factorization(format!(
                    "matrix is not positive definite (pivot {k} = {d:e})"
                )));
            }
            Method::Direct(ldl)
        } else {
            let mut inv_diag = Vec::with_capacity(a.dim());
            for i in 0..a.dim() {
                let d = a.get(i, i);
                if !(d > 0.0) {
                    return Err(PlateError::Factorization(format!(
                        "matrix is not positive definite (diagonal {i} = {d:e})"
                    )));
                }
                inv_diag.push(1.0 / d);
            }
            Method::Iterative { inv_diag }
        };
        Ok(Self {
            matrix: a.csr().clone(),
            method,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_direct(&self) -> bool {
        matches!(self.method, Method::Direct(_))
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), b.len())?;
        if b.iter().all(|x| *x == 0.0) {
            return Ok(vec![0.0; b.len()]);
        }
        let x = match &self.method {
            Method::Direct(ldl) => ldl.solve(b),
            Method::Iterative { inv_diag } => {
                pcg(
                    &self.matrix,
                    inv_diag,
                    b,
                    CG_TOLERANCE,
                    10 * self.dim() + 100,
                )?
                .0
            }
        };
        let residual = relative_residual(&self.matrix, &x, b);
        if !(residual <= SPD_RESIDUAL_TOLERANCE) {
            return Err(PlateError::Residual {
                residual,
                tolerance: SPD_RESIDUAL_TOLERANCE,
            });
        }
        Ok(x)
    }
}

/// Solves `A x = b` for SPD `A`.
pub fn solve_spd(a: &SparseSpdMatrix, b: &[f64]) -> Result<Vec<f64>> {
    check_len(a.dim(), b.len())?;
    SpdSolver::new(a)?.solve(b)
}

/// Jacobi-preconditioned conjugate gradients; returns the solution and the
/// iteration count.
pub fn conjugate_gradient(
    a: &SparseSpdMatrix,
    b: &[f64],
    tolerance: f64,
    max_iterations: usize,
) -> Result<(Vec<f64>, usize)> {
    check_len(a.dim(), b.len())?;
    let inv_diag: Vec<f64> = (0..a.dim()).map(|i| 1.0 / a.get(i, i)).collect();
    pcg(a.csr(), &inv_diag, b, tolerance, max_iterations)
}

fn pcg(
    a: &CsMat<f64>,
    inv_diag: &[f64],
    b: &[f64],
    tolerance: f64,
    max_iterations: usize,
) -> Result<(Vec<f64>, usize)> {
    let n = b.len();
    let b_norm = norm2(b);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok((x, 0));
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    for it in 1..=max_iterations {
        let ap = csr_mul(a, &p);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if !(pap > 0.0) {
            return Err(PlateError::Factorization(
                "conjugate gradient met a non-positive curvature direction".into(),
            ));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if norm2(&r) <= tolerance * b_norm {
            return Ok((x, it));
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(PlateError::NoConvergence {
        iterations: max_iterations,
        residual: norm2(&r) / b_norm,
    })
}

/// A factored 2x2 block system with `A21 = -A12^T` and SPD diagonal blocks.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    n1: usize,
    n2: usize,
    kkt: CsMat<f64>,
    ldl: Factor,
}

impl BlockSystem {
    pub fn new(
        a11: &CsMat<f64>,
        a12: &CsMat<f64>,
        a21: &CsMat<f64>,
        a22: &CsMat<f64>,
    ) -> Result<Self> {
        let n1 = a11.rows();
        let n2 = a22.rows();
        check_len(n1, a11.cols())?;
        check_len(n2, a22.cols())?;
        check_len(n1, a12.rows())?;
        check_len(n2, a12.cols())?;
        check_len(n2, a21.rows())?;
        check_len(n1, a21.cols())?;
        check_symmetric(&a11.to_csr())?;
        check_symmetric(&a22.to_csr())?;
        check_skew_coupling(a12, a21)?;

        let dim = n1 + n2;
        let mut tri = TriMat::new((dim, dim));
        for (v, (i, j)) in a11.iter() {
            tri.add_triplet(i, j, -v);
        }
        for (v, (i, j)) in a12.iter() {
            tri.add_triplet(i, n1 + j, -v);
        }
        for (v, (i, j)) in a21.iter() {
            tri.add_triplet(n1 + i, j, *v);
        }
        for (v, (i, j)) in a22.iter() {
            tri.add_triplet(n1 + i, n1 + j, *v);
        }
        let kkt: CsMat<f64> = tri.to_csr();
        let ldl = Factor::new(&kkt).map_err(PlateError::SingularSchur)?;

        let negative = ldl.pivots().iter().filter(|d| **d < 0.0).count();
        let positive = ldl.pivots().iter().filter(|d| **d > 0.0).count();
        if negative != n1 || positive != n2 {
            return Err(PlateError::SingularSchur(format!(
                "pivot inertia (-{negative}, +{positive}, 0:{}) differs from (-{n1}, +{n2}, 0:0)",
                dim - negative - positive
            )));
        }
        Ok(Self { n1, n2, kkt, ldl })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    pub fn solve(&self, b1: &[f64], b2: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        check_len(self.n1, b1.len())?;
        check_len(self.n2, b2.len())?;
        let rhs: Vec<f64> = b1.iter().map(|x| -x).chain(b2.iter().copied()).collect();
        if rhs.iter().all(|x| *x == 0.0) {
            return Ok((vec![0.0; self.n1], vec![0.0; self.n2]));
        }
        let mut x = self.ldl.solve(&rhs);
        // block-row sign flip leaves the residual norm unchanged
        let residual = relative_residual(&self.kkt, &x, &rhs);
        if !(residual <= BLOCK_RESIDUAL_TOLERANCE) {
            return Err(PlateError::Residual {
                residual,
                tolerance: BLOCK_RESIDUAL_TOLERANCE,
            });
        }
        let x2 = x.split_off(self.n1);
        Ok((x, x2))
    }
}

fn check_skew_coupling(a12: &CsMat<f64>, a21: &CsMat<f64>) -> Result<()> {
    let scale = a12
        .data()
        .iter()
        .chain(a21.data())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let mismatch = |what: String| {
        Err(PlateError::InvalidParameter(format!(
            "block system needs A21 = -A12^T: {what}"
        )))
    };
    for (v, (i, j)) in a12.iter() {
        let t = a21.get(j, i).copied().unwrap_or(0.0);
        if (v + t).abs() > SYMMETRY_TOLERANCE * scale {
            return mismatch(format!("A12[{i},{j}] = {v}, A21[{j},{i}] = {t}"));
        }
    }
    for (v, (i, j)) in a21.iter() {
        let t = a12.get(j, i).copied().unwrap_or(0.0);
        if (v + t).abs() > SYMMETRY_TOLERANCE * scale {
            return mismatch(format!("A21[{i},{j}] = {v}, A12[{j},{i}] = {t}"));
        }
    }
    Ok(())
}

/// One-shot coupled solve; factor a [`BlockSystem`] instead when the blocks
/// are reused.
pub fn solve_block_2x2(
    a11: &CsMat<f64>,
    a12: &CsMat<f64>,
    a21: &CsMat<f64>,
    a22: &CsMat<f64>,
    b1: &[f64],
    b2: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    BlockSystem::new(a11, a12, a21, a22)?.solve(b1, b2)
}
