//! Small dense Hermitian helpers shared by the Toeplitz and Pick code paths.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative threshold on the smallest eigenvalue for strict positivity.
pub const POSITIVE_TOL: f64 = 1e-8;
/// Threshold on the smallest eigenvalue for nonnegativity, scaled by `max(1, ||M||)`.
pub const NONNEGATIVE_TOL: f64 = 1e-10;

/// Positivity class of a Hermitian matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Positivity {
    Positive,
    NonnegativeSingular,
    Invalid,
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    // Symmetrize so round-off in the input cannot leak into the eigensolver.
    let h = (m + m.adjoint()).map(|x| x * 0.5);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Classify a Hermitian matrix by its smallest eigenvalue.
pub fn classify_hermitian(m: &CMatrix) -> Positivity {
    let ev = hermitian_eigenvalues(m);
    classify_eigenvalues(&ev)
}

pub fn classify_eigenvalues(ev: &[f64]) -> Positivity {
    let Some(&lmin) = ev.first() else {
        return Positivity::Positive;
    };
    let norm = ev.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if ev.iter().any(|x| !x.is_finite()) {
        Positivity::Invalid
    } else if norm > 0.0 && lmin >= POSITIVE_TOL * norm {
        Positivity::Positive
    } else if lmin >= -NONNEGATIVE_TOL * norm.max(1.0) {
        Positivity::NonnegativeSingular
    } else {
        Positivity::Invalid
    }
}

/// Cholesky factor of a Hermitian positive-definite matrix, used for
/// inner products `<x, y> = y^* M^{-1} x` without forming the inverse.
#[derive(Clone, Debug)]
pub struct HpdFactor {
    l: CMatrix,
}

impl HpdFactor {
    pub fn new(m: &CMatrix) -> Result<Self> {
        let h = (m + m.adjoint()).map(|x| x * 0.5);
        let chol = h
            .cholesky()
            .ok_or_else(|| Error::infeasible("matrix is not positive definite"))?;
        Ok(HpdFactor { l: chol.l() })
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// `L^{-1} x`; inner products of whitened vectors are `<x, y> = whiten(y)^* whiten(x)`.
    pub fn whiten(&self, x: &CVector) -> CVector {
        self.l
            .solve_lower_triangular(x)
            .expect("Cholesky factor has a nonzero diagonal")
    }

    pub fn solve(&self, x: &CVector) -> CVector {
        let y = self.whiten(x);
        self.l
            .adjoint()
            .solve_upper_triangular(&y)
            .expect("Cholesky factor has a nonzero diagonal")
    }
}

/// `y^* x` for whitened vectors.
pub fn dot_whitened(x: &CVector, y: &CVector) -> Complex64 {
    y.dotc(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn classification_thresholds() {
        let pos = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.9), c(0.9), c(1.0)]);
        let sing = CMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(1.0), c(1.0)]);
        let bad = CMatrix::from_row_slice(2, 2, &[c(1.0), c(1.1), c(1.1), c(1.0)]);
        assert_eq!(classify_hermitian(&pos), Positivity::Positive);
        assert_eq!(classify_hermitian(&sing), Positivity::NonnegativeSingular);
        assert_eq!(classify_hermitian(&bad), Positivity::Invalid);
        let ev = hermitian_eigenvalues(&pos);
        assert!((ev[0] - 0.1).abs() < 1e-14 && (ev[1] - 1.9).abs() < 1e-14);
    }

    #[test]
    fn whitened_inner_product_matches_solve() {
        let i = Complex64::i();
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[c(2.0), c(0.3) + 0.2 * i, c(0.1), c(0.3) - 0.2 * i, c(1.5), 0.4 * i, c(0.1), -0.4 * i, c(1.0)],
        );
        let f = HpdFactor::new(&m).unwrap();
        let x = CVector::from_vec(vec![c(1.0), i, c(-0.5)]);
        let y = CVector::from_vec(vec![c(0.2), c(1.0) + i, c(0.0)]);
        let direct = y.dotc(&f.solve(&x));
        let via = dot_whitened(&f.whiten(&x), &f.whiten(&y));
        assert!((direct - via).norm() < 1e-13);
        assert!((&m * f.solve(&x) - &x).norm() < 1e-13);
    }
}
