//! Finite covariance sequences and their Toeplitz matrices.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{classify_eigenvalues, hermitian_eigenvalues, CMatrix};
use crate::Complex64;

pub use crate::linalg::Positivity;

/// Covariance lags `c_0..c_n` with real, nonnegative `c_0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CovFile", into = "CovFile")]
pub struct CovarianceSequence {
    values: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct CovFile {
    c: Vec<Complex64>,
}

impl TryFrom<CovFile> for CovarianceSequence {
    type Error = Error;
    fn try_from(f: CovFile) -> Result<Self> {
        CovarianceSequence::new(f.c)
    }
}

impl From<CovarianceSequence> for CovFile {
    fn from(c: CovarianceSequence) -> Self {
        CovFile { c: c.values }
    }
}

impl Index<usize> for CovarianceSequence {
    type Output = Complex64;
    fn index(&self, k: usize) -> &Complex64 {
        &self.values[k]
    }
}

impl CovarianceSequence {
    pub fn new(mut values: Vec<Complex64>) -> Result<Self> {
        let Some(c0) = values.first().copied() else {
            return Err(Error::invalid("covariance sequence must contain c_0"));
        };
        if values.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("covariance sequence contains non-finite values"));
        }
        if c0.im.abs() > 1e-12 * c0.re.abs().max(1.0) {
            return Err(Error::invalid(format!("c_0 = {c0} must be real")));
        }
        if c0.re < 0.0 {
            return Err(Error::invalid(format!("c_0 = {} must be >= 0", c0.re)));
        }
        values[0] = Complex64::new(c0.re, 0.0);
        Ok(CovarianceSequence { values })
    }

    /// Real-valued lags.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub(crate) fn from_moments(values: Vec<Complex64>) -> Self {
        Self::new(values).expect("moments of a valid measure")
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn c0(&self) -> f64 {
        self.values[0].re
    }

    /// Order `n` (the sequence holds `n + 1` lags).
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `c_k` for negative `k` via `c_{-k} = conj(c_k)`.
    pub fn lag(&self, k: isize) -> Complex64 {
        if k >= 0 {
            self.values[k as usize]
        } else {
            self.values[(-k) as usize].conj()
        }
    }

    /// First `n + 1` lags.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n > self.order() {
            return Err(Error::invalid(format!(
                "cannot truncate order {} sequence to order {n}",
                self.order()
            )));
        }
        Ok(CovarianceSequence { values: self.values[..=n].to_vec() })
    }

    /// True when every lag has zero imaginary part up to `1e-12 c_0`.
    pub fn is_real(&self) -> bool {
        let tol = 1e-12 * self.c0().max(f64::MIN_POSITIVE);
        self.values.iter().all(|c| c.im.abs() <= tol)
    }

    /// `T[k][l] = c_{k-l}`.
    pub fn toeplitz(&self) -> CMatrix {
        let n = self.values.len();
        CMatrix::from_fn(n, n, |k, l| self.lag(k as isize - l as isize))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.toeplitz())
    }

    pub fn classify(&self) -> Positivity {
        classify_eigenvalues(&self.eigenvalues())
    }
}
