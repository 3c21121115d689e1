//! Complex polynomials stored as ascending coefficient vectors.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::Complex64;

pub fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// Value and derivative at `z`.
pub fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let mut p = zero;
    let mut dp = zero;
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// `p*(z) = z^n conj(p(1/conj z))` for a polynomial of formal degree `n = len - 1`.
pub fn reversed(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs.iter().rev().map(|a| a.conj()).collect()
}

pub fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            a.get(i).copied().unwrap_or_default() + b.get(i).copied().unwrap_or_default()
        })
        .collect()
}

pub fn scale(a: &[Complex64], s: Complex64) -> Vec<Complex64> {
    a.iter().map(|&x| x * s).collect()
}

/// Roots via eigenvalues of the companion matrix, each polished by one Newton step.
pub fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c.last().is_some_and(|a| a.norm() == 0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = c[n];
    let mut comp = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        comp[(i, n - 1)] = -c[i] / lead;
    }
    let eig = comp
        .clone()
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::numerical("companion eigenvalue iteration did not converge"))?;
    let mut out = Vec::with_capacity(n);
    for &z in eig.iter() {
        let (p, dp) = eval_with_derivative(&c, z);
        let polished = if dp.norm() > 0.0 { z - p / dp } else { z };
        if !polished.re.is_finite() || !polished.im.is_finite() {
            return Err(Error::numerical("polynomial root polishing diverged"));
        }
        out.push(polished);
    }
    Ok(out)
}
