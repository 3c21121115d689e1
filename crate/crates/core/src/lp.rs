//! Dense two-phase revised simplex method.
//!
//! Problems are posed as
//! `min cᵀx  s.t.  A_eq x = b_eq,  A_ub x ≤ b_ub,  x ≥ 0`
//! and the solution carries the dual multipliers of both constraint blocks
//! so callers can check optimality certificates.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::error::Error;

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub cost: Vec<f64>,
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
    pub a_ub: Vec<Vec<f64>>,
    pub b_ub: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Multipliers of the equality rows (free sign).
    pub duals_eq: Vec<f64>,
    /// Multipliers of the inequality rows (`≤ 0` at optimality).
    pub duals_ub: Vec<f64>,
    /// `b_eqᵀ y_eq + b_ubᵀ y_ub`.
    pub dual_objective: f64,
    pub iterations: usize,
}

impl LpSolution {
    /// `|primal − dual| / (1 + |primal|)`.
    pub fn relative_gap(&self) -> f64 {
        (self.objective - self.dual_objective).abs() / (1.0 + self.objective.abs())
    }
}

#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex iteration limit reached")]
    IterationLimit,
    #[error("malformed linear program: inconsistent dimensions")]
    Dimensions,
}

impl From<LpError> for Error {
    fn from(e: LpError) -> Self {
        match e {
            LpError::Infeasible => Error::Infeasible(e.to_string()),
            LpError::Dimensions => Error::InvalidInput(e.to_string()),
            _ => Error::Numerical(e.to_string()),
        }
    }
}

const PIVOT_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 64;
const DEGENERATE_RUN: usize = 50;

struct Tableau {
    m: usize,
    /// Structural plus slack columns; artificials are implicit unit columns.
    ncols: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    binv: Vec<f64>,
    basis: Vec<usize>,
    xb: Vec<f64>,
    iterations: usize,
    max_iterations: usize,
}

impl Tableau {
    fn column(&self, j: usize) -> Vec<f64> {
        if j < self.ncols {
            (0..self.m).map(|i| self.a[i * self.ncols + j]).collect()
        } else {
            let mut e = vec![0.0; self.m];
            e[j - self.ncols] = 1.0;
            e
        }
    }

    fn ftran(&self, col: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut out = vec![0.0; m];
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.binv[i * m..(i + 1) * m];
            *o = row.iter().zip(col).map(|(a, b)| a * b).sum();
        }
        out
    }

    fn duals(&self, cost: &dyn Fn(usize) -> f64) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (i, &bj) in self.basis.iter().enumerate() {
            let cb = cost(bj);
            if cb != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for (yk, r) in y.iter_mut().zip(row) {
                    *yk += cb * r;
                }
            }
        }
        y
    }

    fn pivot(&mut self, p: usize, q: usize, alpha: &[f64]) {
        let m = self.m;
        let ap = alpha[p];
        let theta = self.xb[p] / ap;
        for i in 0..m {
            if i != p {
                self.xb[i] -= theta * alpha[i];
                if self.xb[i] < 0.0 && self.xb[i] > -FEAS_TOL {
                    self.xb[i] = 0.0;
                }
            }
        }
        self.xb[p] = theta;
        let prow: Vec<f64> = self.binv[p * m..(p + 1) * m].iter().map(|v| v / ap).collect();
        for i in 0..m {
            if i != p && alpha[i] != 0.0 {
                let f = alpha[i];
                let row = &mut self.binv[i * m..(i + 1) * m];
                for (r, pr) in row.iter_mut().zip(&prow) {
                    *r -= f * pr;
                }
            }
        }
        self.binv[p * m..(p + 1) * m].copy_from_slice(&prow);
        self.basis[p] = q;
        self.iterations += 1;
        if self.iterations % REFACTOR_EVERY == 0 {
            self.refactor();
        }
    }

    fn refactor(&mut self) {
        let m = self.m;
        let mut bm = DMatrix::<f64>::zeros(m, m);
        for (k, &j) in self.basis.iter().enumerate() {
            for (i, v) in self.column(j).into_iter().enumerate() {
                bm[(i, k)] = v;
            }
        }
        if let Some(inv) = bm.try_inverse() {
            for i in 0..m {
                for k in 0..m {
                    self.binv[i * m + k] = inv[(i, k)];
                }
            }
            let xb = self.ftran(&self.b.clone());
            self.xb = xb
                .into_iter()
                .map(|v| if v < 0.0 && v > -FEAS_TOL { 0.0 } else { v })
                .collect();
        }
    }

    /// Minimize over columns allowed by `eligible`; returns Ok(()) at optimality.
    fn optimize(&mut self, cost: &dyn Fn(usize) -> f64, eligible: &dyn Fn(usize) -> bool, dtol: f64) -> Result<(), LpError> {
        let m = self.m;
        let n = self.ncols;
        let mut in_basis = vec![false; n + m];
        for &j in &self.basis {
            in_basis[j] = true;
        }
        let mut degenerate = 0usize;
        let mut reduced = vec![0.0; n];
        loop {
            if self.iterations >= self.max_iterations {
                return Err(LpError::IterationLimit);
            }
            let y = self.duals(cost);
            for (j, r) in reduced.iter_mut().enumerate() {
                *r = cost(j);
            }
            for (i, &yi) in y.iter().enumerate() {
                if yi != 0.0 {
                    let row = &self.a[i * n..(i + 1) * n];
                    for (r, a) in reduced.iter_mut().zip(row) {
                        *r -= yi * a;
                    }
                }
            }
            let bland = degenerate >= DEGENERATE_RUN;
            let mut entering: Option<(usize, f64)> = None;
            let mut consider = |j: usize, d: f64| {
                if d < -dtol && !in_basis[j] && eligible(j) {
                    match entering {
                        None => entering = Some((j, d)),
                        Some((_, best)) if !bland && d < best => entering = Some((j, d)),
                        _ => {}
                    }
                }
            };
            for (j, &d) in reduced.iter().enumerate() {
                consider(j, d);
            }
            for (r, &yr) in y.iter().enumerate() {
                consider(n + r, cost(n + r) - yr);
            }
            let Some((q, _)) = entering else {
                return Ok(());
            };
            let alpha = self.ftran(&self.column(q));
            // Two-pass (Harris) ratio test: bound the step with a small
            // feasibility relaxation, then take the largest pivot within it.
            let mut bound = f64::INFINITY;
            for i in 0..m {
                if alpha[i] > PIVOT_TOL {
                    bound = bound.min((self.xb[i].max(0.0) + FEAS_TOL) / alpha[i]);
                }
            }
            if !bound.is_finite() {
                return Err(LpError::Unbounded);
            }
            let mut leave: Option<usize> = None;
            for i in 0..m {
                if alpha[i] > PIVOT_TOL && self.xb[i].max(0.0) / alpha[i] <= bound {
                    leave = match leave {
                        None => Some(i),
                        Some(p) if bland => {
                            if self.basis[i] < self.basis[p] { Some(i) } else { Some(p) }
                        }
                        Some(p) => {
                            if alpha[i] > alpha[p] { Some(i) } else { Some(p) }
                        }
                    };
                }
            }
            let p = leave.expect("bounded ratio test has a row");
            if self.xb[p].max(0.0) / alpha[p] <= FEAS_TOL {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            in_basis[self.basis[p]] = false;
            in_basis[q] = true;
            self.pivot(p, q, &alpha);
        }
    }
}

/// Solve a dense linear program.
pub fn lp_solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    let n = lp.cost.len();
    let m_eq = lp.a_eq.len();
    let m_ub = lp.a_ub.len();
    if lp.b_eq.len() != m_eq
        || lp.b_ub.len() != m_ub
        || lp.a_eq.iter().chain(&lp.a_ub).any(|r| r.len() != n)
    {
        return Err(LpError::Dimensions);
    }
    let m = m_eq + m_ub;
    let ncols = n + m_ub;
    let mut a = vec![0.0; m * ncols];
    let mut b = vec![0.0; m];
    let mut sign = vec![1.0; m];
    for (i, (row, &bi)) in lp.a_eq.iter().zip(&lp.b_eq).enumerate() {
        a[i * ncols..i * ncols + n].copy_from_slice(row);
        b[i] = bi;
    }
    for (k, (row, &bi)) in lp.a_ub.iter().zip(&lp.b_ub).enumerate() {
        let i = m_eq + k;
        a[i * ncols..i * ncols + n].copy_from_slice(row);
        a[i * ncols + n + k] = 1.0;
        b[i] = bi;
    }
    for i in 0..m {
        if b[i] < 0.0 {
            sign[i] = -1.0;
            b[i] = -b[i];
            for v in &mut a[i * ncols..(i + 1) * ncols] {
                *v = -*v;
            }
        }
    }
    // Slack columns of unflipped inequality rows start basic; everything else
    // gets an artificial.
    let basis: Vec<usize> = (0..m)
        .map(|i| if i >= m_eq && sign[i] > 0.0 { n + (i - m_eq) } else { ncols + i })
        .collect();
    let mut t = Tableau {
        m,
        ncols,
        a,
        b: b.clone(),
        binv: {
            let mut id = vec![0.0; m * m];
            for i in 0..m {
                id[i * m + i] = 1.0;
            }
            id
        },
        basis,
        xb: b.clone(),
        iterations: 0,
        max_iterations: 50 * (m + ncols) + 1000,
    };

    let bnorm = b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if t.basis.iter().any(|&j| j >= ncols) {
        let phase1 = |j: usize| if j >= ncols { 1.0 } else { 0.0 };
        t.optimize(&phase1, &|_| true, 1e-12)?;
        let infeas: f64 = t
            .basis
            .iter()
            .zip(&t.xb)
            .filter(|(j, _)| **j >= ncols)
            .map(|(_, x)| x.max(0.0))
            .sum();
        if infeas > 1e-7 * (1.0 + bnorm) {
            return Err(LpError::Infeasible);
        }
        // Drive zero-level artificials out of the basis; rows where that is
        // impossible are redundant and keep their artificial at zero.
        for p in 0..m {
            if t.basis[p] < ncols {
                continue;
            }
            let row = &t.binv[p * m..(p + 1) * m];
            let mut best: Option<(usize, f64)> = None;
            for j in 0..ncols {
                if t.basis.contains(&j) {
                    continue;
                }
                let v: f64 = (0..m).map(|k| row[k] * t.a[k * ncols + j]).sum();
                if v.abs() > 1e-9 && best.is_none_or(|(_, bv)| v.abs() > bv.abs()) {
                    best = Some((j, v));
                }
            }
            if let Some((q, _)) = best {
                let alpha = t.ftran(&t.column(q));
                t.xb[p] = 0.0;
                t.pivot(p, q, &alpha);
            }
        }
    }

    let cost = |j: usize| if j < n { lp.cost[j] } else { 0.0 };
    let cmax = lp.cost.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    t.optimize(&cost, &|j| j < ncols, 1e-11 * (1.0 + cmax))?;
    t.refactor();

    let mut x = vec![0.0; n];
    for (&j, &v) in t.basis.iter().zip(&t.xb) {
        if j < n {
            x[j] = v.max(0.0);
        }
    }
    let y = t.duals(&cost);
    let duals_eq: Vec<f64> = (0..m_eq).map(|i| y[i] * sign[i]).collect();
    let duals_ub: Vec<f64> = (0..m_ub).map(|k| y[m_eq + k] * sign[m_eq + k]).collect();
    let objective: f64 = x.iter().zip(&lp.cost).map(|(a, b)| a * b).sum();
    let dual_objective: f64 = duals_eq.iter().zip(&lp.b_eq).map(|(a, b)| a * b).sum::<f64>()
        + duals_ub.iter().zip(&lp.b_ub).map(|(a, b)| a * b).sum::<f64>();
    Ok(LpSolution { x, objective, duals_eq, duals_ub, dual_objective, iterations: t.iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_lower_bound() {
        // min x s.t. x >= 1, written as -x <= -1.
        let lp = LinearProgram { cost: vec![1.0], a_ub: vec![vec![-1.0]], b_ub: vec![-1.0], ..Default::default() };
        let s = lp_solve(&lp).unwrap();
        assert!((s.objective - 1.0).abs() < 1e-12);
        assert!((s.dual_objective - 1.0).abs() < 1e-12);
        assert!(s.duals_ub[0] <= 0.0);
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 → 36 at (2, 6).
        let lp = LinearProgram {
            cost: vec![-3.0, -5.0],
            a_ub: vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            b_ub: vec![4.0, 12.0, 18.0],
            ..Default::default()
        };
        let s = lp_solve(&lp).unwrap();
        assert!((s.objective + 36.0).abs() < 1e-10);
        assert!((s.x[0] - 2.0).abs() < 1e-10 && (s.x[1] - 6.0).abs() < 1e-10);
        assert!(s.relative_gap() < 1e-12);
    }

    #[test]
    fn equality_with_redundant_row() {
        // x + y = 1 stated twice, min x + 2y.
        let lp = LinearProgram {
            cost: vec![1.0, 2.0],
            a_eq: vec![vec![1.0, 1.0], vec![2.0, 2.0]],
            b_eq: vec![1.0, 2.0],
            ..Default::default()
        };
        let s = lp_solve(&lp).unwrap();
        assert!((s.objective - 1.0).abs() < 1e-12);
        assert!(s.relative_gap() < 1e-12);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let infeasible = LinearProgram {
            cost: vec![1.0],
            a_eq: vec![vec![1.0]],
            b_eq: vec![-1.0],
            ..Default::default()
        };
        assert_eq!(lp_solve(&infeasible).unwrap_err(), LpError::Infeasible);
        let unbounded = LinearProgram {
            cost: vec![-1.0, 0.0],
            a_eq: vec![vec![1.0, -1.0]],
            b_eq: vec![0.0],
            ..Default::default()
        };
        assert_eq!(lp_solve(&unbounded).unwrap_err(), LpError::Unbounded);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Classic cycling example (Beale) under Dantzig pricing without safeguards.
        let lp = LinearProgram {
            cost: vec![-0.75, 150.0, -0.02, 6.0],
            a_ub: vec![
                vec![0.25, -60.0, -0.04, 9.0],
                vec![0.5, -90.0, -0.02, 3.0],
                vec![0.0, 0.0, 1.0, 0.0],
            ],
            b_ub: vec![0.0, 0.0, 1.0],
            ..Default::default()
        };
        let s = lp_solve(&lp).unwrap();
        assert!((s.objective + 0.05).abs() < 1e-10);
    }
}
