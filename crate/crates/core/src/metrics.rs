//! Weakly continuous distances between spectral measures and linear-programming
//! bounds on spectral mass.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::{num_complex::Complex as FftComplex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::covariance::{CovarianceSequence, Positivity};
use crate::error::{Error, Result};
use crate::lp::{lp_solve, LinearProgram};
use crate::measure::{grid_angle, SpectralMeasure};
use crate::region::RegionK;
use crate::Complex64;

/// Coarse grid for the transport metric.
pub const TRANSPORT_GRID: usize = 256;
/// Oversampling factor of the envelope constraints in the mass-range dual.
pub const DUAL_OVERSAMPLING: usize = 8;

/// A real continuous periodic test function sampled on the measure grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelFile", into = "KernelFile")]
pub struct TestKernel {
    values: Vec<f64>,
    lipschitz: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct KernelFile {
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lipschitz: Option<f64>,
}

impl TryFrom<KernelFile> for TestKernel {
    type Error = Error;
    fn try_from(f: KernelFile) -> Result<Self> {
        TestKernel::new(f.values, f.lipschitz)
    }
}

impl From<TestKernel> for KernelFile {
    fn from(k: TestKernel) -> Self {
        KernelFile { values: k.values, lipschitz: k.lipschitz }
    }
}

impl TestKernel {
    pub fn new(values: Vec<f64>, lipschitz: Option<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("kernel: at least one sample is required"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("kernel: values must be finite"));
        }
        if let Some(l) = lipschitz {
            if !l.is_finite() || l < 0.0 {
                return Err(Error::invalid(format!("kernel: Lipschitz bound {l} must be >= 0")));
            }
        }
        Ok(TestKernel { values, lipschitz })
    }

    pub fn from_fn(grid: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..grid).map(|j| f(grid_angle(j, grid))).collect(), None)
    }

    pub fn constant(grid: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; grid], Some(0.0))
    }

    /// Poisson kernel `P_r(θ) = (1 − r²)/(1 − 2r cos θ + r²)`.
    pub fn poisson(grid: usize, r: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::invalid(format!("Poisson kernel radius {r} must be in [0, 1)")));
        }
        Self::from_fn(grid, |t| (1.0 - r * r) / (1.0 - 2.0 * r * t.cos() + r * r))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    /// `g_k = (1/N) Σ_j g(θ_j) e^{-ikθ_j}` for `k = 0..N-1` (indices above N/2 are negative frequencies).
    pub fn fourier_coefficients(&self) -> Vec<Complex64> {
        let n = self.values.len();
        let mut buf: Vec<FftComplex<f64>> = self.values.iter().map(|&v| FftComplex::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        buf.into_iter()
            .enumerate()
            .map(|(k, v)| {
                // e^{-ikθ_j} = e^{ikπ(N-0)/N} e^{-2πijk/N}
                let phase = Complex64::from_polar(1.0, PI * k as f64);
                Complex64::new(v.re, v.im) * phase / n as f64
            })
            .collect()
    }

    /// Frequencies `|k| ≤ N/2 − 1` whose coefficient is negligible (`≤ 1e-14` of the largest).
    pub fn vanishing_coefficients(&self) -> Vec<i64> {
        let n = self.values.len();
        let coef = self.fourier_coefficients();
        let scale = coef.iter().fold(0.0f64, |acc, c| acc.max(c.norm()));
        let half = (n / 2) as i64 - 1;
        (-half..=half)
            .filter(|&k| coef[k.rem_euclid(n as i64) as usize].norm() <= 1e-14 * scale)
            .collect()
    }

    /// `g(θ_j) = g(-θ_j)` within `tol · max|g|`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.values.len();
        let scale = self.values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
        (1..n).all(|j| (self.values[j] - self.values[n - j]).abs() <= tol * scale)
    }

    /// Periodic linear interpolation at an arbitrary angle.
    pub fn eval(&self, theta: f64) -> f64 {
        let n = self.values.len();
        let pos = ((theta + PI) / (2.0 * PI) * n as f64).rem_euclid(n as f64);
        let i = (pos.floor() as usize).min(n - 1);
        let frac = pos - i as f64;
        (1.0 - frac) * self.values[i] + frac * self.values[(i + 1) % n]
    }
}

/// `max_{ζ ∈ K} |P[μ₀](ζ) − P[μ₁](ζ)|` over the region's samples.
pub fn delta_k(mu0: &SpectralMeasure, mu1: &SpectralMeasure, k: &RegionK) -> Result<f64> {
    let pts = k.sample_points();
    if pts.is_empty() {
        return Err(Error::invalid("delta_K: region has no samples"));
    }
    let a = mu0.poisson_many(&pts)?;
    let b = mu1.poisson_many(&pts)?;
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// `sup_ξ |(g ∗ (μ₀ − μ₁))(ξ)|` over the grid points.
pub fn delta_smooth(mu0: &SpectralMeasure, mu1: &SpectralMeasure, g: &TestKernel) -> Result<f64> {
    let n = mu0.grid_size();
    if mu1.grid_size() != n || g.grid_size() != n {
        return Err(Error::invalid(format!(
            "delta_smooth: grids differ (measures {} and {}, kernel {})",
            n,
            mu1.grid_size(),
            g.grid_size()
        )));
    }
    if n % 2 != 0 {
        return Err(Error::invalid("delta_smooth: grid size must be even"));
    }
    if g.values.iter().all(|v| *v == 0.0) {
        return Err(Error::invalid("delta_smooth: kernel is identically zero"));
    }
    // g̃[m] = g(2πm/N); θ_j = 2π(j − N/2)/N.
    let shifted: Vec<FftComplex<f64>> = (0..n)
        .map(|m| FftComplex::new(g.values[(m + n / 2) % n], 0.0))
        .collect();
    let diff: Vec<FftComplex<f64>> = mu0
        .density()
        .iter()
        .zip(mu1.density())
        .map(|(a, b)| FftComplex::new(a - b, 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut gh = shifted;
    let mut dh = diff;
    fwd.process(&mut gh);
    fwd.process(&mut dh);
    let mut prod: Vec<FftComplex<f64>> = gh.iter().zip(&dh).map(|(a, b)| a * b).collect();
    inv.process(&mut prod);
    let scale = 2.0 * PI / (n as f64 * n as f64);
    let atoms0 = atom_convolution(mu0, g);
    let atoms1 = atom_convolution(mu1, g);
    Ok((0..n)
        .map(|l| (prod[l].re * scale + (atoms0[l] - atoms1[l])).abs())
        .fold(0.0, f64::max))
}

fn atom_convolution(mu: &SpectralMeasure, g: &TestKernel) -> Vec<f64> {
    let n = mu.grid_size();
    let mut out = vec![0.0; n];
    for a in mu.atoms() {
        for (l, o) in out.iter_mut().enumerate() {
            *o += a.mass * g.eval(grid_angle(l, n) - a.theta);
        }
    }
    out
}

/// Result of the discretized transport problem and its dual certificate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransportSolution {
    pub value: f64,
    pub dual_value: f64,
    /// Optimal dual potential `g` on the coarse grid (`|g| ≤ κ`, slope ≤ 1).
    pub potential: Vec<f64>,
    pub grid: usize,
}

impl TransportSolution {
    pub fn gap(&self) -> f64 {
        (self.value - self.dual_value).abs()
    }
}

/// Mass of a measure lumped onto `m` equally spaced nodes `φ_i = -π + 2πi/m`.
pub fn rebin(mu: &SpectralMeasure, m: usize) -> Vec<f64> {
    let n = mu.grid_size();
    let mut out = vec![0.0; m];
    let node = |theta: f64| {
        let pos = ((theta + PI) / (2.0 * PI) * m as f64).round() as i64;
        pos.rem_euclid(m as i64) as usize
    };
    let cell = 2.0 * PI / n as f64;
    for (j, &d) in mu.density().iter().enumerate() {
        out[node(grid_angle(j, n))] += cell * d;
    }
    for a in mu.atoms() {
        out[node(a.theta)] += a.mass;
    }
    out
}

/// Unbalanced transport distance `δ_{1,κ}` on the default coarse grid.
pub fn transport_metric(mu0: &SpectralMeasure, mu1: &SpectralMeasure, kappa: f64) -> Result<f64> {
    Ok(transport_solution(mu0, mu1, kappa, TRANSPORT_GRID)?.value)
}

/// Unbalanced transport between the measures rebinned to `m` nodes.
///
/// On equally spaced nodes of the circle the optimal plan can be routed along
/// the cycle graph, so the problem is solved as a min-cost flow with arcs of
/// length `2π/m` between neighbours and creation/destruction at cost `κ`.
pub fn transport_solution(mu0: &SpectralMeasure, mu1: &SpectralMeasure, kappa: f64, m: usize) -> Result<TransportSolution> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::invalid(format!("transport: κ = {kappa} must be > 0")));
    }
    if m < 2 {
        return Err(Error::invalid("transport: grid must have at least 2 nodes"));
    }
    let a = rebin(mu0, m);
    let b = rebin(mu1, m);
    transport_on_nodes(&a, &b, kappa)
}

/// Unbalanced transport between two nonnegative mass vectors on equally spaced circle nodes.
pub fn transport_on_nodes(a: &[f64], b: &[f64], kappa: f64) -> Result<TransportSolution> {
    let m = a.len();
    if b.len() != m {
        return Err(Error::invalid("transport: mass vectors differ in length"));
    }
    let h = 2.0 * PI / m as f64;
    // Columns: f⁺ (i → i+1), f⁻ (i+1 → i), s⁺ (destroy at i), s⁻ (create at i).
    let nvar = 4 * m;
    let mut cost = vec![h; 2 * m];
    cost.extend(std::iter::repeat_n(kappa, 2 * m));
    let mut rows = vec![vec![0.0; nvar]; m];
    for i in 0..m {
        let prev = (i + m - 1) % m;
        rows[i][i] += 1.0;
        rows[i][m + i] -= 1.0;
        rows[i][prev] -= 1.0;
        rows[i][m + prev] += 1.0;
        rows[i][2 * m + i] = 1.0;
        rows[i][3 * m + i] = -1.0;
    }
    let mut rhs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    // Supplies r and -r give mirror-image problems; always solve the one whose
    // first nonzero supply is positive so that swapping a and b is exact.
    let flip = rhs.iter().find(|r| **r != 0.0).is_some_and(|r| *r < 0.0);
    if flip {
        rhs.iter_mut().for_each(|r| *r = -*r);
    }
    let lp = LinearProgram { cost, a_eq: rows, b_eq: rhs.clone(), ..Default::default() };
    let sol = lp_solve(&lp).map_err(|e| Error::numerical(format!("transport LP: {e}")))?;
    let dual_value = sol.duals_eq.iter().zip(&rhs).map(|(g, r)| g * r).sum();
    let sign = if flip { -1.0 } else { 1.0 };
    let potential = sol.duals_eq.iter().map(|g| sign * g).collect();
    Ok(TransportSolution { value: sol.objective, dual_value, potential, grid: m })
}

/// Range of `(1/2π) ∫ g dμ` over all spectra with the given covariances.
///
/// The primal puts atoms on the kernel grid. The dual certificate comes from
/// the `8N`-point grid (kernel interpolated linearly): `Σ λ_k cos kθ` stays
/// below (lower bound) or above (upper bound) `g` there, and `λᵀc` is the
/// dual value. The two differ by the grid discretization.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MassRange {
    /// Primal values over atoms on the kernel grid.
    pub lo: f64,
    pub hi: f64,
    /// Dual values `λᵀc`.
    pub lo_dual: f64,
    pub hi_dual: f64,
    /// Multipliers `λ_0..λ_n` of the lower and upper problems.
    pub multipliers_lo: Vec<f64>,
    pub multipliers_hi: Vec<f64>,
    /// Largest envelope constraint violation of either certificate.
    pub envelope_violation: f64,
}

impl MassRange {
    pub fn disagreement(&self) -> f64 {
        (self.lo - self.lo_dual).abs().max((self.hi - self.hi_dual).abs())
    }
}

fn moment_lp(c: &[f64], thetas: &[f64], g: &[f64], sign: f64) -> Result<crate::lp::LpSolution> {
    let a_eq: Vec<Vec<f64>> = (0..c.len())
        .map(|k| thetas.iter().map(|t| (k as f64 * t).cos()).collect())
        .collect();
    let lp = LinearProgram {
        cost: g.iter().map(|v| sign * v).collect(),
        a_eq,
        b_eq: c.to_vec(),
        ..Default::default()
    };
    lp_solve(&lp).map_err(Error::from)
}

pub fn mass_range(c: &CovarianceSequence, g: &TestKernel) -> Result<MassRange> {
    if !(c.c0() > 0.0) {
        return Err(Error::infeasible("mass range: c_0 must be positive"));
    }
    if c.classify() == Positivity::Invalid {
        return Err(Error::infeasible("mass range: Toeplitz matrix is indefinite"));
    }
    if !c.is_real() {
        return Err(Error::invalid("mass range: covariances must be real"));
    }
    if !g.is_symmetric(1e-12) {
        return Err(Error::invalid("mass range: kernel must be symmetric, g(θ) = g(-θ)"));
    }
    let cr: Vec<f64> = c.values().iter().map(|v| v.re).collect();
    let n = g.grid_size();
    let coarse: Vec<f64> = (0..n).map(|j| grid_angle(j, n)).collect();
    let lo = moment_lp(&cr, &coarse, &g.values, 1.0)?.objective;
    let hi = -moment_lp(&cr, &coarse, &g.values, -1.0)?.objective;

    let fine = DUAL_OVERSAMPLING * n;
    let thetas: Vec<f64> = (0..fine).map(|j| grid_angle(j, fine)).collect();
    let fg: Vec<f64> = thetas.iter().map(|&t| g.eval(t)).collect();
    let plo = moment_lp(&cr, &thetas, &fg, 1.0)?;
    let phi = moment_lp(&cr, &thetas, &fg, -1.0)?;
    let multipliers_lo = plo.duals_eq.clone();
    let multipliers_hi: Vec<f64> = phi.duals_eq.iter().map(|v| -v).collect();
    let envelope_violation = thetas
        .iter()
        .zip(&fg)
        .map(|(&t, &gv)| {
            let below = envelope_value(&multipliers_lo, t) - gv;
            let above = gv - envelope_value(&multipliers_hi, t);
            below.max(above).max(0.0)
        })
        .fold(0.0, f64::max);
    let dot = |l: &[f64]| l.iter().zip(&cr).map(|(a, b)| a * b).sum::<f64>();
    Ok(MassRange {
        lo,
        hi,
        lo_dual: dot(&multipliers_lo),
        hi_dual: dot(&multipliers_hi),
        multipliers_lo,
        multipliers_hi,
        envelope_violation,
    })
}

/// `Σ λ_k cos(kθ)`, the trigonometric envelope of a dual certificate.
pub fn envelope_value(multipliers: &[f64], theta: f64) -> f64 {
    multipliers.iter().enumerate().map(|(k, l)| l * (k as f64 * theta).cos()).sum()
}

/// δ_K between pairs of measures evaluated in parallel (results in input order).
pub fn delta_k_many(pairs: &[(SpectralMeasure, SpectralMeasure)], k: &RegionK) -> Result<Vec<f64>> {
    pairs.par_iter().map(|(a, b)| delta_k(a, b, k)).collect()
}
