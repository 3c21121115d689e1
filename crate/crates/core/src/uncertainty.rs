//! Feasible-value discs of the Herglotz transform, diameters of moment
//! uncertainty sets, a-priori bounds, and the extremal spectra attaining the
//! diameters.
//!
//! For covariance data `c_0..c_n` every consistent spectrum has
//! `H(z)` in a disc whose radius has the closed form
//! `R(z) = 2|z|^{n+1} / ((1 − |z|²) bᵀ T⁻¹ b)` with `b = (z^n, …, z, 1)`; for
//! Pick data the disc radius is `|B(z)| / ((1 − |z|²) bᵀ P⁻¹ b)` with
//! `b_k = 1/(1 − z_k z̄)` and `B` the Blaschke product of the nodes.
//! Both are the Schur-complement radii `|center|² − ⟨d,d⟩/⟨b,b⟩` with the
//! cancellation removed.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covariance::{CovarianceSequence, Positivity};
use crate::error::{Error, Result};
use crate::linalg::{dot_whitened, CVector, HpdFactor};
use crate::measure::{SpectralMeasure, DEFAULT_GRID};
use crate::pick::PickData;
use crate::poly;
use crate::region::{golden_max, RegionK};
use crate::schur::{atomic_measure, completion_measure, covariance_to_schur, orthogonal_polynomials};
use crate::three::NevanlinnaPick;
use crate::{check_interior, Complex64};

/// Samples of the completion angle `ψ` when searching for extremal spectra.
pub const EXTREMAL_SCAN: usize = 720;

/// Disc `|w − center| ≤ radius` containing `H(z)` for every consistent spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscEnvelope {
    pub z: Complex64,
    pub center: Complex64,
    pub radius: f64,
}

impl DiscEnvelope {
    pub fn contains(&self, w: Complex64, slack: f64) -> bool {
        (w - self.center).norm() <= self.radius + slack
    }

    /// Range of the Poisson integral `Re H(z)`.
    pub fn poisson_range(&self) -> (f64, f64) {
        (self.center.re - self.radius, self.center.re + self.radius)
    }
}

/// Largest uncertainty over a region and two spectra that realize it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "ReportFile", try_from = "ReportFile")]
pub struct DiameterReport {
    pub rho: f64,
    pub argmax_z: Complex64,
    /// `(ζ, 2R(ζ))` for every region sample.
    pub per_point: Vec<(Complex64, f64)>,
    pub extremal: [SpectralMeasure; 2],
    /// `|P[extremal₀](argmax_z) − P[extremal₁](argmax_z)|`.
    pub achieved: f64,
}

#[derive(Serialize, Deserialize)]
struct ReportFile {
    rho: f64,
    argmax_z: Complex64,
    per_point: Vec<[f64; 3]>,
    extremal: [SpectralMeasure; 2],
    achieved: f64,
}

impl From<DiameterReport> for ReportFile {
    fn from(r: DiameterReport) -> Self {
        ReportFile {
            rho: r.rho,
            argmax_z: r.argmax_z,
            per_point: r.per_point.iter().map(|(z, d)| [z.re, z.im, *d]).collect(),
            extremal: r.extremal,
            achieved: r.achieved,
        }
    }
}

impl TryFrom<ReportFile> for DiameterReport {
    type Error = Error;
    fn try_from(f: ReportFile) -> Result<Self> {
        Ok(DiameterReport {
            rho: f.rho,
            argmax_z: f.argmax_z,
            per_point: f.per_point.iter().map(|p| (Complex64::new(p[0], p[1]), p[2])).collect(),
            extremal: f.extremal,
            achieved: f.achieved,
        })
    }
}

// ---------------------------------------------------------------------------
// Covariance data

enum ToeplitzState {
    Definite(HpdFactor),
    Singular(SpectralMeasure),
}

/// Disc evaluator for covariance data; factorizes `T_n` once.
pub struct ToeplitzDiscs {
    c: CovarianceSequence,
    state: ToeplitzState,
}

impl ToeplitzDiscs {
    pub fn new(c: &CovarianceSequence) -> Result<Self> {
        if !(c.c0() > 0.0) {
            return Err(Error::invalid("covariance sequence has c_0 = 0"));
        }
        let state = match c.classify() {
            Positivity::Positive => ToeplitzState::Definite(HpdFactor::new(&c.toeplitz())?),
            Positivity::NonnegativeSingular => ToeplitzState::Singular(atomic_measure(c, DEFAULT_GRID)?),
            Positivity::Invalid => {
                return Err(Error::infeasible(
                    "Toeplitz matrix is indefinite; no spectrum has these covariances",
                ))
            }
        };
        Ok(ToeplitzDiscs { c: c.clone(), state })
    }

    pub fn is_singular(&self) -> bool {
        matches!(self.state, ToeplitzState::Singular(_))
    }

    pub fn disc(&self, z: Complex64) -> Result<DiscEnvelope> {
        check_interior(z)?;
        Ok(self.disc_unchecked(z))
    }

    fn disc_unchecked(&self, z: Complex64) -> DiscEnvelope {
        let c0 = self.c.c0();
        let factor = match &self.state {
            ToeplitzState::Singular(mu) => {
                return DiscEnvelope { z, center: mu.herglotz_unchecked(z), radius: 0.0 };
            }
            ToeplitzState::Definite(f) => f,
        };
        if z == Complex64::new(0.0, 0.0) {
            return DiscEnvelope { z, center: Complex64::new(c0, 0.0), radius: 0.0 };
        }
        let n = self.c.order();
        // b̃_k = z^{n-k}, d̃_k = z^{n-k}(c_0 + 2c_1 z + … + 2c_k z^k): the
        // Prop.-6 vectors multiplied through by z^{n+1}.
        let mut pw = vec![Complex64::new(1.0, 0.0); n + 1];
        for k in 1..=n {
            pw[k] = pw[k - 1] * z;
        }
        let mut partial = Complex64::new(c0, 0.0);
        let mut b = CVector::zeros(n + 1);
        let mut d = CVector::zeros(n + 1);
        for k in 0..=n {
            if k > 0 {
                partial += 2.0 * self.c[k] * pw[k];
            }
            b[k] = pw[n - k];
            d[k] = pw[n - k] * partial;
        }
        let bw = factor.whiten(&b);
        let dw = factor.whiten(&d);
        let beta = bw.norm_squared();
        let r2 = z.norm_sqr();
        let a = 2.0 / (1.0 - r2);
        let zn1 = pw[n].norm_sqr() * r2;
        let center = (a * zn1 + dot_whitened(&dw, &bw)) / beta;
        let radius = 2.0 * (zn1.sqrt()) / ((1.0 - r2) * beta);
        DiscEnvelope { z, center, radius }
    }

    pub fn discs(&self, zs: &[Complex64]) -> Result<Vec<DiscEnvelope>> {
        for &z in zs {
            check_interior(z)?;
        }
        Ok(zs.par_iter().map(|&z| self.disc_unchecked(z)).collect())
    }
}

pub fn feasible_disc_toeplitz(c: &CovarianceSequence, z: Complex64) -> Result<DiscEnvelope> {
    ToeplitzDiscs::new(c)?.disc(z)
}

fn max_over_region(k: &RegionK, radius: &(dyn Fn(Complex64) -> f64 + Sync)) -> (f64, Complex64, Vec<(Complex64, f64)>) {
    let pts = k.sample_points();
    let diam: Vec<f64> = pts.par_iter().map(|&z| 2.0 * radius(z)).collect();
    let (arg, rho) = k.refine_max(&diam, |z| 2.0 * radius(z));
    let per_point = pts.into_iter().zip(diam).collect();
    (rho, arg, per_point)
}

/// Diameter `max_K 2R(ζ)` and its maximizer, without extremal spectra.
pub fn diameter_toeplitz_value(c: &CovarianceSequence, k: &RegionK) -> Result<(f64, Complex64)> {
    let discs = ToeplitzDiscs::new(c)?;
    let (rho, arg, _) = max_over_region(k, &|z| discs.disc_unchecked(z).radius);
    Ok((rho, arg))
}

/// Diameter of the covariance uncertainty set in the Poisson metric over `K`,
/// with two singular completions attaining it.
pub fn diameter_toeplitz(c: &CovarianceSequence, k: &RegionK) -> Result<DiameterReport> {
    let discs = ToeplitzDiscs::new(c)?;
    let (rho, arg, per_point) = max_over_region(k, &|z| discs.disc_unchecked(z).radius);
    let extremal = match &discs.state {
        ToeplitzState::Singular(mu) => [mu.clone(), mu.clone()],
        ToeplitzState::Definite(_) => {
            let s = covariance_to_schur(c)?;
            let polys = orthogonal_polynomials(&s);
            let n = c.order();
            let z = arg;
            let (phi, phis) = (poly::eval(&polys.phi[n], z), poly::eval(&polys.phi_star[n], z));
            let (psi, psis) = (poly::eval(&polys.psi[n], z), poly::eval(&polys.psi_star[n], z));
            let c0 = c.c0();
            // P of the completion with γ_{n+1} = e^{iψ}.
            let value = |t: f64| {
                let u = z * Complex64::from_polar(1.0, t);
                (c0 * (psis + u * psi) / (phis - u * phi)).re
            };
            let (lo, hi) = extremal_angles(&value);
            [completion_measure(c, lo, DEFAULT_GRID)?, completion_measure(c, hi, DEFAULT_GRID)?]
        }
    };
    let achieved = (extremal[0].poisson(arg)? - extremal[1].poisson(arg)?).abs();
    Ok(DiameterReport { rho, argmax_z: arg, per_point, extremal, achieved })
}

/// Angles minimizing and maximizing a function on the circle: a uniform scan
/// followed by golden-section refinement around the best samples.
fn extremal_angles(value: &(dyn Fn(f64) -> f64 + Sync)) -> (f64, f64) {
    let step = 2.0 * PI / EXTREMAL_SCAN as f64;
    let vals: Vec<(f64, f64)> = (0..EXTREMAL_SCAN)
        .map(|i| {
            let t = -PI + step * i as f64;
            (t, value(t))
        })
        .collect();
    let best = vals.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    let worst = vals.iter().copied().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    let (hi, _) = golden_max(value, best.0 - step, best.0 + step, 1e-9);
    let (lo, _) = golden_max(|t| -value(t), worst.0 - step, worst.0 + step, 1e-9);
    (lo, hi)
}

/// `4 c_0 r^{n+1} / (1 − r²)` with `r` the largest modulus in `K`.
pub fn apriori_bound_toeplitz(c0: f64, n: usize, k: &RegionK) -> Result<f64> {
    if !(c0 > 0.0) || !c0.is_finite() {
        return Err(Error::invalid(format!("c_0 = {c0} must be > 0")));
    }
    let r = k.max_modulus();
    Ok(4.0 * c0 * r.powi(n as i32 + 1) / (1.0 - r * r))
}

// ---------------------------------------------------------------------------
// Pick data

enum PickState {
    Definite(HpdFactor),
    Singular(NevanlinnaPick),
}

/// Disc evaluator for Pick data; factorizes `P` once.
pub struct PickDiscs {
    p: PickData,
    state: PickState,
}

/// Finite Blaschke product `Π (z − z_k)/(1 − conj(z_k) z)`.
pub fn blaschke(nodes: &[Complex64], z: Complex64) -> Complex64 {
    nodes
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, &zk| acc * (z - zk) / (1.0 - zk.conj() * z))
}

impl PickDiscs {
    pub fn new(p: &PickData) -> Result<Self> {
        let state = match p.classify() {
            Positivity::Positive => PickState::Definite(HpdFactor::new(&p.pick_matrix())?),
            Positivity::NonnegativeSingular => PickState::Singular(NevanlinnaPick::new_nonnegative(p)?),
            Positivity::Invalid => {
                return Err(Error::infeasible(
                    "Pick matrix is indefinite; no spectrum matches these values",
                ))
            }
        };
        Ok(PickDiscs { p: p.clone(), state })
    }

    pub fn disc(&self, z: Complex64) -> Result<DiscEnvelope> {
        check_interior(z)?;
        Ok(self.disc_unchecked(z))
    }

    fn disc_unchecked(&self, z: Complex64) -> DiscEnvelope {
        let factor = match &self.state {
            PickState::Singular(np) => {
                return DiscEnvelope { z, center: np.eval(z, Complex64::new(0.0, 0.0)), radius: 0.0 };
            }
            PickState::Definite(f) => f,
        };
        if let Some(k) = self.p.nodes().iter().position(|&zk| (zk - z).norm() <= 1e-14) {
            return DiscEnvelope { z, center: self.p.values()[k], radius: 0.0 };
        }
        let n = self.p.len();
        let mut b = CVector::zeros(n);
        let mut d = CVector::zeros(n);
        for k in 0..n {
            let g = 1.0 / (1.0 - self.p.nodes()[k] * z.conj());
            b[k] = g;
            d[k] = -self.p.values()[k] * g;
        }
        let bw = factor.whiten(&b);
        let dw = factor.whiten(&d);
        let beta = bw.norm_squared();
        let r2 = z.norm_sqr();
        let a = 1.0 / (1.0 - r2);
        let center = (a + dot_whitened(&bw, &dw)) / beta;
        let radius = blaschke(self.p.nodes(), z).norm() / ((1.0 - r2) * beta);
        DiscEnvelope { z, center, radius }
    }

    pub fn discs(&self, zs: &[Complex64]) -> Result<Vec<DiscEnvelope>> {
        for &z in zs {
            check_interior(z)?;
        }
        Ok(zs.par_iter().map(|&z| self.disc_unchecked(z)).collect())
    }
}

pub fn feasible_disc_pick(p: &PickData, z: Complex64) -> Result<DiscEnvelope> {
    PickDiscs::new(p)?.disc(z)
}

pub fn diameter_pick_value(p: &PickData, k: &RegionK) -> Result<(f64, Complex64)> {
    let discs = PickDiscs::new(p)?;
    let (rho, arg, _) = max_over_region(k, &|z| discs.disc_unchecked(z).radius);
    Ok((rho, arg))
}

/// Diameter of the generalized-moment uncertainty set over `K`, with two
/// boundary Nevanlinna–Pick solutions attaining it.
pub fn diameter_pick(p: &PickData, k: &RegionK) -> Result<DiameterReport> {
    p.require_origin_first()?;
    let discs = PickDiscs::new(p)?;
    let (rho, arg, per_point) = max_over_region(k, &|z| discs.disc_unchecked(z).radius);
    let extremal = match &discs.state {
        PickState::Singular(np) => {
            let mu = np.boundary_measure(Complex64::new(1.0, 0.0), DEFAULT_GRID)?;
            [mu.clone(), mu]
        }
        PickState::Definite(_) => {
            let np = NevanlinnaPick::new(p)?;
            let value = |t: f64| np.eval(arg, Complex64::from_polar(1.0, t)).re;
            let (lo, hi) = extremal_angles(&value);
            [
                np.boundary_measure(Complex64::from_polar(1.0, lo), DEFAULT_GRID)?,
                np.boundary_measure(Complex64::from_polar(1.0, hi), DEFAULT_GRID)?,
            ]
        }
    };
    let achieved = (extremal[0].poisson(arg)? - extremal[1].poisson(arg)?).abs();
    Ok(DiameterReport { rho, argmax_z: arg, per_point, extremal, achieved })
}

/// A-priori bound for generalized moments and the data attaining it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PickBound {
    pub bound: f64,
    /// Point `α ∈ K` where `4 w_0 |B(α)|/(1 − |α|²)` is largest.
    pub argmax: Complex64,
    /// `w_k = w_0 (1 + z_k conj α)/(1 − z_k conj α)`: data of the point mass
    /// at `α/|α|`'s Herglotz kernel, for which the bound holds with equality.
    pub equality_values: Vec<Complex64>,
}

pub(crate) fn apriori_bound_pick_coarse(nodes: &[Complex64], w0: f64, samples: &[Complex64]) -> f64 {
    samples
        .iter()
        .map(|&z| 4.0 * w0 * blaschke(nodes, z).norm() / (1.0 - z.norm_sqr()))
        .fold(0.0, f64::max)
}

/// `max_{ζ ∈ K} 4 w_0 |B(ζ)| / (1 − |ζ|²)` for nodes starting with `z_0 = 0`.
pub fn apriori_bound_pick(nodes: &[Complex64], w0: f64, k: &RegionK) -> Result<PickBound> {
    if nodes.first().copied() != Some(Complex64::new(0.0, 0.0)) {
        return Err(Error::invalid("a-priori bound: the first node must be z_0 = 0"));
    }
    for &z in nodes {
        check_interior(z)?;
    }
    if !(w0 > 0.0) || !w0.is_finite() {
        return Err(Error::invalid(format!("w_0 = {w0} must be > 0")));
    }
    let f = |z: Complex64| 4.0 * w0 * blaschke(nodes, z).norm() / (1.0 - z.norm_sqr());
    let vals: Vec<f64> = k.sample_points().iter().map(|&z| f(z)).collect();
    let (argmax, bound) = k.refine_max(&vals, f);
    let equality_values = nodes
        .iter()
        .map(|&zk| {
            let t = zk * argmax.conj();
            w0 * (1.0 + t) / (1.0 - t)
        })
        .collect();
    Ok(PickBound { bound, argmax, equality_values })
}
