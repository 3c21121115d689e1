#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_uncertainty::lp::{lp_solve, LinearProgram};
use spectral_uncertainty::measure::grid_angle;
use spectral_uncertainty::schur::{schur_to_covariance, SchurParameters};
use spectral_uncertainty::{Atom, Complex64, CovarianceSequence, SpectralMeasure};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Positive covariances from Schur parameters drawn uniformly in `|γ| < max_mod`.
pub fn random_covariance(rng: &mut ChaCha8Rng, n: usize, max_mod: f64, complex: bool) -> CovarianceSequence {
    let c0 = rng.random_range(0.5..2.0);
    let gammas = (0..n)
        .map(|_| {
            let r = max_mod * rng.random::<f64>().sqrt();
            if complex {
                Complex64::from_polar(r, rng.random_range(-PI..PI))
            } else {
                c(if rng.random::<bool>() { r } else { -r }, 0.0)
            }
        })
        .collect();
    schur_to_covariance(&SchurParameters::new(c0, gammas).unwrap())
}

/// A smooth positive density (a random nonnegative trigonometric polynomial
/// plus a floor) with up to three atoms.
pub fn random_measure(rng: &mut ChaCha8Rng, grid: usize, with_atoms: bool) -> SpectralMeasure {
    let coef: Vec<Complex64> = (0..6).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let floor = rng.random_range(0.05..0.5);
    let mut mu = SpectralMeasure::from_density_fn(grid, |t| {
        let s: Complex64 = coef.iter().enumerate().map(|(k, a)| a * Complex64::from_polar(1.0, k as f64 * t)).sum();
        floor + s.norm_sqr()
    })
    .unwrap();
    if with_atoms {
        let k = rng.random_range(0..=3);
        let atoms: Vec<Atom> = (0..k)
            .map(|_| Atom { theta: rng.random_range(-PI..PI), mass: rng.random_range(0.1..2.0) })
            .collect();
        if let Ok(m) = mu.with_atoms(&atoms) {
            mu = m;
        }
    }
    mu
}

/// `(1/2π)(1 − |z|²)/|e^{iθ} − z|²`.
pub fn poisson_weight(z: Complex64, theta: f64) -> f64 {
    (1.0 - z.norm_sqr()) / (Complex64::from_polar(1.0, theta) - z).norm_sqr() / (2.0 * PI)
}

/// Smallest and largest `P[μ](z)` over atomic measures on `grid` equally
/// spaced angles whose covariances are `c`, by linear programming.
pub fn lp_poisson_range(cov: &CovarianceSequence, z: Complex64, grid: usize) -> (f64, f64) {
    let thetas: Vec<f64> = (0..grid).map(|j| grid_angle(j, grid)).collect();
    let mut a_eq = Vec::new();
    let mut b_eq = Vec::new();
    for k in 0..=cov.order() {
        let kf = k as f64;
        a_eq.push(thetas.iter().map(|t| (kf * t).cos() / (2.0 * PI)).collect::<Vec<_>>());
        b_eq.push(cov[k].re);
        if k > 0 {
            a_eq.push(thetas.iter().map(|t| -(kf * t).sin() / (2.0 * PI)).collect());
            b_eq.push(cov[k].im);
        }
    }
    let w: Vec<f64> = thetas.iter().map(|&t| poisson_weight(z, t)).collect();
    let solve = |sign: f64| {
        let lp = LinearProgram {
            cost: w.iter().map(|v| sign * v).collect(),
            a_eq: a_eq.clone(),
            b_eq: b_eq.clone(),
            ..Default::default()
        };
        sign * lp_solve(&lp).expect("moment LP").objective
    };
    (solve(1.0), solve(-1.0))
}

/// `max_z (max P − min P)` over the given points.
pub fn lp_diameter(cov: &CovarianceSequence, zs: &[Complex64], grid: usize) -> f64 {
    zs.iter()
        .map(|&z| {
            let (lo, hi) = lp_poisson_range(cov, z, grid);
            hi - lo
        })
        .fold(0.0, f64::max)
}

/// `∫ |dμ₀ − dμ₁|` for measures on the same grid.
pub fn total_variation(a: &SpectralMeasure, b: &SpectralMeasure) -> f64 {
    let cell = 2.0 * PI / a.grid_size() as f64;
    let dens: f64 = a.density().iter().zip(b.density()).map(|(x, y)| (x - y).abs() * cell).sum();
    let mut atoms: Vec<(f64, f64)> = a.atoms().iter().map(|x| (x.theta, x.mass)).collect();
    for y in b.atoms() {
        match atoms.iter_mut().find(|x| (x.0 - y.theta).abs() < 1e-12) {
            Some(x) => x.1 -= y.mass,
            None => atoms.push((y.theta, -y.mass)),
        }
    }
    dens + atoms.iter().map(|x| x.1.abs()).sum::<f64>()
}

/// Equally spaced points on a centered circle, without refinement.
pub fn circle_points(r: f64, m: usize) -> Vec<Complex64> {
    (0..m).map(|j| Complex64::from_polar(r, grid_angle(j, m))).collect()
}
