mod common;

use std::f64::consts::PI;

use common::*;
use rand::Rng;
use rand_distr::StandardNormal;
use spectral_uncertainty::fixtures::{self, C0Convention};
use spectral_uncertainty::lp::{lp_solve, LinearProgram};
use spectral_uncertainty::measure::{grid_angle, DEFAULT_GRID};
use spectral_uncertainty::metrics::{mass_range, TestKernel};
use spectral_uncertainty::three::{estimate_w_from_samples, np_spectrum, tune_poles, FilterBank, TuningOptions};
use spectral_uncertainty::uncertainty::{
    apriori_bound_pick, apriori_bound_toeplitz, diameter_pick_value, diameter_toeplitz_value, feasible_disc_toeplitz,
};
use spectral_uncertainty::{Atom, Complex64, CovarianceSequence, Positivity, RegionK, SpectralMeasure};

/// A vertex of the feasible set: atoms on `grid` angles minimizing a random
/// linear cost subject to the covariance constraints.
fn lp_feasible_measure(cov: &CovarianceSequence, grid: usize, r: &mut impl Rng) -> SpectralMeasure {
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
    let cost = (0..grid).map(|_| r.random_range(-1.0..1.0)).collect();
    let x = lp_solve(&LinearProgram { cost, a_eq, b_eq, ..Default::default() }).expect("feasible").x;
    let atoms = thetas
        .iter()
        .zip(&x)
        .filter(|(_, &m)| m > 1e-14)
        .map(|(&theta, &mass)| Atom { theta, mass })
        .collect();
    SpectralMeasure::atomic(grid, atoms).unwrap()
}

#[test]
fn lp_sampled_measures_lie_in_the_disc() {
    let mut r = rng(11);
    let grid = 512;
    for _ in 0..100 {
        let n = r.random_range(1..5);
        // Covariances of some measure on the LP grid, so the LP is feasible.
        let cov = random_measure(&mut r, grid, false).moments(n);
        let mu = lp_feasible_measure(&cov, grid, &mut r);
        let back = mu.moments(n);
        for k in 0..=n {
            assert!((back[k] - cov[k]).norm() < 1e-8 * cov.c0());
        }
        let z = Complex64::from_polar(0.9 * r.random::<f64>().sqrt(), r.random_range(-PI..PI));
        let d = feasible_disc_toeplitz(&cov, z).unwrap();
        let h = mu.herglotz(z).unwrap();
        assert!(d.contains(h, 1e-6 * (1.0 + d.radius)), "|h - center| = {} > R = {}", (h - d.center).norm(), d.radius);
    }
}

#[test]
fn pick_diameter_is_at_most_the_order_zero_diameter() {
    let mut r = rng(12);
    let k = RegionK::parse_with_samples("circle:0.7", 128).unwrap();
    for _ in 0..20 {
        let mu = random_measure(&mut r, 1024, true);
        let nodes = vec![c(0.0, 0.0), c(0.3, 0.4), c(0.3, -0.4), c(-0.5, 0.0)];
        let p = mu.generalized_moments(&nodes).unwrap();
        if p.classify() != Positivity::Positive {
            continue;
        }
        let (pick, _) = diameter_pick_value(&p, &k).unwrap();
        let (toep, _) = diameter_toeplitz_value(&mu.moments(0), &k).unwrap();
        assert!(pick <= toep * (1.0 + 1e-9), "{pick} > {toep}");
    }
}

#[test]
fn mass_range_is_nested_and_primal_dual_agree() {
    let mut r = rng(13);
    let grid = 1024;
    let g = TestKernel::poisson(grid, 0.6).unwrap();
    for _ in 0..6 {
        let coef: Vec<f64> = (0..3).map(|_| r.random_range(-0.6..0.6)).collect();
        let mu = SpectralMeasure::from_density_fn(grid, |t| {
            1.0 + coef.iter().enumerate().map(|(k, a)| a * ((k + 1) as f64 * t).cos()).sum::<f64>()
        })
        .unwrap();
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for n in 0..=3 {
            let m = mass_range(&mu.moments(n), &g).unwrap();
            assert!(m.lo >= lo - 1e-9 && m.hi <= hi + 1e-9, "n = {n}: [{}, {}] not in [{lo}, {hi}]", m.lo, m.hi);
            assert!(m.lo <= m.hi + 1e-12);
            assert!(m.envelope_violation <= 1e-7 * (1.0 + m.hi.abs()), "violation {}", m.envelope_violation);
            assert!((m.lo - m.lo_dual).abs() <= 1e-5 * (1.0 + m.hi.abs()));
            assert!((m.hi - m.hi_dual).abs() <= 1e-5 * (1.0 + m.hi.abs()));
            lo = m.lo;
            hi = m.hi;
        }
    }
}

/// Full-length estimate of `w` at one node and the batch-means standard error.
fn estimate_with_error(y: &[f64], node: Complex64, batches: usize) -> (Complex64, f64) {
    let poles = if node == Complex64::new(0.0, 0.0) { vec![node] } else { vec![c(0.0, 0.0), node] };
    let idx = poles.len() - 1;
    let bank = FilterBank::new(poles).unwrap();
    let w = estimate_w_from_samples(y, &bank).unwrap().values()[idx];
    let len = y.len() / batches;
    let parts: Vec<Complex64> = (0..batches)
        .map(|b| estimate_w_from_samples(&y[b * len..(b + 1) * len], &bank).unwrap().values()[idx])
        .collect();
    let mean = parts.iter().sum::<Complex64>() / batches as f64;
    let var = parts.iter().map(|p| (p - mean).norm_sqr()).sum::<f64>() / (batches - 1) as f64;
    (w, (var / batches as f64).sqrt())
}

#[test]
fn estimator_white_noise() {
    let mut r = rng(14);
    let y: Vec<f64> = (0..1_000_000).map(|_| r.sample(StandardNormal)).collect();
    let (w, sigma) = estimate_with_error(&y, c(0.5, 0.0), 100);
    assert!((w - 1.0).norm() <= 3.0 * sigma, "ŵ = {w}, σ = {sigma}");
}

#[test]
fn estimator_sinusoids_plus_ma1() {
    let f = fixtures::sec6(C0Convention::AsDisplayed).unwrap();
    assert!((f.c0() - 19.0 / 9.0).abs() < 1e-9);
    let y = f.simulate(1_000_000, 15);
    let (w, sigma) = estimate_with_error(&y, c(0.0, 0.0), 100);
    assert!((w - 19.0 / 9.0).norm() <= 3.0 * sigma, "ŵ = {w}, σ = {sigma}");
}

#[test]
fn estimator_deterministic_cosine() {
    let y: Vec<f64> = (0..100_000).map(|t| (t as f64).cos()).collect();
    let (w, sigma) = estimate_with_error(&y, c(0.0, 0.0), 20);
    assert!((w - 0.5).norm() <= 3.0 * sigma, "ŵ = {w}, σ = {sigma}");
}

/// A rational density whose zeros sit at the nodes is reproduced exactly by
/// the central solution of matching degree.
#[test]
fn central_solution_reproduces_matching_degree_arma() {
    let cases: Vec<(Vec<Complex64>, Vec<Complex64>)> = vec![
        (vec![c(0.4, 0.0)], vec![c(0.6, 0.0)]),
        (vec![c(0.3, 0.5), c(0.3, -0.5)], vec![c(-0.2, 0.7), c(-0.2, -0.7)]),
        (vec![c(-0.5, 0.0), c(0.1, 0.3)], vec![c(0.5, 0.2)]),
    ];
    for (zeros, poles) in cases {
        let density = |t: f64| {
            let e = Complex64::from_polar(1.0, t);
            let num: f64 = zeros.iter().map(|z| (1.0 - z / e).norm_sqr()).product();
            let den: f64 = poles.iter().map(|b| (1.0 - b * e).norm_sqr()).product();
            num / den
        };
        let truth = SpectralMeasure::from_density_fn(DEFAULT_GRID, density).unwrap();
        let mut nodes = vec![c(0.0, 0.0)];
        nodes.extend(&zeros);
        let p = truth.generalized_moments(&nodes).unwrap();
        let est = np_spectrum(&p, DEFAULT_GRID).unwrap();
        let err = est.density().iter().zip(truth.density()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-4, "zeros {zeros:?}: sup error {err}");
    }
}

fn local_maxima(mu: &SpectralMeasure, lo: f64, hi: f64) -> Vec<f64> {
    let d = mu.density();
    let n = d.len();
    (0..n)
        .filter(|&j| {
            let t = mu.theta(j);
            t >= lo && t <= hi && d[j] > d[(j + n - 1) % n] && d[j] >= d[(j + 1) % n]
        })
        .map(|j| mu.theta(j))
        .collect()
}

#[test]
fn filter_bank_estimate_separates_close_lines() {
    for conv in [C0Convention::AsStated, C0Convention::AsDisplayed] {
        let f = fixtures::sec8(conv).unwrap();
        let est = np_spectrum(&f.pick_data().unwrap(), DEFAULT_GRID).unwrap();
        let peaks = local_maxima(&est, 0.3, 0.8);
        assert_eq!(peaks.len(), 2, "{conv:?}: {peaks:?}");
        assert!((peaks[0] - 0.5).abs() < 0.03 && (peaks[1] - 0.6).abs() < 0.03, "{conv:?}: {peaks:?}");
    }
}

#[test]
fn tuning_a_single_real_pole() {
    let k = RegionK::points(&[c(0.5, 0.0)]).unwrap();
    let rep = tune_poles(1, &k, 1.0, &TuningOptions { restarts: 4, ..Default::default() }).unwrap();
    let zero_pole = 4.0 * 0.25 / 0.75;
    assert!(rep.bound < zero_pole, "{} vs {zero_pole}", rep.bound);
    assert!((rep.poles[1].re - 0.5).abs() < 1e-2, "{:?}", rep.poles);
}

#[test]
fn tuning_is_monotone_in_restarts_and_beats_the_baseline() {
    let k = fixtures::sec8_region().unwrap();
    for n in [2, 3, 4] {
        let one = tune_poles(n, &k, 1.0, &TuningOptions { restarts: 1, seed: 3, init: None }).unwrap();
        let many = tune_poles(n, &k, 1.0, &TuningOptions { restarts: 16, seed: 3, init: None }).unwrap();
        assert!(many.bound <= one.bound * (1.0 + 1e-12), "n = {n}: {} > {}", many.bound, one.bound);
        let baseline = apriori_bound_toeplitz(1.0, n, &k).unwrap();
        assert!(one.bound <= baseline * (1.0 + 1e-5), "n = {n}: {} > baseline {baseline}", one.bound);
        let check = apriori_bound_pick(&one.poles, 1.0, &k).unwrap().bound;
        assert!((check - one.bound).abs() < 1e-12 * check);
    }
}
