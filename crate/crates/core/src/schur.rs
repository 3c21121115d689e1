//! Levinson–Szegő recursions: Schur parameters, orthogonal polynomials of the
//! first and second kind, maximum-entropy spectra and singular completions.
//!
//! Conventions: with `φ_k(z) = Σ a_j z^j` monic,
//! `φ_{k+1} = z φ_k − conj(γ_{k+1}) φ_k*`, `ψ_{k+1} = z ψ_k + conj(γ_{k+1}) ψ_k*`,
//! and `γ_{k+1} = Σ_j conj(a_j) c_{j+1} / E_k` with `E_0 = c_0`,
//! `E_{k+1} = E_k (1 − |γ_{k+1}|²)`. In particular `γ_1 = c_1 / c_0`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::covariance::{CovarianceSequence, Positivity};
use crate::error::{Error, Result};
use crate::measure::{grid_angle, Atom, SpectralMeasure};
use crate::poly;
use crate::Complex64;

/// Relative tolerance on `1 − |γ|²` below which a parameter counts as unimodular.
const UNIMODULAR_TOL: f64 = 1e-8;
/// Atom masses down to `-MASS_CLIP · μ(𝕋)` are clipped to zero.
const MASS_CLIP: f64 = 1e-10;

/// `c_0` and the Schur (partial autocorrelation) parameters `γ_1..γ_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchurParameters {
    c0: f64,
    gammas: Vec<Complex64>,
}

impl SchurParameters {
    pub fn new(c0: f64, gammas: Vec<Complex64>) -> Result<Self> {
        if !(c0 > 0.0) || !c0.is_finite() {
            return Err(Error::invalid(format!("schur parameters: c_0 = {c0} must be > 0")));
        }
        let n = gammas.len();
        for (k, g) in gammas.iter().enumerate() {
            let r = g.norm();
            let last = k + 1 == n;
            if !r.is_finite() || r > 1.0 + 1e-12 || (!last && r >= 1.0) {
                return Err(Error::invalid(format!(
                    "schur parameters: |γ_{}| = {r} (must be < 1, or <= 1 for the last)",
                    k + 1
                )));
            }
        }
        Ok(SchurParameters { c0, gammas })
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn gammas(&self) -> &[Complex64] {
        &self.gammas
    }

    /// The last parameter is unimodular: the underlying measure has finitely many atoms.
    pub fn is_singular(&self) -> bool {
        self.gammas
            .last()
            .is_some_and(|g| 1.0 - g.norm_sqr() <= UNIMODULAR_TOL)
    }

    /// Prediction error variances `E_0..E_n`.
    pub fn prediction_errors(&self) -> Vec<f64> {
        let mut e = vec![self.c0];
        for g in &self.gammas {
            let last = *e.last().expect("nonempty");
            e.push(last * (1.0 - g.norm_sqr()).max(0.0));
        }
        e
    }
}

/// One Szegő step `φ ↦ zφ − conj(γ) φ*` on a monic coefficient vector.
fn szego_step(a: &[Complex64], gamma: Complex64) -> Vec<Complex64> {
    let k = a.len() - 1;
    let mut next = vec![Complex64::new(0.0, 0.0); k + 2];
    for j in 0..=k {
        next[j + 1] += a[j];
        next[j] -= gamma.conj() * a[k - j].conj();
    }
    next
}

struct Levinson {
    gammas: Vec<Complex64>,
    /// Monic `φ_m` for the last completed order `m = gammas.len()`.
    phi: Vec<Complex64>,
    error: f64,
    singular: bool,
}

fn levinson(c: &CovarianceSequence, allow_singular: bool) -> Result<Levinson> {
    let c0 = c.c0();
    if !(c0 > 0.0) {
        return Err(Error::invalid("covariance sequence has c_0 = 0"));
    }
    let cv = c.values();
    let mut a = vec![Complex64::new(1.0, 0.0)];
    let mut e = c0;
    let mut gammas = Vec::with_capacity(c.order());
    for k in 0..c.order() {
        let s: Complex64 = (0..=k).map(|j| a[j].conj() * cv[j + 1]).sum();
        let mut g = s / e;
        let defect = 1.0 - g.norm_sqr();
        if defect <= UNIMODULAR_TOL {
            if !allow_singular || defect < -1e-6 {
                return Err(Error::numerical(format!(
                    "Schur parameter γ_{} has modulus {} (positive data must give |γ| < 1)",
                    k + 1,
                    g.norm()
                )));
            }
            g /= g.norm();
            gammas.push(g);
            a = szego_step(&a, g);
            return Ok(Levinson { gammas, phi: a, error: 0.0, singular: true });
        }
        gammas.push(g);
        a = szego_step(&a, g);
        e *= defect;
    }
    Ok(Levinson { gammas, phi: a, error: e, singular: false })
}

/// Schur parameters of a nonnegative covariance sequence.
///
/// For singular data the recursion stops at the first index where `|γ_m| = 1`.
pub fn covariance_to_schur(c: &CovarianceSequence) -> Result<SchurParameters> {
    if !(c.c0() > 0.0) {
        return Err(Error::invalid("covariance sequence has c_0 = 0"));
    }
    match c.classify() {
        Positivity::Invalid => Err(Error::infeasible(
            "Toeplitz matrix is indefinite; no spectrum has these covariances",
        )),
        Positivity::Positive => {
            let lev = levinson(c, false)?;
            SchurParameters::new(c.c0(), lev.gammas)
        }
        Positivity::NonnegativeSingular => {
            let lev = levinson(c, true)?;
            if lev.singular {
                return SchurParameters::new(c.c0(), lev.gammas);
            }
            // Round-off kept every |γ| below the threshold: the defect sits at
            // the parameter closest to the unit circle.
            let (m, _) = lev
                .gammas
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .ok_or_else(|| Error::numerical("singular sequence without Schur parameters"))?;
            let mut gammas = lev.gammas[..=m].to_vec();
            let r = gammas[m].norm();
            gammas[m] /= r;
            SchurParameters::new(c.c0(), gammas)
        }
    }
}

/// Covariances `c_0..c_n` reproducing the given Schur parameters.
pub fn schur_to_covariance(s: &SchurParameters) -> CovarianceSequence {
    let mut c = vec![Complex64::new(s.c0, 0.0)];
    let mut a = vec![Complex64::new(1.0, 0.0)];
    let mut e = s.c0;
    for (k, &g) in s.gammas.iter().enumerate() {
        let tail: Complex64 = (0..k).map(|j| a[j].conj() * c[j + 1]).sum();
        c.push(g * e - tail);
        a = szego_step(&a, g);
        e *= 1.0 - g.norm_sqr();
    }
    CovarianceSequence::new(c).expect("c_0 > 0")
}

/// Coefficients (ascending powers) of the orthogonal polynomials of the first
/// and second kind and their reversals, orders `0..=n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalPolynomials {
    pub phi: Vec<Vec<Complex64>>,
    pub phi_star: Vec<Vec<Complex64>>,
    pub psi: Vec<Vec<Complex64>>,
    pub psi_star: Vec<Vec<Complex64>>,
}

pub fn orthogonal_polynomials(s: &SchurParameters) -> OrthogonalPolynomials {
    let one = vec![Complex64::new(1.0, 0.0)];
    let z = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    let mut out = OrthogonalPolynomials {
        phi: vec![one.clone()],
        phi_star: vec![one.clone()],
        psi: vec![one.clone()],
        psi_star: vec![one],
    };
    for &g in &s.gammas {
        let (phi, phis) = (out.phi.last().unwrap(), out.phi_star.last().unwrap());
        let (psi, psis) = (out.psi.last().unwrap(), out.psi_star.last().unwrap());
        let zphi = poly::mul(&z, phi);
        let zpsi = poly::mul(&z, psi);
        let next_phi = poly::add(&zphi, &poly::scale(phis, -g.conj()));
        let next_phis = poly::add(phis, &poly::scale(&zphi, -g));
        let next_psi = poly::add(&zpsi, &poly::scale(psis, g.conj()));
        let next_psis = poly::add(psis, &poly::scale(&zpsi, g));
        out.phi.push(next_phi);
        out.phi_star.push(next_phis);
        out.psi.push(next_psi);
        out.psi_star.push(next_psis);
    }
    out
}

/// Maximum-entropy spectrum `E_n / |φ_n(e^{iθ})|²` of positive data.
pub fn max_entropy_spectrum(c: &CovarianceSequence, grid: usize) -> Result<SpectralMeasure> {
    require_positive(c)?;
    let lev = levinson(c, false)?;
    let density = (0..grid)
        .map(|j| {
            let e = Complex64::from_polar(1.0, grid_angle(j, grid));
            lev.error / poly::eval(&lev.phi, e).norm_sqr()
        })
        .collect();
    SpectralMeasure::new(density, Vec::new())
}

fn require_positive(c: &CovarianceSequence) -> Result<()> {
    if !(c.c0() > 0.0) {
        return Err(Error::invalid("covariance sequence has c_0 = 0"));
    }
    match c.classify() {
        Positivity::Positive => Ok(()),
        Positivity::NonnegativeSingular => Err(Error::infeasible(
            "Toeplitz matrix is singular; the covariances determine a unique atomic spectrum",
        )),
        Positivity::Invalid => Err(Error::infeasible(
            "Toeplitz matrix is indefinite; no spectrum has these covariances",
        )),
    }
}

/// The circle of next lags `c_{n+1}` that make `T_{n+1}` singular.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletionCircle {
    pub center: Complex64,
    pub radius: f64,
}

impl CompletionCircle {
    /// `c_{n+1}` for `γ_{n+1} = e^{iψ}`.
    pub fn point(&self, psi: f64) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, psi)
    }
}

pub fn singular_completions(c: &CovarianceSequence) -> Result<CompletionCircle> {
    require_positive(c)?;
    let lev = levinson(c, false)?;
    let n = c.order();
    let cv = c.values();
    let tail: Complex64 = (0..n).map(|j| lev.phi[j].conj() * cv[j + 1]).sum();
    Ok(CompletionCircle { center: -tail, radius: lev.error })
}

/// `(c_0..c_n, c_{n+1}(ψ))`.
pub fn singular_extension(c: &CovarianceSequence, psi: f64) -> Result<CovarianceSequence> {
    let circle = singular_completions(c)?;
    let mut v = c.values().to_vec();
    v.push(circle.point(psi));
    CovarianceSequence::new(v)
}

/// The unique (atomic) measure of a singular nonnegative covariance sequence.
pub fn atomic_measure(c_ext: &CovarianceSequence, grid: usize) -> Result<SpectralMeasure> {
    if !(c_ext.c0() > 0.0) {
        return Err(Error::invalid("covariance sequence has c_0 = 0"));
    }
    if c_ext.classify() == Positivity::Invalid {
        return Err(Error::infeasible("Toeplitz matrix is indefinite"));
    }
    let lev = levinson(c_ext, true)?;
    let phi = if lev.singular {
        lev.phi
    } else {
        let s = covariance_to_schur(c_ext)?;
        if !s.is_singular() {
            return Err(Error::infeasible(
                "covariance sequence is positive definite; it does not determine an atomic measure",
            ));
        }
        let mut a = vec![Complex64::new(1.0, 0.0)];
        for &g in s.gammas() {
            a = szego_step(&a, g);
        }
        a
    };
    let roots = poly::roots(&phi)?;
    let angles: Vec<f64> = roots.iter().map(|z| z.arg()).collect();
    let masses = atom_masses(c_ext, &angles)?;
    let atoms = angles
        .into_iter()
        .zip(masses)
        .filter(|(_, m)| *m > 0.0)
        .map(|(theta, mass)| Atom { theta, mass })
        .collect();
    SpectralMeasure::atomic(grid, atoms)
}

/// Singular completion at angle `ψ` and its atomic measure.
pub fn completion_measure(c: &CovarianceSequence, psi: f64, grid: usize) -> Result<SpectralMeasure> {
    atomic_measure(&singular_extension(c, psi)?, grid)
}

/// Least-squares masses for atoms at the given angles matching all lags.
fn atom_masses(c: &CovarianceSequence, angles: &[f64]) -> Result<Vec<f64>> {
    let l = c.len();
    let m = angles.len();
    let mut a = DMatrix::<f64>::zeros(2 * l, m);
    let mut b = DVector::<f64>::zeros(2 * l);
    for k in 0..l {
        for (i, &t) in angles.iter().enumerate() {
            let e = Complex64::from_polar(1.0 / (2.0 * PI), -(k as f64) * t);
            a[(2 * k, i)] = e.re;
            a[(2 * k + 1, i)] = e.im;
        }
        b[2 * k] = c[k].re;
        b[2 * k + 1] = c[k].im;
    }
    let svd = a.svd(true, true);
    let x = svd
        .solve(&b, 1e-13)
        .map_err(|e| Error::numerical(format!("atom mass system: {e}")))?;
    let total = 2.0 * PI * c.c0();
    let mut out = Vec::with_capacity(m);
    for &mi in x.iter() {
        if mi < -MASS_CLIP * total {
            return Err(Error::numerical(format!(
                "atom mass {mi} is negative beyond round-off; atoms are numerically clustered"
            )));
        }
        out.push(mi.max(0.0));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::DEFAULT_GRID;

    fn cr(v: &[f64]) -> CovarianceSequence {
        CovarianceSequence::from_real(v).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn schur_examples() {
        let s = covariance_to_schur(&cr(&[1.0, 0.5, 0.25])).unwrap();
        assert!((s.gammas()[0] - c(0.5, 0.0)).norm() < 1e-15);
        assert!(s.gammas()[1].norm() < 1e-15);
        let s = covariance_to_schur(&cr(&[1.0, 0.0, 0.0])).unwrap();
        assert_eq!(s.gammas(), &[c(0.0, 0.0), c(0.0, 0.0)]);
        let s = covariance_to_schur(&cr(&[1.0, 1.0])).unwrap();
        assert_eq!(s.gammas(), &[c(1.0, 0.0)]);
        assert!(s.is_singular());
        assert!(covariance_to_schur(&cr(&[1.0, 1.1])).is_err());
        assert!(covariance_to_schur(&cr(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn inverse_examples() {
        let s = SchurParameters::new(1.0, vec![c(0.5, 0.0), c(0.0, 0.0)]).unwrap();
        let back = schur_to_covariance(&s);
        for (x, y) in back.values().iter().zip([1.0, 0.5, 0.25]) {
            assert!((x - c(y, 0.0)).norm() < 1e-15);
        }
        let s = SchurParameters::new(2.0, vec![]).unwrap();
        assert_eq!(schur_to_covariance(&s).values(), &[c(2.0, 0.0)]);
        let alpha = c(0.5, 0.0);
        let s = SchurParameters::new(1.0, vec![alpha.conj(), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let back = schur_to_covariance(&s);
        for k in 0..4 {
            assert!((back[k] - alpha.conj().powi(k as i32)).norm() < 1e-15);
        }
    }

    #[test]
    fn complex_round_trip() {
        let gammas = vec![c(0.3, -0.4), c(-0.2, 0.7), c(0.05, 0.1)];
        let s = SchurParameters::new(1.7, gammas.clone()).unwrap();
        let back = covariance_to_schur(&schur_to_covariance(&s)).unwrap();
        for (a, b) in back.gammas().iter().zip(&gammas) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn polynomial_examples() {
        let p = orthogonal_polynomials(&SchurParameters::new(1.0, vec![c(0.5, 0.0)]).unwrap());
        assert_eq!(p.phi[1], vec![c(-0.5, 0.0), c(1.0, 0.0)]);
        assert_eq!(p.psi[1], vec![c(0.5, 0.0), c(1.0, 0.0)]);
        let p = orthogonal_polynomials(&SchurParameters::new(1.0, vec![c(0.0, 0.0); 2]).unwrap());
        assert_eq!(p.phi[2], vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(p.psi[2], vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let alpha = c(0.3, 0.4);
        let p = orthogonal_polynomials(&SchurParameters::new(1.0, vec![alpha.conj(), c(0.0, 0.0)]).unwrap());
        assert_eq!(p.phi[2], vec![c(0.0, 0.0), -alpha, c(1.0, 0.0)]);
        // Reversal identity.
        for (phi, phis) in p.phi.iter().zip(&p.phi_star) {
            assert_eq!(&poly::reversed(phi), phis);
        }
    }

    #[test]
    fn max_entropy_examples() {
        let white = max_entropy_spectrum(&cr(&[1.0, 0.0, 0.0]), 64).unwrap();
        assert!(white.density().iter().all(|d| (d - 1.0).abs() < 1e-15));
        let ar1 = max_entropy_spectrum(&cr(&[1.0, 0.5]), DEFAULT_GRID).unwrap();
        let ar2 = max_entropy_spectrum(&cr(&[1.0, 0.5, 0.25]), DEFAULT_GRID).unwrap();
        for j in 0..DEFAULT_GRID {
            let e = Complex64::from_polar(1.0, ar1.theta(j));
            let want = 0.75 / (e - 0.5).norm_sqr();
            assert!((ar1.density()[j] - want).abs() < 1e-13);
            assert!((ar2.density()[j] - want).abs() < 1e-13);
        }
        assert!((ar1.moments(1)[1] - c(0.5, 0.0)).norm() < 1e-12);
        assert!(max_entropy_spectrum(&cr(&[1.0, 1.0]), 64).is_err());
    }

    #[test]
    fn completions_of_trivial_data() {
        let circle = singular_completions(&cr(&[1.0])).unwrap();
        assert_eq!(circle.center, c(0.0, 0.0));
        assert_eq!(circle.radius, 1.0);
        let m = completion_measure(&cr(&[1.0]), 0.0, DEFAULT_GRID).unwrap();
        assert_eq!(m.atoms().len(), 1);
        assert!(m.atoms()[0].theta.abs() < 1e-15);
        assert!((m.atoms()[0].mass - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn two_atom_completion() {
        let data = cr(&[1.0, 0.5]);
        let m = completion_measure(&data, 0.0, DEFAULT_GRID).unwrap();
        assert_eq!(m.atoms().len(), 2);
        assert!(m.atoms().iter().all(|a| a.mass > 0.0));
        assert!((m.total_mass() - 2.0 * PI).abs() < 1e-12);
        let ext = singular_extension(&data, 0.0).unwrap();
        let got = m.moments(2);
        for k in 0..3 {
            assert!((got[k] - ext[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn completion_reproduces_complex_data() {
        let s = SchurParameters::new(2.0, vec![c(0.3, 0.5), c(-0.6, 0.1), c(0.2, -0.2), c(0.4, 0.4)]).unwrap();
        let data = schur_to_covariance(&s);
        for psi in [0.0, 1.0, -2.5, 3.1] {
            let ext = singular_extension(&data, psi).unwrap();
            let m = atomic_measure(&ext, DEFAULT_GRID).unwrap();
            assert!(m.atoms().len() <= 5);
            let got = m.moments(5);
            for k in 0..=5 {
                assert!((got[k] - ext[k]).norm() < 1e-8 * data.c0(), "psi {psi} k {k}");
            }
        }
    }
}
