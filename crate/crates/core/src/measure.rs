//! Spectral measures on the unit circle: a gridded density plus point masses.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covariance::CovarianceSequence;
use crate::error::{Error, Result};
use crate::pick::PickData;
use crate::{check_interior, Complex64};

pub const DEFAULT_GRID: usize = 4096;

/// Angles closer than this (mod 2π) are treated as the same atom location.
const ATOM_MERGE_TOL: f64 = 1e-12;

/// A spectral line: `mass` is the measure of the singleton `{theta}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub theta: f64,
    pub mass: f64,
}

/// Nonnegative measure on the circle.
///
/// The density is the value of dμ/dθ on the grid `θ_j = -π + 2πj/N` and is
/// integrated with the midpoint rule; atoms are exact.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "MeasureFile", into = "MeasureFile")]
pub struct SpectralMeasure {
    density: Vec<f64>,
    atoms: Vec<Atom>,
    nodes: Arc<Vec<Complex64>>,
}

#[derive(Serialize, Deserialize)]
struct MeasureFile {
    grid_size: usize,
    density: Vec<f64>,
    #[serde(default)]
    atoms: Vec<Atom>,
}

impl TryFrom<MeasureFile> for SpectralMeasure {
    type Error = Error;

    fn try_from(f: MeasureFile) -> Result<Self> {
        if f.density.len() != f.grid_size {
            return Err(Error::invalid(format!(
                "measure: grid_size {} but {} density values",
                f.grid_size,
                f.density.len()
            )));
        }
        SpectralMeasure::new(f.density, f.atoms)
    }
}

impl From<SpectralMeasure> for MeasureFile {
    fn from(m: SpectralMeasure) -> Self {
        MeasureFile {
            grid_size: m.density.len(),
            density: m.density,
            atoms: m.atoms,
        }
    }
}

impl PartialEq for SpectralMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.density == other.density && self.atoms == other.atoms
    }
}

/// Grid angle `θ_j = -π + 2πj/N`, written so that `θ_{N-j} = -θ_j` holds bitwise.
pub fn grid_angle(j: usize, n: usize) -> f64 {
    PI * (2.0 * j as f64 - n as f64) / n as f64
}

/// Reduce an angle to `(-π, π]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    if t <= -PI {
        t += 2.0 * PI;
    }
    t
}

/// Circular distance between two angles.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

fn unit_nodes(n: usize) -> Arc<Vec<Complex64>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<Complex64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(n)
        .or_insert_with(|| {
            Arc::new(
                (0..n)
                    .map(|j| Complex64::from_polar(1.0, grid_angle(j, n)))
                    .collect(),
            )
        })
        .clone()
}

impl SpectralMeasure {
    pub fn new(density: Vec<f64>, atoms: Vec<Atom>) -> Result<Self> {
        let n = density.len();
        if n == 0 {
            return Err(Error::invalid("measure: grid_size must be positive"));
        }
        if let Some((j, d)) = density
            .iter()
            .enumerate()
            .find(|(_, d)| !d.is_finite() || **d < 0.0)
        {
            return Err(Error::invalid(format!(
                "measure: density[{j}] = {d} violates density >= 0"
            )));
        }
        let mut out = Vec::with_capacity(atoms.len());
        for a in atoms {
            if !a.theta.is_finite() || !a.mass.is_finite() || a.mass <= 0.0 {
                return Err(Error::invalid(format!(
                    "measure: atom at {} with mass {} violates mass > 0",
                    a.theta, a.mass
                )));
            }
            out.push(Atom {
                theta: normalize_angle(a.theta),
                mass: a.mass,
            });
        }
        out.sort_by(|a, b| a.theta.total_cmp(&b.theta));
        for w in out.windows(2) {
            if angle_distance(w[0].theta, w[1].theta) <= ATOM_MERGE_TOL {
                return Err(Error::invalid(format!(
                    "measure: atom angles must be distinct (two atoms at {})",
                    w[0].theta
                )));
            }
        }
        if out.len() > 1 && angle_distance(out[0].theta, out[out.len() - 1].theta) <= ATOM_MERGE_TOL {
            return Err(Error::invalid("measure: atom angles must be distinct (two atoms at ±π)"));
        }
        Ok(SpectralMeasure {
            nodes: unit_nodes(n),
            density,
            atoms: out,
        })
    }

    /// Normalized Lebesgue measure: density ≡ 1, so `c_0 = 1`.
    pub fn lebesgue(grid_size: usize) -> Self {
        Self::new(vec![1.0; grid_size.max(1)], Vec::new()).expect("valid")
    }

    pub fn zero(grid_size: usize) -> Self {
        Self::new(vec![0.0; grid_size.max(1)], Vec::new()).expect("valid")
    }

    /// Density sampled from a function of the angle.
    pub fn from_density_fn(grid_size: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let density = (0..grid_size).map(|j| f(grid_angle(j, grid_size))).collect();
        Self::new(density, Vec::new())
    }

    /// Purely atomic measure on a grid of the given size.
    pub fn atomic(grid_size: usize, atoms: Vec<Atom>) -> Result<Self> {
        Self::new(vec![0.0; grid_size.max(1)], atoms)
    }

    pub fn grid_size(&self) -> usize {
        self.density.len()
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn theta(&self, j: usize) -> f64 {
        grid_angle(j, self.grid_size())
    }

    /// `μ(𝕋)`.
    pub fn total_mass(&self) -> f64 {
        let n = self.grid_size() as f64;
        2.0 * PI / n * self.density.iter().sum::<f64>() + self.atoms.iter().map(|a| a.mass).sum::<f64>()
    }

    /// Same measure with the given atoms added (masses merge at coinciding angles).
    pub fn with_atoms(&self, extra: &[Atom]) -> Result<Self> {
        let mut atoms = self.atoms.clone();
        for a in extra {
            let t = normalize_angle(a.theta);
            match atoms
                .iter_mut()
                .find(|b| angle_distance(b.theta, t) <= ATOM_MERGE_TOL)
            {
                Some(b) => b.mass += a.mass,
                None => atoms.push(Atom { theta: t, mass: a.mass }),
            }
        }
        Self::new(self.density.clone(), atoms)
    }

    /// `α μ` for `α ≥ 0`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::invalid(format!("scale factor {alpha} must be >= 0")));
        }
        let density = self.density.iter().map(|d| d * alpha).collect();
        let atoms = if alpha == 0.0 {
            Vec::new()
        } else {
            self.atoms
                .iter()
                .map(|a| Atom { theta: a.theta, mass: a.mass * alpha })
                .collect()
        };
        Self::new(density, atoms)
    }

    /// Sum of two measures on the same grid.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.grid_size() != other.grid_size() {
            return Err(Error::invalid(format!(
                "cannot add measures on grids of size {} and {}",
                self.grid_size(),
                other.grid_size()
            )));
        }
        let density = self
            .density
            .iter()
            .zip(&other.density)
            .map(|(a, b)| a + b)
            .collect();
        Self::new(density, Vec::new())?.with_atoms(&self.atoms)?.with_atoms(&other.atoms)
    }

    /// Covariance lags `c_0..c_n`, `c_k = (1/2π) ∫ e^{-ikθ} dμ`.
    ///
    /// Mirror-image grid cells and atoms are combined before summation, so a
    /// measure symmetric under `θ ↦ -θ` yields exactly real lags.
    pub fn moments(&self, n: usize) -> CovarianceSequence {
        let values = (0..=n).map(|k| self.moment(k)).collect();
        CovarianceSequence::from_moments(values)
    }

    fn moment(&self, k: usize) -> Complex64 {
        let n = self.grid_size();
        let d = &self.density;
        let kf = k as f64;
        let sign_pi = if k % 2 == 0 { 1.0 } else { -1.0 };
        // θ_0 = -π pairs with itself; θ_{N/2} = 0 when N is even.
        let mut re = d[0] * sign_pi;
        let mut im = 0.0;
        let mut j = 1;
        while j < n - j {
            let t = kf * grid_angle(j, n);
            re += t.cos() * (d[j] + d[n - j]);
            im -= t.sin() * (d[j] - d[n - j]);
            j += 1;
        }
        if n % 2 == 0 && n >= 2 {
            re += d[n / 2];
        }
        let grid = Complex64::new(re, im) / n as f64;
        grid + self.atom_moment(k) / (2.0 * PI)
    }

    fn atom_moment(&self, k: usize) -> Complex64 {
        let kf = k as f64;
        // Group atoms at ±θ; atoms are sorted by angle.
        let mut groups: Vec<(f64, f64, f64)> = Vec::new(); // (|θ|, mass at +|θ|, mass at -|θ|)
        for a in &self.atoms {
            let key = a.theta.abs();
            match groups.iter_mut().find(|g| g.0 == key) {
                Some(g) => {
                    if a.theta >= 0.0 {
                        g.1 += a.mass
                    } else {
                        g.2 += a.mass
                    }
                }
                None => {
                    if a.theta >= 0.0 {
                        groups.push((key, a.mass, 0.0))
                    } else {
                        groups.push((key, 0.0, a.mass))
                    }
                }
            }
        }
        groups.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut re = 0.0;
        let mut im = 0.0;
        for (t, mp, mm) in groups {
            if t == PI {
                let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                re += s * (mp + mm);
            } else {
                let a = kf * t;
                re += a.cos() * (mp + mm);
                im -= a.sin() * (mp - mm);
            }
        }
        Complex64::new(re, im)
    }

    /// Herglotz transform `H(z) = (1/2π) ∫ (e^{iθ}+z)/(e^{iθ}-z) dμ(θ)`.
    pub fn herglotz(&self, z: Complex64) -> Result<Complex64> {
        check_interior(z)?;
        Ok(self.herglotz_unchecked(z))
    }

    pub(crate) fn herglotz_unchecked(&self, z: Complex64) -> Complex64 {
        let n = self.grid_size() as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (&e, &d) in self.nodes.iter().zip(&self.density) {
            if d != 0.0 {
                acc += d * (e + z) / (e - z);
            }
        }
        let mut atoms = Complex64::new(0.0, 0.0);
        for a in &self.atoms {
            let e = Complex64::from_polar(1.0, a.theta);
            atoms += a.mass * (e + z) / (e - z);
        }
        acc / n + atoms / (2.0 * PI)
    }

    /// Poisson integral `P(z) = (1/2π) ∫ (1-|z|²)/|e^{iθ}-z|² dμ(θ)`.
    pub fn poisson(&self, z: Complex64) -> Result<f64> {
        check_interior(z)?;
        Ok(self.poisson_unchecked(z))
    }

    pub(crate) fn poisson_unchecked(&self, z: Complex64) -> f64 {
        let n = self.grid_size() as f64;
        let num = 1.0 - z.norm_sqr();
        let mut acc = 0.0;
        for (&e, &d) in self.nodes.iter().zip(&self.density) {
            if d != 0.0 {
                acc += d / (e - z).norm_sqr();
            }
        }
        let mut atoms = 0.0;
        for a in &self.atoms {
            let e = Complex64::from_polar(1.0, a.theta);
            atoms += a.mass / (e - z).norm_sqr();
        }
        num * (acc / n + atoms / (2.0 * PI))
    }

    /// Poisson integral at many points, evaluated in parallel, results in input order.
    pub fn poisson_many(&self, zs: &[Complex64]) -> Result<Vec<f64>> {
        for &z in zs {
            check_interior(z)?;
        }
        Ok(zs.par_iter().map(|&z| self.poisson_unchecked(z)).collect())
    }

    /// Generalized moments `w_k = H(z_k)` at filter-bank nodes (first node must be 0).
    pub fn generalized_moments(&self, nodes: &[Complex64]) -> Result<PickData> {
        if nodes.first().copied() != Some(Complex64::new(0.0, 0.0)) {
            return Err(Error::invalid("generalized moments: the first node must be z_0 = 0"));
        }
        for &z in nodes {
            check_interior(z)?;
        }
        let values: Vec<Complex64> = nodes.par_iter().map(|&z| self.herglotz_unchecked(z)).collect();
        let mut values = values;
        // H(0) = c_0 is real; drop the round-off imaginary part.
        values[0] = Complex64::new(values[0].re, 0.0);
        PickData::new(nodes.to_vec(), values)
    }

    /// `∫ log(dμ/dθ) dθ` over the grid; `-∞` if the density vanishes anywhere.
    pub fn entropy(&self) -> f64 {
        let n = self.grid_size() as f64;
        2.0 * PI / n * self.density.iter().map(|d| d.ln()).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn dirac(theta: f64) -> SpectralMeasure {
        SpectralMeasure::atomic(DEFAULT_GRID, vec![Atom { theta, mass: 2.0 * PI }]).unwrap()
    }

    #[test]
    fn moments_of_simple_measures() {
        let leb = SpectralMeasure::lebesgue(DEFAULT_GRID).moments(2);
        assert!(close(leb[0], c(1.0, 0.0), 1e-15));
        assert!(close(leb[1], c(0.0, 0.0), 1e-15));
        assert!(close(leb[2], c(0.0, 0.0), 1e-15));

        let d = dirac(0.0).moments(2);
        for k in 0..3 {
            assert!(close(d[k], c(1.0, 0.0), 1e-15));
        }

        let ma = SpectralMeasure::from_density_fn(DEFAULT_GRID, |t| {
            (c(1.0, 0.0) + Complex64::from_polar(1.0 / 3.0, t)).norm_sqr()
        })
        .unwrap()
        .moments(2);
        assert!(close(ma[0], c(10.0 / 9.0, 0.0), 1e-14));
        assert!(close(ma[1], c(1.0 / 3.0, 0.0), 1e-14));
        assert!(close(ma[2], c(0.0, 0.0), 1e-14));
    }

    #[test]
    fn atom_moment_phase() {
        let t = 0.7;
        let m = dirac(t).moments(3);
        for k in 0..4 {
            assert!(close(m[k], Complex64::from_polar(1.0, -(k as f64) * t), 1e-14));
        }
    }

    #[test]
    fn symmetric_measure_has_exactly_real_lags() {
        let atoms = vec![
            Atom { theta: 1.0, mass: PI },
            Atom { theta: 0.5, mass: 0.3 },
            Atom { theta: -1.0, mass: PI },
            Atom { theta: -0.5, mass: 0.3 },
            Atom { theta: PI, mass: 0.1 },
        ];
        let m = SpectralMeasure::from_density_fn(1000, |t| 1.0 + 0.5 * t.cos() + 0.2 * (3.0 * t).cos())
            .unwrap()
            .with_atoms(&atoms)
            .unwrap();
        for ck in m.moments(40).values() {
            assert_eq!(ck.im, 0.0);
        }
        let odd = SpectralMeasure::from_density_fn(1001, |t| 2.0 + t.cos()).unwrap();
        for ck in odd.moments(10).values() {
            assert_eq!(ck.im, 0.0);
        }
    }

    #[test]
    fn herglotz_and_poisson_examples() {
        let leb = SpectralMeasure::lebesgue(DEFAULT_GRID);
        assert!(close(leb.herglotz(c(0.3, 0.2)).unwrap(), c(1.0, 0.0), 1e-12));
        assert!((leb.poisson(c(-0.4, 0.7)).unwrap() - 1.0).abs() < 1e-12);

        let t0 = 0.9;
        let z = c(0.2, -0.5);
        let e = Complex64::from_polar(1.0, t0);
        assert!(close(dirac(t0).herglotz(z).unwrap(), (e + z) / (e - z), 1e-14));
        assert!((dirac(0.0).poisson(c(0.5, 0.0)).unwrap() - 3.0).abs() < 1e-14);
        let both = leb.with_atoms(&[Atom { theta: 0.0, mass: 2.0 * PI }]).unwrap();
        assert!((both.poisson(c(0.5, 0.0)).unwrap() - 4.0).abs() < 1e-12);

        let m = SpectralMeasure::from_density_fn(512, |t| 1.5 + (2.0 * t).sin()).unwrap();
        assert!(close(m.herglotz(c(0.0, 0.0)).unwrap(), m.moments(0)[0], 1e-14));
    }

    #[test]
    fn boundary_points_rejected() {
        let leb = SpectralMeasure::lebesgue(16);
        assert!(leb.herglotz(c(1.0, 0.0)).is_err());
        assert!(leb.poisson(c(0.0, -1.2)).is_err());
        assert!(leb.poisson(c(1.0 - 1e-7, 0.0)).is_err());
    }

    #[test]
    fn generalized_moment_examples() {
        let nodes = [c(0.0, 0.0), c(0.5, 0.0)];
        let w = SpectralMeasure::lebesgue(DEFAULT_GRID).generalized_moments(&nodes).unwrap();
        assert!(close(w.values()[0], c(1.0, 0.0), 1e-12));
        assert!(close(w.values()[1], c(1.0, 0.0), 1e-12));
        let w = dirac(0.0).generalized_moments(&nodes).unwrap();
        assert!(close(w.values()[1], c(3.0, 0.0), 1e-14));
        assert!(SpectralMeasure::lebesgue(16)
            .generalized_moments(&[c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0)])
            .is_err());
        assert!(SpectralMeasure::lebesgue(16)
            .generalized_moments(&[c(0.0, 0.0), c(1.0, 0.0)])
            .is_err());
    }

    #[test]
    fn invariants_enforced() {
        assert!(SpectralMeasure::new(vec![1.0, -0.1], vec![]).is_err());
        assert!(SpectralMeasure::new(vec![1.0], vec![Atom { theta: 0.0, mass: 0.0 }]).is_err());
        assert!(SpectralMeasure::new(
            vec![1.0],
            vec![Atom { theta: PI, mass: 1.0 }, Atom { theta: -PI, mass: 1.0 }]
        )
        .is_err());
        assert!(SpectralMeasure::new(vec![], vec![]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = SpectralMeasure::new(vec![0.5, 1.0, 2.0], vec![Atom { theta: 0.25, mass: 1.5 }]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"grid_size\":3"));
        let back: SpectralMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<SpectralMeasure>(r#"{"grid_size":2,"density":[1.0],"atoms":[]}"#).is_err());
    }
}
