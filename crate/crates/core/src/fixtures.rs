//! The two demonstration processes: sinusoids in MA(1) noise.
//!
//! `sec6` has lines at 0.5 and 1 rad/sample and is studied through its
//! covariances on the circle `|z| = 0.9`. `sec8` adds a line at 0.6 next to the
//! one at 0.5 and is studied on two small circles around `0.65 e^{±0.5i}`,
//! comparing covariance data with a tuned 11-pole filter bank.
//!
//! A line `a cos(ωt + φ)` with uniform phase has power `a²/2`, i.e. atoms of
//! mass `πa²/2` at `±ω`. The published totals (`c_0 = 28/9` for both
//! processes) come out only if the mass is read as `πa`; both readings are
//! available through [`C0Convention`].

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{Atom, SpectralMeasure, DEFAULT_GRID};
use crate::region::{RegionK, Shape};
use crate::{Complex64, CovarianceSequence, PickData};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum C0Convention {
    /// Line masses `πa` (reproduces the published `c_0 = 28/9`).
    AsStated,
    /// Line masses `πa²/2`, the power of the displayed process.
    AsDisplayed,
}

impl C0Convention {
    fn mass(self, amplitude: f64) -> f64 {
        match self {
            C0Convention::AsStated => PI * amplitude,
            C0Convention::AsDisplayed => PI * amplitude * amplitude / 2.0,
        }
    }
}

/// A spectral line `amplitude·cos(freq·t + φ)` of the displayed process.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub freq: f64,
    pub amplitude: f64,
}

#[derive(Clone, Debug)]
pub struct DemoFixture {
    pub name: &'static str,
    pub convention: C0Convention,
    pub lines: Vec<Line>,
    /// Spectrum of the process on the default grid.
    pub truth: SpectralMeasure,
    pub region: RegionK,
    /// Covariance orders studied.
    pub orders: Vec<usize>,
    /// Filter-bank poles (`sec8` only).
    pub poles: Option<Vec<Complex64>>,
}

/// Density of `w_t + w_{t-1}/3` for unit white noise: `|1 + e^{iθ}/3|²`.
pub fn ma1_density(theta: f64) -> f64 {
    10.0 / 9.0 + 2.0 / 3.0 * theta.cos()
}

fn build(
    name: &'static str,
    convention: C0Convention,
    lines: Vec<Line>,
    region: RegionK,
    orders: Vec<usize>,
    poles: Option<Vec<Complex64>>,
) -> Result<DemoFixture> {
    let atoms: Vec<Atom> = lines
        .iter()
        .flat_map(|l| {
            let m = convention.mass(l.amplitude);
            [Atom { theta: -l.freq, mass: m }, Atom { theta: l.freq, mass: m }]
        })
        .collect();
    let truth = SpectralMeasure::from_density_fn(DEFAULT_GRID, ma1_density)?.with_atoms(&atoms)?;
    Ok(DemoFixture { name, convention, lines, truth, region, orders, poles })
}

pub fn sec6(convention: C0Convention) -> Result<DemoFixture> {
    let lines = vec![Line { freq: 0.5, amplitude: 1.0 }, Line { freq: 1.0, amplitude: 1.0 }];
    build("sec6", convention, lines, RegionK::circle(0.9)?, vec![5, 20], None)
}

/// Filter poles of the tuned 10th-order bank (plus `z_0 = 0`).
pub fn sec8_poles() -> Vec<Complex64> {
    let mut poles = vec![Complex64::new(0.0, 0.0)];
    for (re, im) in [(0.581, 0.480), (0.681, 0.470), (0.738, 0.422), (0.755, 0.271), (0.765, 0.357)] {
        poles.push(Complex64::new(re, im));
        poles.push(Complex64::new(re, -im));
    }
    poles
}

/// Two circles of radius 0.25 centered at `0.65 e^{±0.5i}`.
pub fn sec8_region() -> Result<RegionK> {
    let c = Complex64::from_polar(0.65, 0.5);
    RegionK::new(vec![
        Shape::Circle { center: c, radius: 0.25 },
        Shape::Circle { center: c.conj(), radius: 0.25 },
    ])
}

pub fn sec8(convention: C0Convention) -> Result<DemoFixture> {
    let lines = vec![
        Line { freq: 0.5, amplitude: 0.5 },
        Line { freq: 0.6, amplitude: 0.5 },
        Line { freq: 1.0, amplitude: 1.0 },
    ];
    build("sec8", convention, lines, sec8_region()?, vec![20], Some(sec8_poles()))
}

pub fn by_name(name: &str, convention: C0Convention) -> Result<DemoFixture> {
    match name {
        "sec6" => sec6(convention),
        "sec8" => sec8(convention),
        _ => Err(Error::invalid(format!("unknown demo '{name}' (expected sec6 or sec8)"))),
    }
}

impl DemoFixture {
    pub fn c0(&self) -> f64 {
        self.covariances(0).c0()
    }

    pub fn covariances(&self, n: usize) -> CovarianceSequence {
        self.truth.moments(n)
    }

    /// Covariances written out term by term: `10/9`, `1/3` at lag 1, and
    /// `(m/π) cos(kω)` per line.
    pub fn analytic_covariances(&self, n: usize) -> CovarianceSequence {
        let values: Vec<f64> = (0..=n)
            .map(|k| {
                let ma = match k {
                    0 => 10.0 / 9.0,
                    1 => 1.0 / 3.0,
                    _ => 0.0,
                };
                ma + self
                    .lines
                    .iter()
                    .map(|l| self.convention.mass(l.amplitude) / PI * (k as f64 * l.freq).cos())
                    .sum::<f64>()
            })
            .collect();
        CovarianceSequence::from_real(&values).expect("fixture covariances are valid")
    }

    /// `w_k = H(z_k)` at the fixture poles.
    pub fn pick_data(&self) -> Result<PickData> {
        let poles = self
            .poles
            .as_ref()
            .ok_or_else(|| Error::invalid(format!("demo {} has no filter bank", self.name)))?;
        self.truth.generalized_moments(poles)
    }

    /// A sample path whose spectrum is `truth` (line amplitudes chosen to
    /// match the atom masses of the selected convention).
    pub fn simulate(&self, len: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phase = Uniform::new(-PI, PI).expect("valid range");
        let lines: Vec<(f64, f64, f64)> = self
            .lines
            .iter()
            .map(|l| {
                let amp = (2.0 * self.convention.mass(l.amplitude) / PI).sqrt();
                (l.freq, amp, phase.sample(&mut rng))
            })
            .collect();
        let mut prev: f64 = StandardNormal.sample(&mut rng);
        (0..len)
            .map(|t| {
                let w: f64 = StandardNormal.sample(&mut rng);
                let ma = w + prev / 3.0;
                prev = w;
                let tf = t as f64;
                ma + lines.iter().map(|(f, a, p)| a * (f * tf + p).cos()).sum::<f64>()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_mass_conventions() {
        let cases = [
            (sec6(C0Convention::AsStated).unwrap(), 28.0 / 9.0),
            (sec6(C0Convention::AsDisplayed).unwrap(), 19.0 / 9.0),
            (sec8(C0Convention::AsStated).unwrap(), 28.0 / 9.0),
            (sec8(C0Convention::AsDisplayed).unwrap(), 67.0 / 36.0),
        ];
        for (f, c0) in cases {
            assert!((f.c0() - c0).abs() < 1e-12, "{} {:?}: {}", f.name, f.convention, f.c0());
        }
    }

    #[test]
    fn grid_moments_match_term_by_term_covariances() {
        let f = sec8(C0Convention::AsDisplayed).unwrap();
        let a = f.covariances(20);
        let b = f.analytic_covariances(20);
        for k in 0..=20 {
            assert!((a[k] - b[k]).norm() < 1e-12, "lag {k}");
        }
    }
}
