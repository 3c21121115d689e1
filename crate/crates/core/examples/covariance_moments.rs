//! Covariance lags of a spectrum with lines, their Toeplitz test and Schur parameters.

use spectral_uncertainty::fixtures::ma1_density;
use spectral_uncertainty::schur::{covariance_to_schur, schur_to_covariance};
use spectral_uncertainty::{Atom, SpectralMeasure, DEFAULT_GRID};

fn main() -> spectral_uncertainty::Result<()> {
    let noise = SpectralMeasure::from_density_fn(DEFAULT_GRID, ma1_density)?;
    let mu = noise.with_atoms(&[
        Atom { theta: 0.8, mass: 1.0 },
        Atom { theta: -0.8, mass: 1.0 },
    ])?;

    let c = mu.moments(6);
    println!("lags:");
    for (k, v) in c.values().iter().enumerate() {
        println!("  c{k} = {:+.6} {:+.6}i", v.re, v.im);
    }
    println!("toeplitz: {:?}, min eigenvalue {:.3e}", c.classify(), c.eigenvalues()[0]);

    let s = covariance_to_schur(&c)?;
    let gammas: Vec<String> = s.gammas().iter().map(|g| format!("{:+.4}", g.re)).collect();
    println!("schur parameters: [{}]", gammas.join(", "));

    let back = schur_to_covariance(&s);
    let err = back.values().iter().zip(c.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    println!("round trip error {err:.1e}");
    Ok(())
}
