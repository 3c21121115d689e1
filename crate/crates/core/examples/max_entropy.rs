//! Maximum-entropy spectrum from a few lags, compared with the spectrum they came from.

use std::f64::consts::PI;

use spectral_uncertainty::schur::max_entropy_spectrum;
use spectral_uncertainty::{SpectralMeasure, DEFAULT_GRID};

fn main() -> spectral_uncertainty::Result<()> {
    // Two broad bumps.
    let truth = SpectralMeasure::from_density_fn(DEFAULT_GRID, |t| {
        0.2 + (-(t.abs() - 0.9).powi(2) / 0.02).exp() + 0.5 * (-(t.abs() - 2.2).powi(2) / 0.05).exp()
    })?;

    for n in [2, 6, 16] {
        let c = truth.moments(n);
        let me = max_entropy_spectrum(&c, DEFAULT_GRID)?;
        let m = me.moments(n);
        let err = m.values().iter().zip(c.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let peak = (0..DEFAULT_GRID)
            .filter(|&j| me.theta(j) > 0.0)
            .max_by(|&a, &b| me.density()[a].total_cmp(&me.density()[b]))
            .map(|j| me.theta(j))
            .unwrap();
        println!(
            "n = {n:2}: lag mismatch {err:.1e}, entropy {:.4} (truth {:.4}), main peak at {peak:.3} rad",
            me.entropy(),
            truth.entropy()
        );
    }

    let me = max_entropy_spectrum(&truth.moments(16), DEFAULT_GRID)?;
    println!("\n  theta    truth      ME(16)");
    for j in (0..DEFAULT_GRID).step_by(DEFAULT_GRID / 16) {
        let t = me.theta(j);
        if t >= 0.0 {
            println!("{:7.3} {:9.4} {:9.4}", t, truth.density()[j], me.density()[j]);
        }
    }
    println!("c0 = total mass / 2π = {:.4}", truth.total_mass() / (2.0 * PI));
    Ok(())
}
