//! Estimate filter-bank data from a simulated record and recover the spectrum
//! with the central interpolant. Two lines 0.1 rad apart show up as two peaks.

use spectral_uncertainty::fixtures::{sec8, C0Convention};
use spectral_uncertainty::schur::max_entropy_spectrum;
use spectral_uncertainty::three::{estimate_w_from_samples, np_spectrum, FilterBank};
use spectral_uncertainty::{SpectralMeasure, DEFAULT_GRID};

fn peaks(mu: &SpectralMeasure) -> Vec<f64> {
    let d = mu.density();
    let n = d.len();
    (1..n - 1)
        .filter(|&j| (0.3..0.8).contains(&mu.theta(j)) && d[j] > d[j - 1] && d[j] >= d[j + 1])
        .map(|j| mu.theta(j))
        .collect()
}

fn main() -> spectral_uncertainty::Result<()> {
    let f = sec8(C0Convention::AsDisplayed)?;
    let bank = FilterBank::new(f.poles.clone().expect("fixture has poles"))?;

    let y = f.simulate(200_000, 1);
    let est = estimate_w_from_samples(&y, &bank)?;
    let exact = f.pick_data()?;
    let worst = est
        .values()
        .iter()
        .zip(exact.values())
        .map(|(a, b)| (a - b).norm() / b.norm())
        .fold(0.0, f64::max);
    println!("{} filters, largest relative error of the estimated data {worst:.3}", bank.poles().len());

    let from_exact = np_spectrum(&exact, DEFAULT_GRID)?;
    println!("central spectrum from exact data: peaks at {:?}", peaks(&from_exact));
    match np_spectrum(&est, DEFAULT_GRID) {
        Ok(mu) => println!("central spectrum from the record:  peaks at {:?}", peaks(&mu)),
        Err(e) => println!("estimated data not interpolable: {e}"),
    }
    let me = max_entropy_spectrum(&f.covariances(20), DEFAULT_GRID)?;
    println!("maximum entropy from 21 lags:      peaks at {:?}", peaks(&me));
    Ok(())
}
