//! Uncertainty of spectra consistent with n covariance lags of two sinusoids
//! in MA(1) noise, on the circle of radius 0.9.

use spectral_uncertainty::fixtures::{sec6, C0Convention};
use spectral_uncertainty::metrics::delta_k;
use spectral_uncertainty::schur::max_entropy_spectrum;
use spectral_uncertainty::uncertainty::{apriori_bound_toeplitz, diameter_toeplitz, feasible_disc_toeplitz};
use spectral_uncertainty::{Complex64, DEFAULT_GRID};

fn main() -> spectral_uncertainty::Result<()> {
    for conv in [C0Convention::AsStated, C0Convention::AsDisplayed] {
        let f = sec6(conv)?;
        println!("{conv:?}: c0 = {:.4}", f.c0());
        for &n in &f.orders {
            let c = f.covariances(n);
            let report = diameter_toeplitz(&c, &f.region)?;
            let me = max_entropy_spectrum(&c, DEFAULT_GRID)?;
            println!(
                "  n = {n:2}: diameter {:8.4} at {:.3}, a-priori bound {:8.4}, deltaK(truth, ME) {:.4}",
                report.rho,
                report.argmax_z,
                apriori_bound_toeplitz(f.c0(), n, &f.region)?,
                delta_k(&f.truth, &me, &f.region)?
            );
        }
        // Where does the truth sit inside the disc of possible Herglotz values?
        let z = Complex64::from_polar(0.9, 0.5);
        let d = feasible_disc_toeplitz(&f.covariances(5), z)?;
        let (lo, hi) = d.poisson_range();
        println!(
            "  at z = 0.9e^(0.5i), n = 5: Poisson value in [{lo:.3}, {hi:.3}], truth {:.3}",
            f.truth.poisson(z)?
        );
    }
    Ok(())
}
