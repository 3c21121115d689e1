//! Place filter poles to minimize the a-priori uncertainty bound over a region.

use spectral_uncertainty::fixtures::sec8_region;
use spectral_uncertainty::three::{tune_poles, TuningOptions};
use spectral_uncertainty::uncertainty::apriori_bound_toeplitz;

fn main() -> spectral_uncertainty::Result<()> {
    let k = sec8_region()?;
    println!("region: {k}");
    for n in [2, 4, 6] {
        let rep = tune_poles(n, &k, 1.0, &TuningOptions { restarts: 4, ..Default::default() })?;
        let poles: Vec<String> = rep.poles[1..].iter().filter(|p| p.im >= 0.0).map(|p| format!("{:.3}", p)).collect();
        println!(
            "n = {n}: bound {:.4} (zero poles {:.4}); poles {}",
            rep.bound,
            apriori_bound_toeplitz(1.0, n, &k)?,
            poles.join(", ")
        );
    }
    Ok(())
}
