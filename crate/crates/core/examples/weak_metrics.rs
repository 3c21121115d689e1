//! Weak distances between line spectra: a small shift of a line is a small
//! change, although the measures are far apart in total variation.

use spectral_uncertainty::metrics::{delta_k, delta_smooth, mass_range, transport_metric, TestKernel};
use spectral_uncertainty::{Atom, RegionK, SpectralMeasure};

fn lines(grid: usize, at: f64) -> SpectralMeasure {
    let base = SpectralMeasure::from_density_fn(grid, |_| 0.5).unwrap();
    base.with_atoms(&[Atom { theta: at, mass: 1.0 }, Atom { theta: -at, mass: 1.0 }]).unwrap()
}

fn main() -> spectral_uncertainty::Result<()> {
    let grid = 1024;
    let k = RegionK::parse("circle:0.8")?;
    let g = TestKernel::poisson(grid, 0.7)?;
    let reference = lines(grid, 1.0);

    println!("shift     deltaK    smooth    transport");
    for shift in [0.2, 0.1, 0.05, 0.0] {
        let moved = lines(grid, 1.0 + shift);
        println!(
            "{shift:5.2} {:9.5} {:9.5} {:10.5}",
            delta_k(&reference, &moved, &k)?,
            delta_smooth(&reference, &moved, &g)?,
            transport_metric(&reference, &moved, 2.0)?
        );
    }

    // How much Poisson-kernel mass can spectra with the same first lags carry?
    let g = TestKernel::poisson(256, 0.6)?;
    let mu = lines(256, 1.0);
    for n in [0, 2, 4, 8] {
        let r = mass_range(&mu.moments(n), &g)?;
        println!("n = {n}: mass in [{:.4}, {:.4}], dual gap {:.1e}", r.lo, r.hi, r.disagreement());
    }
    Ok(())
}
