//! Lags versus filter-bank data of the same order for three close lines:
//! diameters of the uncertainty sets over two small discs.

use spectral_uncertainty::fixtures::{sec8, C0Convention};
use spectral_uncertainty::uncertainty::{apriori_bound_pick, apriori_bound_toeplitz, diameter_pick, diameter_toeplitz};

fn main() -> spectral_uncertainty::Result<()> {
    for conv in [C0Convention::AsStated, C0Convention::AsDisplayed] {
        let f = sec8(conv)?;
        let n = f.orders[0];
        let toeplitz = diameter_toeplitz(&f.covariances(n), &f.region)?;
        let p = f.pick_data()?;
        let pick = diameter_pick(&p, &f.region)?;
        let w0 = p.values()[0].re;
        println!("{conv:?} (c0 = {:.4}, n = {n})", f.c0());
        println!(
            "  lags:        diameter {:.4}, bound {:.4}",
            toeplitz.rho,
            apriori_bound_toeplitz(f.c0(), n, &f.region)?
        );
        println!(
            "  filter bank: diameter {:.4}, bound {:.4}",
            pick.rho,
            apriori_bound_pick(p.nodes(), w0, &f.region)?.bound
        );
        println!("  ratio {:.3}", pick.rho / toeplitz.rho);
    }
    Ok(())
}
