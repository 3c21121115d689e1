//! Uncertainty quantification for power spectra that are only known through
//! finitely many moments.
//!
//! A spectrum is a nonnegative measure on the unit circle. Given its first
//! covariance lags (or the output statistics of a bank of first-order
//! filters) the set of consistent spectra is usually infinite; this crate
//! computes how large that set is in weakly continuous metrics, bounds the
//! size a priori, produces the maximum-entropy and central Nevanlinna–Pick
//! estimates, and tunes filter poles to shrink the uncertainty over a chosen
//! frequency region.

pub mod cli;
pub mod covariance;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod measure;
pub mod metrics;
pub mod nelder_mead;
pub mod pick;
pub mod poly;
pub mod region;
pub mod schur;
pub mod three;
pub mod uncertainty;

pub use num_complex::Complex64;

pub use covariance::{CovarianceSequence, Positivity};
pub use error::{Error, Result};
pub use measure::{Atom, SpectralMeasure, DEFAULT_GRID};
pub use pick::PickData;
pub use region::RegionK;

/// Evaluation points must satisfy `|z| <= 1 - BOUNDARY_MARGIN`.
pub const BOUNDARY_MARGIN: f64 = 1e-6;

pub(crate) fn check_interior(z: Complex64) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::invalid(format!("evaluation point {z} is not finite")));
    }
    if z.norm() > 1.0 - BOUNDARY_MARGIN {
        return Err(Error::invalid(format!(
            "evaluation point {z} is not strictly inside the unit disc (|z| must be <= 1 - 1e-6)"
        )));
    }
    Ok(())
}
