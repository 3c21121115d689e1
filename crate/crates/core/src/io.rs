//! Reading and writing the JSON file formats.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{SpectralMeasure, DEFAULT_GRID};
use crate::metrics::TestKernel;
use crate::three::FilterBank;
use crate::{CovarianceSequence, PickData};

/// Name accepted wherever a measure file is expected: Lebesgue measure on the
/// default grid.
pub const LEBESGUE: &str = "lebesgue";

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    fs::write(path, to_json(value)?)?;
    Ok(())
}

pub fn load_measure(arg: &str) -> Result<SpectralMeasure> {
    if arg == LEBESGUE {
        return Ok(SpectralMeasure::lebesgue(DEFAULT_GRID));
    }
    read_json(arg)
}

pub fn load_covariance(path: &str) -> Result<CovarianceSequence> {
    read_json(path)
}

pub fn load_pick(path: &str) -> Result<PickData> {
    read_json(path)
}

pub fn load_kernel(path: &str) -> Result<TestKernel> {
    read_json(path)
}

pub fn load_bank(path: &str) -> Result<FilterBank> {
    read_json(path)
}
