//! Interpolation data `(z_k, w_k)` for Carathéodory functions and the Pick matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{classify_eigenvalues, hermitian_eigenvalues, CMatrix, Positivity};
use crate::{check_interior, Complex64};

const NODE_SEPARATION: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PickFile", into = "PickFile")]
pub struct PickData {
    nodes: Vec<Complex64>,
    values: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct PickFile {
    nodes: Vec<Complex64>,
    values: Vec<Complex64>,
}

impl TryFrom<PickFile> for PickData {
    type Error = Error;
    fn try_from(f: PickFile) -> Result<Self> {
        PickData::new(f.nodes, f.values)
    }
}

impl From<PickData> for PickFile {
    fn from(p: PickData) -> Self {
        PickFile { nodes: p.nodes, values: p.values }
    }
}

impl PickData {
    pub fn new(nodes: Vec<Complex64>, values: Vec<Complex64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::invalid("pick data: at least one node is required"));
        }
        if nodes.len() != values.len() {
            return Err(Error::invalid(format!(
                "pick data: {} nodes but {} values",
                nodes.len(),
                values.len()
            )));
        }
        for &z in &nodes {
            check_interior(z)?;
        }
        for (i, a) in nodes.iter().enumerate() {
            for b in &nodes[..i] {
                if (a - b).norm() <= NODE_SEPARATION {
                    return Err(Error::invalid(format!("pick data: duplicate node {a}")));
                }
            }
        }
        for (k, w) in values.iter().enumerate() {
            if !w.re.is_finite() || !w.im.is_finite() || w.re <= 0.0 {
                return Err(Error::invalid(format!(
                    "pick data: value w_{k} = {w} violates Re w > 0"
                )));
            }
        }
        Ok(PickData { nodes, values })
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub(crate) fn require_origin_first(&self) -> Result<()> {
        if self.nodes[0] != Complex64::new(0.0, 0.0) {
            return Err(Error::invalid("pick data: the first node must be z_0 = 0"));
        }
        Ok(())
    }

    /// `P[k][l] = (w_k + conj w_l) / (1 - z_k conj z_l)`.
    pub fn pick_matrix(&self) -> CMatrix {
        let n = self.nodes.len();
        CMatrix::from_fn(n, n, |k, l| {
            (self.values[k] + self.values[l].conj())
                / (1.0 - self.nodes[k] * self.nodes[l].conj())
        })
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.pick_matrix())
    }

    pub fn classify(&self) -> Positivity {
        classify_eigenvalues(&self.eigenvalues())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn pick_matrix_examples() {
        let p = PickData::new(vec![c(0.0)], vec![c(1.0)]).unwrap();
        assert_eq!(p.pick_matrix()[(0, 0)], c(2.0));

        let p = PickData::new(vec![c(0.0), c(0.5)], vec![c(1.0), c(1.0)]).unwrap();
        let m = p.pick_matrix();
        assert_eq!(m[(0, 0)], c(2.0));
        assert_eq!(m[(0, 1)], c(2.0));
        assert_eq!(m[(1, 0)], c(2.0));
        assert!((m[(1, 1)] - c(8.0 / 3.0)).norm() < 1e-15);
        assert_eq!(p.classify(), Positivity::Positive);

        let p = PickData::new(vec![c(0.0), c(0.5)], vec![c(1.0), c(3.0)]).unwrap();
        let m = p.pick_matrix();
        assert_eq!(m[(0, 1)], c(4.0));
        assert_eq!(m[(1, 1)], c(8.0));
        assert!(p.eigenvalues()[0].abs() < 1e-14);
        assert_eq!(p.classify(), Positivity::NonnegativeSingular);
    }

    #[test]
    fn invariants() {
        assert!(PickData::new(vec![c(0.0), c(0.0)], vec![c(1.0), c(1.0)]).is_err());
        assert!(PickData::new(vec![c(0.0)], vec![c(-1.0)]).is_err());
        assert!(PickData::new(vec![c(1.0)], vec![c(1.0)]).is_err());
        assert!(PickData::new(vec![c(0.0)], vec![]).is_err());
    }
}
