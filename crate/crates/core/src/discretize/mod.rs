//! Discretization of kernels and of the model operator.

mod export;
mod grid;
mod model;
mod nystrom;

pub use export::{read_operator, write_atomic, write_operator, OperatorSidecar};
pub use grid::{gauss_legendre_nodes, Grid, Scheme};
pub use model::{free_multiplier_spectrum, model_operator, model_operator_with, Potential};
pub use nystrom::{nystrom, plain_nystrom};

use serde::{Deserialize, Serialize};

use crate::eigen::{lanczos_extreme, EigenOptions, Which};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::linalg::{DenseMatrix, Gram};

/// What a matrix was built from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum Source {
    Kernel(KernelSpec),
    Model(Potential),
    /// Anything assembled by hand: differences, blocks, test matrices.
    Other {
        description: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(flatten)]
    pub source: Source,
    pub cutoff_l: f64,
    pub n: usize,
    pub scheme: Scheme,
}

impl Provenance {
    pub fn new(source: Source, grid: &Grid) -> Self {
        Self {
            source,
            cutoff_l: grid.cutoff_l(),
            n: grid.len(),
            scheme: grid.scheme(),
        }
    }
}

/// A dense matrix tied to the grid it lives on.
#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    matrix: DenseMatrix,
    grid: Grid,
    symmetric: bool,
    provenance: Provenance,
}

impl DiscreteOperator {
    pub(crate) fn new(
        matrix: DenseMatrix,
        grid: Grid,
        symmetric: bool,
        provenance: Provenance,
    ) -> Self {
        debug_assert!(!symmetric || matrix.asymmetry() == 0.0);
        Self {
            matrix,
            grid,
            symmetric,
            provenance,
        }
    }

    /// Wraps an arbitrary square matrix. With `symmetric = true` the matrix is
    /// averaged with its transpose first.
    pub fn from_matrix(
        mut matrix: DenseMatrix,
        grid: Grid,
        symmetric: bool,
        description: &str,
    ) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "matrix is {}x{}, grid has {} nodes",
                matrix.rows(),
                matrix.cols(),
                grid.len()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::NonFinite("operator entry"));
        }
        if symmetric {
            matrix.symmetrize();
        }
        let provenance = Provenance::new(
            Source::Other {
                description: description.to_string(),
            },
            &grid,
        );
        Ok(Self {
            matrix,
            grid,
            symmetric,
            provenance,
        })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_model(&self) -> bool {
        matches!(self.provenance.source, Source::Model(_))
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }
}

/// Relative accuracy of [`operator_norm_diff`].
pub const NORM_DIFF_TOL: f64 = 1e-10;

/// Largest singular value of `a − b`.
///
/// Computed as the square root of the top eigenvalue of `(a−b)ᵀ(a−b)`, found
/// by Lanczos with full reorthogonalization.
pub fn operator_norm_diff(a: &DiscreteOperator, b: &DiscreteOperator) -> Result<f64> {
    if !a.grid.same_as(&b.grid) {
        return Err(Error::GridMismatch(
            "operator_norm_diff needs both operators on the same grid".into(),
        ));
    }
    let diff = a.matrix.sub(&b.matrix);
    spectral_norm(&diff)
}

/// Largest singular value of a dense matrix.
pub fn spectral_norm(m: &DenseMatrix) -> Result<f64> {
    if m.as_slice().iter().all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    let gram = Gram::new(m);
    let opts = EigenOptions {
        relative_tol: true,
        ..EigenOptions::default()
    };
    let res = lanczos_extreme(&gram, 1, Which::Largest, NORM_DIFF_TOL, &opts)?;
    let top = res.values.first().copied().unwrap_or(0.0).max(0.0);
    if !res.converged {
        return Err(Error::LinearAlgebra(
            "spectral norm iteration did not converge".into(),
        ));
    }
    Ok(top.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::ThetaSpec;

    #[test]
    fn norm_diff_of_identical_is_zero() {
        let g = Grid::trapezoid(3.0, 32).unwrap();
        let a = nystrom(&KernelSpec::m_t(1.0).unwrap(), &g).unwrap();
        assert_eq!(operator_norm_diff(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn norm_diff_of_diagonal_shift() {
        let g = Grid::trapezoid(3.0, 40).unwrap();
        let a = nystrom(&KernelSpec::m_t(1.0).unwrap(), &g).unwrap();
        let eps = 3.5e-4;
        let mut shifted = a.matrix().clone();
        for i in 0..40 {
            shifted[(i, i)] += eps;
        }
        let b = DiscreteOperator::from_matrix(shifted, g, true, "shifted").unwrap();
        let d = operator_norm_diff(&a, &b).unwrap();
        assert!((d - eps).abs() < 1e-10 * eps, "{d}");
    }

    #[test]
    fn norm_diff_matches_dense_svd() {
        let th = ThetaSpec::radial_power(1.0).unwrap();
        let g = Grid::band_limited(20.0, 80).unwrap();
        let a = nystrom(&KernelSpec::k_beta(th.clone(), 0.1).unwrap(), &g).unwrap();
        let b = nystrom(&KernelSpec::k_beta_desym(th, 0.1).unwrap(), &g).unwrap();
        let d = operator_norm_diff(&a, &b).unwrap();
        let diff = a.matrix().sub(b.matrix()).to_faer();
        let s = diff.singular_values().unwrap();
        let top = s.iter().cloned().fold(0.0, f64::max);
        assert!((d - top).abs() < 1e-10 * top, "{d} vs {top}");
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let k = KernelSpec::m_t(1.0).unwrap();
        let a = nystrom(&k, &Grid::trapezoid(3.0, 20).unwrap()).unwrap();
        let b = nystrom(&k, &Grid::trapezoid(3.0, 21).unwrap()).unwrap();
        assert!(matches!(
            operator_norm_diff(&a, &b),
            Err(Error::GridMismatch(_))
        ));
    }
}
