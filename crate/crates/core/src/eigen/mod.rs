//! Extreme eigenpairs of symmetric discrete operators.

mod lanczos;
mod perron;

pub use lanczos::{lanczos_extreme, LanczosResult};
pub use perron::{perron_certify, PerronMode, PerronReport, SIMPLICITY_REL};

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::discretize::DiscreteOperator;
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, LinearOperator, Shifted};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Largest,
    Smallest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dense,
    Lanczos,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    /// Dense up to `dense_max_n` and for model operators, Lanczos otherwise.
    Auto,
    Dense,
    Lanczos,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EigenOptions {
    pub method: MethodChoice,
    /// Seed of the Lanczos start vector.
    pub seed: u64,
    pub max_krylov: usize,
    pub max_restarts: usize,
    pub dense_max_n: usize,
    /// Interpret tolerances relative to the largest eigenvalue magnitude.
    pub relative_tol: bool,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            method: MethodChoice::Auto,
            seed: 0x5eed,
            max_krylov: 400,
            max_restarts: 8,
            dense_max_n: 1024,
            relative_tol: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub value: f64,
    /// Unit ℓ² eigenvector on the operator's grid, largest-magnitude entry positive.
    pub vector: Vec<f64>,
    /// `‖Mv − λv‖₂`, recomputed by direct multiplication.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Descending for [`top_k`], ascending for [`bottom_k`].
    pub pairs: Vec<EigenPair>,
    /// `|λ₁ − λ₂|`; infinite for a 1×1 operator.
    pub gap: f64,
    pub method: Method,
    pub converged: bool,
}

impl SpectrumResult {
    pub fn values(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    pub fn first(&self) -> &EigenPair {
        &self.pairs[0]
    }
}

/// The `k` largest eigenpairs.
pub fn top_k(op: &DiscreteOperator, k: usize, tol: f64) -> Result<SpectrumResult> {
    top_k_with(op, k, tol, &EigenOptions::default())
}

/// The `k` smallest eigenpairs.
pub fn bottom_k(op: &DiscreteOperator, k: usize, tol: f64) -> Result<SpectrumResult> {
    bottom_k_with(op, k, tol, &EigenOptions::default())
}

pub fn top_k_with(
    op: &DiscreteOperator,
    k: usize,
    tol: f64,
    opts: &EigenOptions,
) -> Result<SpectrumResult> {
    extreme_k(op, k, tol, opts, Which::Largest)
}

pub fn bottom_k_with(
    op: &DiscreteOperator,
    k: usize,
    tol: f64,
    opts: &EigenOptions,
) -> Result<SpectrumResult> {
    extreme_k(op, k, tol, opts, Which::Smallest)
}

fn extreme_k(
    op: &DiscreteOperator,
    k: usize,
    tol: f64,
    opts: &EigenOptions,
    which: Which,
) -> Result<SpectrumResult> {
    if !op.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = op.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must lie in 1..={n}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let method = match opts.method {
        MethodChoice::Dense => Method::Dense,
        MethodChoice::Lanczos => Method::Lanczos,
        MethodChoice::Auto if n <= opts.dense_max_n || op.is_model() => Method::Dense,
        MethodChoice::Auto => Method::Lanczos,
    };
    // one extra pair, when available, fixes the gap
    let want = (k + 1).min(n);
    let matrix = op.matrix();
    let (mut pairs, converged) = match method {
        Method::Dense => (dense_extreme(matrix, want, which)?, true),
        Method::Lanczos => lanczos_pairs(matrix, want, which, tol, opts)?,
    };
    for p in &mut pairs {
        normalize_sign(&mut p.vector);
    }
    sort_pairs(&mut pairs, which);
    let gap = if pairs.len() > 1 {
        (pairs[0].value - pairs[1].value).abs()
    } else {
        f64::INFINITY
    };
    pairs.truncate(k);
    let scale = if opts.relative_tol {
        pairs[0].value.abs().max(f64::MIN_POSITIVE)
    } else {
        1.0
    };
    let converged = converged && pairs.iter().all(|p| p.residual <= tol * scale);
    Ok(SpectrumResult {
        pairs,
        gap,
        method,
        converged,
    })
}

fn lanczos_pairs(
    matrix: &DenseMatrix,
    want: usize,
    which: Which,
    tol: f64,
    opts: &EigenOptions,
) -> Result<(Vec<EigenPair>, bool)> {
    let res = match which {
        Which::Largest => lanczos_extreme(matrix, want, Which::Largest, tol, opts)?,
        Which::Smallest => {
            // Lanczos on σI − M, σ the Gershgorin upper bound, so the wanted
            // end of the spectrum becomes the dominant one.
            let sigma = gershgorin_upper(matrix);
            let shifted = Shifted {
                inner: matrix,
                shift: sigma,
            };
            lanczos_extreme(&shifted, want, Which::Largest, tol, opts)?
        }
    };
    let mut pairs = Vec::with_capacity(res.vectors.len());
    let mut mv = vec![0.0; matrix.rows()];
    for v in res.vectors {
        pairs.push(make_pair(matrix, v, &mut mv));
    }
    Ok((pairs, res.converged))
}

fn dense_extreme(matrix: &DenseMatrix, want: usize, which: Which) -> Result<Vec<EigenPair>> {
    let n = matrix.rows();
    let evd = matrix
        .to_faer()
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::LinearAlgebra(format!("dense eigensolver: {e:?}")))?;
    let u = evd.U();
    let cols: Vec<usize> = match which {
        Which::Largest => (0..want).map(|i| n - 1 - i).collect(),
        Which::Smallest => (0..want).collect(),
    };
    let mut mv = vec![0.0; n];
    Ok(cols
        .into_iter()
        .map(|c| {
            let v: Vec<f64> = (0..n).map(|i| u[(i, c)]).collect();
            make_pair(matrix, v, &mut mv)
        })
        .collect())
}

/// All eigenvalues of a symmetric matrix, ascending.
pub fn dense_eigenvalues(matrix: &DenseMatrix) -> Result<Vec<f64>> {
    matrix
        .to_faer()
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| Error::LinearAlgebra(format!("dense eigensolver: {e:?}")))
}

/// Rayleigh quotient and direct residual of a unit vector.
fn make_pair(matrix: &DenseMatrix, vector: Vec<f64>, mv: &mut [f64]) -> EigenPair {
    let nv = crate::linalg::norm2(&vector);
    let vector: Vec<f64> = vector.iter().map(|x| x / nv).collect();
    matrix.apply(&vector, mv);
    let value = crate::linalg::dot(&vector, mv);
    let residual = mv
        .iter()
        .zip(&vector)
        .map(|(a, b)| (a - value * b).powi(2))
        .sum::<f64>()
        .sqrt();
    EigenPair {
        value,
        vector,
        residual,
    }
}

/// `max_i (M_ii + Σ_{j≠i} |M_ij|)`.
pub fn gershgorin_upper(m: &DenseMatrix) -> f64 {
    (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            row[i]
                + row
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, v)| v.abs())
                    .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Flips the vector so its largest-magnitude entry is positive. Entries within
/// a relative 1e−9 of the maximum count as tied; the first of them decides.
pub fn normalize_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    if let Some(lead) = v.iter().find(|x| x.abs() >= max * (1.0 - 1e-9)) {
        if *lead < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Orders pairs by value, then by first differing vector entry.
fn sort_pairs(pairs: &mut [EigenPair], which: Which) {
    pairs.sort_by(|a, b| {
        let by_value = match which {
            Which::Largest => b.value.total_cmp(&a.value),
            Which::Smallest => a.value.total_cmp(&b.value),
        };
        by_value.then_with(|| {
            a.vector
                .iter()
                .zip(&b.vector)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        })
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::Grid;
    use rand::{Rng, SeedableRng};

    fn wrap(m: DenseMatrix) -> DiscreteOperator {
        let n = m.rows();
        DiscreteOperator::from_matrix(m, Grid::trapezoid(1.0, n).unwrap(), true, "test").unwrap()
    }

    #[test]
    fn diagonal_examples() {
        let op = wrap(DenseMatrix::diagonal(&[3.0, 2.0, 1.0]));
        let top = top_k(&op, 2, 1e-12).unwrap();
        assert_eq!(top.values(), vec![3.0, 2.0]);
        assert_eq!(top.gap, 1.0);
        let bottom = bottom_k(&op, 1, 1e-12).unwrap();
        assert_eq!(bottom.values(), vec![1.0]);
        assert!(top
            .pairs
            .iter()
            .all(|p| p.vector.iter().cloned().fold(f64::MIN, f64::max) == 1.0));
    }

    fn random_symmetric(n: usize, seed: u64) -> DenseMatrix {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut m = DenseMatrix::from_fn(n, n, |_, _| 0.0);
        for i in 0..n {
            for j in 0..=i {
                let v: f64 = rng.random_range(-1.0..1.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    #[test]
    fn lanczos_matches_dense_on_random_matrix() {
        let op = wrap(random_symmetric(50, 3));
        let all = dense_eigenvalues(op.matrix()).unwrap();
        let lanczos = EigenOptions {
            method: MethodChoice::Lanczos,
            ..EigenOptions::default()
        };
        let top = top_k_with(&op, 4, 1e-11, &lanczos).unwrap();
        let bottom = bottom_k_with(&op, 3, 1e-11, &lanczos).unwrap();
        assert!(top.converged && bottom.converged);
        for (i, p) in top.pairs.iter().enumerate() {
            assert!((p.value - all[49 - i]).abs() < 1e-10);
            assert!(p.residual <= 1e-11);
        }
        for (i, p) in bottom.pairs.iter().enumerate() {
            assert!((p.value - all[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_asymmetric_and_bad_k() {
        let g = Grid::trapezoid(1.0, 2).unwrap();
        let m = DenseMatrix::from_row_major(2, 2, vec![1.0, 2.0, 0.0, 1.0]);
        let op = DiscreteOperator::from_matrix(m, g, false, "t").unwrap();
        assert!(matches!(top_k(&op, 1, 1e-10), Err(Error::NotSymmetric)));
        let sym = wrap(DenseMatrix::identity(3));
        assert!(top_k(&sym, 4, 1e-10).is_err());
    }

    #[test]
    fn sign_convention() {
        let mut v = vec![0.1, -0.9, 0.3];
        normalize_sign(&mut v);
        assert_eq!(v, vec![-0.1, 0.9, -0.3]);
        let mut odd = vec![-0.5, 0.0, 0.5];
        normalize_sign(&mut odd);
        assert_eq!(odd, vec![0.5, 0.0, -0.5]);
    }

    #[test]
    fn runs_are_reproducible() {
        let op = wrap(random_symmetric(120, 9));
        let opts = EigenOptions {
            method: MethodChoice::Lanczos,
            seed: 42,
            ..EigenOptions::default()
        };
        let a = top_k_with(&op, 2, 1e-10, &opts).unwrap();
        let b = top_k_with(&op, 2, 1e-10, &opts).unwrap();
        assert_eq!(a, b);
    }
}
