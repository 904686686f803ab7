use serde::{Deserialize, Serialize};

use super::{GridPolicy, SWEEP_TOL};
use crate::discretize::{nystrom, DiscreteOperator};
use crate::eigen::{dense_eigenvalues, top_k_with};
use crate::error::{Error, Result};
use crate::kernels::{rescale_beta_to_alpha, KernelSpec};
use crate::linalg::DenseMatrix;
use crate::theta::ThetaSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParityReport {
    pub beta: f64,
    pub alpha: f64,
    pub n: usize,
    pub cutoff_l: f64,
    /// `λ^e_1 ≥ λ^e_2 ≥ …` of the even block.
    pub even: Vec<f64>,
    /// `λ^o_1 ≥ λ^o_2 ≥ …` of the odd block.
    pub odd: Vec<f64>,
    /// `λ^e_1 > λ^o_1`.
    pub even_dominates: bool,
    /// `λ^e_2 − λ^o_2`, reported without a claim.
    pub second_difference: Option<f64>,
    /// Largest deviation between the merged block spectra and the full
    /// spectrum; computed for `n ≤ check_max_n`.
    pub block_check: Option<f64>,
}

/// Sizes up to which the block decomposition is checked against a full
/// diagonalization.
pub const BLOCK_CHECK_MAX_N: usize = 256;

/// Even and odd blocks of a reflection-invariant operator on a symmetric grid
/// with an even number of nodes: with `ī = n−1−i`,
/// `E_ij = M_ij + M_{i j̄}` and `O_ij = M_ij − M_{i j̄}` for `i, j < n/2`.
pub fn parity_blocks(op: &DiscreteOperator) -> Result<(DenseMatrix, DenseMatrix)> {
    let n = op.dim();
    if !n.is_multiple_of(2) || !op.grid().is_symmetric() {
        return Err(Error::InvalidParameter(
            "parity split needs a symmetric grid with an even node count".into(),
        ));
    }
    let m = op.matrix();
    let half = n / 2;
    let even = DenseMatrix::from_fn(half, half, |i, j| m[(i, j)] + m[(i, n - 1 - j)]);
    let odd = DenseMatrix::from_fn(half, half, |i, j| m[(i, j)] - m[(i, n - 1 - j)]);
    let mut even = even;
    let mut odd = odd;
    even.symmetrize();
    odd.symmetrize();
    Ok((even, odd))
}

/// Top `k` eigenvalues of `B_α` restricted to even and to odd functions.
pub fn parity_split(
    theta: &ThetaSpec,
    beta: f64,
    policy: &GridPolicy,
    k: usize,
) -> Result<ParityReport> {
    if !theta.is_even() {
        return Err(Error::InvalidParameter(
            "parity split needs Θ(−x, −y) = Θ(x, y)".into(),
        ));
    }
    let alpha = rescale_beta_to_alpha(beta, theta.gamma())?;
    let grid = policy.grid(theta, alpha)?;
    let op = nystrom(&KernelSpec::b_alpha(theta.clone(), alpha)?, &grid)?;
    let (even, odd) = parity_blocks(&op)?;
    let half = op.dim() / 2;
    let kk = k.min(half);
    let top = |m: DenseMatrix| -> Result<Vec<f64>> {
        let block = DiscreteOperator::from_matrix(
            m,
            crate::discretize::Grid::band_limited(1.0, half)?,
            true,
            "parity block",
        )?;
        Ok(top_k_with(&block, kk, SWEEP_TOL, &policy.eigen)?.values())
    };
    let block_check = if op.dim() <= BLOCK_CHECK_MAX_N {
        let full = dense_eigenvalues(op.matrix())?;
        let mut merged = dense_eigenvalues(&even)?;
        merged.extend(dense_eigenvalues(&odd)?);
        merged.sort_by(f64::total_cmp);
        Some(
            full.iter()
                .zip(&merged)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    } else {
        None
    };
    let even = top(even)?;
    let odd = top(odd)?;
    Ok(ParityReport {
        beta,
        alpha,
        n: op.dim(),
        cutoff_l: grid.cutoff_l(),
        even_dominates: even[0] > odd[0],
        second_difference: (kk >= 2).then(|| even[1] - odd[1]),
        even,
        odd,
        block_check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_reproduce_full_spectrum() {
        let th = ThetaSpec::radial_power(2.0).unwrap();
        let r = parity_split(&th, 0.5, &GridPolicy::fixed(8.0, 128), 3).unwrap();
        assert!(r.block_check.unwrap() < 1e-12);
        assert!(r.even_dominates);
        assert_eq!(r.even.len(), 3);
    }

    #[test]
    fn rejects_odd_grid_and_uneven_theta() {
        let th = ThetaSpec::radial_power(2.0).unwrap();
        assert!(parity_split(&th, 0.5, &GridPolicy::fixed(8.0, 127), 2).is_err());
        let lopsided: Vec<f64> = (0..16)
            .map(|k| 1.0 + 0.5 * (k as f64 * std::f64::consts::PI / 8.0).cos())
            .collect();
        let custom = ThetaSpec::custom(2.0, lopsided).unwrap();
        assert!(parity_split(&custom, 0.5, &GridPolicy::fixed(8.0, 64), 2).is_err());
    }
}
