use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GridPolicy, SWEEP_TOL};
use crate::discretize::{nystrom, DiscreteOperator, Grid};
use crate::eigen::{bottom_k_with, EigenOptions};
use crate::error::{Error, Result};
use crate::kernels::{rescale_beta_to_alpha, KernelSpec};
use crate::theta::ThetaSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegativeRow {
    pub beta: f64,
    pub n: usize,
    pub cutoff_l: f64,
    /// Smallest eigenvalue at `n` nodes.
    pub min_eigenvalue: f64,
    /// Smallest eigenvalue at `2n` nodes.
    pub min_eigenvalue_refined: f64,
    /// `|min(n) − min(2n)|`.
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegativeScanReport {
    pub gamma: f64,
    pub rows: Vec<NegativeRow>,
}

/// Smallest eigenvalue of a discretized operator.
pub fn min_eigenvalue(op: &DiscreteOperator, opts: &EigenOptions) -> Result<f64> {
    Ok(bottom_k_with(op, 1, SWEEP_TOL, opts)?.first().value)
}

/// Most negative eigenvalue of `K_β` per β.
///
/// For β > 0 the unitarily equivalent `B_α` is discretized on the policy's
/// band-limited grid. β = 0 is the Cauchy kernel on a trapezoid grid of the
/// policy's largest cutoff.
pub fn negative_scan(
    theta: &ThetaSpec,
    betas: &[f64],
    policy: &GridPolicy,
) -> Result<NegativeScanReport> {
    if betas.is_empty() {
        return Err(Error::InsufficientData("empty β list".into()));
    }
    if betas.iter().any(|b| !(*b >= 0.0 && *b <= 1.0)) {
        return Err(Error::InvalidParameter(
            "β values must lie in [0, 1]".into(),
        ));
    }
    let rows = betas
        .par_iter()
        .map(|&beta| -> Result<NegativeRow> {
            let (spec, grid, fine) = if beta == 0.0 {
                let l = policy.fixed_l.unwrap_or(policy.l_max);
                let n = policy.nodes(l)?;
                (
                    KernelSpec::k_beta(theta.clone(), 0.0)?,
                    Grid::trapezoid(l, n)?,
                    Grid::trapezoid(l, 2 * n)?,
                )
            } else {
                let alpha = rescale_beta_to_alpha(beta, theta.gamma())?;
                let grid = policy.grid(theta, alpha)?;
                let fine = Grid::band_limited(grid.cutoff_l(), 2 * grid.len())?;
                (KernelSpec::b_alpha(theta.clone(), alpha)?, grid, fine)
            };
            let coarse = min_eigenvalue(&nystrom(&spec, &grid)?, &policy.eigen)?;
            let refined = min_eigenvalue(&nystrom(&spec, &fine)?, &policy.eigen)?;
            Ok(NegativeRow {
                beta,
                n: grid.len(),
                cutoff_l: grid.cutoff_l(),
                min_eigenvalue: coarse,
                min_eigenvalue_refined: refined,
                delta: (coarse - refined).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NegativeScanReport {
        gamma: theta.gamma(),
        rows,
    })
}
