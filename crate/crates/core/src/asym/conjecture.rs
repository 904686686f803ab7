use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{solve_b_alpha, EigenFunction, GridPolicy, ModelReference};
use crate::error::{Error, Result};
use crate::kernels::rescale_beta_to_alpha;
use crate::theta::ThetaSpec;

/// Minimum overlap between consecutive eigenvectors for a branch to count as tracked.
pub const TRACK_OVERLAP: f64 = 0.8;
/// Model eigenvalues closer than this are treated as one degenerate level.
pub const DEGENERATE_GAP: f64 = 1e-6;
pub const MAX_J: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjectureRow {
    pub j: usize,
    pub lambda_model: f64,
    /// `β^{−2/(γ+1)}(1 − M_{j,β})` per β.
    pub rescaled: Vec<f64>,
    /// Overlap with the previous β's eigenvector on the same branch.
    pub overlaps: Vec<f64>,
    /// `|rescaled − λ_j| / λ_j` at the smallest β.
    pub mismatch: f64,
    /// Some overlap fell below the tracking threshold.
    pub crossing: bool,
    /// Merged with the next level because the model gap is below `DEGENERATE_GAP`.
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub gamma: f64,
    pub betas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub rows: Vec<ConjectureRow>,
}

/// Rescaled deficits of the `j`-th eigenvalue of `B_α` next to `λ_j` of the
/// model operator. Branches are followed across β by eigenvector overlap.
pub fn conjecture_61(
    theta: &ThetaSpec,
    betas: &[f64],
    j_max: usize,
    policy: &GridPolicy,
    reference: &ModelReference,
) -> Result<ConjectureReport> {
    if j_max == 0 || j_max > MAX_J {
        return Err(Error::InvalidParameter(format!(
            "j_max must lie in 1..={MAX_J}"
        )));
    }
    if reference.values_wide.len() < j_max {
        return Err(Error::InsufficientData(format!(
            "reference holds {} model eigenvalues",
            reference.values_wide.len()
        )));
    }
    if betas.is_empty() {
        return Err(Error::InsufficientData("empty β list".into()));
    }
    // a spare eigenpair per level lets a branch move past its index
    let k = j_max + 2;
    let levels: Vec<(f64, Vec<(f64, EigenFunction)>)> = betas
        .par_iter()
        .map(|&beta| -> Result<_> {
            let alpha = rescale_beta_to_alpha(beta, theta.gamma())?;
            let grid = policy.grid(theta, alpha)?;
            let spec = solve_b_alpha(theta, alpha, &grid, k.min(grid.len()), policy)?;
            let pairs = spec
                .pairs
                .iter()
                .map(|p| Ok((p.value, EigenFunction::from_pair(p, &grid)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok((alpha, pairs))
        })
        .collect::<Result<_>>()?;

    let mut rows: Vec<ConjectureRow> = (1..=j_max)
        .map(|j| ConjectureRow {
            j,
            lambda_model: reference.lambda(j),
            rescaled: Vec::with_capacity(betas.len()),
            overlaps: Vec::with_capacity(betas.len()),
            mismatch: f64::NAN,
            crossing: false,
            degenerate: false,
        })
        .collect();
    let mut current: Vec<usize> = (0..j_max).collect();
    for (step, (alpha, pairs)) in levels.iter().enumerate() {
        if step > 0 {
            let prev = &levels[step - 1].1;
            let mut taken = vec![false; pairs.len()];
            for (row, idx) in rows.iter_mut().zip(current.iter_mut()) {
                let (best, overlap) = pairs
                    .iter()
                    .enumerate()
                    .filter(|(c, _)| !taken[*c])
                    .map(|(c, (_, f))| (c, f.inner(&prev[*idx].1).abs()))
                    .fold(
                        (usize::MAX, -1.0),
                        |acc, x| if x.1 > acc.1 { x } else { acc },
                    );
                taken[best] = true;
                *idx = best;
                row.overlaps.push(overlap);
                if overlap < TRACK_OVERLAP {
                    row.crossing = true;
                }
            }
        } else {
            rows.iter_mut().for_each(|r| r.overlaps.push(1.0));
        }
        for (row, idx) in rows.iter_mut().zip(&current) {
            row.rescaled.push((1.0 - pairs[*idx].0) / alpha);
        }
    }
    for j in 0..j_max {
        let lam = rows[j].lambda_model;
        rows[j].mismatch = (rows[j].rescaled.last().copied().unwrap_or(f64::NAN) - lam).abs() / lam;
        if j + 1 < reference.values_wide.len()
            && (reference.values_wide[j + 1] - lam).abs() < DEGENERATE_GAP
        {
            rows[j].degenerate = true;
            if j + 1 < j_max {
                rows[j + 1].degenerate = true;
            }
        }
    }
    Ok(ConjectureReport {
        gamma: theta.gamma(),
        betas: betas.to_vec(),
        alphas: levels.iter().map(|l| l.0).collect(),
        rows,
    })
}
