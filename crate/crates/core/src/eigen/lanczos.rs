use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EigenOptions, Which};
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm2, scale, LinearOperator};

/// Raw output of [`lanczos_extreme`].
#[derive(Clone, Debug)]
pub struct LanczosResult {
    /// Ritz values, most extreme first.
    pub values: Vec<f64>,
    /// Unit Ritz vectors matching `values`.
    pub vectors: Vec<Vec<f64>>,
    /// `‖A y − θ y‖` by direct multiplication.
    pub residuals: Vec<f64>,
    pub converged: bool,
    /// Total number of operator applications.
    pub iterations: usize,
}

/// `k` extreme eigenpairs of a symmetric operator by Lanczos with full
/// reorthogonalization and explicit restarts.
///
/// Convergence means every returned residual is at most `tol`, scaled by the
/// largest Ritz magnitude when `opts.relative_tol` is set.
pub fn lanczos_extreme(
    op: &dyn LinearOperator,
    k: usize,
    which: Which,
    tol: f64,
    opts: &EigenOptions,
) -> Result<LanczosResult> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "requested {k} eigenpairs of a {n}-dimensional operator"
        )));
    }
    let m_max = n.min(opts.max_krylov.max(2 * k + 20));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut iterations = 0;
    let mut last = None;

    for _ in 0..=opts.max_restarts {
        let run = lanczos_run(
            op,
            &start,
            k,
            which,
            tol,
            m_max,
            opts.relative_tol,
            &mut rng,
        )?;
        iterations += run.iterations;
        if run.converged {
            return Ok(LanczosResult { iterations, ..run });
        }
        start = vec![0.0; n];
        for (j, v) in run.vectors.iter().enumerate() {
            // weight the least-converged vectors more so the restart keeps them
            let w = 1.0
                + run.residuals[j]
                    / (run.residuals.iter().cloned().fold(0.0, f64::max) + f64::MIN_POSITIVE);
            axpy(w, v, &mut start);
        }
        last = Some(run);
    }
    let run = last.expect("at least one Lanczos run");
    Ok(LanczosResult {
        iterations,
        converged: false,
        ..run
    })
}

#[allow(clippy::too_many_arguments)]
fn lanczos_run(
    op: &dyn LinearOperator,
    start: &[f64],
    k: usize,
    which: Which,
    tol: f64,
    m_max: usize,
    relative: bool,
    rng: &mut ChaCha8Rng,
) -> Result<LanczosResult> {
    let n = op.dim();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m_max);
    let mut alpha: Vec<f64> = Vec::with_capacity(m_max);
    let mut beta: Vec<f64> = Vec::with_capacity(m_max);
    let mut q = start.to_vec();
    let nq = norm2(&q);
    if !(nq > 0.0) || !nq.is_finite() {
        return Err(Error::LinearAlgebra(
            "degenerate Lanczos start vector".into(),
        ));
    }
    scale(&mut q, 1.0 / nq);
    let mut w = vec![0.0; n];
    let mut op_norm = 0.0_f64;
    let mut next_check = (k + 10).min(m_max);

    loop {
        op.apply(&q, &mut w);
        let a = dot(&q, &w);
        basis.push(std::mem::take(&mut q));
        alpha.push(a);
        let m = basis.len();
        // two passes of classical Gram–Schmidt against the whole basis
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                axpy(-c, v, &mut w);
            }
        }
        let b = norm2(&w);
        op_norm = op_norm.max(a.abs() + b);

        let done = m == m_max || m == n;
        // no early check at a breakdown: an invariant subspace can hide
        // further copies of a multiple eigenvalue
        if m >= next_check || done {
            let (theta, s) = tridiagonal_eigen(&alpha, &beta)?;
            let order = extreme_order(&theta, which);
            let kk = k.min(m);
            let scale_ref = if relative {
                theta.iter().fold(0.0_f64, |acc, t| acc.max(t.abs()))
            } else {
                1.0
            };
            let estimates_ok = order[..kk]
                .iter()
                .all(|&i| (b * s[(m - 1, i)]).abs() <= 0.1 * tol * scale_ref);
            if (estimates_ok && kk == k) || done {
                let res = ritz_pairs(op, &basis, &s, &order[..kk]);
                let converged = kk == k && res.residuals.iter().all(|r| *r <= tol * scale_ref);
                if converged || done {
                    return Ok(LanczosResult {
                        converged,
                        iterations: m,
                        ..res
                    });
                }
            }
            next_check = (m + (m / 5).max(10)).min(m_max);
        }

        if b <= 1e-13 * op_norm.max(f64::MIN_POSITIVE) {
            // invariant subspace found: continue from a fresh orthogonal direction
            w = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(v, &w);
                    axpy(-c, v, &mut w);
                }
            }
            let nw = norm2(&w);
            if !(nw > 0.0) {
                return Err(Error::LinearAlgebra(
                    "Lanczos restart vector vanished".into(),
                ));
            }
            scale(&mut w, 1.0 / nw);
            beta.push(0.0);
            q = std::mem::replace(&mut w, vec![0.0; n]);
            continue;
        }
        scale(&mut w, 1.0 / b);
        beta.push(b);
        q = std::mem::replace(&mut w, vec![0.0; n]);
    }
}

/// Eigen-decomposition of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta`. Values ascending.
fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> Result<(Vec<f64>, faer::Mat<f64>)> {
    let m = alpha.len();
    let t = faer::Mat::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    });
    let evd = t
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::LinearAlgebra(format!("tridiagonal eigensolver: {e:?}")))?;
    let values = (0..m).map(|i| evd.S().column_vector()[i]).collect();
    Ok((values, evd.U().to_owned()))
}

fn extreme_order(theta: &[f64], which: Which) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..theta.len()).collect();
    match which {
        Which::Largest => idx.sort_by(|&a, &b| theta[b].total_cmp(&theta[a])),
        Which::Smallest => idx.sort_by(|&a, &b| theta[a].total_cmp(&theta[b])),
    }
    idx
}

fn ritz_pairs(
    op: &dyn LinearOperator,
    basis: &[Vec<f64>],
    s: &faer::Mat<f64>,
    picks: &[usize],
) -> LanczosResult {
    let n = op.dim();
    let mut values = Vec::with_capacity(picks.len());
    let mut vectors = Vec::with_capacity(picks.len());
    let mut residuals = Vec::with_capacity(picks.len());
    let mut ay = vec![0.0; n];
    for &i in picks {
        let mut y = vec![0.0; n];
        for (j, v) in basis.iter().enumerate() {
            axpy(s[(j, i)], v, &mut y);
        }
        let ny = norm2(&y);
        scale(&mut y, 1.0 / ny);
        op.apply(&y, &mut ay);
        let rq = dot(&y, &ay);
        axpy(-rq, &y, &mut ay);
        values.push(rq);
        residuals.push(norm2(&ay));
        vectors.push(y);
    }
    LanczosResult {
        values,
        vectors,
        residuals,
        converged: false,
        iterations: 0,
    }
}
