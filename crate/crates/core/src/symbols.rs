//! Symbols of the de-symmetrized rescaled operator and their remainders.
//!
//! For `u = ατ(x)` and `g = √(1+u)`:
//! `b = e^{−α|ξ|g}/g`, `a = |ξ| + τ/2`, `r = b − (1 − αa) = r₁ + r₂` with
//! `r₁ = 1/g + u/2 − 1` and `r₂ = (α/g)∫₀^{|ξ|g}(1 − e^{−αt})dt`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discretize::{nystrom, DiscreteOperator, Grid};
use crate::error::{ensure_finite, Error, Result};
use crate::kernels::KernelSpec;
use crate::theta::ThetaSpec;

/// Default exponent ϰ of the frequency weights.
pub const DEFAULT_VARK: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolEval {
    pub theta: ThetaSpec,
    pub alpha: f64,
    pub vark: f64,
}

impl SymbolEval {
    pub fn new(theta: ThetaSpec, alpha: f64, vark: f64) -> Result<Self> {
        ensure_finite(alpha, "alpha")?;
        ensure_finite(vark, "vark")?;
        if alpha <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        if !(vark > 0.0 && vark <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "vark must lie in (0, 1], got {vark}"
            )));
        }
        Ok(Self { theta, alpha, vark })
    }

    /// `g_α(x) = √(1 + ατ(x))`.
    pub fn g(&self, x: f64) -> f64 {
        (1.0 + self.alpha * self.theta.raw_tau(x)).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolValues {
    pub g: f64,
    pub b_l: f64,
    pub a: f64,
    /// `b_l − (1 − αa)`.
    pub r: f64,
    pub r1: f64,
    /// `r − r1`.
    pub r2: f64,
    /// `r₂` from the closed form of its integral.
    pub r2_closed: f64,
}

pub fn eval_symbols(se: &SymbolEval, x: f64, xi: f64) -> Result<SymbolValues> {
    ensure_finite(x, "x")?;
    ensure_finite(xi, "xi")?;
    let alpha = se.alpha;
    let tau = se.theta.raw_tau(x);
    let u = alpha * tau;
    let g = (1.0 + u).sqrt();
    let b_l = (-alpha * xi.abs() * g).exp() / g;
    let a = xi.abs() + 0.5 * tau;
    let r = b_l - (1.0 - alpha * a);
    let r1 = r1_stable(u, g);
    let r2_closed = phi(alpha * xi.abs() * g) / g;
    Ok(SymbolValues {
        g,
        b_l,
        a,
        r,
        r1,
        r2: r - r1,
        r2_closed,
    })
}

/// `1/g + u/2 − 1 = u²(g+2) / (2g(g+1)²)`, free of cancellation.
fn r1_stable(u: f64, g: f64) -> f64 {
    u * u * (g + 2.0) / (2.0 * g * (g + 1.0) * (g + 1.0))
}

/// `φ(u) = u − 1 + e^{−u}`, by series near zero.
fn phi(u: f64) -> f64 {
    if u < 0.1 {
        let mut term = u * u / 2.0;
        let mut sum = 0.0_f64;
        let mut k = 2.0;
        while term.abs() > 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            sum += term;
            k += 1.0;
            term *= -u / k;
        }
        sum
    } else {
        u + (-u).exp_m1()
    }
}

/// `e^{(2)}_α(x, ξ) = r₂ / (g^ϰ ζ(α⟨ξ⟩)^ϰ ⟨ξ⟩)`.
pub fn e2(se: &SymbolEval, x: f64, xi: f64) -> Result<f64> {
    let v = eval_symbols(se, x, xi)?;
    let br = bracket(xi);
    Ok(v.r2_closed / (v.g.powf(se.vark) * zeta(se.alpha * br)?.powf(se.vark) * br))
}

/// `ζ(x) = min(x, 2)`.
pub fn zeta(x: f64) -> Result<f64> {
    ensure_finite(x, "zeta argument")?;
    if x < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "zeta needs x ≥ 0, got {x}"
        )));
    }
    Ok(x.min(2.0))
}

/// `⟨x⟩ = √(1 + x²)`.
pub fn bracket(x: f64) -> f64 {
    x.hypot(1.0)
}

/// `e^{(1)}_α(x) = r₁(x) / (⟨x⟩^γ ζ(α⟨x⟩^γ))`.
pub fn e1(se: &SymbolEval, x: f64) -> Result<f64> {
    let v = eval_symbols(se, x, 0.0)?;
    let w = bracket(x).powf(se.theta.gamma());
    Ok(v.r1 / (w * zeta(se.alpha * w)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub alphas: Vec<f64>,
    /// `sup_x |e^{(1)}_α(x)|` per α.
    pub sups: Vec<f64>,
    /// `sup / α` per α.
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    /// Growth factor of the ratio per decade of decreasing α, between neighbours.
    pub growth_per_decade: Vec<f64>,
    pub bounded: bool,
}

/// Largest tolerated growth of `sup/α` per decade.
pub const MAX_GROWTH_PER_DECADE: f64 = 1.10;

/// Samples `sup_x |e^{(1)}_α|/α` over `xs` for each α.
pub fn verify_e1_bound(
    theta: &ThetaSpec,
    vark: f64,
    alphas: &[f64],
    xs: &[f64],
) -> Result<BoundReport> {
    if alphas.is_empty() || xs.is_empty() {
        return Err(Error::InsufficientData(
            "verify_e1_bound needs alphas and sample points".into(),
        ));
    }
    if alphas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter(
            "alphas must be strictly decreasing".into(),
        ));
    }
    let mut sups = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let se = SymbolEval::new(theta.clone(), alpha, vark)?;
        let vals: Result<Vec<f64>> = xs.par_iter().map(|&x| e1(&se, x).map(f64::abs)).collect();
        sups.push(vals?.into_iter().fold(0.0, f64::max));
    }
    let ratios: Vec<f64> = sups.iter().zip(alphas).map(|(s, a)| s / a).collect();
    let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    let growth_per_decade: Vec<f64> = ratios
        .windows(2)
        .zip(alphas.windows(2))
        .map(|(r, a)| {
            let decades = (a[0] / a[1]).log10();
            if r[0] == 0.0 {
                if r[1] == 0.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            } else {
                (r[1] / r[0]).powf(1.0 / decades)
            }
        })
        .collect();
    let bounded = max_ratio.is_finite()
        && growth_per_decade
            .iter()
            .all(|g| *g <= MAX_GROWTH_PER_DECADE);
    Ok(BoundReport {
        alphas: alphas.to_vec(),
        sups,
        ratios,
        max_ratio,
        growth_per_decade,
        bounded,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchurReport {
    pub m1: f64,
    pub m2: f64,
    pub bound: f64,
}

/// Schur bound `√(M₁M₂)` of the discretized kernel.
pub fn schur_bound(spec: &KernelSpec, grid: &Grid) -> Result<f64> {
    Ok(schur_bound_operator(&nystrom(spec, grid)?).bound)
}

/// Weighted Schur test on a discrete operator: with `p_i = √w_i`,
/// `M₁ = max_i Σ_j |M_ij| p_j/p_i` and `M₂` likewise over columns. For a
/// quadrature Nyström matrix `M₁ = max_i Σ_j |k(x_i,x_j)| w_j`.
pub fn schur_bound_operator(op: &DiscreteOperator) -> SchurReport {
    let m = op.matrix();
    let p: Vec<f64> = op.grid().weights().iter().map(|w| w.sqrt()).collect();
    let n = op.dim();
    let m1 = (0..n)
        .into_par_iter()
        .map(|i| {
            m.row(i)
                .iter()
                .zip(&p)
                .map(|(v, pj)| v.abs() * pj)
                .sum::<f64>()
                / p[i]
        })
        .reduce(|| 0.0, f64::max);
    let m2 = (0..n)
        .into_par_iter()
        .map(|j| (0..n).map(|i| m[(i, j)].abs() * p[i]).sum::<f64>() / p[j])
        .reduce(|| 0.0, f64::max);
    SchurReport {
        m1,
        m2,
        bound: (m1 * m2).sqrt(),
    }
}
