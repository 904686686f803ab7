use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{DiscreteOperator, Grid, Provenance, Scheme, Source};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::theta::ThetaSpec;

/// Multiplicative part `V` of `|D| + V`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Potential {
    /// `τ(x)/2`, the model operator proper.
    HalfTau { theta: ThetaSpec },
    /// `c |x|^p`.
    Monomial { coeff: f64, power: f64 },
    /// `V ≡ 0`.
    Zero,
}

impl Potential {
    pub fn half_tau(theta: ThetaSpec) -> Self {
        Potential::HalfTau { theta }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Potential::HalfTau { theta } => 0.5 * theta.raw_tau(x),
            Potential::Monomial { coeff, power } => coeff * x.abs().powf(*power),
            Potential::Zero => 0.0,
        }
    }

    pub fn is_even(&self) -> bool {
        match self {
            Potential::HalfTau { theta } => theta.is_even(),
            _ => true,
        }
    }
}

/// `A = |D| + τ/2` on a collocation or band-limited grid.
pub fn model_operator(theta: &ThetaSpec, grid: &Grid) -> Result<DiscreteOperator> {
    model_operator_with(&Potential::half_tau(theta.clone()), grid)
}

/// `|D| + V`.
///
/// On a Fourier collocation grid `|D|` is the periodic multiplier
/// `F* diag(|ξ_k|) F`, `ξ_k = πk/L`, `k = −n/2..n/2−1`. On a band-limited grid
/// it is the free-space sinc discretization, a Toeplitz matrix with
/// `D_0 = π/(2h)`, `D_k = −2/(π k² h)` for odd `k` and zero for even `k ≠ 0`.
pub fn model_operator_with(potential: &Potential, grid: &Grid) -> Result<DiscreteOperator> {
    let n = grid.len();
    let h = grid.weights()[0];
    let column = match grid.scheme() {
        Scheme::FourierCollocation => periodic_abs_d_column(n, grid.cutoff_l()),
        Scheme::BandLimited => (0..n)
            .map(|k| match k {
                0 => PI / (2.0 * h),
                k if k % 2 == 1 => -2.0 / (PI * (k * k) as f64 * h),
                _ => 0.0,
            })
            .collect(),
        scheme => {
            return Err(Error::UnsupportedScheme {
                scheme,
                operation: "model_operator",
            })
        }
    };
    let x = grid.nodes();
    let periodic = grid.scheme() == Scheme::FourierCollocation;
    let mut matrix = DenseMatrix::from_fn(n, n, |i, j| {
        let d = if periodic {
            (i + n - j) % n
        } else {
            i.abs_diff(j)
        };
        column[d]
    });
    for (i, xi) in x.iter().enumerate() {
        matrix[(i, i)] += potential.eval(*xi);
    }
    if !matrix.is_finite() {
        return Err(Error::NonFinite("model operator entry"));
    }
    Ok(DiscreteOperator::new(
        matrix,
        grid.clone(),
        true,
        Provenance::new(Source::Model(potential.clone()), grid),
    ))
}

/// First column of the circulant `F* diag(|ξ_k|) F`. The result is forced to
/// satisfy `c_m = c_{n−m}` exactly.
fn periodic_abs_d_column(n: usize, cutoff_l: f64) -> Vec<f64> {
    let mut spectrum: Vec<Complex<f64>> = (0..n)
        .map(|m| {
            let k = if m < n / 2 {
                m as f64
            } else {
                m as f64 - n as f64
            };
            Complex::new((PI * k / cutoff_l).abs(), 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut spectrum);
    let mut c: Vec<f64> = spectrum.iter().map(|z| z.re / n as f64).collect();
    for m in 1..n / 2 {
        let v = 0.5 * (c[m] + c[n - m]);
        c[m] = v;
        c[n - m] = v;
    }
    c
}

/// Free multiplier spectrum `{|πk/L|}` of the periodic `|D|`, ascending.
pub fn free_multiplier_spectrum(n: usize, cutoff_l: f64) -> Vec<f64> {
    let half = (n / 2) as i64;
    let mut v: Vec<f64> = (-half..half)
        .map(|k| (PI * k as f64 / cutoff_l).abs())
        .collect();
    v.sort_by(f64::total_cmp);
    v
}
