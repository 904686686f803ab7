use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{fit_line, SweepRecord};
use crate::error::{Error, Result};

/// Zero-padding factor of the discrete Fourier transform.
const PAD: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierMass {
    pub radius: f64,
    /// `‖ψ̂ χ_R‖²`.
    pub mass: f64,
    /// `1 − 4λ₁/R`.
    pub bound: f64,
    /// `αR ≤ 1`, the regime in which the bound is claimed.
    pub applicable: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialMass {
    pub radius: f64,
    /// `‖ψ χ_R‖²`.
    pub mass: f64,
    /// `1 − mass`.
    pub deficit: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub alpha: f64,
    pub lambda1: f64,
    pub gamma: f64,
    pub fourier: Vec<FourierMass>,
    pub spatial: Vec<SpatialMass>,
    /// Smallest `Ĉ ≥ 0` with `mass ≥ 1 − 4αλ₁ − Ĉ/R^γ` at every radius.
    pub c_hat: f64,
    /// `−slope` of `log deficit` against `log R`; `None` with fewer than two positive deficits.
    pub decay_exponent: Option<f64>,
    /// Every applicable Fourier bound holds.
    pub fourier_passed: bool,
}

/// Fourier and spatial mass of `ψ_α` inside balls of the given radii.
///
/// The record's eigenvector is read as a band-limited function with samples
/// `ψ_j` on a uniform grid, so `ψ̂(ξ) = (h/√(2π)) Σ ψ_j e^{−iξx_j}` for
/// `|ξ| < π/h`, evaluated on a zero-padded FFT grid.
pub fn localization_report(
    record: &SweepRecord,
    gamma: f64,
    lambda1: f64,
    fourier_radii: &[f64],
    spatial_radii: &[f64],
) -> Result<LocalizationReport> {
    let psi = &record.psi;
    let n = psi.values.len();
    if n < 2 {
        return Err(Error::InsufficientData(
            "record carries no eigenfunction".into(),
        ));
    }
    let h = psi.nodes[1] - psi.nodes[0];
    if psi.weights.iter().any(|w| (w - h).abs() > 1e-12 * h) {
        return Err(Error::InvalidParameter(
            "localization needs a uniform grid".into(),
        ));
    }
    let big = PAD * n;
    let mut buf: Vec<Complex<f64>> = (0..big)
        .map(|j| Complex::new(if j < n { psi.values[j] } else { 0.0 }, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(big).process(&mut buf);
    // |ψ̂(ξ_k)|² Δξ with ξ_k = 2πk/(big·h) and Δξ = 2π/(big·h)
    let density: Vec<(f64, f64)> = buf
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let kk = if k <= big / 2 {
                k as f64
            } else {
                k as f64 - big as f64
            };
            (
                2.0 * std::f64::consts::PI * kk / (big as f64 * h),
                h * z.norm_sqr() / big as f64,
            )
        })
        .collect();
    let fourier: Vec<FourierMass> = fourier_radii
        .iter()
        .map(|&r| {
            let mass: f64 = density
                .iter()
                .filter(|(xi, _)| xi.abs() < r)
                .map(|(_, m)| m)
                .sum();
            let bound = 1.0 - 4.0 * lambda1 / r;
            let applicable = record.alpha * r <= 1.0;
            FourierMass {
                radius: r,
                mass,
                bound,
                applicable,
                passed: !applicable || mass >= bound,
            }
        })
        .collect();
    let spatial: Vec<SpatialMass> = spatial_radii
        .iter()
        .map(|&r| {
            let mass = psi.mass_where(|x| x.abs() < r);
            SpatialMass {
                radius: r,
                mass,
                deficit: 1.0 - mass,
            }
        })
        .collect();
    let floor = 1.0 - 4.0 * record.alpha * lambda1;
    let c_hat = spatial
        .iter()
        .map(|s| (floor - s.mass) * s.radius.powf(gamma))
        .fold(0.0, f64::max);
    let positive: Vec<&SpatialMass> = spatial.iter().filter(|s| s.deficit > 0.0).collect();
    let decay_exponent = if positive.len() >= 2 {
        let xs: Vec<f64> = positive.iter().map(|s| s.radius.ln()).collect();
        let ys: Vec<f64> = positive.iter().map(|s| s.deficit.ln()).collect();
        Some(-fit_line(&xs, &ys)?.slope)
    } else {
        None
    };
    let fourier_passed = fourier.iter().all(|f| f.passed);
    Ok(LocalizationReport {
        alpha: record.alpha,
        lambda1,
        gamma,
        fourier,
        spatial,
        c_hat,
        decay_exponent,
        fourier_passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asym::EigenFunction;
    use crate::discretize::Grid;

    fn gaussian_record(s: f64) -> SweepRecord {
        let g = Grid::band_limited(12.0, 960).unwrap();
        let mut psi = EigenFunction {
            nodes: g.nodes().to_vec(),
            weights: g.weights().to_vec(),
            values: g
                .nodes()
                .iter()
                .map(|x| (-x * x / (2.0 * s * s)).exp())
                .collect(),
        };
        psi.normalize();
        SweepRecord {
            psi,
            ..SweepRecord::synthetic(0.1, 0.1, 0.1)
        }
    }

    #[test]
    fn masses_approach_one() {
        let rec = gaussian_record(1.0);
        let r = localization_report(&rec, 2.0, 1.0, &[1e6], &[1e6]).unwrap();
        assert!((r.fourier[0].mass - 1.0).abs() < 1e-12);
        assert!((r.spatial[0].mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_masses_match_erf() {
        // |ψ|² ∝ e^{−x²} (s = 1) and |ψ̂|² ∝ e^{−ξ²}: both masses are erf(R).
        let rec = gaussian_record(1.0);
        let r = localization_report(&rec, 2.0, 1.0, &[0.5, 1.0], &[0.5, 1.0]).unwrap();
        // erf(0.5), erf(1)
        for (m, want) in [(0, 0.520_499_877_813_046_5), (1, 0.842_700_792_949_714_9)] {
            assert!(
                (r.spatial[m].mass - want).abs() < 1e-2,
                "{}",
                r.spatial[m].mass
            );
            assert!(
                (r.fourier[m].mass - want).abs() < 1e-2,
                "{}",
                r.fourier[m].mass
            );
        }
    }

    #[test]
    fn applicability_follows_alpha_r() {
        let rec = gaussian_record(1.0);
        let r = localization_report(&rec, 2.0, 1.0, &[8.0, 20.0], &[]).unwrap();
        assert!(r.fourier[0].applicable && !r.fourier[1].applicable);
        assert!(r.fourier_passed);
    }
}
