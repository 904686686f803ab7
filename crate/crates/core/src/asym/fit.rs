use serde::{Deserialize, Serialize};

use super::SweepRecord;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "window", rename_all = "snake_case")]
pub enum FitWindow {
    All,
    /// The geometrically smallest half of the β values (at least 2 points).
    SmallestHalf,
    /// `β ∈ [lo, hi]`.
    Range {
        lo: f64,
        hi: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Slope of `log deficit` against `log β`.
    pub exponent: f64,
    /// `e^{intercept}`.
    pub constant: f64,
    pub r_squared: f64,
    /// `(β_min, β_max)` actually used.
    pub window: (f64, f64),
    pub points: usize,
    /// `deficit / α = β^{−2/(γ+1)}(1 − μ)` for every record, in input order.
    pub rescaled: Vec<f64>,
}

/// Least-squares power law `deficit ≈ C β^p` over the chosen window.
pub fn fit_power_law(records: &[SweepRecord], window: FitWindow) -> Result<FitResult> {
    if records.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "need at least 4 records, got {}",
            records.len()
        )));
    }
    if let Some(r) = records.iter().find(|r| !(r.deficit > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "non-positive deficit {} at β = {}",
            r.deficit, r.beta
        )));
    }
    let mut pts: Vec<(f64, f64)> = records.iter().map(|r| (r.beta, r.deficit)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let chosen: Vec<(f64, f64)> = match window {
        FitWindow::All => pts,
        FitWindow::SmallestHalf => {
            let m = pts.len().div_ceil(2).max(2);
            pts[..m].to_vec()
        }
        FitWindow::Range { lo, hi } => pts
            .into_iter()
            .filter(|(b, _)| *b >= lo && *b <= hi)
            .collect(),
    };
    let (xs, ys): (Vec<f64>, Vec<f64>) = chosen.iter().map(|(b, d)| (b.ln(), d.ln())).unzip();
    let line = fit_line(&xs, &ys)?;
    Ok(FitResult {
        exponent: line.slope,
        constant: line.intercept.exp(),
        r_squared: line.r_squared,
        window: (chosen[0].0, chosen[chosen.len() - 1].0),
        points: chosen.len(),
        rescaled: records.iter().map(|r| r.deficit / r.alpha).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<Line> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return Err(Error::InsufficientData(format!(
            "line fit needs ≥ 2 paired points, got {n}"
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(Line {
        slope,
        intercept,
        r_squared,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Richardson {
    pub sizes: Vec<f64>,
    pub values: Vec<f64>,
    /// Order `p` of the model `v(L) = v∞ + C L^{−p}`.
    pub order: f64,
    pub extrapolated: f64,
}

/// Fits `v(L) = v∞ + C L^{−p}` exactly through three points, solving for `p`
/// by bisection. Sizes must increase.
pub fn richardson3(sizes: [f64; 3], values: [f64; 3]) -> Result<Richardson> {
    let [l1, l2, l3] = sizes;
    let [v1, v2, v3] = values;
    if !(l1 < l2 && l2 < l3) || l1 <= 0.0 {
        return Err(Error::InvalidParameter(
            "Richardson sizes must be positive and increasing".into(),
        ));
    }
    let (d1, d2) = (v1 - v2, v2 - v3);
    if d1 == 0.0 || d2 == 0.0 || d1.signum() != d2.signum() {
        // not in the asymptotic regime: report the finest value
        return Ok(Richardson {
            sizes: sizes.to_vec(),
            values: values.to_vec(),
            order: f64::NAN,
            extrapolated: v3,
        });
    }
    let target = d1 / d2;
    let ratio = |p: f64| (l1.powf(-p) - l2.powf(-p)) / (l2.powf(-p) - l3.powf(-p));
    let (mut lo, mut hi) = (1e-6, 60.0);
    let (flo, fhi) = (ratio(lo) - target, ratio(hi) - target);
    if flo.signum() == fhi.signum() {
        return Ok(Richardson {
            sizes: sizes.to_vec(),
            values: values.to_vec(),
            order: f64::NAN,
            extrapolated: v3,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (ratio(mid) - target).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = 0.5 * (lo + hi);
    let c = d2 / (l2.powf(-p) - l3.powf(-p));
    Ok(Richardson {
        sizes: sizes.to_vec(),
        values: values.to_vec(),
        order: p,
        extrapolated: v3 - c * l3.powf(-p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn synthetic(betas: &[f64], f: impl Fn(f64) -> f64, gamma: f64) -> Vec<SweepRecord> {
        betas
            .iter()
            .map(|&b| SweepRecord::synthetic(b, b.powf(2.0 / (gamma + 1.0)), f(b)))
            .collect()
    }

    #[test]
    fn exact_power_law() {
        let betas: Vec<f64> = (0..6).map(|k| 10f64.powf(-1.0 - 0.3 * k as f64)).collect();
        let recs = synthetic(&betas, |b| 2.0 * b.powf(0.4), 4.0);
        let fit = fit_power_law(&recs, FitWindow::All).unwrap();
        assert!((fit.exponent - 0.4).abs() < 1e-12);
        assert!((fit.constant - 2.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit.rescaled.iter().all(|r| (r - 2.0).abs() < 1e-12));
    }

    #[test]
    fn asymptotic_slope() {
        let mut last = f64::INFINITY;
        for top in [-1.0, -3.0, -5.0] {
            let betas: Vec<f64> = (0..6).map(|k| 10f64.powf(top - 0.2 * k as f64)).collect();
            let recs = synthetic(&betas, |b| b * (1.0 + b), 1.0);
            let err = (fit_power_law(&recs, FitWindow::SmallestHalf)
                .unwrap()
                .exponent
                - 1.0)
                .abs();
            assert!(err < last);
            last = err;
        }
        assert!(last < 1e-5);
    }

    #[test]
    fn rejects_bad_input() {
        let betas = [0.1, 0.05, 0.02, 0.01];
        assert!(fit_power_law(&synthetic(&betas[..3], |b| b, 1.0), FitWindow::All).is_err());
        assert!(fit_power_law(&synthetic(&betas, |b| b - 0.05, 1.0), FitWindow::All).is_err());
    }

    #[test]
    fn richardson_recovers_model() {
        let f = |l: f64| 1.25 + 0.7 * l.powf(-2.0);
        let r = richardson3([20.0, 30.0, 40.0], [f(20.0), f(30.0), f(40.0)]).unwrap();
        assert!((r.order - 2.0).abs() < 1e-8);
        assert!((r.extrapolated - 1.25).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn exact_laws_recovered(p in 0.1..2.0f64, c in 0.1..10.0f64) {
            let betas: Vec<f64> = (0..6).map(|k| 10f64.powf(-0.5 * k as f64)).collect();
            let recs = synthetic(&betas, |b| c * b.powf(p), 2.0);
            let fit = fit_power_law(&recs, FitWindow::All).unwrap();
            prop_assert!((fit.exponent - p).abs() < 1e-12);
            prop_assert!((fit.constant - c).abs() < 1e-12 * c);
        }
    }
}
