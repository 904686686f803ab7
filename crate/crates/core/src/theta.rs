//! Homogeneous symmetric weights `Θ(x, y)` and their diagonal trace `τ(x) = Θ(x, x)`.
//!
//! A weight is fixed by its homogeneity degree `γ` and its values on the unit
//! circle. Three families are supported: the radial power `(x² + y²)^σ`, the
//! `p`-sum `(|x|^p + |y|^p)^{γ/p}`, and a custom weight tabulated at equally
//! spaced angles on the unit circle.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Homogeneity defect tolerance for the closed-form families.
pub const CLOSED_FORM_TOL: f64 = 1e-10;
/// Homogeneity and symmetry tolerance for tabulated weights.
pub const TABULATED_TOL: f64 = 1e-6;

/// Half-width of the window around `t = ±1` used by the Lipschitz estimate.
const LIPSCHITZ_WINDOW: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub enum ThetaKind {
    /// `Θ = (x² + y²)^σ`, `γ = 2σ`.
    RadialPower { sigma: f64 },
    /// `Θ = (|x|^p + |y|^p)^{γ/p}`.
    AbsSum { p: f64 },
    /// `Θ(r cos φ, r sin φ) = r^γ f(φ)` with `f` a periodic monotone cubic
    /// through `values[k] = f(2πk/N)`.
    Custom(CircleTable),
}

/// Periodic monotone (Fritsch-Carlson) cubic interpolant on `[0, 2π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleTable {
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl CircleTable {
    fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 8 {
            return Err(Error::InvalidParameter(format!(
                "custom weight needs at least 8 circle samples, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v <= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "circle samples must be positive and finite, found {v}"
            )));
        }
        let n = values.len();
        let step = 2.0 * PI / n as f64;
        let secant = |k: usize| (values[(k + 1) % n] - values[k]) / step;
        let slopes = (0..n)
            .map(|k| {
                let left = secant((k + n - 1) % n);
                let right = secant(k);
                if left * right <= 0.0 {
                    0.0
                } else {
                    // harmonic mean keeps the interpolant monotone on each cell
                    2.0 * left * right / (left + right)
                }
            })
            .collect();
        Ok(Self { values, slopes })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn eval(&self, angle: f64) -> f64 {
        let n = self.values.len();
        let step = 2.0 * PI / n as f64;
        let a = angle.rem_euclid(2.0 * PI);
        let pos = a / step;
        let k = (pos.floor() as usize).min(n - 1);
        let s = pos - k as f64;
        let (y0, y1) = (self.values[k], self.values[(k + 1) % n]);
        let (m0, m1) = (self.slopes[k] * step, self.slopes[(k + 1) % n] * step);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * m1
    }
}

/// A validated-at-construction homogeneous weight.
///
/// Construction checks parameter ranges only; symmetry and the circle bounds
/// are checked by [`validate`] so that defective tables can still be built
/// and reported on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ThetaJson", into = "ThetaJson")]
pub struct ThetaSpec {
    gamma: f64,
    kind: ThetaKind,
    lipschitz_const: f64,
    diag_pos: f64,
    diag_neg: f64,
}

impl ThetaSpec {
    pub fn radial_power(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        Ok(Self::finish(2.0 * sigma, ThetaKind::RadialPower { sigma }))
    }

    pub fn abs_sum(p: f64, gamma: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "p must be positive, got {p}"
            )));
        }
        check_gamma(gamma)?;
        Ok(Self::finish(gamma, ThetaKind::AbsSum { p }))
    }

    pub fn custom(gamma: f64, circle_values: Vec<f64>) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self::finish(
            gamma,
            ThetaKind::Custom(CircleTable::new(circle_values)?),
        ))
    }

    fn finish(gamma: f64, kind: ThetaKind) -> Self {
        let mut spec = Self {
            gamma,
            kind,
            lipschitz_const: 0.0,
            diag_pos: 0.0,
            diag_neg: 0.0,
        };
        spec.diag_pos = spec.raw(1.0, 1.0);
        spec.diag_neg = spec.raw(-1.0, -1.0);
        spec.lipschitz_const = lipschitz_estimate(&spec, 64);
        spec
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn kind(&self) -> &ThetaKind {
        &self.kind
    }

    /// Estimated constant of the Lipschitz condition at `t = ±1`.
    pub fn lipschitz_const(&self) -> f64 {
        self.lipschitz_const
    }

    /// `Θ(1, 1)` and `Θ(−1, −1)`.
    pub fn diagonal_values(&self) -> (f64, f64) {
        (self.diag_pos, self.diag_neg)
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(self.kind, ThetaKind::Custom(_))
    }

    /// Whether `Θ(−x, −y) = Θ(x, y)`.
    pub fn is_even(&self) -> bool {
        match &self.kind {
            ThetaKind::RadialPower { .. } | ThetaKind::AbsSum { .. } => true,
            ThetaKind::Custom(table) => {
                let n = table.values.len();
                n % 2 == 0
                    && (0..n / 2).all(|k| {
                        let (a, b) = (table.values[k], table.values[k + n / 2]);
                        (a - b).abs() <= TABULATED_TOL * a.abs().max(b.abs())
                    })
            }
        }
    }

    /// Tolerance the homogeneity check is held to.
    pub fn homogeneity_tol(&self) -> f64 {
        if self.is_tabulated() {
            TABULATED_TOL
        } else {
            CLOSED_FORM_TOL
        }
    }

    /// `Θ(x, y)` without input checks; the hot path of kernel assembly.
    #[inline]
    pub(crate) fn raw(&self, x: f64, y: f64) -> f64 {
        match &self.kind {
            ThetaKind::RadialPower { sigma } => {
                let r2 = x * x + y * y;
                if *sigma == 1.0 {
                    r2
                } else if *sigma == 2.0 {
                    r2 * r2
                } else {
                    r2.powf(*sigma)
                }
            }
            ThetaKind::AbsSum { p } => {
                let (ax, ay) = (x.abs(), y.abs());
                if *p == 1.0 {
                    (ax + ay).powf(self.gamma)
                } else {
                    (ax.powf(*p) + ay.powf(*p)).powf(self.gamma / p)
                }
            }
            ThetaKind::Custom(table) => {
                let r = x.hypot(y);
                if r == 0.0 {
                    0.0
                } else {
                    r.powf(self.gamma) * table.eval(y.atan2(x))
                }
            }
        }
    }

    /// `τ(x)` via the piecewise closed form `|x|^γ Θ(±1, ±1)`.
    #[inline]
    pub(crate) fn raw_tau(&self, x: f64) -> f64 {
        let diag = if x >= 0.0 {
            self.diag_pos
        } else {
            self.diag_neg
        };
        x.abs().powf(self.gamma) * diag
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "gamma must be positive, got {gamma}"
        )))
    }
}

/// `Θ(x, y)`.
pub fn eval_theta(spec: &ThetaSpec, x: f64, y: f64) -> Result<f64> {
    ensure_finite(x, "x")?;
    ensure_finite(y, "y")?;
    Ok(spec.raw(x, y))
}

/// `τ(x) = Θ(x, x)`.
pub fn tau(spec: &ThetaSpec, x: f64) -> Result<f64> {
    ensure_finite(x, "x")?;
    Ok(spec.raw_tau(x))
}

/// Outcome of [`validate`]. `passed` is false whenever `failures` is non-empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub gamma: f64,
    pub samples: usize,
    /// `max |Θ(x,y) − Θ(y,x)| / max Θ` over the circle samples.
    pub symmetry_defect: f64,
    /// `max |Θ(tx,ty) − t^γ Θ(x,y)| / (t^γ Θ(x,y))`.
    pub homogeneity_defect: f64,
    pub circle_min: f64,
    pub circle_max: f64,
    pub lipschitz_estimate: f64,
    pub asymptotics_covered: bool,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Checks symmetry, homogeneity and the circle bounds of `spec` on a
/// deterministic sample set.
pub fn validate(spec: &ThetaSpec, samples: usize) -> ValidationReport {
    let mut failures = Vec::new();
    if samples < 64 {
        failures.push(format!("at least 64 samples required, got {samples}"));
    }
    let count = samples.max(64);
    let tol = spec.homogeneity_tol();

    let mut circle_min = f64::INFINITY;
    let mut circle_max = 0.0_f64;
    let mut sym_num = 0.0_f64;
    let mut hom = 0.0_f64;
    for k in 0..count {
        // offset avoids landing only on table nodes
        let phi = 2.0 * PI * (k as f64 + 0.37) / count as f64;
        let (x, y) = (phi.cos(), phi.sin());
        let v = spec.raw(x, y);
        circle_min = circle_min.min(v);
        circle_max = circle_max.max(v);
        sym_num = sym_num.max((v - spec.raw(y, x)).abs());
        for t in [0.5_f64, 2.0, 10.0] {
            let expect = t.powf(spec.gamma) * v;
            if expect > 0.0 {
                hom = hom.max((spec.raw(t * x, t * y) - expect).abs() / expect);
            }
        }
    }
    let symmetry_defect = if circle_max > 0.0 {
        sym_num / circle_max
    } else {
        sym_num
    };

    if !(circle_min > 0.0) {
        failures.push(format!(
            "circle lower bound c = {circle_min:e} is not positive"
        ));
    }
    if symmetry_defect > tol {
        failures.push(format!(
            "symmetry defect {symmetry_defect:e} exceeds {tol:e}"
        ));
    }
    if hom > tol {
        failures.push(format!("homogeneity defect {hom:e} exceeds {tol:e}"));
    }
    if spec.raw(0.0, 0.0) != 0.0 {
        failures.push("Θ(0,0) is not zero".to_string());
    }
    let lipschitz = lipschitz_estimate(spec, count);
    if !lipschitz.is_finite() {
        failures.push("Lipschitz estimate is not finite".to_string());
    }

    ValidationReport {
        gamma: spec.gamma,
        samples: count,
        symmetry_defect,
        homogeneity_defect: hom,
        circle_min,
        circle_max,
        lipschitz_estimate: lipschitz,
        asymptotics_covered: spec.gamma >= 1.0,
        passed: failures.is_empty(),
        failures,
    }
}

/// Difference-quotient estimate of `sup |Θ(t, ±1) − Θ(±1, ±1)| / |t ∓ 1|`
/// on a window around `t = ±1`.
fn lipschitz_estimate(spec: &ThetaSpec, samples: usize) -> f64 {
    let mut best = 0.0_f64;
    for k in 1..=samples {
        let d = LIPSCHITZ_WINDOW * k as f64 / samples as f64;
        for sign in [-1.0, 1.0] {
            let t_pos = 1.0 + sign * d;
            best = best.max((spec.raw(t_pos, 1.0) - spec.diag_pos).abs() / d);
            let t_neg = -1.0 + sign * d;
            best = best.max((spec.raw(t_neg, -1.0) - spec.diag_neg).abs() / d);
        }
    }
    best
}

/// Wire form: `{"kind": ..., "gamma": ..., "params": {...}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThetaJson {
    kind: String,
    gamma: f64,
    params: ThetaParams,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThetaParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
}

impl TryFrom<ThetaJson> for ThetaSpec {
    type Error = Error;

    fn try_from(json: ThetaJson) -> Result<Self> {
        let missing =
            |name: &str| Error::InvalidParameter(format!("{} needs params.{name}", json.kind));
        match json.kind.as_str() {
            "radial_power" => {
                let sigma = json.params.sigma.ok_or_else(|| missing("sigma"))?;
                if (2.0 * sigma - json.gamma).abs() > 1e-12 * json.gamma.abs().max(1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "radial_power requires gamma = 2 sigma, got gamma {} and sigma {sigma}",
                        json.gamma
                    )));
                }
                ThetaSpec::radial_power(sigma)
            }
            "abs_sum" => ThetaSpec::abs_sum(json.params.p.ok_or_else(|| missing("p"))?, json.gamma),
            "custom" => ThetaSpec::custom(
                json.gamma,
                json.params.values.ok_or_else(|| missing("values"))?,
            ),
            other => Err(Error::InvalidParameter(format!(
                "unknown theta kind '{other}'"
            ))),
        }
    }
}

impl From<ThetaSpec> for ThetaJson {
    fn from(spec: ThetaSpec) -> Self {
        let (kind, params) = match spec.kind {
            ThetaKind::RadialPower { sigma } => (
                "radial_power",
                ThetaParams {
                    sigma: Some(sigma),
                    ..Default::default()
                },
            ),
            ThetaKind::AbsSum { p } => (
                "abs_sum",
                ThetaParams {
                    p: Some(p),
                    ..Default::default()
                },
            ),
            ThetaKind::Custom(table) => (
                "custom",
                ThetaParams {
                    values: Some(table.values),
                    ..Default::default()
                },
            ),
        };
        ThetaJson {
            kind: kind.to_string(),
            gamma: spec.gamma,
            params,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn radial(sigma: f64) -> ThetaSpec {
        ThetaSpec::radial_power(sigma).unwrap()
    }

    #[test]
    fn radial_values() {
        let th = radial(2.0);
        assert_eq!(th.gamma(), 4.0);
        assert_eq!(eval_theta(&th, 1.0, 1.0).unwrap(), 4.0);
        assert_eq!(eval_theta(&th, 2.0, 2.0).unwrap(), 64.0);
        assert_eq!(eval_theta(&th, 0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn tau_closed_form() {
        let th = radial(2.0);
        assert_eq!(tau(&th, 1.0).unwrap(), 4.0);
        assert_eq!(tau(&th, -3.0).unwrap(), 324.0);
        let th = ThetaSpec::abs_sum(1.0, 1.0).unwrap();
        assert_eq!(tau(&th, 2.0).unwrap(), 4.0);
    }

    #[test]
    fn zero_at_origin_for_every_kind() {
        let custom = ThetaSpec::custom(2.0, vec![1.0; 16]).unwrap();
        for th in [radial(0.5), ThetaSpec::abs_sum(3.0, 2.0).unwrap(), custom] {
            assert_eq!(eval_theta(&th, 0.0, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn non_finite_rejected() {
        let th = radial(1.0);
        assert!(eval_theta(&th, f64::NAN, 0.0).is_err());
        assert!(tau(&th, f64::INFINITY).is_err());
    }

    #[test]
    fn validate_radial_and_abs_sum() {
        let report = validate(&radial(1.0), 128);
        assert!(report.passed, "{:?}", report.failures);
        assert!((report.circle_min - 1.0).abs() < 1e-14);
        assert!((report.circle_max - 1.0).abs() < 1e-14);

        let report = validate(&ThetaSpec::abs_sum(2.0, 2.0).unwrap(), 64);
        assert!(report.passed);
        assert!((report.circle_min - 1.0).abs() < 1e-14 && (report.circle_max - 1.0).abs() < 1e-14);
    }

    #[test]
    fn asymmetric_table_is_flagged() {
        // f(φ) must equal f(π/2 − φ) for symmetry; a ramp in φ breaks it
        let values: Vec<f64> = (0..32)
            .map(|k| 1.0 + 0.5 * (k as f64 / 32.0 * 2.0 * PI).sin().max(0.0) + 0.1 * (k % 5) as f64)
            .collect();
        let th = ThetaSpec::custom(2.0, values).unwrap();
        let report = validate(&th, 128);
        assert!(!report.passed);
        assert!(report.symmetry_defect > TABULATED_TOL);
        assert!(report.failures.iter().any(|f| f.contains("symmetry")));
    }

    #[test]
    fn symmetric_table_passes() {
        // samples of the radial σ=1 weight on the circle are constant 1; use
        // the p=1 sum instead which is symmetric under φ ↦ π/2 − φ
        let n = 64;
        let values: Vec<f64> = (0..n)
            .map(|k| {
                let phi = 2.0 * PI * k as f64 / n as f64;
                (phi.cos().abs() + phi.sin().abs()).powi(2)
            })
            .collect();
        let th = ThetaSpec::custom(2.0, values).unwrap();
        let report = validate(&th, 256);
        assert!(report.symmetry_defect < 1e-2, "{}", report.symmetry_defect);
        assert!(report.homogeneity_defect < TABULATED_TOL);
        assert!(report.circle_min >= 1.0 - 1e-12);
        assert!(th.is_even());
    }

    #[test]
    fn too_few_samples_reported() {
        let report = validate(&radial(1.0), 10);
        assert!(!report.passed);
    }

    #[test]
    fn monotone_interpolant_stays_within_node_range() {
        let values = vec![1.0, 3.0, 2.0, 2.5, 1.5, 1.0, 4.0, 2.0];
        let table = CircleTable::new(values.clone()).unwrap();
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(0.0, f64::max);
        for k in 0..1000 {
            let v = table.eval(2.0 * PI * k as f64 / 1000.0);
            assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
        }
        for (k, v) in values.iter().enumerate() {
            assert!((table.eval(2.0 * PI * k as f64 / 8.0) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn json_round_trip_and_schema() {
        let th = ThetaSpec::abs_sum(1.0, 1.0).unwrap();
        let s = serde_json::to_string(&th).unwrap();
        assert_eq!(s, r#"{"kind":"abs_sum","gamma":1.0,"params":{"p":1.0}}"#);
        let back: ThetaSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, th);

        let bad = r#"{"kind":"radial_power","gamma":3.0,"params":{"sigma":2.0}}"#;
        assert!(serde_json::from_str::<ThetaSpec>(bad).is_err());
        let unknown = r#"{"kind":"cubic","gamma":3.0,"params":{}}"#;
        assert!(serde_json::from_str::<ThetaSpec>(unknown).is_err());
    }

    #[test]
    fn lipschitz_constant_of_radial() {
        // d/dt (t² + 1)² at t = 1 is 8
        let th = radial(2.0);
        assert!(
            (th.lipschitz_const() - 8.0).abs() < 1.5,
            "{}",
            th.lipschitz_const()
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn closed_forms() -> Vec<ThetaSpec> {
            vec![
                radial(0.5),
                radial(1.0),
                radial(2.0),
                radial(1.7),
                ThetaSpec::abs_sum(1.0, 1.0).unwrap(),
                ThetaSpec::abs_sum(1.0, 2.0).unwrap(),
                ThetaSpec::abs_sum(3.0, 2.5).unwrap(),
            ]
        }

        proptest! {
            #[test]
            fn homogeneity(x in -50.0..50.0f64, y in -50.0..50.0f64, ti in 0usize..4) {
                let t = [0.5, 1.0, 2.0, 10.0][ti];
                for th in closed_forms() {
                    let base = th.raw(x, y);
                    let scaled = th.raw(t * x, t * y);
                    let expect = t.powf(th.gamma()) * base;
                    prop_assert!((scaled - expect).abs() <= 1e-12 * expect.abs().max(f64::MIN_POSITIVE));
                }
            }

            #[test]
            fn symmetry_exact(x in -50.0..50.0f64, y in -50.0..50.0f64) {
                for th in closed_forms() {
                    prop_assert_eq!(th.raw(x, y), th.raw(y, x));
                }
            }

            #[test]
            fn tau_matches_diagonal(x in -1.0e3..1.0e3f64) {
                for th in closed_forms() {
                    let d = th.raw(x, x);
                    prop_assert!((th.raw_tau(x) - d).abs() <= 1e-12 * d.abs().max(f64::MIN_POSITIVE));
                }
            }
        }
    }

    #[test]
    fn tau_even_iff_diagonals_agree() {
        let th = radial(1.5);
        assert_eq!(th.raw_tau(2.0), th.raw_tau(-2.0));
        // table whose values at π/4 and 5π/4 differ
        let mut values = vec![1.0; 8];
        values[1] = 2.0;
        values[5] = 1.0;
        let th = ThetaSpec::custom(2.0, values).unwrap();
        let (p, n) = th.diagonal_values();
        assert!(p != n);
        assert!(th.raw_tau(1.5) != th.raw_tau(-1.5));
        assert!(!th.is_even());
    }
}
