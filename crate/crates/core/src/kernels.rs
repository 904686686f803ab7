//! Kernel families.
//!
//! Every kernel here is a scaled Lorentzian in `s = x − y`:
//! `k(x, y) = (c / π) / (t² + s²)` with an amplitude `c` and a width `t` that
//! may depend on `(x, y)`. [`KernelSpec::width`] exposes `t`, which the
//! band-limited Nyström scheme needs.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::theta::ThetaSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelFamily {
    /// `(1/π) / (1 + (x−y)² + β² Θ(x,y))`.
    #[serde(rename = "K_beta")]
    KBeta,
    /// `(α/π) / (α² + (x−y)² + α³ Θ(x,y))`.
    #[serde(rename = "B_alpha")]
    BAlpha,
    /// `(1/π) / (1 + (x−y)² + β² τ(x))`.
    #[serde(rename = "K_beta_desym")]
    KBetaDesym,
    /// `(α/π) / (α² + (x−y)² + α³ τ(x))`.
    #[serde(rename = "B_alpha_desym")]
    BAlphaDesym,
    /// `(α/π) / (α² + (x−y)² + h)`.
    #[serde(rename = "S_alpha_h")]
    SAlphaH,
    /// `(t/π) / (t² + (x−y)²)`.
    #[serde(rename = "m_t")]
    MT,
}

impl KernelFamily {
    pub fn is_symmetric(self) -> bool {
        !matches!(self, KernelFamily::KBetaDesym | KernelFamily::BAlphaDesym)
    }

    fn needs_theta(self) -> bool {
        matches!(
            self,
            KernelFamily::KBeta
                | KernelFamily::BAlpha
                | KernelFamily::KBetaDesym
                | KernelFamily::BAlphaDesym
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaSpec>,
    /// `β` for the K family, `α` for B and S, `t` for `m_t`.
    pub beta_or_alpha: f64,
    /// Shift of `S_α(·; h)`; zero elsewhere.
    #[serde(default)]
    pub h: f64,
}

impl KernelSpec {
    pub fn new(
        family: KernelFamily,
        theta: Option<ThetaSpec>,
        beta_or_alpha: f64,
        h: f64,
    ) -> Result<Self> {
        ensure_finite(beta_or_alpha, "kernel parameter")?;
        ensure_finite(h, "kernel shift")?;
        if family.needs_theta() != theta.is_some() {
            return Err(Error::InvalidParameter(format!(
                "{family:?} {} a weight Θ",
                if family.needs_theta() {
                    "requires"
                } else {
                    "does not take"
                }
            )));
        }
        let ok = match family {
            KernelFamily::KBeta => beta_or_alpha >= 0.0,
            _ => beta_or_alpha > 0.0,
        };
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "{family:?} parameter must be positive, got {beta_or_alpha}"
            )));
        }
        if h < 0.0 || (h != 0.0 && family != KernelFamily::SAlphaH) {
            return Err(Error::InvalidParameter(format!(
                "invalid shift h = {h} for {family:?}"
            )));
        }
        Ok(Self {
            family,
            theta,
            beta_or_alpha,
            h,
        })
    }

    pub fn k_beta(theta: ThetaSpec, beta: f64) -> Result<Self> {
        Self::new(KernelFamily::KBeta, Some(theta), beta, 0.0)
    }

    pub fn b_alpha(theta: ThetaSpec, alpha: f64) -> Result<Self> {
        Self::new(KernelFamily::BAlpha, Some(theta), alpha, 0.0)
    }

    pub fn k_beta_desym(theta: ThetaSpec, beta: f64) -> Result<Self> {
        Self::new(KernelFamily::KBetaDesym, Some(theta), beta, 0.0)
    }

    pub fn b_alpha_desym(theta: ThetaSpec, alpha: f64) -> Result<Self> {
        Self::new(KernelFamily::BAlphaDesym, Some(theta), alpha, 0.0)
    }

    pub fn s_alpha(alpha: f64, h: f64) -> Result<Self> {
        Self::new(KernelFamily::SAlphaH, None, alpha, h)
    }

    pub fn m_t(t: f64) -> Result<Self> {
        Self::new(KernelFamily::MT, None, t, 0.0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.family.is_symmetric()
    }

    /// The anisotropic part of the denominator: `β²Θ`, `α³Θ`, `β²τ(x)`, ...
    #[inline]
    fn anisotropy(&self, x: f64, y: f64) -> f64 {
        let p = self.beta_or_alpha;
        match (self.family, &self.theta) {
            (KernelFamily::KBeta, Some(th)) => p * p * th.raw(x, y),
            (KernelFamily::BAlpha, Some(th)) => p * p * p * th.raw(x, y),
            (KernelFamily::KBetaDesym, Some(th)) => p * p * th.raw_tau(x),
            (KernelFamily::BAlphaDesym, Some(th)) => p * p * p * th.raw_tau(x),
            (KernelFamily::SAlphaH, _) => self.h,
            _ => 0.0,
        }
    }

    /// `(c, t0²)`: amplitude numerator and the isotropic part of the denominator.
    #[inline]
    fn base(&self) -> (f64, f64) {
        let p = self.beta_or_alpha;
        match self.family {
            KernelFamily::KBeta | KernelFamily::KBetaDesym => (1.0, 1.0),
            KernelFamily::BAlpha | KernelFamily::BAlphaDesym | KernelFamily::SAlphaH => (p, p * p),
            KernelFamily::MT => (p, p * p),
        }
    }

    /// Kernel value without input checks.
    #[inline]
    pub(crate) fn value(&self, x: f64, y: f64) -> f64 {
        let (c, t0sq) = self.base();
        let s = x - y;
        c / (PI * (t0sq + s * s + self.anisotropy(x, y)))
    }

    /// Lorentzian width `t(x, y) = sqrt(t0² + anisotropy)`.
    #[inline]
    pub fn width(&self, x: f64, y: f64) -> f64 {
        let (_, t0sq) = self.base();
        (t0sq + self.anisotropy(x, y)).sqrt()
    }

    /// Upper bound of the kernel: its value at `x = y` with no anisotropy.
    pub fn peak(&self) -> f64 {
        let (c, t0sq) = self.base();
        c / (PI
            * (t0sq
                + if self.family == KernelFamily::SAlphaH {
                    self.h
                } else {
                    0.0
                }))
    }
}

/// `k(x, y)` for the given family.
pub fn eval_kernel(spec: &KernelSpec, x: f64, y: f64) -> Result<f64> {
    ensure_finite(x, "x")?;
    ensure_finite(y, "y")?;
    Ok(spec.value(x, y))
}

/// `α = β^{2/(γ+1)}`.
pub fn rescale_beta_to_alpha(beta: f64, gamma: f64) -> Result<f64> {
    check_positive(beta, "beta")?;
    check_positive(gamma, "gamma")?;
    Ok(beta.powf(2.0 / (gamma + 1.0)))
}

/// Inverse of [`rescale_beta_to_alpha`]: `β = α^{(γ+1)/2}`.
pub fn rescale_alpha_to_beta(alpha: f64, gamma: f64) -> Result<f64> {
    check_positive(alpha, "alpha")?;
    check_positive(gamma, "gamma")?;
    Ok(alpha.powf((gamma + 1.0) / 2.0))
}

/// Unitary Fourier transform of `m_t`: `e^{−t|ξ|} / √(2π)`.
pub fn fourier_m_hat(t: f64, xi: f64) -> Result<f64> {
    check_positive(t, "t")?;
    ensure_finite(xi, "xi")?;
    Ok((-t * xi.abs()).exp() / (2.0 * PI).sqrt())
}

/// `m_t(x) = (t/π) / (t² + x²)`.
pub fn m_t(t: f64, x: f64) -> f64 {
    t / (PI * (t * t + x * x))
}

fn check_positive(v: f64, what: &'static str) -> Result<()> {
    ensure_finite(v, what)?;
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{what} must be positive, got {v}"
        )))
    }
}
