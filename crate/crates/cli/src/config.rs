use std::path::{Path, PathBuf};

use anisospec_core::asym::{FitWindow, GridPolicy, ReferencePolicy};
use anisospec_core::discretize::{Potential, Scheme};
use anisospec_core::kernels::KernelFamily;
use anisospec_core::theta::ThetaSpec;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    ModelEigs,
    TopEigs,
    Sweep,
    Fit,
    DesymGap,
    Localization,
    Parity,
    Conjecture,
    NegativeScan,
    ValidateTheta,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::ModelEigs => "model-eigs",
            Command::TopEigs => "top-eigs",
            Command::Sweep => "sweep",
            Command::Fit => "fit",
            Command::DesymGap => "desym-gap",
            Command::Localization => "localization",
            Command::Parity => "parity",
            Command::Conjecture => "conjecture",
            Command::NegativeScan => "negative-scan",
            Command::ValidateTheta => "validate-theta",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Plotdata,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Auto {
    #[serde(rename = "auto")]
    Auto,
}

/// A cutoff `L`, either explicit or resolved by the truncation rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cutoff {
    Fixed(f64),
    Rule(Auto),
}

impl Default for Cutoff {
    fn default() -> Self {
        Cutoff::Rule(Auto::Auto)
    }
}

impl Cutoff {
    pub fn fixed(self) -> Option<f64> {
        match self {
            Cutoff::Fixed(l) => Some(l),
            Cutoff::Rule(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numeric {
    pub betas: Option<Vec<f64>>,
    /// Alternative to `betas`, converted with `β = α^{(γ+1)/2}`.
    pub alphas: Option<Vec<f64>>,
    pub n: Option<usize>,
    pub cutoff_l: Cutoff,
    /// Eigenpairs per solve.
    pub k: usize,
    pub vark: f64,
    pub grid: GridPolicy,
    pub reference: ReferencePolicy,
    /// `model-eigs`: operator potential, `τ/2` of `theta` when absent.
    pub potential: Option<Potential>,
    /// `model-eigs`: `band_limited` or `fourier_collocation`.
    pub scheme: Scheme,
    /// `model-eigs`: three cutoffs at fixed `n` for Richardson extrapolation.
    pub richardson_l: Option<[f64; 3]>,
    /// `model-eigs`: value that `λ₁` is compared against.
    pub target: Option<f64>,
    pub target_tol: f64,
    /// `model-eigs`: further potentials compared against `target`.
    pub candidates: Vec<Potential>,
    /// `top-eigs`: kernel family, discretized at the first β (or its α).
    pub kernel: KernelFamily,
    /// `fit`: CSV written by a previous `sweep`; the sweep is rerun when absent.
    pub input: Option<PathBuf>,
    pub fit_window: FitWindow,
    /// `fit`: relative tolerance on the exponent `2/(γ+1)`; report-only when absent.
    pub exponent_tol: Option<f64>,
    /// `desym-gap`: largest tolerated growth of the ratio per halving of β.
    pub growth_tol: f64,
    /// `localization`: multiples of `λ₁` used as Fourier radii.
    pub fourier_radii: Vec<f64>,
    pub spatial_radii: Vec<f64>,
    /// `localization`: how many of the smallest α are examined.
    pub smallest: usize,
    /// `localization`: required spatial decay exponent is `γ − decay_slack`.
    pub decay_slack: f64,
    /// `conjecture`.
    pub j_max: usize,
    /// `validate-theta`.
    pub samples: usize,
}

impl Default for Numeric {
    fn default() -> Self {
        Self {
            betas: None,
            alphas: None,
            n: None,
            cutoff_l: Cutoff::default(),
            k: 1,
            vark: anisospec_core::symbols::DEFAULT_VARK,
            grid: GridPolicy::default(),
            reference: ReferencePolicy::default(),
            potential: None,
            scheme: Scheme::BandLimited,
            richardson_l: None,
            target: None,
            target_tol: 2e-2,
            candidates: Vec::new(),
            kernel: KernelFamily::BAlpha,
            input: None,
            fit_window: FitWindow::SmallestHalf,
            exponent_tol: None,
            growth_tol: 0.10,
            fourier_radii: vec![8.0, 16.0, 32.0],
            spatial_radii: vec![2.0, 4.0, 8.0],
            smallest: 3,
            decay_slack: 0.5,
            j_max: 3,
            samples: 720,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Json, Format::Plotdata],
        }
    }
}

impl OutputSpec {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub theta: ThetaSpec,
    #[serde(default)]
    pub numeric: Numeric,
    #[serde(default)]
    pub output: OutputSpec,
}

/// Command-line values that replace config fields.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub command: Option<Command>,
    pub betas: Option<Vec<f64>>,
    pub n: Option<usize>,
    pub cutoff_l: Option<f64>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(c) = o.command {
            self.command = c;
        }
        if let Some(b) = &o.betas {
            self.numeric.betas = Some(b.clone());
            self.numeric.alphas = None;
        }
        if let Some(n) = o.n {
            self.numeric.n = Some(n);
        }
        if let Some(l) = o.cutoff_l {
            self.numeric.cutoff_l = Cutoff::Fixed(l);
        }
        if let Some(out) = &o.out {
            self.output.dir = out.clone();
        }
    }

    /// SHA-256 over the semantic part of the config (everything but `output`).
    pub fn hash(&self) -> String {
        let semantic = serde_json::json!({
            "command": self.command,
            "theta": self.theta,
            "numeric": self.numeric,
        });
        let digest = Sha256::digest(serde_json::to_vec(&semantic).expect("config serializes"));
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Lanczos seed taken from the first eight bytes of the hash.
    pub fn seed(&self) -> u64 {
        u64::from_str_radix(&self.hash()[..16], 16).expect("hex digest")
    }

    /// β list, from `betas` or converted from `alphas`.
    pub fn betas(&self) -> Result<Vec<f64>, CliError> {
        let gamma = self.theta.gamma();
        match (&self.numeric.betas, &self.numeric.alphas) {
            (Some(b), _) if !b.is_empty() => Ok(b.clone()),
            (_, Some(a)) if !a.is_empty() => a
                .iter()
                .map(|&a| Ok(anisospec_core::kernels::rescale_alpha_to_beta(a, gamma)?))
                .collect(),
            _ => Err(CliError::Usage(format!(
                "{} needs numeric.betas or numeric.alphas",
                self.command.name()
            ))),
        }
    }

    /// Grid policy with the `n`/`L` overrides and the config-derived seed.
    pub fn policy(&self) -> GridPolicy {
        let mut p = self.numeric.grid.clone();
        if let Some(l) = self.numeric.cutoff_l.fixed() {
            p.fixed_l = Some(l);
        }
        if let Some(n) = self.numeric.n {
            p.fixed_n = Some(n);
        }
        p.eigen.seed = self.seed();
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "command": "sweep",
        "theta": {"kind": "radial_power", "gamma": 4, "params": {"sigma": 2}},
        "numeric": {"betas": [0.1, 0.05], "cutoff_l": "auto"}
    }"#;

    #[test]
    fn round_trip() {
        let c = ExperimentConfig::from_json(MINIMAL).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
        assert_eq!(c.numeric.cutoff_l, Cutoff::Rule(Auto::Auto));
    }

    #[test]
    fn hash_tracks_semantic_fields_only() {
        let c = ExperimentConfig::from_json(MINIMAL).unwrap();
        let mut moved = c.clone();
        moved.apply(&Overrides {
            out: Some("elsewhere".into()),
            ..Default::default()
        });
        assert_eq!(c.hash(), moved.hash());
        let mut changed = c.clone();
        changed.apply(&Overrides {
            n: Some(512),
            ..Default::default()
        });
        assert_ne!(c.hash(), changed.hash());
        changed.numeric.n = None;
        assert_eq!(c.hash(), changed.hash());
    }

    #[test]
    fn unknown_fields_are_usage_errors() {
        let bad = MINIMAL.replace("\"betas\"", "\"betaz\"");
        assert!(matches!(
            ExperimentConfig::from_json(&bad),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn alphas_convert_to_betas() {
        let text = MINIMAL.replace("\"betas\": [0.1, 0.05]", "\"alphas\": [0.25]");
        let c = ExperimentConfig::from_json(&text).unwrap();
        // γ = 4: β = α^{5/2}
        assert!((c.betas().unwrap()[0] - 0.25f64.powf(2.5)).abs() < 1e-15);
    }

    #[test]
    fn numeric_cutoff() {
        let text = MINIMAL.replace("\"auto\"", "12.5");
        let c = ExperimentConfig::from_json(&text).unwrap();
        assert_eq!(c.policy().fixed_l, Some(12.5));
    }
}
