use serde::{Deserialize, Serialize};

use super::EigenPair;

/// Relative gap below which an extreme eigenvalue is not called simple.
pub const SIMPLICITY_REL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PerronMode {
    /// Every entry strictly positive.
    Strict,
    /// Entries down to `−tol·‖v‖_∞` are accepted; meant for eigenvectors whose
    /// tails reach the truncation boundary.
    BoundaryTolerant { tol: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerronReport {
    pub positive: bool,
    pub min_entry: f64,
    pub max_entry: f64,
    /// Entries below the accepted floor.
    pub negative_entries: usize,
    /// Sign changes between consecutive entries beyond the accepted floor.
    pub sign_changes: usize,
    pub gap: f64,
    pub simple: bool,
    pub passed: bool,
}

/// Positivity and simplicity check of an extreme eigenpair. The vector is
/// sign-normalized first (largest-magnitude entry positive).
pub fn perron_certify(pair: &EigenPair, gap: f64, mode: PerronMode) -> PerronReport {
    let mut v = pair.vector.clone();
    super::normalize_sign(&mut v);
    let max_abs = v.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let floor = match mode {
        PerronMode::Strict => 0.0,
        PerronMode::BoundaryTolerant { tol } => tol * max_abs,
    };
    let min_entry = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_entry = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let negative_entries = match mode {
        PerronMode::Strict => v.iter().filter(|x| **x <= 0.0).count(),
        PerronMode::BoundaryTolerant { .. } => v.iter().filter(|x| **x < -floor).count(),
    };
    let significant: Vec<f64> = v.iter().cloned().filter(|x| x.abs() > floor).collect();
    let sign_changes = significant
        .windows(2)
        .filter(|w| w[0].signum() != w[1].signum())
        .count();
    let positive = negative_entries == 0 && !v.is_empty();
    let simple = gap > SIMPLICITY_REL * pair.value.abs();
    PerronReport {
        positive,
        min_entry,
        max_entry,
        negative_entries,
        sign_changes,
        gap,
        simple,
        passed: positive && simple,
    }
}
