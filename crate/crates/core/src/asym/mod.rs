//! Small-β asymptotics of `K_β`: sweeps over β, power-law fits, eigenfunction
//! convergence, localization, parity and the open questions on higher
//! eigenvalues and negative spectrum.

mod conjecture;
mod fit;
mod function;
mod localization;
mod negative;
mod parity;
mod policy;
mod sweep;

pub use conjecture::{
    conjecture_61, ConjectureReport, ConjectureRow, DEGENERATE_GAP, MAX_J, TRACK_OVERLAP,
};
pub use fit::{fit_line, fit_power_law, richardson3, FitResult, FitWindow, Line, Richardson};
pub use function::{function_distance, EigenFunction, OVERLAP_MASS_TOL};
pub use localization::{localization_report, FourierMass, LocalizationReport, SpatialMass};
pub use negative::{min_eigenvalue, negative_scan, NegativeRow, NegativeScanReport};
pub use parity::{parity_blocks, parity_split, ParityReport, BLOCK_CHECK_MAX_N};
pub use policy::GridPolicy;
pub use sweep::{
    direct_m_beta, model_lambdas, model_reference, solve_b_alpha, sweep, sweep_point,
    ModelReference, ReferencePolicy, Sweep, SweepRecord, SWEEP_TOL,
};

use crate::eigen::EigenPair;
use crate::error::Result;

/// `‖ψ_α − φ₁‖₂` between a sweep's eigenfunction and a model eigenfunction.
pub fn eigenfunction_distance(record: &SweepRecord, phi1: &EigenFunction) -> Result<f64> {
    function_distance(&record.psi, phi1)
}

/// As [`eigenfunction_distance`], with `φ₁` given as an eigenpair on `grid`.
pub fn eigenfunction_distance_pair(
    record: &SweepRecord,
    phi1: &EigenPair,
    grid: &crate::discretize::Grid,
) -> Result<f64> {
    function_distance(&record.psi, &EigenFunction::from_pair(phi1, grid)?)
}
