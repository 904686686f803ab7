use serde::{Deserialize, Serialize};

use crate::discretize::Grid;
use crate::eigen::{normalize_sign, EigenPair};
use crate::error::{Error, Result};

/// Samples of an L²-normalized function on a grid.
///
/// An eigenvector `v` of a weighted matrix `√w k √w` represents the function
/// with values `v_i / √w_i`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EigenFunction {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub values: Vec<f64>,
}

impl EigenFunction {
    pub fn from_pair(pair: &EigenPair, grid: &Grid) -> Result<Self> {
        if pair.vector.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "vector has {} entries, grid has {} nodes",
                pair.vector.len(),
                grid.len()
            )));
        }
        let mut v = pair.vector.clone();
        normalize_sign(&mut v);
        let values = v
            .iter()
            .zip(grid.weights())
            .map(|(x, w)| x / w.sqrt())
            .collect();
        let mut f = Self {
            nodes: grid.nodes().to_vec(),
            weights: grid.weights().to_vec(),
            values,
        };
        f.normalize();
        Ok(f)
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.values.iter_mut().for_each(|v| *v /= n);
        }
    }

    pub fn norm(&self) -> f64 {
        self.mass_where(|_| true).sqrt()
    }

    /// `Σ w_i f_i²` over nodes satisfying `keep`.
    pub fn mass_where(&self, keep: impl Fn(f64) -> bool) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.values)
            .filter(|((x, _), _)| keep(**x))
            .map(|((_, w), v)| w * v * v)
            .sum()
    }

    /// Linear interpolation, zero outside the node range.
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.nodes.len();
        if n == 0 || x < self.nodes[0] || x > self.nodes[n - 1] {
            return 0.0;
        }
        let k = self.nodes.partition_point(|&t| t <= x);
        if k == 0 {
            return self.values[0];
        }
        if k == n {
            return self.values[n - 1];
        }
        let (x0, x1) = (self.nodes[k - 1], self.nodes[k]);
        let t = (x - x0) / (x1 - x0);
        self.values[k - 1] * (1.0 - t) + self.values[k] * t
    }

    pub fn support(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }

    /// `⟨f, g⟩` on the nodes of `self`, `g` interpolated.
    pub fn inner(&self, other: &EigenFunction) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.values)
            .map(|((x, w), v)| w * v * other.interpolate(*x))
            .sum()
    }
}

/// Mass allowed outside the common support before the comparison is refused.
pub const OVERLAP_MASS_TOL: f64 = 1e-6;

/// `‖ψ − φ‖₂` with `φ` interpolated onto the nodes of `ψ` inside the common
/// support. Both functions are sign-normalized to a positive largest entry.
pub fn function_distance(psi: &EigenFunction, phi: &EigenFunction) -> Result<f64> {
    let (a0, a1) = psi.support();
    let (b0, b1) = phi.support();
    let (lo, hi) = (a0.max(b0), a1.min(b1));
    if lo >= hi {
        return Err(Error::InsufficientOverlap("supports are disjoint".into()));
    }
    let outside = |f: &EigenFunction| f.mass_where(|x| x < lo || x > hi);
    let (mp, mf) = (outside(psi), outside(phi));
    if mp > OVERLAP_MASS_TOL || mf > OVERLAP_MASS_TOL {
        return Err(Error::InsufficientOverlap(format!(
            "mass outside [{lo}, {hi}]: {mp:.3e} (ψ), {mf:.3e} (φ)"
        )));
    }
    let sign = |f: &EigenFunction| {
        let lead = f
            .values
            .iter()
            .cloned()
            .fold(0.0_f64, |a, v| if v.abs() > a.abs() { v } else { a });
        if lead < 0.0 {
            -1.0
        } else {
            1.0
        }
    };
    let (sp, sf) = (sign(psi), sign(phi));
    let d2: f64 = psi
        .nodes
        .iter()
        .zip(&psi.weights)
        .zip(&psi.values)
        .filter(|((x, _), _)| **x >= lo && **x <= hi)
        .map(|((x, w), v)| w * (sp * v - sf * phi.interpolate(*x)).powi(2))
        .sum();
    Ok(d2.sqrt())
}
