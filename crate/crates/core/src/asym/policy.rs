use serde::{Deserialize, Serialize};

use crate::discretize::Grid;
use crate::eigen::EigenOptions;
use crate::error::{Error, Result};
use crate::theta::ThetaSpec;

/// Maps `α` to the grid on which `B_α` is discretized.
///
/// The cutoff solves `α τ(L) = tail_ratio`, i.e. the kernel at distance `L`
/// is `tail_ratio` times smaller than its peak, clamped to `[l_min, l_max]`.
/// The grid is band-limited with step `max_step`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridPolicy {
    pub tail_ratio: f64,
    pub l_min: f64,
    pub l_max: f64,
    pub max_step: f64,
    pub max_nodes: usize,
    /// Overrides the cutoff rule.
    pub fixed_l: Option<f64>,
    /// Overrides the step rule.
    pub fixed_n: Option<usize>,
    /// Re-solve at `2n` and flag shifts of the top eigenvalue above `refine_tol`.
    pub refine: bool,
    pub refine_tol: f64,
    pub eigen: EigenOptions,
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self {
            tail_ratio: 1e4,
            l_min: 8.0,
            l_max: 16.0,
            max_step: 0.05,
            max_nodes: 4096,
            fixed_l: None,
            fixed_n: None,
            refine: true,
            refine_tol: 1e-7,
            eigen: EigenOptions {
                dense_max_n: 2048,
                ..EigenOptions::default()
            },
        }
    }
}

impl GridPolicy {
    pub fn fixed(cutoff_l: f64, n: usize) -> Self {
        Self {
            fixed_l: Some(cutoff_l),
            fixed_n: Some(n),
            ..Self::default()
        }
    }

    /// Cutoff `L` for the given `α`.
    pub fn cutoff(&self, theta: &ThetaSpec, alpha: f64) -> f64 {
        if let Some(l) = self.fixed_l {
            return l;
        }
        let (p, m) = theta.diagonal_values();
        let tau1 = p.min(m);
        let l = (self.tail_ratio / (alpha * tau1)).powf(1.0 / theta.gamma());
        l.clamp(self.l_min, self.l_max)
    }

    /// Node count: an even number keeps the midpoint grid symmetric without a node at 0.
    pub fn nodes(&self, cutoff_l: f64) -> Result<usize> {
        let n = match self.fixed_n {
            Some(n) => n,
            None => {
                let n = (2.0 * cutoff_l / self.max_step).ceil() as usize;
                n + n % 2
            }
        };
        if n == 0 || n > self.max_nodes {
            return Err(Error::InvalidParameter(format!(
                "grid policy asks for {n} nodes, limit is {}",
                self.max_nodes
            )));
        }
        Ok(n)
    }

    pub fn grid(&self, theta: &ThetaSpec, alpha: f64) -> Result<Grid> {
        let l = self.cutoff(theta, alpha);
        Grid::band_limited(l, self.nodes(l)?)
    }
}
