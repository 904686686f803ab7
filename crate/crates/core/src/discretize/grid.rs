use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Equispaced nodes including both endpoints, trapezoid weights.
    TrapezoidUniform,
    /// Composite Gauss–Legendre panels.
    GaussLegendreComposite,
    /// Periodic grid `−L + jh`, `h = 2L/n`, `n` a power of two.
    FourierCollocation,
    /// Midpoint nodes `−L + (j+½)h` treated as a sinc (band-limited) basis.
    BandLimited,
}

impl Scheme {
    pub fn is_quadrature(self) -> bool {
        !matches!(self, Scheme::FourierCollocation)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    cutoff_l: f64,
    scheme: Scheme,
}

impl Grid {
    /// Trapezoid rule on `[−L, L]` with `n` nodes. A single node sits at 0
    /// with weight `2L`.
    pub fn trapezoid(cutoff_l: f64, n: usize) -> Result<Self> {
        check_cutoff(cutoff_l)?;
        check_count(n)?;
        if n == 1 {
            return Ok(Self {
                nodes: vec![0.0],
                weights: vec![2.0 * cutoff_l],
                cutoff_l,
                scheme: Scheme::TrapezoidUniform,
            });
        }
        let h = 2.0 * cutoff_l / (n - 1) as f64;
        let nodes = symmetric_nodes(n, |j| -cutoff_l + j as f64 * h);
        let mut weights = vec![h; n];
        weights[0] = 0.5 * h;
        weights[n - 1] = 0.5 * h;
        Ok(Self {
            nodes,
            weights,
            cutoff_l,
            scheme: Scheme::TrapezoidUniform,
        })
    }

    /// `panels` equal panels of `order`-point Gauss–Legendre.
    pub fn gauss_legendre(cutoff_l: f64, panels: usize, order: usize) -> Result<Self> {
        check_cutoff(cutoff_l)?;
        check_count(panels)?;
        check_count(order)?;
        let (t, w) = gauss_legendre_nodes(order);
        let width = 2.0 * cutoff_l / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let mid = -cutoff_l + (p as f64 + 0.5) * width;
            for (ti, wi) in t.iter().zip(&w) {
                nodes.push(mid + 0.5 * width * ti);
                weights.push(0.5 * width * wi);
            }
        }
        Ok(Self {
            nodes,
            weights,
            cutoff_l,
            scheme: Scheme::GaussLegendreComposite,
        })
    }

    /// Periodic collocation grid with `n` a power of two.
    pub fn fourier(cutoff_l: f64, n: usize) -> Result<Self> {
        check_cutoff(cutoff_l)?;
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "collocation size must be a power of two ≥ 2, got {n}"
            )));
        }
        let h = 2.0 * cutoff_l / n as f64;
        let nodes = (0..n).map(|j| -cutoff_l + j as f64 * h).collect();
        Ok(Self {
            nodes,
            weights: vec![h; n],
            cutoff_l,
            scheme: Scheme::FourierCollocation,
        })
    }

    /// Midpoint grid of `n` cells on `[−L, L]`.
    pub fn band_limited(cutoff_l: f64, n: usize) -> Result<Self> {
        check_cutoff(cutoff_l)?;
        check_count(n)?;
        let h = 2.0 * cutoff_l / n as f64;
        let nodes = symmetric_nodes(n, |j| -cutoff_l + (j as f64 + 0.5) * h);
        Ok(Self {
            nodes,
            weights: vec![h; n],
            cutoff_l,
            scheme: Scheme::BandLimited,
        })
    }

    /// Band-limited grid with step at most `h_max`.
    pub fn band_limited_step(cutoff_l: f64, h_max: f64) -> Result<Self> {
        check_cutoff(cutoff_l)?;
        if !(h_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "step must be positive, got {h_max}"
            )));
        }
        let n = (2.0 * cutoff_l / h_max).ceil() as usize;
        Self::band_limited(cutoff_l, n.max(1))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cutoff_l(&self) -> f64 {
        self.cutoff_l
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Uniform spacing for equispaced schemes.
    pub fn step(&self) -> Option<f64> {
        match self.scheme {
            Scheme::GaussLegendreComposite => None,
            Scheme::TrapezoidUniform if self.len() == 1 => Some(2.0 * self.cutoff_l),
            Scheme::TrapezoidUniform => Some(self.nodes[1] - self.nodes[0]),
            Scheme::FourierCollocation | Scheme::BandLimited => Some(self.weights[0]),
        }
    }

    /// True when `x_{n−1−i} = −x_i` for every node.
    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| self.nodes[i] == -self.nodes[n - 1 - i])
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self == other
    }
}

fn check_cutoff(l: f64) -> Result<()> {
    ensure_finite(l, "cutoff L")?;
    if l > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "cutoff L must be positive, got {l}"
        )))
    }
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidParameter(
            "grid needs at least one node".into(),
        ))
    } else {
        Ok(())
    }
}

/// Builds nodes from the left half and mirrors them, so the grid is exactly
/// symmetric about 0.
fn symmetric_nodes(n: usize, f: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut nodes = vec![0.0; n];
    for j in 0..n / 2 {
        let x = f(j);
        nodes[j] = x;
        nodes[n - 1 - j] = -x;
    }
    nodes
}

/// Nodes and weights of the `m`-point Gauss–Legendre rule on `[−1, 1]`.
pub fn gauss_legendre_nodes(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut t = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(m, x);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - x * x) * dp * dp);
        t[i] = -x;
        t[m - 1 - i] = x;
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    if m % 2 == 1 {
        t[m / 2] = 0.0;
    }
    (t, w)
}

/// `(P_m(x), P_m'(x))` by the three-term recurrence.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    (p1, m as f64 * (x * p1 - p0) / (x * x - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum(v: &[f64]) -> f64 {
        v.iter().sum()
    }

    #[test]
    fn weights_sum_to_length() {
        for g in [
            Grid::trapezoid(3.0, 101).unwrap(),
            Grid::gauss_legendre(3.0, 7, 9).unwrap(),
            Grid::band_limited(3.0, 64).unwrap(),
            Grid::trapezoid(3.0, 1).unwrap(),
        ] {
            assert!(
                (sum(g.weights()) - 6.0).abs() < 1e-12 * 6.0,
                "{:?}",
                g.scheme()
            );
            assert!(g.nodes().windows(2).all(|p| p[0] < p[1]));
            assert!(g.nodes().iter().all(|x| x.abs() <= 3.0));
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (t, w) = gauss_legendre_nodes(6);
        for k in 0..12 {
            let exact = if k % 2 == 0 {
                2.0 / (k as f64 + 1.0)
            } else {
                0.0
            };
            let q: f64 = t.iter().zip(&w).map(|(x, wi)| wi * x.powi(k)).sum();
            assert!((q - exact).abs() < 1e-14, "degree {k}");
        }
        let (t1, w1) = gauss_legendre_nodes(1);
        assert_eq!((t1[0], w1[0]), (0.0, 2.0));
    }

    #[test]
    fn fourier_grid_shape() {
        let g = Grid::fourier(2.0, 8).unwrap();
        assert_eq!(g.nodes()[0], -2.0);
        assert_eq!(g.step(), Some(0.5));
        assert!(Grid::fourier(2.0, 12).is_err());
        assert!(!g.is_symmetric());
        assert!(Grid::band_limited(2.0, 9).unwrap().is_symmetric());
        assert!(Grid::trapezoid(2.0, 10).unwrap().is_symmetric());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Grid::trapezoid(0.0, 4).is_err());
        assert!(Grid::trapezoid(f64::NAN, 4).is_err());
        assert!(Grid::band_limited(1.0, 0).is_err());
    }
}
