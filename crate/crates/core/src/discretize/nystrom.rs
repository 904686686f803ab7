use std::f64::consts::PI;

use rayon::prelude::*;

use super::{DiscreteOperator, Grid, Provenance, Scheme, Source};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::linalg::DenseMatrix;

/// Nyström matrix `M_ij = √w_i k(x_i, x_j) √w_j`.
///
/// On a band-limited grid each entry is instead the sinc-Galerkin integral of
/// the Lorentzian with its width frozen at `(x_i, x_j)`:
/// `h k(x_i, x_j) (1 − (−1)^{i−j} e^{−π t_ij / h})`. The correction resolves
/// kernels whose width is far below the grid step.
pub fn nystrom(spec: &KernelSpec, grid: &Grid) -> Result<DiscreteOperator> {
    if !grid.scheme().is_quadrature() {
        return Err(Error::UnsupportedScheme {
            scheme: grid.scheme(),
            operation: "nystrom",
        });
    }
    let n = grid.len();
    let x = grid.nodes();
    let sw: Vec<f64> = grid.weights().iter().map(|w| w.sqrt()).collect();
    let band = grid.scheme() == Scheme::BandLimited;
    let h = grid.weights()[0];
    let symmetric = spec.is_symmetric();

    let entry = |i: usize, j: usize| -> f64 {
        let k = spec.value(x[i], x[j]);
        if band {
            let t = spec.width(x[i], x[j]);
            let sign = if (i + j).is_multiple_of(2) { 1.0 } else { -1.0 };
            h * k * (1.0 - sign * (-PI * t / h).exp())
        } else {
            sw[i] * k * sw[j]
        }
    };

    let mut matrix = DenseMatrix::zeros(n, n);
    matrix.row_chunks_mut().enumerate().for_each(|(i, row)| {
        let start = if symmetric { i } else { 0 };
        for (j, r) in row.iter_mut().enumerate().skip(start) {
            *r = entry(i, j);
        }
    });
    if symmetric {
        mirror_upper(&mut matrix);
    }
    if !matrix.is_finite() {
        return Err(Error::NonFinite("Nyström matrix entry"));
    }
    Ok(DiscreteOperator::new(
        matrix,
        grid.clone(),
        symmetric,
        Provenance::new(Source::Kernel(spec.clone()), grid),
    ))
}

/// Unsymmetrized Nyström matrix `k(x_i, x_j) w_j`.
pub fn plain_nystrom(spec: &KernelSpec, grid: &Grid) -> Result<DenseMatrix> {
    if !grid.scheme().is_quadrature() {
        return Err(Error::UnsupportedScheme {
            scheme: grid.scheme(),
            operation: "plain_nystrom",
        });
    }
    let x = grid.nodes();
    let w = grid.weights();
    Ok(DenseMatrix::from_fn(grid.len(), grid.len(), |i, j| {
        spec.value(x[i], x[j]) * w[j]
    }))
}

/// Copies the upper triangle onto the lower one so `M_ij == M_ji` bitwise.
pub(crate) fn mirror_upper(m: &mut DenseMatrix) {
    let n = m.rows();
    let data = m.as_mut_slice();
    for i in 0..n {
        for j in 0..i {
            data[i * n + j] = data[j * n + i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::ThetaSpec;

    #[test]
    fn single_node_cauchy() {
        let g = Grid::trapezoid(5.0, 1).unwrap();
        let op = nystrom(
            &KernelSpec::k_beta(ThetaSpec::radial_power(1.0).unwrap(), 0.3).unwrap(),
            &g,
        )
        .unwrap();
        assert!((op.matrix()[(0, 0)] - 10.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn symmetric_families_are_exactly_symmetric() {
        let th = ThetaSpec::radial_power(2.0).unwrap();
        for g in [
            Grid::gauss_legendre(4.0, 5, 6).unwrap(),
            Grid::band_limited(4.0, 33).unwrap(),
        ] {
            let op = nystrom(&KernelSpec::b_alpha(th.clone(), 0.3).unwrap(), &g).unwrap();
            assert!(op.is_symmetric());
            assert_eq!(op.matrix().asymmetry(), 0.0);
            let d = nystrom(&KernelSpec::b_alpha_desym(th.clone(), 0.3).unwrap(), &g).unwrap();
            assert!(!d.is_symmetric());
            assert!(d.matrix().asymmetry() > 0.0);
        }
    }

    #[test]
    fn rejects_collocation_grid() {
        let g = Grid::fourier(4.0, 16).unwrap();
        assert!(matches!(
            nystrom(&KernelSpec::m_t(1.0).unwrap(), &g),
            Err(Error::UnsupportedScheme { .. })
        ));
    }

    #[test]
    fn band_limited_matches_fine_quadrature() {
        // Row action on a smooth function: the sinc scheme at a coarse step
        // against a fine trapezoid integral of the true kernel.
        let th = ThetaSpec::radial_power(1.0).unwrap();
        let spec = KernelSpec::b_alpha(th, 0.1).unwrap();
        let coarse = Grid::band_limited(6.0, 60).unwrap();
        let op = nystrom(&spec, &coarse).unwrap();
        let f = |x: f64| (-x * x).exp();
        let fine_n = 120_001;
        let fine = Grid::trapezoid(6.0, fine_n).unwrap();
        for i in [10usize, 25, 30, 47] {
            let xi = coarse.nodes()[i];
            let coarse_val: f64 = (0..60)
                .map(|j| op.matrix()[(i, j)] * f(coarse.nodes()[j]))
                .sum();
            let fine_val: f64 = fine
                .nodes()
                .iter()
                .zip(fine.weights())
                .map(|(y, w)| w * spec.value(xi, *y) * f(*y))
                .sum();
            assert!(
                (coarse_val - fine_val).abs() < 1e-6,
                "row {i}: {coarse_val} vs {fine_val}"
            );
        }
    }
}
