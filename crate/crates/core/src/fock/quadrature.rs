//! `Σ = ∫_{|z|≤R} dμ(z) |z⟩⟨z|` with `dμ = dq dp / 2π`, on a polar grid:
//! Gauss–Legendre in the radius (Jacobian `r`), trapezoid in the angle.

use std::f64::consts::TAU;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{coherent_amplitudes, FockError, FockSpace};
use crate::linalg::{operator_norm, pairwise_sum};

/// Largest accepted node count per polar direction.
pub const MAX_NODES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureParams {
    pub radius: f64,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    /// Compare on levels `0..=levels`.
    pub levels: usize,
    pub tolerance: f64,
}

impl QuadratureParams {
    fn validate(&self, dim: usize) -> Result<(), FockError> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(FockError::Quadrature("radius must be positive".into()));
        }
        for (name, n) in [("radial", self.radial_nodes), ("angular", self.angular_nodes)] {
            if n == 0 || n > MAX_NODES {
                return Err(FockError::Quadrature(format!(
                    "{name} node count must be in 1..={MAX_NODES}"
                )));
            }
        }
        if 4 * self.levels > dim {
            return Err(FockError::Quadrature(format!(
                "levels {} exceed D/4 for D = {dim}",
                self.levels
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolutionReport {
    /// `‖Σ − P_K‖` in operator norm on levels `0..=K`.
    pub deviation: f64,
    /// `Σ` restricted to levels `0..=K`.
    pub block: DMatrix<Complex64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl ResolutionReport {
    pub fn diagonal(&self) -> Vec<f64> {
        self.block.diagonal().iter().map(|z| z.re).collect()
    }
}

/// Upper-left `block × block` corner of the disk integral of coherent
/// projectors on `dim` levels. Rings are summed in parallel and reduced by a
/// fixed pairwise tree.
pub fn disk_integral(
    dim: usize,
    radius: f64,
    radial_nodes: usize,
    angular_nodes: usize,
    block: usize,
) -> DMatrix<Complex64> {
    let rule = GaussLegendre::new(NonZeroUsize::new(radial_nodes.max(1)).expect("nonzero"));
    let half = 0.5 * radius;
    let dtheta = TAU / angular_nodes as f64;
    let rings: Vec<DMatrix<Complex64>> = rule
        .as_node_weight_pairs()
        .par_iter()
        .map(|&(x, w)| {
            let r = half * (x + 1.0);
            // Gauss weight on [0, R], polar Jacobian and the 1/2π of the measure
            let weight = w * half * r * dtheta / TAU;
            let mut ring = DMatrix::<Complex64>::zeros(block, block);
            for j in 0..angular_nodes {
                let z = Complex64::from_polar(r, dtheta * j as f64);
                let amps = coherent_amplitudes(dim, z);
                let v = amps.rows(0, block);
                ring.ger(
                    Complex64::new(weight, 0.0),
                    &v,
                    &v.conjugate(),
                    Complex64::new(1.0, 0.0),
                );
            }
            ring
        })
        .collect();
    pairwise_sum(rings, |a, b| a + b).unwrap_or_else(|| DMatrix::zeros(block, block))
}

pub fn resolution_of_unity(space: &FockSpace, params: &QuadratureParams) -> Result<ResolutionReport, FockError> {
    if space.modes() != 1 {
        return Err(FockError::Quadrature(
            "resolution of unity is computed for a single mode".into(),
        ));
    }
    params.validate(space.dim())?;
    let size = params.levels + 1;
    let block = disk_integral(
        space.dim(),
        params.radius,
        params.radial_nodes,
        params.angular_nodes,
        size,
    );
    let deviation = operator_norm(&(&block - DMatrix::identity(size, size)));
    Ok(ResolutionReport {
        deviation,
        block,
        tolerance: params.tolerance,
        pass: deviation < params.tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Regularized lower incomplete gamma `P(s, x)` for integer `s ≥ 1`:
    /// `1 − e^{−x} Σ_{k<s} x^k / k!`.
    fn lower_gamma_regularized(s: usize, x: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 0..s {
            if k > 0 {
                term *= x / k as f64;
            }
            sum += term;
        }
        1.0 - (-x).exp() * sum
    }

    fn params(radius: f64, n: usize, levels: usize) -> QuadratureParams {
        QuadratureParams {
            radius,
            radial_nodes: n,
            angular_nodes: n,
            levels,
            tolerance: 1e-3,
        }
    }

    #[test]
    fn disk_integral_matches_incomplete_gamma() {
        // angular integration kills off-diagonal terms; level n carries the
        // Poisson mass P(n+1, R²/2) of the disk
        let space = FockSpace::single(64).unwrap();
        for radius in [1.0, 3.0, 6.0, 6.0 * 2f64.sqrt()] {
            let r = resolution_of_unity(&space, &params(radius, 200, 8)).unwrap();
            for (n, d) in r.diagonal().iter().enumerate() {
                let exact = lower_gamma_regularized(n + 1, radius * radius / 2.0);
                assert!((d - exact).abs() < 1e-10, "R={radius} n={n}: {d} vs {exact}");
            }
            let off = &r.block - DMatrix::from_diagonal(&r.block.diagonal());
            assert!(crate::linalg::max_abs_c(&off) < 1e-12);
            let worst = 1.0 - lower_gamma_regularized(9, radius * radius / 2.0);
            assert!((r.deviation - worst).abs() < 1e-10);
        }
    }

    #[test]
    fn ground_level_mass_converges_to_one() {
        let space = FockSpace::single(64).unwrap();
        let r = resolution_of_unity(&space, &params(6.0 * 2f64.sqrt(), 200, 0)).unwrap();
        assert!((r.block[(0, 0)].re - 1.0).abs() < 1e-6);
        assert!(r.pass);
    }

    #[test]
    fn small_disk_fails() {
        let space = FockSpace::single(64).unwrap();
        let r = resolution_of_unity(&space, &params(1.0, 200, 8)).unwrap();
        assert!(r.deviation > 0.1);
        assert!(!r.pass);
    }

    #[test]
    fn reduction_is_bit_stable() {
        let space = FockSpace::single(32).unwrap();
        let p = params(4.0, 60, 8);
        let a = resolution_of_unity(&space, &p).unwrap();
        let b = resolution_of_unity(&space, &p).unwrap();
        assert_eq!(a.deviation.to_bits(), b.deviation.to_bits());
        assert_eq!(a.block, b.block);
    }

    #[test]
    fn parameter_validation() {
        let space = FockSpace::single(16).unwrap();
        assert!(resolution_of_unity(&space, &params(3.0, 20, 5)).is_err());
        assert!(resolution_of_unity(&space, &params(0.0, 20, 2)).is_err());
        assert!(resolution_of_unity(&space, &params(3.0, 0, 2)).is_err());
        let two = FockSpace::new(8, 2).unwrap();
        assert!(resolution_of_unity(&two, &params(3.0, 20, 2)).is_err());
    }
}
