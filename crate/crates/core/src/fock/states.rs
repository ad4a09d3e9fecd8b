use std::f64::consts::SQRT_2;

use nalgebra::DVector;
use num_complex::Complex64;

use super::{FockError, FockSpace, Operator, StateVector};

/// Largest `|z|` accepted by [`coherent`] on `dim` levels, `√(2D)/3`.
pub fn truncation_bound(dim: usize) -> f64 {
    (2.0 * dim as f64).sqrt() / 3.0
}

/// Normalized single-mode coherent amplitudes with `A`-eigenvalue `z`,
/// without the truncation check.
pub fn coherent_amplitudes(dim: usize, z: Complex64) -> DVector<Complex64> {
    let alpha = z / SQRT_2;
    let mut amps = DVector::zeros(dim);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    amps[0] = c;
    for n in 1..dim {
        c = c * alpha / (n as f64).sqrt();
        amps[n] = c;
    }
    let norm = amps.norm();
    amps.unscale(norm)
}

pub fn vacuum(space: &FockSpace) -> StateVector {
    fock_state(space, &vec![0; space.modes()]).expect("level 0 exists")
}

/// Tensor product of per-mode coherent states.
pub fn coherent(space: &FockSpace, z: &[Complex64]) -> Result<StateVector, FockError> {
    if z.len() != space.modes() {
        return Err(FockError::Mismatch(format!(
            "{} eigenvalues for {} modes",
            z.len(),
            space.modes()
        )));
    }
    let bound = truncation_bound(space.dim());
    let mut amps = DVector::from_element(1, Complex64::new(1.0, 0.0));
    for (mode, &zl) in z.iter().enumerate() {
        if zl.norm().is_nan() || zl.norm() > bound {
            return Err(FockError::TruncationBound {
                mode,
                modulus: zl.norm(),
                bound,
            });
        }
        amps = amps.kronecker(&coherent_amplitudes(space.dim(), zl));
    }
    StateVector::new(amps)
}

/// The number state `|n₁, …, n_modes⟩`.
pub fn fock_state(space: &FockSpace, levels: &[usize]) -> Result<StateVector, FockError> {
    if levels.len() != space.modes() {
        return Err(FockError::Mismatch(format!(
            "{} levels for {} modes",
            levels.len(),
            space.modes()
        )));
    }
    let mut index = 0;
    for &n in levels {
        if n >= space.dim() {
            return Err(FockError::Space(format!(
                "level {n} outside truncation {}",
                space.dim()
            )));
        }
        index = index * space.dim() + n;
    }
    let mut amps = DVector::zeros(space.total_dim());
    amps[index] = Complex64::new(1.0, 0.0);
    StateVector::new(amps)
}

/// `ΔQ·ΔP` with `ΔX = √(⟨X²⟩ − ⟨X⟩²)`.
pub fn uncertainty_product(state: &StateVector, q: &Operator, p: &Operator) -> f64 {
    spread(state, q) * spread(state, p)
}

fn spread(state: &StateVector, x: &Operator) -> f64 {
    let xv = x.apply(state);
    let mean = state.amplitudes().dotc(&xv).re;
    let second = xv.norm_squared();
    (second - mean * mean).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::build_operators;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn eigen_residual(dim: usize, z: Complex64) -> f64 {
        let space = FockSpace::single(dim).unwrap();
        let ops = &build_operators(&space).unwrap()[0];
        let s = StateVector::new(coherent_amplitudes(dim, z)).unwrap();
        (ops.big_a.apply(&s) - s.amplitudes() * z).norm()
    }

    #[test]
    fn zero_eigenvalue_is_the_vacuum() {
        let space = FockSpace::single(16).unwrap();
        let ops = &build_operators(&space).unwrap()[0];
        let z0 = coherent(&space, &[c(0.0, 0.0)]).unwrap();
        assert_eq!(z0, vacuum(&space));
        assert_eq!(ops.big_a.apply(&z0).norm(), 0.0);
    }

    #[test]
    fn coherent_eigenvalue_equation() {
        assert!(eigen_residual(64, c(1.0, 0.0)) < 1e-8);
        assert!(eigen_residual(64, c(1.0, 1.0)) < 1e-8);
        assert!(eigen_residual(64, c(0.0, 2.0)) < 1e-8);
    }

    #[test]
    fn vacuum_overlap_closed_form() {
        let space = FockSpace::single(64).unwrap();
        let z = coherent(&space, &[c(SQRT_2, 0.0)]).unwrap();
        let overlap = vacuum(&space).inner(&z).norm_sqr();
        assert!((overlap - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn truncation_bound_is_enforced() {
        let space = FockSpace::single(8).unwrap();
        let bound = truncation_bound(8);
        assert!(coherent(&space, &[c(bound, 0.0)]).is_ok());
        let err = coherent(&space, &[c(0.0, bound * 1.01)]).unwrap_err();
        assert!(matches!(err, FockError::TruncationBound { mode: 0, .. }));
        assert!(coherent(&space, &[c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn uncertainty_examples() {
        let space = FockSpace::single(64).unwrap();
        let ops = &build_operators(&space).unwrap()[0];
        let u = |s: &StateVector| uncertainty_product(s, &ops.q, &ops.p);
        assert!((u(&vacuum(&space)) - 0.5).abs() < 1e-9);
        assert!((u(&coherent(&space, &[c(1.3, -0.7)]).unwrap()) - 0.5).abs() < 1e-6);
        for n in 1..6 {
            let s = fock_state(&space, &[n]).unwrap();
            assert!((u(&s) - (2 * n + 1) as f64 / 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn residual_shrinks_with_dimension() {
        // |z| = 2 needs D ≥ 18 for the safety bound
        for dim in [18, 20, 24] {
            let small = eigen_residual(dim, c(2.0, 0.0));
            let large = eigen_residual(2 * dim, c(2.0, 0.0));
            assert!(small > 1e3 * large, "D={dim}: {small:e} vs {large:e}");
        }
        let near = eigen_residual(18, c(0.5, 0.0));
        let far = eigen_residual(18, c(2.0, 0.0));
        assert!(far > near);
    }

    #[test]
    fn multimode_coherent_state_factorizes() {
        let space = FockSpace::new(24, 2).unwrap();
        let ops = build_operators(&space).unwrap();
        let z = [c(0.4, -0.3), c(-0.8, 0.5)];
        let s = coherent(&space, &z).unwrap();
        for (mode, zl) in z.iter().enumerate() {
            let r = (ops[mode].big_a.apply(&s) - s.amplitudes() * *zl).norm();
            assert!(r < 1e-6, "mode {mode}: {r:e}");
        }
    }

    proptest! {
        #[test]
        fn overlap_law(zr in -1.4..1.4f64, zi in -1.4..1.4f64, wr in -1.4..1.4f64, wi in -1.4..1.4f64) {
            let space = FockSpace::single(64).unwrap();
            let z = c(zr, zi);
            let w = c(wr, wi);
            let sz = coherent(&space, &[z]).unwrap();
            let sw = coherent(&space, &[w]).unwrap();
            let expected = (-(z - w).norm_sqr() / 2.0).exp();
            prop_assert!((sz.inner(&sw).norm_sqr() - expected).abs() < 1e-8);
        }

        #[test]
        fn coherent_states_saturate(r in 0.0..1.5f64, phi in 0.0..std::f64::consts::TAU) {
            let space = FockSpace::single(64).unwrap();
            let ops = &build_operators(&space).unwrap()[0];
            let s = coherent(&space, &[Complex64::from_polar(r, phi)]).unwrap();
            prop_assert!((uncertainty_product(&s, &ops.q, &ops.p) - 0.5).abs() < 1e-6);
            prop_assert!((s.norm() - 1.0).abs() < 1e-12);
        }
    }
}
