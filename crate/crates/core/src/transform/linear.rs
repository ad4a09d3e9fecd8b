use nalgebra::DMatrix;
use serde::{Serialize, Serializer};

use super::TransformError;
use crate::linalg::{max_abs, standard_block};

/// Where a linear map sits relative to `Sp(2n)` and the commutant of `J₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrant {
    CanonicalHolomorphic,
    CanonicalOnly,
    /// Complex-linear but not symplectic.
    HolomorphicOnly,
    Neither,
}

impl Quadrant {
    pub fn from_flags(canonical: bool, holomorphic: bool) -> Quadrant {
        match (canonical, holomorphic) {
            (true, true) => Quadrant::CanonicalHolomorphic,
            (true, false) => Quadrant::CanonicalOnly,
            (false, true) => Quadrant::HolomorphicOnly,
            (false, false) => Quadrant::Neither,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Quadrant::CanonicalHolomorphic => "canonical∧holomorphic",
            Quadrant::CanonicalOnly => "canonical-only",
            Quadrant::HolomorphicOnly => "holomorphic-only (duality candidate)",
            Quadrant::Neither => "neither",
        }
    }
}

impl Serialize for Quadrant {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearClassification {
    /// `max |MᵀΩM − Ω|`.
    pub symplectic_residual: f64,
    /// `max |MJ − JM|`.
    pub complex_residual: f64,
    pub canonical: bool,
    pub holomorphic: bool,
    pub quadrant: Quadrant,
    pub tolerance: f64,
}

pub fn classify_linear(
    m: &DMatrix<f64>,
    j: &DMatrix<f64>,
    omega: &DMatrix<f64>,
    tol: f64,
) -> Result<LinearClassification, TransformError> {
    let d = m.nrows();
    if !m.is_square() || d == 0 || j.shape() != (d, d) || omega.shape() != (d, d) {
        return Err(TransformError::Map(format!(
            "matrix shapes {:?}, {:?}, {:?} do not match",
            m.shape(),
            j.shape(),
            omega.shape()
        )));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(TransformError::Map("matrix has non-finite entries".into()));
    }
    let symplectic_residual = max_abs(&(m.transpose() * omega * m - omega));
    let complex_residual = max_abs(&(m * j - j * m));
    let canonical = symplectic_residual < tol;
    let holomorphic = complex_residual < tol;
    Ok(LinearClassification {
        symplectic_residual,
        complex_residual,
        canonical,
        holomorphic,
        quadrant: Quadrant::from_flags(canonical, holomorphic),
        tolerance: tol,
    })
}

/// Classification against the standard `J₀` and `Ω`.
pub fn classify_standard(m: &DMatrix<f64>, tol: f64) -> Result<LinearClassification, TransformError> {
    let d = m.nrows();
    if !d.is_multiple_of(2) {
        return Err(TransformError::Map(format!("odd dimension {d}")));
    }
    let omega = standard_block(d / 2);
    classify_linear(m, &omega, &omega, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-10;

    #[test]
    fn identity_is_both() {
        let r = classify_standard(&DMatrix::identity(4, 4), TOL).unwrap();
        assert_eq!(r.quadrant, Quadrant::CanonicalHolomorphic);
        assert_eq!((r.symplectic_residual, r.complex_residual), (0.0, 0.0));
    }

    #[test]
    fn dilation_is_a_duality_candidate() {
        let r = classify_standard(&(DMatrix::identity(2, 2) * 2.0), TOL).unwrap();
        assert_eq!(r.quadrant, Quadrant::HolomorphicOnly);
        assert_eq!(r.symplectic_residual, 3.0 * max_abs(&standard_block(1)));
        assert_eq!(r.complex_residual, 0.0);
    }

    #[test]
    fn shear_is_canonical_only() {
        let shear = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        let r = classify_standard(&shear, TOL).unwrap();
        assert_eq!(r.quadrant, Quadrant::CanonicalOnly);
        assert_eq!(r.symplectic_residual, 0.0);
        assert!(r.complex_residual > 0.5);
    }

    #[test]
    fn reflection_is_neither() {
        let r = classify_standard(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]), TOL).unwrap();
        assert_eq!(r.quadrant, Quadrant::Neither);
        assert_eq!(r.quadrant.label(), "neither");
    }

    #[test]
    fn shape_errors() {
        assert!(classify_standard(&DMatrix::identity(3, 3), TOL).is_err());
        assert!(classify_standard(&DMatrix::zeros(2, 4), TOL).is_err());
    }

    /// Real form `[[A, −B], [B, A]]` of the unitary `A + iB`.
    fn unitary_real_form(n: usize, angles: &[f64]) -> DMatrix<f64> {
        // product of plane rotations in (q_l, p_l) and (q_l, q_m)+(p_l, p_m) pairs
        let mut u = DMatrix::identity(2 * n, 2 * n);
        for (k, &t) in angles.iter().enumerate() {
            let mut g = DMatrix::identity(2 * n, 2 * n);
            let (c, s) = (t.cos(), t.sin());
            if k % 2 == 0 || n == 1 {
                let l = (k / 2) % n;
                g[(l, l)] = c;
                g[(l, n + l)] = -s;
                g[(n + l, l)] = s;
                g[(n + l, n + l)] = c;
            } else {
                let l = (k / 2) % n;
                let m = (l + 1) % n;
                for off in [0, n] {
                    g[(off + l, off + l)] = c;
                    g[(off + l, off + m)] = -s;
                    g[(off + m, off + l)] = s;
                    g[(off + m, off + m)] = c;
                }
            }
            u = g * u;
        }
        u
    }

    /// Product of symplectic shears `[[I, S], [0, I]]`, `[[I, 0], [S, I]]`
    /// with symmetric `S`, and unitary rotations.
    fn random_symplectic(n: usize, params: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::identity(2 * n, 2 * n);
        for (k, chunk) in params.chunks(3).enumerate() {
            let mut s = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    let v = chunk[(i + j) % chunk.len()] * (1.0 + (i * n + j) as f64 * 0.1);
                    s[(i, j)] = v;
                    s[(j, i)] = v;
                }
            }
            let mut g = DMatrix::identity(2 * n, 2 * n);
            if k % 2 == 0 {
                g.view_mut((0, n), (n, n)).copy_from(&s);
            } else {
                g.view_mut((n, 0), (n, n)).copy_from(&s);
            }
            m = g * unitary_real_form(n, chunk) * m;
        }
        m
    }

    proptest! {
        #[test]
        fn unitary_products_stay_in_the_intersection(
            n in 1usize..4,
            a in proptest::collection::vec(-3.0..3.0f64, 1..8),
            b in proptest::collection::vec(-3.0..3.0f64, 1..8),
        ) {
            let u1 = unitary_real_form(n, &a);
            let u2 = unitary_real_form(n, &b);
            for u in [&u1, &u2] {
                let r = classify_standard(u, 1e-8).unwrap();
                prop_assert_eq!(r.quadrant, Quadrant::CanonicalHolomorphic);
            }
            let r = classify_standard(&(&u1 * &u2), 1e-8).unwrap();
            prop_assert_eq!(r.quadrant, Quadrant::CanonicalHolomorphic);
            prop_assert!(r.symplectic_residual < 1e-8 && r.complex_residual < 1e-8);
        }

        #[test]
        fn generated_symplectic_matrices_are_canonical(
            n in 1usize..4,
            params in proptest::collection::vec(-1.0..1.0f64, 3..12),
        ) {
            let m = random_symplectic(n, &params);
            let r = classify_standard(&m, 1e-8).unwrap();
            prop_assert!(r.canonical, "residual {}", r.symplectic_residual);
            prop_assert!(r.quadrant != Quadrant::Neither && r.quadrant != Quadrant::HolomorphicOnly);
        }
    }
}
