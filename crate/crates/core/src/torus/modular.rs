use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::Serialize;

use super::{TauPoint, TorusError};

/// Guard on the number of shift/inversion rounds.
pub const MAX_REDUCTION_STEPS: usize = 10_000;

/// Points of the fundamental domain closer than this are identified.
pub const MODULI_TOLERANCE: f64 = 1e-9;

// Slack for the |τ| = 1 and Re τ = ±½ boundaries.
const EDGE: f64 = 1e-12;

/// An integer matrix `[[a, b], [c, d]]` with `ad − bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SL2ZMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl SL2ZMatrix {
    pub const IDENTITY: SL2ZMatrix = SL2ZMatrix { a: 1, b: 0, c: 0, d: 1 };
    /// `τ ↦ τ + 1`.
    pub const T: SL2ZMatrix = SL2ZMatrix { a: 1, b: 1, c: 0, d: 1 };
    /// `τ ↦ −1/τ`.
    pub const S: SL2ZMatrix = SL2ZMatrix {
        a: 0,
        b: -1,
        c: 1,
        d: 0,
    };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<SL2ZMatrix, TorusError> {
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        if det != 1 {
            return Err(TorusError::Determinant(det));
        }
        Ok(SL2ZMatrix { a, b, c, d })
    }

    /// `T^k`.
    pub fn t_pow(k: i64) -> SL2ZMatrix {
        SL2ZMatrix { a: 1, b: k, c: 0, d: 1 }
    }

    pub fn inverse(self) -> SL2ZMatrix {
        SL2ZMatrix {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn checked_mul(self, rhs: SL2ZMatrix) -> Option<SL2ZMatrix> {
        let dot = |x: i64, y: i64, u: i64, v: i64| x.checked_mul(y)?.checked_add(u.checked_mul(v)?);
        Some(SL2ZMatrix {
            a: dot(self.a, rhs.a, self.b, rhs.c)?,
            b: dot(self.a, rhs.b, self.b, rhs.d)?,
            c: dot(self.c, rhs.a, self.d, rhs.c)?,
            d: dot(self.c, rhs.b, self.d, rhs.d)?,
        })
    }

    /// Representative of `±M` with `c > 0`, or `c = 0` and `d > 0`.
    pub fn canonical(self) -> SL2ZMatrix {
        if self.c < 0 || (self.c == 0 && self.d < 0) {
            SL2ZMatrix {
                a: -self.a,
                b: -self.b,
                c: -self.c,
                d: -self.d,
            }
        } else {
            self
        }
    }

    /// Möbius action `(aτ + b) / (cτ + d)`.
    pub fn act(self, tau: Complex64) -> Complex64 {
        let (a, b, c, d) = (self.a as f64, self.b as f64, self.c as f64, self.d as f64);
        (tau * a + b) / (tau * c + d)
    }

    pub fn rows(self) -> [[i64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }
}

impl Mul for SL2ZMatrix {
    type Output = SL2ZMatrix;
    /// Panics on `i64` overflow; use [`SL2ZMatrix::checked_mul`] otherwise.
    fn mul(self, rhs: SL2ZMatrix) -> SL2ZMatrix {
        self.checked_mul(rhs).expect("SL(2, Z) product overflows i64")
    }
}

impl fmt::Display for SL2ZMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reduction {
    /// `τ* = M·τ` in the fundamental domain.
    pub reduced: TauPoint,
    pub matrix: SL2ZMatrix,
    pub steps: usize,
}

/// Maps `τ` into `{Re ∈ [−½, ½), |τ| ≥ 1}`, with `Re ≤ 0` on the unit arc,
/// by alternating translations and inversions.
pub fn reduce_to_fundamental_domain(tau: TauPoint) -> Result<Reduction, TorusError> {
    let mut t = tau.value();
    let mut m = SL2ZMatrix::IDENTITY;
    let mut steps = 0;
    loop {
        if steps >= MAX_REDUCTION_STEPS {
            return Err(TorusError::NonTermination(MAX_REDUCTION_STEPS));
        }
        steps += 1;
        let shift = (t.re + 0.5).floor();
        if shift.abs() > i64::MAX as f64 / 4.0 {
            return Err(TorusError::Overflow);
        }
        let k = shift as i64;
        if k != 0 {
            t -= shift;
            m = SL2ZMatrix::t_pow(-k).checked_mul(m).ok_or(TorusError::Overflow)?;
        }
        if t.norm_sqr() < 1.0 - EDGE {
            t = -t.inv();
            m = SL2ZMatrix::S.checked_mul(m).ok_or(TorusError::Overflow)?;
            continue;
        }
        break;
    }
    // lower-arc tie-break: S maps e^{iφ} to −e^{−iφ}
    if (t.norm_sqr() - 1.0).abs() <= EDGE && t.re > EDGE {
        t = -t.inv();
        m = SL2ZMatrix::S.checked_mul(m).ok_or(TorusError::Overflow)?;
    }
    let m = m.canonical();
    Ok(Reduction {
        reduced: TauPoint::new(t).map_err(|_| TorusError::NotUpperHalfPlane(t))?,
        matrix: m,
        steps,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModuliClassification {
    pub alpha: Reduction,
    pub beta: Reduction,
    pub equivalent: bool,
    /// `W` with `W·τα = τβ`, canonical sign.
    pub witness: Option<SL2ZMatrix>,
    /// `|W·τα − τβ|`.
    pub witness_residual: Option<f64>,
}

impl ModuliClassification {
    pub fn label(&self) -> &'static str {
        if self.equivalent {
            "equivalent"
        } else {
            "inequivalent — duality pair"
        }
    }
}

/// Decides whether `τα` and `τβ` define biholomorphic tori.
pub fn classify_moduli_pair(alpha: TauPoint, beta: TauPoint) -> Result<ModuliClassification, TorusError> {
    let ra = reduce_to_fundamental_domain(alpha)?;
    let rb = reduce_to_fundamental_domain(beta)?;
    let (za, zb) = (ra.reduced.value(), rb.reduced.value());
    // boundary points of the domain are identified by T^{±1} (vertical
    // edges) and S (unit arc)
    let candidates = [
        SL2ZMatrix::IDENTITY,
        SL2ZMatrix::T,
        SL2ZMatrix::T.inverse(),
        SL2ZMatrix::S,
    ];
    let hit = candidates
        .into_iter()
        .find(|x| (x.act(za) - zb).norm() < MODULI_TOLERANCE);
    let (witness, witness_residual) = match hit {
        Some(x) => {
            let w = rb
                .matrix
                .inverse()
                .checked_mul(x)
                .and_then(|y| y.checked_mul(ra.matrix))
                .ok_or(TorusError::Overflow)?
                .canonical();
            let residual = (w.act(alpha.value()) - beta.value()).norm();
            (Some(w), Some(residual))
        }
        None => (None, None),
    };
    Ok(ModuliClassification {
        alpha: ra,
        beta: rb,
        equivalent: witness.is_some(),
        witness,
        witness_residual,
    })
}
