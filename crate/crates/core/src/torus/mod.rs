//! The complex torus `C / (Z + τZ)`: the degree-one theta function, the
//! Kähler coefficient and the `SL(2, Z)` classification of moduli.

mod modular;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::expr::Expr;

pub use modular::{
    classify_moduli_pair, reduce_to_fundamental_domain, ModuliClassification, Reduction, SL2ZMatrix,
    MAX_REDUCTION_STEPS, MODULI_TOLERANCE,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TorusError {
    #[error("τ = {0} is not in the upper half-plane")]
    NotUpperHalfPlane(Complex64),
    #[error("cannot parse {input:?} as a complex number: {reason}")]
    Parse { input: String, reason: String },
    #[error("ad − bc = {0}, expected 1")]
    Determinant(i128),
    #[error("matrix entries overflow")]
    Overflow,
    #[error("reduction did not terminate within {0} steps")]
    NonTermination(usize),
    #[error("at least one term required")]
    Terms,
    #[error("tail bound {bound:e} exceeds the requested accuracy {accuracy:e}; increase N")]
    TailBound { bound: f64, accuracy: f64 },
}

/// A point of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauPoint(Complex64);

impl TauPoint {
    pub fn new(tau: Complex64) -> Result<TauPoint, TorusError> {
        if tau.re.is_finite() && tau.im.is_finite() && tau.im > 0.0 {
            Ok(TauPoint(tau))
        } else {
            Err(TorusError::NotUpperHalfPlane(tau))
        }
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn im(self) -> f64 {
        self.0.im
    }
}

impl fmt::Display for TauPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_complex(f, self.0)
    }
}

impl FromStr for TauPoint {
    type Err = TorusError;
    fn from_str(s: &str) -> Result<TauPoint, TorusError> {
        TauPoint::new(parse_complex(s)?)
    }
}

pub(crate) fn write_complex(f: &mut fmt::Formatter<'_>, z: Complex64) -> fmt::Result {
    if z.im < 0.0 {
        write!(f, "{}-{}i", z.re, -z.im)
    } else {
        write!(f, "{}+{}i", z.re, z.im)
    }
}

/// Parses constant complex literals such as `"i"`, `"2i"`, `"0.2+1.3i"` or
/// `"i+7"`. Any constant expression of the expression language is accepted;
/// a number directly followed by `i` is read as a product.
pub fn parse_complex(input: &str) -> Result<Complex64, TorusError> {
    let mut src = String::with_capacity(input.len() + 4);
    let mut prev: Option<char> = None;
    for ch in input.chars() {
        if ch == 'i' && prev.is_some_and(|p| p.is_ascii_digit() || p == '.') {
            src.push('*');
        }
        src.push(ch);
        if !ch.is_whitespace() {
            prev = Some(ch);
        }
    }
    let err = |reason: String| TorusError::Parse {
        input: input.to_string(),
        reason,
    };
    let e = Expr::parse(&src, &[] as &[&str]).map_err(|e| err(e.to_string()))?;
    let z = e.eval(&[]).map_err(|e| err(e.to_string()))?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(err("not finite".into()));
    }
    Ok(z)
}

/// Scalar multiplying `i dz∧dz̄` in the flat Kähler form, `π / Im τ`.
pub fn kahler_coefficient(tau: TauPoint) -> f64 {
    PI / tau.im()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaValue {
    #[serde(serialize_with = "crate::linalg::serialize_complex")]
    pub value: Complex64,
    /// Bound on the modulus of the omitted terms `|n| > N`.
    pub tail_bound: f64,
    pub terms: usize,
}

/// `θ(z, τ) = Σ_{n=−N}^{N} exp(iπτn² + 2πinz)` with a tail bound.
pub fn theta(z: Complex64, tau: TauPoint, terms: usize) -> Result<ThetaValue, TorusError> {
    if terms == 0 {
        return Err(TorusError::Terms);
    }
    let t = tau.value();
    let i = Complex64::i();
    let n_max = terms as i64;
    let mut value = Complex64::new(0.0, 0.0);
    for n in -n_max..=n_max {
        let nf = n as f64;
        value += (i * PI * t * nf * nf + 2.0 * PI * i * nf * z).exp();
    }
    Ok(ThetaValue {
        value,
        tail_bound: tail_bound(z, tau, terms),
        terms,
    })
}

/// As [`theta`], refusing when the tail bound exceeds `accuracy`.
pub fn theta_with_accuracy(z: Complex64, tau: TauPoint, terms: usize, accuracy: f64) -> Result<ThetaValue, TorusError> {
    let v = theta(z, tau, terms)?;
    if v.tail_bound.is_nan() || v.tail_bound > accuracy {
        return Err(TorusError::TailBound {
            bound: v.tail_bound,
            accuracy,
        });
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuasiPeriodicity {
    /// `|θ(z+1) − θ(z)|`.
    pub real_period: f64,
    /// `|θ(z+τ) − e^{−iπτ−2πiz} θ(z)|`.
    pub tau_period: f64,
    /// `|θ(z+τ)|`, the scale of the second residual.
    pub magnitude: f64,
}

/// Absolute residuals of both lattice relations at `z`.
pub fn quasi_periodicity(z: Complex64, tau: TauPoint, terms: usize) -> Result<QuasiPeriodicity, TorusError> {
    let i = Complex64::i();
    let t = tau.value();
    let base = theta(z, tau, terms)?.value;
    let shifted_one = theta(z + 1.0, tau, terms)?.value;
    let shifted_tau = theta(z + t, tau, terms)?.value;
    let factor = (-i * PI * t - 2.0 * PI * i * z).exp();
    Ok(QuasiPeriodicity {
        real_period: (shifted_one - base).norm(),
        tau_period: (shifted_tau - factor * base).norm(),
        magnitude: shifted_tau.norm(),
    })
}

/// `2 Σ_{n>N} exp(−π Im τ n² + 2π |Im z| n)`, summed until the ratio of
/// consecutive terms drops below ½ and then closed with a geometric bound.
fn tail_bound(z: Complex64, tau: TauPoint, terms: usize) -> f64 {
    let a = PI * tau.im();
    let b = 2.0 * PI * z.im.abs();
    let exponent = |n: f64| -a * n * n + b * n;
    let mut sum = 0.0;
    let mut n = terms as f64 + 1.0;
    loop {
        let e = exponent(n);
        if e > 700.0 {
            return f64::INFINITY;
        }
        let t = e.exp();
        // log ratio of term n+1 to term n
        let log_r = -a * (2.0 * n + 1.0) + b;
        if log_r < -std::f64::consts::LN_2 {
            let r = log_r.exp();
            sum += t / (1.0 - r);
            break;
        }
        sum += t;
        n += 1.0;
    }
    2.0 * sum
}
