use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::TransformError;
use crate::fock::{build_operators, coherent, truncation_bound, vacuum, FockSpace, Operator, StateVector};

/// Classical polynomial `g(w, w̄) = Σ c_{mk} w^m w̄^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialLift {
    terms: BTreeMap<(usize, usize), Complex64>,
}

impl PolynomialLift {
    /// Repeated `(m, k)` keys are summed.
    pub fn new<I>(terms: I) -> Result<PolynomialLift, TransformError>
    where
        I: IntoIterator<Item = ((usize, usize), Complex64)>,
    {
        let mut map = BTreeMap::new();
        for ((m, k), c) in terms {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(TransformError::Coefficient {
                    m,
                    k,
                    reason: "not finite".into(),
                });
            }
            *map.entry((m, k)).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        if map.is_empty() {
            return Err(TransformError::Map("polynomial has no terms".into()));
        }
        Ok(PolynomialLift { terms: map })
    }

    /// `Σ c_m w^m` with `coefficients[m] = c_m`.
    pub fn holomorphic(coefficients: &[Complex64]) -> Result<PolynomialLift, TransformError> {
        PolynomialLift::new(coefficients.iter().enumerate().map(|(m, &c)| ((m, 0), c)))
    }

    pub fn terms(&self) -> &BTreeMap<(usize, usize), Complex64> {
        &self.terms
    }

    /// Largest `m + k` with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.nonzero().map(|((m, k), _)| m + k).max().unwrap_or(0)
    }

    /// No nonzero `w̄` dependence.
    pub fn is_holomorphic(&self) -> bool {
        self.nonzero().all(|((_, k), _)| k == 0)
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(m, k), c)| c * w.powu(m as u32) * w.conj().powu(k as u32))
            .sum()
    }

    fn nonzero(&self) -> impl Iterator<Item = ((usize, usize), Complex64)> + '_ {
        self.terms
            .iter()
            .filter(|(_, c)| c.norm() != 0.0)
            .map(|(&mk, &c)| (mk, c))
    }
}

fn require_single_mode(space: &FockSpace) -> Result<(), TransformError> {
    if space.modes() != 1 {
        return Err(TransformError::Map(format!(
            "lifts act on a single mode, space has {}",
            space.modes()
        )));
    }
    Ok(())
}

/// Normal-ordered lift `G = Σ c_{mk} (A†)^k A^m`.
pub fn lift_normal_ordered(poly: &PolynomialLift, space: &FockSpace) -> Result<Operator, TransformError> {
    require_single_mode(space)?;
    let cap = space.dim() / 4;
    let degree = poly.terms.keys().map(|(m, k)| m + k).max().unwrap_or(0);
    if degree > cap {
        return Err(TransformError::DegreeCap { degree, cap });
    }
    let ops = &build_operators(space)?[0];
    let d = space.dim();
    let max_m = poly.terms.keys().map(|&(m, _)| m).max().unwrap_or(0);
    let max_k = poly.terms.keys().map(|&(_, k)| k).max().unwrap_or(0);
    let powers = |x: &DMatrix<Complex64>, top: usize| {
        let mut out = vec![DMatrix::<Complex64>::identity(d, d)];
        for p in 1..=top {
            let next = &out[p - 1] * x;
            out.push(next);
        }
        out
    };
    let a_pow = powers(ops.big_a.matrix(), max_m);
    let ad_pow = powers(ops.big_a_dag.matrix(), max_k);
    let mut g = DMatrix::<Complex64>::zeros(d, d);
    for (&(m, k), &c) in &poly.terms {
        g += (&ad_pow[k] * &a_pow[m]) * c;
    }
    Ok(Operator::new("G", g))
}

/// `‖G|0⟩‖`: zero iff the unprimed vacuum is still annihilated.
pub fn vacuum_transport_residual(poly: &PolynomialLift, space: &FockSpace) -> Result<f64, TransformError> {
    let g = lift_normal_ordered(poly, space)?;
    Ok(g.apply(&vacuum(space)).norm())
}

/// `‖X|ψ⟩ − ⟨ψ|X|ψ⟩|ψ⟩‖`: zero iff `ψ` is an eigenvector of `X`.
pub fn coherence_residual(state: &StateVector, op: &Operator) -> f64 {
    let x = op.apply(state);
    let mean = state.amplitudes().dotc(&x);
    (x - state.amplitudes() * mean).norm()
}

/// Roots of `Σ c_m w^m` (coefficients low to high) as eigenvalues of the
/// companion matrix, each refined by a few Newton steps.
pub fn polynomial_roots(coefficients: &[Complex64]) -> Vec<Complex64> {
    let Some(top) = coefficients.iter().rposition(|c| c.norm() != 0.0) else {
        return Vec::new();
    };
    if top == 0 {
        return Vec::new();
    }
    let lead = coefficients[top];
    let mut companion = DMatrix::<Complex64>::zeros(top, top);
    for r in 1..top {
        companion[(r, r - 1)] = Complex64::new(1.0, 0.0);
    }
    for r in 0..top {
        companion[(r, top - 1)] = -coefficients[r] / lead;
    }
    let schur = companion.schur();
    let (_, t) = schur.unpack();
    let eval = |w: Complex64| {
        coefficients[..=top]
            .iter()
            .rev()
            .fold((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), |(f, df), &c| {
                (f * w + c, df * w + f)
            })
    };
    (0..top)
        .map(|i| {
            let mut w = t[(i, i)];
            for _ in 0..4 {
                let (f, df) = eval(w);
                if df.norm() == 0.0 {
                    break;
                }
                let step = f / df;
                if !step.is_finite() {
                    break;
                }
                w -= step;
            }
            w
        })
        .collect()
}

/// The state annihilated by the primed annihilator `F(A)` of a holomorphic
/// `f`: the coherent state at a root of `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimedVacuum {
    pub root: Complex64,
    pub state: StateVector,
    /// `‖F(A)|root⟩‖`.
    pub residual: f64,
    /// `f(0) = 0`, so the primed vacuum is the unprimed one.
    pub is_unprimed_vacuum: bool,
}

/// Picks the root of smallest modulus inside the truncation-safe disk.
pub fn primed_vacuum(poly: &PolynomialLift, space: &FockSpace) -> Result<PrimedVacuum, TransformError> {
    if !poly.is_holomorphic() {
        return Err(TransformError::NotHolomorphic);
    }
    require_single_mode(space)?;
    let degree = poly.degree();
    let mut coefficients = vec![Complex64::new(0.0, 0.0); degree + 1];
    for ((m, _), c) in poly.nonzero() {
        coefficients[m] = c;
    }
    let bound = truncation_bound(space.dim());
    let c0_vanishes = coefficients[0].norm() == 0.0 && degree > 0;
    let root = if c0_vanishes {
        Some(Complex64::new(0.0, 0.0))
    } else {
        polynomial_roots(&coefficients)
            .into_iter()
            .filter(|r| r.norm() <= bound)
            .min_by(|a, b| a.norm().total_cmp(&b.norm()))
    };
    let root = root.ok_or(TransformError::NoRoot { bound })?;
    let g = lift_normal_ordered(poly, space)?;
    let state = coherent(space, &[root])?;
    let residual = g.apply(&state).norm();
    Ok(PrimedVacuum {
        root,
        state,
        residual,
        is_unprimed_vacuum: c0_vanishes,
    })
}
