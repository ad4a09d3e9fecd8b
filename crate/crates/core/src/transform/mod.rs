//! Holomorphy and symplecticity of coordinate changes, normal-ordered
//! operator lifts, and the loss of vacuum and coherence under
//! nonholomorphic transformations.

mod lift;
mod linear;

use num_complex::Complex64;
use serde::Serialize;

use crate::expr::{Expr, ParseError};
use crate::fock::FockError;
use crate::phase_space::{scan_grid, Chart, PhaseSpaceError};

pub use lift::{
    coherence_residual, lift_normal_ordered, polynomial_roots, primed_vacuum, vacuum_transport_residual,
    PolynomialLift, PrimedVacuum,
};
pub use linear::{classify_linear, classify_standard, LinearClassification, Quadrant};

/// Default threshold for residual-based booleans.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransformError {
    #[error("component {index}: {source}")]
    Parse {
        index: usize,
        #[source]
        source: ParseError,
    },
    #[error("invalid map: {0}")]
    Map(String),
    #[error(transparent)]
    PhaseSpace(#[from] PhaseSpaceError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error("total degree {degree} exceeds the cap {cap} (D/4)")]
    DegreeCap { degree: usize, cap: usize },
    #[error("invalid coefficient for w^{m} w̄^{k}: {reason}")]
    Coefficient { m: usize, k: usize, reason: String },
    #[error("primed vacuum needs a holomorphic polynomial")]
    NotHolomorphic,
    #[error("polynomial has no root inside the truncation disk |w| ≤ {bound}")]
    NoRoot { bound: f64 },
}

/// `n` complex components `w'^l`, each a function of the `2n` chart
/// coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMap {
    components: Vec<Expr>,
}

impl TransitionMap {
    /// Parses components over the chart coordinate names.
    pub fn parse<S: AsRef<str>>(chart: &Chart, sources: &[S]) -> Result<TransitionMap, TransformError> {
        TransitionMap::parse_with(chart.coordinate_names(), sources)
    }

    /// Parses components over `variables`, listed as `(q1..qn, p1..pn)`.
    pub fn parse_with<V: AsRef<str>, S: AsRef<str>>(
        variables: &[V],
        sources: &[S],
    ) -> Result<TransitionMap, TransformError> {
        if variables.is_empty() || !variables.len().is_multiple_of(2) {
            return Err(TransformError::Map(format!(
                "need an even number of coordinates, got {}",
                variables.len()
            )));
        }
        if sources.len() != variables.len() / 2 {
            return Err(TransformError::Map(format!(
                "{} components given for {} modes",
                sources.len(),
                variables.len() / 2
            )));
        }
        let components = sources
            .iter()
            .enumerate()
            .map(|(index, s)| {
                Expr::parse(s.as_ref(), variables).map_err(|source| TransformError::Parse { index, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TransitionMap { components })
    }

    pub fn modes(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn eval(&self, point: &[f64]) -> Result<Vec<Complex64>, TransformError> {
        self.components
            .iter()
            .map(|c| {
                c.eval(point).map_err(|source| {
                    PhaseSpaceError::Eval {
                        point: point.to_vec(),
                        source,
                    }
                    .into()
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrReport {
    /// max over grid, components and modes of `|∂f^l/∂w̄^k|`.
    pub max_residual: f64,
    pub worst_point: Vec<f64>,
    pub worst_component: usize,
    pub worst_mode: usize,
    pub tolerance: f64,
    pub holomorphic: bool,
}

/// Cauchy–Riemann residual of `map` over the chart grid.
pub fn cr_residual(map: &TransitionMap, chart: &Chart, tol: f64) -> Result<CrReport, TransformError> {
    let n = chart.degrees_of_freedom();
    if map.modes() != n {
        return Err(TransformError::Map(format!(
            "map has {} components, chart has {n} modes",
            map.modes()
        )));
    }
    let samples = scan_grid(chart, |p| {
        let mut worst = (0.0_f64, 0, 0);
        for (l, c) in map.components.iter().enumerate() {
            let d = c.eval_dual(p).map_err(|source| PhaseSpaceError::Eval {
                point: p.to_vec(),
                source,
            })?;
            for k in 0..n {
                let (dq, dp) = (d.partials[k], d.partials[n + k]);
                let dbar = ((dq + Complex64::i() * dp) * 0.5).norm();
                if dbar > worst.0 || dbar.is_nan() {
                    worst = (dbar, l, k);
                }
            }
        }
        Ok(worst)
    })?;
    let mut report = CrReport {
        max_residual: 0.0,
        worst_point: samples[0].0.clone(),
        worst_component: 0,
        worst_mode: 0,
        tolerance: tol,
        holomorphic: false,
    };
    for (p, (r, l, k)) in samples {
        if r > report.max_residual || (r.is_nan() && !report.max_residual.is_nan()) {
            report.max_residual = r;
            report.worst_point = p;
            report.worst_component = l;
            report.worst_mode = k;
        }
    }
    report.holomorphic = report.max_residual < tol;
    Ok(report)
}
