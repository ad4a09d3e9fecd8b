use nalgebra::{DMatrix, DVector};

use super::{Chart, PhaseSpaceError};
use crate::expr::{Expr, ParseError};

/// A vector field and its Jacobian at one point:
/// `jacobian[(r, k)] = ∂X^r/∂x_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldJet {
    pub value: DVector<f64>,
    pub jacobian: DMatrix<f64>,
}

impl FieldJet {
    /// The constant coordinate field `∂_k`.
    pub fn basis(dim: usize, k: usize) -> FieldJet {
        let mut value = DVector::zeros(dim);
        value[k] = 1.0;
        FieldJet {
            value,
            jacobian: DMatrix::zeros(dim, dim),
        }
    }

    /// `f · X` given `f` and its gradient at the same point.
    pub fn scaled(&self, f: f64, grad: &DVector<f64>) -> FieldJet {
        FieldJet {
            value: &self.value * f,
            jacobian: &self.jacobian * f + &self.value * grad.transpose(),
        }
    }
}

/// `[X, Y] = (DY)·X − (DX)·Y`.
pub fn bracket(x: &FieldJet, y: &FieldJet) -> DVector<f64> {
    &y.jacobian * &x.value - &x.jacobian * &y.value
}

/// A vector field with one expression per chart coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: Vec<Expr>,
}

impl VectorField {
    pub fn new(components: Vec<Expr>) -> Result<VectorField, PhaseSpaceError> {
        let d = components.len();
        if d == 0 || !d.is_multiple_of(2) {
            return Err(PhaseSpaceError::Structure(format!(
                "vector field needs an even, positive number of components, got {d}"
            )));
        }
        if components.iter().any(|c| c.variables().len() != d) {
            return Err(PhaseSpaceError::Structure(
                "components must be declared over the chart coordinates".into(),
            ));
        }
        Ok(VectorField { components })
    }

    /// Parses one component per coordinate of `chart`.
    pub fn parse<S: AsRef<str>>(chart: &Chart, sources: &[S]) -> Result<VectorField, FieldParseError> {
        if sources.len() != chart.dim() {
            return Err(FieldParseError::Count {
                expected: chart.dim(),
                got: sources.len(),
            });
        }
        let components = sources
            .iter()
            .enumerate()
            .map(|(k, s)| {
                Expr::parse(s.as_ref(), chart.coordinate_names())
                    .map_err(|source| FieldParseError::Component { index: k, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(VectorField { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn jet(&self, point: &[f64]) -> Result<FieldJet, PhaseSpaceError> {
        let d = self.dim();
        let mut value = DVector::zeros(d);
        let mut jacobian = DMatrix::zeros(d, d);
        for (r, c) in self.components.iter().enumerate() {
            let v = c.eval_dual(point).map_err(|source| PhaseSpaceError::Eval {
                point: point.to_vec(),
                source,
            })?;
            value[r] = v.value.re;
            for (k, p) in v.partials.iter().enumerate() {
                jacobian[(r, k)] = p.re;
            }
        }
        Ok(FieldJet { value, jacobian })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FieldParseError {
    #[error("expected {expected} components, got {got}")]
    Count { expected: usize, got: usize },
    #[error("component {index}: {source}")]
    Component {
        index: usize,
        #[source]
        source: ParseError,
    },
}

/// Lie bracket of two expression-defined fields at `point`.
pub fn lie_bracket(x: &VectorField, y: &VectorField, point: &[f64]) -> Result<DVector<f64>, PhaseSpaceError> {
    if x.dim() != y.dim() {
        return Err(PhaseSpaceError::Structure(
            "vector fields have different dimensions".into(),
        ));
    }
    Ok(bracket(&x.jet(point)?, &y.jet(point)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(chart: &Chart, src: &[&str]) -> VectorField {
        VectorField::parse(chart, src).unwrap()
    }

    #[test]
    fn constant_fields_commute() {
        let chart = Chart::standard(2).unwrap();
        let x = field(&chart, &["1", "0", "0", "0"]);
        let y = field(&chart, &["0", "0", "1", "0"]);
        let b = lie_bracket(&x, &y, &[0.3, 0.1, -0.2, 0.5]).unwrap();
        assert_eq!(b.amax(), 0.0);
    }

    #[test]
    fn q_dq_against_dq() {
        let chart = Chart::standard(2).unwrap();
        let x = field(&chart, &["q1", "0", "0", "0"]);
        let y = field(&chart, &["1", "0", "0", "0"]);
        let pt = [0.7, -0.3, 0.2, 0.9];
        let b = lie_bracket(&x, &y, &pt).unwrap();
        assert_eq!(b, DVector::from_vec(vec![-1.0, 0.0, 0.0, 0.0]));

        // finite-difference cross-check of (DY)X − (DX)Y
        let h = 1e-6;
        let eval = |f: &VectorField, p: &[f64]| f.jet(p).unwrap().value;
        let directional = |f: &VectorField, dir: &DVector<f64>| {
            let up: Vec<f64> = pt.iter().zip(dir.iter()).map(|(a, d)| a + h * d).collect();
            let dn: Vec<f64> = pt.iter().zip(dir.iter()).map(|(a, d)| a - h * d).collect();
            (eval(f, &up) - eval(f, &dn)) / (2.0 * h)
        };
        let xv = eval(&x, &pt);
        let yv = eval(&y, &pt);
        let fd = directional(&y, &xv) - directional(&x, &yv);
        assert!((fd - b).amax() < 1e-8);
    }

    #[test]
    fn component_count_checked() {
        let chart = Chart::standard(1).unwrap();
        assert!(matches!(
            VectorField::parse(&chart, &["1"]),
            Err(FieldParseError::Count { .. })
        ));
        assert!(matches!(
            VectorField::parse(&chart, &["1", "z"]),
            Err(FieldParseError::Component { index: 1, .. })
        ));
    }
}
