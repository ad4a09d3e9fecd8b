use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use super::{AlmostComplexStructure, Chart, PhaseSpaceError, SymplecticForm};
use crate::linalg::max_abs;

/// Evaluates `f` at every grid point in parallel. Results come back in grid
/// order; on failure the error of the lowest-indexed failing point wins.
pub(crate) fn scan_grid<T, F>(chart: &Chart, f: F) -> Result<Vec<(Vec<f64>, T)>, PhaseSpaceError>
where
    T: Send,
    F: Fn(&[f64]) -> Result<T, PhaseSpaceError> + Sync,
{
    let results: Vec<Result<(Vec<f64>, T), PhaseSpaceError>> = (0..chart.grid_len())
        .into_par_iter()
        .map(|k| {
            let p = chart.grid_point(k);
            let v = f(&p)?;
            Ok((p, v))
        })
        .collect();
    results.into_iter().collect()
}

fn check_dims(j: &AlmostComplexStructure, chart: &Chart) -> Result<(), PhaseSpaceError> {
    if j.dim() != chart.dim() {
        return Err(PhaseSpaceError::Structure(format!(
            "structure has dimension {}, chart has {}",
            j.dim(),
            chart.dim()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcsReport {
    /// max over the grid of the largest entry of `J² + I`.
    pub max_deviation: f64,
    pub worst_point: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn check_acs(j: &AlmostComplexStructure, chart: &Chart, tol: f64) -> Result<AcsReport, PhaseSpaceError> {
    check_dims(j, chart)?;
    let d = chart.dim();
    let id = DMatrix::<f64>::identity(d, d);
    let samples = scan_grid(chart, |p| {
        let m = j.eval(p)?;
        Ok(max_abs(&(&m * &m + &id)))
    })?;
    let (worst_point, max_deviation) = worst(samples);
    Ok(AcsReport {
        max_deviation,
        worst_point,
        tolerance: tol,
        pass: max_deviation < tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompatibilityReport {
    /// max over the grid of the largest entry of `JᵀΩJ − Ω`.
    pub max_residual: f64,
    /// max over the grid of the largest entry of `g − gᵀ`, `g = JᵀΩ`.
    pub metric_asymmetry: f64,
    /// min over the grid of the smallest eigenvalue of the symmetric part of
    /// `g`.
    pub min_metric_eigenvalue: f64,
    pub tolerance: f64,
    pub preserves_omega: bool,
    pub positive: bool,
    pub pass: bool,
}

pub fn check_compatibility(
    j: &AlmostComplexStructure,
    omega: &SymplecticForm,
    chart: &Chart,
    tol: f64,
) -> Result<CompatibilityReport, PhaseSpaceError> {
    check_dims(j, chart)?;
    if omega.dim() != chart.dim() {
        return Err(PhaseSpaceError::Structure(
            "symplectic form dimension does not match the chart".into(),
        ));
    }
    let w = omega.matrix();
    let samples = scan_grid(chart, |p| {
        let m = j.eval(p)?;
        let residual = max_abs(&(m.transpose() * w * &m - w));
        let g = m.transpose() * w;
        let asym = max_abs(&(&g - g.transpose()));
        let sym = (&g + g.transpose()) * 0.5;
        let min_eig = SymmetricEigen::new(sym).eigenvalues.min();
        Ok((residual, asym, min_eig))
    })?;
    let mut max_residual = 0.0_f64;
    let mut metric_asymmetry = 0.0_f64;
    let mut min_metric_eigenvalue = f64::INFINITY;
    for (_, (r, a, e)) in &samples {
        max_residual = max_residual.max(*r);
        metric_asymmetry = metric_asymmetry.max(*a);
        min_metric_eigenvalue = min_metric_eigenvalue.min(*e);
    }
    let preserves_omega = max_residual < tol;
    let positive = metric_asymmetry < tol && min_metric_eigenvalue > tol;
    Ok(CompatibilityReport {
        max_residual,
        metric_asymmetry,
        min_metric_eigenvalue,
        tolerance: tol,
        preserves_omega,
        positive,
        pass: preserves_omega && positive,
    })
}

pub(crate) fn worst(samples: Vec<(Vec<f64>, f64)>) -> (Vec<f64>, f64) {
    let mut it = samples.into_iter();
    let Some(mut best) = it.next() else {
        return (Vec::new(), 0.0);
    };
    for (p, v) in it {
        // NaN counts as worse than any number
        if !best.1.is_nan() && (v.is_nan() || v > best.1) {
            best = (p, v);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::linalg::standard_block;

    const R4: [&str; 4] = ["q1", "q2", "p1", "p2"];

    #[test]
    fn standard_structure_passes() {
        let chart = Chart::standard(2).unwrap();
        let j = AlmostComplexStructure::standard(2);
        let r = check_acs(&j, &chart, 1e-9).unwrap();
        assert_eq!(r.max_deviation, 0.0);
        assert!(r.pass);
        let c = check_compatibility(&j, &SymplecticForm::standard(2), &chart, 1e-9).unwrap();
        assert_eq!(c.max_residual, 0.0);
        assert!((c.min_metric_eigenvalue - 1.0).abs() < 1e-14);
        assert!(c.pass);
    }

    #[test]
    fn rotated_structure_squares_to_minus_one() {
        let chart = Chart::standard(2).unwrap();
        let angle = parse("q1^2", &R4).unwrap();
        let j = AlmostComplexStructure::rotated(angle, (0, 1), 2).unwrap();
        let r = check_acs(&j, &chart, 1e-9).unwrap();
        assert!(r.max_deviation < 1e-12);
        assert!(r.pass);
    }

    #[test]
    fn identity_is_not_almost_complex() {
        let chart = Chart::standard(1).unwrap();
        let j = AlmostComplexStructure::constant(DMatrix::identity(2, 2)).unwrap();
        let r = check_acs(&j, &chart, 1e-9).unwrap();
        assert_eq!(r.max_deviation, 2.0);
        assert!(!r.pass);
    }

    #[test]
    fn unitary_rotation_is_compatible() {
        let chart = Chart::standard(2).unwrap();
        let angle = parse("q1*p2 + 0.5", &R4).unwrap();
        // the (q2, p2) plane is a unitary rotation
        let j = AlmostComplexStructure::rotated(angle, (1, 3), 2).unwrap();
        let c = check_compatibility(&j, &SymplecticForm::standard(2), &chart, 1e-9).unwrap();
        assert!(c.max_residual < 1e-10);
        assert!(c.pass);
    }

    #[test]
    fn symplectic_generator_is_compatible_but_not_constant() {
        let chart = Chart::standard(2).unwrap();
        let angle = parse("q2", &R4).unwrap();
        let squeeze = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0, -1.0, 0.0]));
        let j = AlmostComplexStructure::rotated_with_generator(angle, squeeze).unwrap();
        let c = check_compatibility(&j, &SymplecticForm::standard(2), &chart, 1e-9).unwrap();
        assert!(c.pass, "{c:?}");
        assert!(max_abs(&(j.eval(&[0.0, 1.0, 0.0, 0.0]).unwrap() - standard_block(2))) > 0.5);
    }

    #[test]
    fn minus_j0_has_negative_metric() {
        let chart = Chart::standard(1).unwrap();
        let j = AlmostComplexStructure::constant(-standard_block(1)).unwrap();
        let c = check_compatibility(&j, &SymplecticForm::standard(1), &chart, 1e-9).unwrap();
        assert_eq!(c.max_residual, 0.0);
        assert!((c.min_metric_eigenvalue + 1.0).abs() < 1e-14);
        assert!(c.preserves_omega);
        assert!(!c.positive);
        assert!(!c.pass);
    }

    #[test]
    fn evaluation_failure_reports_the_point() {
        let chart = Chart::uniform(1, -1.0, 1.0, 3).unwrap();
        let e = |s: &str| parse(s, &["q1", "p1"]).unwrap();
        let j = AlmostComplexStructure::explicit(vec![vec![e("0"), e("-1/q1")], vec![e("q1"), e("0")]]).unwrap();
        match check_acs(&j, &chart, 1e-9) {
            Err(PhaseSpaceError::Eval { point, .. }) => assert_eq!(point, vec![0.0, -1.0]),
            other => panic!("unexpected {other:?}"),
        }
    }
}
