use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::checks::scan_grid;
use super::{bracket, AlmostComplexStructure, Chart, FieldJet, PhaseSpaceError};

/// `J` and its coordinate derivatives at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureJet {
    pub value: DMatrix<f64>,
    pub derivatives: Vec<DMatrix<f64>>,
}

impl StructureJet {
    pub fn at(j: &AlmostComplexStructure, point: &[f64]) -> Result<StructureJet, PhaseSpaceError> {
        let (value, derivatives) = j.eval_with_derivatives(point)?;
        Ok(StructureJet { value, derivatives })
    }

    /// The jet of the field `J·Z`.
    pub fn apply(&self, z: &FieldJet) -> FieldJet {
        let value = &self.value * &z.value;
        let mut jacobian = &self.value * &z.jacobian;
        for (k, dj) in self.derivatives.iter().enumerate() {
            let col = dj * &z.value;
            let mut target = jacobian.column_mut(k);
            target += col;
        }
        FieldJet { value, jacobian }
    }
}

/// `N(Z, W) = [Z,W] − [JZ,JW] + J[Z,JW] + J[JZ,W]` at one point.
pub fn nijenhuis_at(j: &StructureJet, z: &FieldJet, w: &FieldJet) -> DVector<f64> {
    let jz = j.apply(z);
    let jw = j.apply(w);
    bracket(z, w) - bracket(&jz, &jw) + &j.value * bracket(z, &jw) + &j.value * bracket(&jz, w)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NijenhuisReport {
    /// max over grid points and basis pairs `i < j` of `‖N(∂_i, ∂_j)‖₂`.
    pub max_norm: f64,
    pub worst_point: Vec<f64>,
    pub worst_pair: (usize, usize),
    /// max of `‖N(∂_i, ∂_j) + N(∂_j, ∂_i)‖₂`.
    pub antisymmetry_residual: f64,
    pub tolerance: f64,
    pub integrable: bool,
}

pub fn nijenhuis(j: &AlmostComplexStructure, chart: &Chart, tol: f64) -> Result<NijenhuisReport, PhaseSpaceError> {
    let d = chart.dim();
    if j.dim() != d {
        return Err(PhaseSpaceError::Structure(format!(
            "structure has dimension {}, chart has {d}",
            j.dim()
        )));
    }
    let basis: Vec<FieldJet> = (0..d).map(|k| FieldJet::basis(d, k)).collect();
    let samples = scan_grid(chart, |p| {
        let jet = StructureJet::at(j, p)?;
        let mut worst = (0.0_f64, (0, 1));
        let mut anti = 0.0_f64;
        for a in 0..d {
            for b in (a + 1)..d {
                let n_ab = nijenhuis_at(&jet, &basis[a], &basis[b]);
                let n_ba = nijenhuis_at(&jet, &basis[b], &basis[a]);
                let norm = n_ab.norm();
                if norm > worst.0 || norm.is_nan() {
                    worst = (norm, (a, b));
                }
                anti = anti.max((n_ab + n_ba).norm());
            }
        }
        Ok((worst, anti))
    })?;

    let mut report = NijenhuisReport {
        max_norm: 0.0,
        worst_point: samples.first().map(|s| s.0.clone()).unwrap_or_default(),
        worst_pair: (0, 1),
        antisymmetry_residual: 0.0,
        tolerance: tol,
        integrable: false,
    };
    for (p, ((norm, pair), anti)) in samples {
        if norm > report.max_norm || norm.is_nan() && !report.max_norm.is_nan() {
            report.max_norm = norm;
            report.worst_point = p;
            report.worst_pair = pair;
        }
        report.antisymmetry_residual = report.antisymmetry_residual.max(anti);
    }
    report.integrable = report.max_norm < tol;
    Ok(report)
}
