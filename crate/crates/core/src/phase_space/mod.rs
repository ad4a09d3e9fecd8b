//! Darboux charts, the constant symplectic form, almost complex structures
//! and the Nijenhuis integrability test.
//!
//! Coordinates are in block order `(q1..qn, p1..pn)`. The symplectic form
//! `ω = Σ dp∧dq` is the matrix `Ω = [[0, -I], [I, 0]]` with
//! `ω(X, Y) = Xᵀ Ω Y`, and the standard structure `J₀` (multiplication by
//! `i` on `z = q + ip`) has the same matrix.

mod checks;
mod nijenhuis;
mod structure;
mod vector_field;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::expr::EvalError;
use crate::linalg::standard_block;

pub(crate) use checks::scan_grid;
pub use checks::{check_acs, check_compatibility, AcsReport, CompatibilityReport};
pub use nijenhuis::{nijenhuis, nijenhuis_at, NijenhuisReport, StructureJet};
pub use structure::AlmostComplexStructure;
pub use vector_field::{bracket, lie_bracket, FieldJet, FieldParseError, VectorField};

/// Upper bound on the number of sample points in a chart grid.
pub const MAX_GRID_POINTS: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PhaseSpaceError {
    #[error("invalid chart: {0}")]
    Chart(String),
    #[error("invalid structure: {0}")]
    Structure(String),
    #[error("evaluation failed at {point:?}: {source}")]
    Eval {
        point: Vec<f64>,
        #[source]
        source: EvalError,
    },
    #[error("entry ({row}, {col}) is not real at {point:?} (imaginary part {im:e})")]
    NotReal {
        row: usize,
        col: usize,
        im: f64,
        point: Vec<f64>,
    },
}

/// Sample range of one coordinate axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn sample(&self, k: usize) -> f64 {
        if self.count == 1 {
            return self.min;
        }
        self.min + (self.max - self.min) * k as f64 / (self.count - 1) as f64
    }
}

/// A Darboux chart on `R^{2n}` with a rectangular sample grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    n: usize,
    names: Vec<String>,
    axes: Vec<Axis>,
}

impl Chart {
    pub fn new(n: usize, axes: Vec<Axis>) -> Result<Chart, PhaseSpaceError> {
        if n == 0 {
            return Err(PhaseSpaceError::Chart("at least one degree of freedom required".into()));
        }
        if axes.len() != 2 * n {
            return Err(PhaseSpaceError::Chart(format!(
                "{} axes given for {} coordinates",
                axes.len(),
                2 * n
            )));
        }
        let mut total: usize = 1;
        for (k, a) in axes.iter().enumerate() {
            if a.count < 2 {
                return Err(PhaseSpaceError::Chart(format!("axis {k} needs at least 2 samples")));
            }
            if !(a.min.is_finite() && a.max.is_finite()) || a.min >= a.max {
                return Err(PhaseSpaceError::Chart(format!("axis {k} has an empty range")));
            }
            total = total.saturating_mul(a.count);
        }
        if total > MAX_GRID_POINTS {
            return Err(PhaseSpaceError::Chart(format!(
                "grid has {total} points (limit {MAX_GRID_POINTS})"
            )));
        }
        let names = (1..=n)
            .map(|l| format!("q{l}"))
            .chain((1..=n).map(|l| format!("p{l}")))
            .collect();
        Ok(Chart { n, names, axes })
    }

    pub fn uniform(n: usize, min: f64, max: f64, count: usize) -> Result<Chart, PhaseSpaceError> {
        Chart::new(n, vec![Axis { min, max, count }; 2 * n])
    }

    /// Nine samples per axis on `[-1, 1]`.
    pub fn standard(n: usize) -> Result<Chart, PhaseSpaceError> {
        Chart::uniform(n, -1.0, 1.0, 9)
    }

    pub fn degrees_of_freedom(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn coordinate_names(&self) -> &[String] {
        &self.names
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn grid_len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    /// Grid point number `index`; the first axis varies slowest.
    pub fn grid_point(&self, mut index: usize) -> Vec<f64> {
        let mut point = vec![0.0; self.axes.len()];
        for (slot, axis) in point.iter_mut().zip(&self.axes).rev() {
            *slot = axis.sample(index % axis.count);
            index /= axis.count;
        }
        point
    }

    pub fn grid_points(&self) -> Vec<Vec<f64>> {
        (0..self.grid_len()).map(|k| self.grid_point(k)).collect()
    }
}

/// The constant Darboux symplectic form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    matrix: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn standard(n: usize) -> SymplecticForm {
        SymplecticForm {
            matrix: standard_block(n),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `ω(u, v) = uᵀ Ω v`.
    pub fn apply(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        u.dot(&(&self.matrix * v))
    }
}
