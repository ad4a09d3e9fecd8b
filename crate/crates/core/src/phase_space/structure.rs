use nalgebra::DMatrix;

use super::PhaseSpaceError;
use crate::expr::Expr;
use crate::linalg::standard_block;

/// Imaginary parts below this are treated as roundoff when a real entry is
/// expected.
const REAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
enum Field {
    Constant(DMatrix<f64>),
    /// `J(x) = R J₀ R⁻¹` with `R = exp(θ(x) K)`.
    Rotated {
        angle: Expr,
        generator: DMatrix<f64>,
    },
    /// Row-major entries.
    Explicit(Vec<Expr>),
}

/// A matrix-valued field `x ↦ J(x)` on a `2n`-dimensional chart.
///
/// `J² = -1` is not enforced at construction; use
/// [`check_acs`](super::check_acs) on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AlmostComplexStructure {
    dim: usize,
    field: Field,
}

fn check_even_dim(dim: usize) -> Result<(), PhaseSpaceError> {
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(PhaseSpaceError::Structure(format!(
            "dimension {dim} is not a positive even number"
        )));
    }
    Ok(())
}

impl AlmostComplexStructure {
    /// The constant structure `J₀`.
    pub fn standard(n: usize) -> Self {
        AlmostComplexStructure {
            dim: 2 * n,
            field: Field::Constant(standard_block(n)),
        }
    }

    pub fn constant(matrix: DMatrix<f64>) -> Result<Self, PhaseSpaceError> {
        if !matrix.is_square() {
            return Err(PhaseSpaceError::Structure("matrix is not square".into()));
        }
        check_even_dim(matrix.nrows())?;
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(PhaseSpaceError::Structure("non-finite entry".into()));
        }
        Ok(AlmostComplexStructure {
            dim: matrix.nrows(),
            field: Field::Constant(matrix),
        })
    }

    /// Conjugation of `J₀` by the plane rotation through `angle` in the
    /// coordinate plane `axes = (a, b)` (0-based, block order).
    pub fn rotated(angle: Expr, axes: (usize, usize), n: usize) -> Result<Self, PhaseSpaceError> {
        let dim = 2 * n;
        let (a, b) = axes;
        if a >= dim || b >= dim || a == b {
            return Err(PhaseSpaceError::Structure(format!(
                "axis pair ({a}, {b}) invalid for dimension {dim}"
            )));
        }
        let mut k = DMatrix::zeros(dim, dim);
        k[(b, a)] = 1.0;
        k[(a, b)] = -1.0;
        Self::rotated_with_generator(angle, k)
    }

    /// Conjugation of `J₀` by `exp(angle · generator)`.
    pub fn rotated_with_generator(angle: Expr, generator: DMatrix<f64>) -> Result<Self, PhaseSpaceError> {
        if !generator.is_square() {
            return Err(PhaseSpaceError::Structure("generator is not square".into()));
        }
        let dim = generator.nrows();
        check_even_dim(dim)?;
        if angle.variables().len() != dim {
            return Err(PhaseSpaceError::Structure(format!(
                "angle declared over {} coordinates, chart has {dim}",
                angle.variables().len()
            )));
        }
        Ok(AlmostComplexStructure {
            dim,
            field: Field::Rotated { angle, generator },
        })
    }

    /// `entries[r][c]` gives `J[r][c]` as an expression in the chart
    /// coordinates.
    pub fn explicit(entries: Vec<Vec<Expr>>) -> Result<Self, PhaseSpaceError> {
        let dim = entries.len();
        check_even_dim(dim)?;
        if entries.iter().any(|row| row.len() != dim) {
            return Err(PhaseSpaceError::Structure("entries are not square".into()));
        }
        let flat: Vec<Expr> = entries.into_iter().flatten().collect();
        if flat.iter().any(|e| e.variables().len() != dim) {
            return Err(PhaseSpaceError::Structure(format!(
                "entries must be declared over {dim} coordinates"
            )));
        }
        Ok(AlmostComplexStructure {
            dim,
            field: Field::Explicit(flat),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.field, Field::Constant(_))
    }

    pub fn eval(&self, point: &[f64]) -> Result<DMatrix<f64>, PhaseSpaceError> {
        Ok(self.eval_with_derivatives(point)?.0)
    }

    /// `J(x)` together with `∂J/∂x_k` for every coordinate `k`.
    pub fn eval_with_derivatives(&self, point: &[f64]) -> Result<(DMatrix<f64>, Vec<DMatrix<f64>>), PhaseSpaceError> {
        let d = self.dim;
        if point.len() != d {
            return Err(PhaseSpaceError::Structure(format!(
                "point has {} coordinates, structure expects {d}",
                point.len()
            )));
        }
        let eval_err = |source| PhaseSpaceError::Eval {
            point: point.to_vec(),
            source,
        };
        match &self.field {
            Field::Constant(m) => Ok((m.clone(), vec![DMatrix::zeros(d, d); d])),
            Field::Rotated { angle, generator } => {
                let theta = angle.eval_dual(point).map_err(eval_err)?;
                if theta.value.im.abs() > REAL_TOL {
                    return Err(PhaseSpaceError::NotReal {
                        row: 0,
                        col: 0,
                        im: theta.value.im,
                        point: point.to_vec(),
                    });
                }
                let t = theta.value.re;
                let r = (generator * t).exp();
                let r_inv = (generator * -t).exp();
                let j0 = standard_block(d / 2);
                let j = &r * j0 * r_inv;
                // dJ/dθ = [K, J]
                let comm = generator * &j - &j * generator;
                let derivs = theta.partials.iter().map(|p| &comm * p.re).collect();
                Ok((j, derivs))
            }
            Field::Explicit(entries) => {
                let mut j = DMatrix::zeros(d, d);
                let mut derivs = vec![DMatrix::zeros(d, d); d];
                for (idx, e) in entries.iter().enumerate() {
                    let (row, col) = (idx / d, idx % d);
                    let v = e.eval_dual(point).map_err(eval_err)?;
                    if v.value.im.abs() > REAL_TOL {
                        return Err(PhaseSpaceError::NotReal {
                            row,
                            col,
                            im: v.value.im,
                            point: point.to_vec(),
                        });
                    }
                    j[(row, col)] = v.value.re;
                    for (k, p) in v.partials.iter().enumerate() {
                        derivs[k][(row, col)] = p.re;
                    }
                }
                Ok((j, derivs))
            }
        }
    }
}
