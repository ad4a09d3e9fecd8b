use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{FockError, FockSpace, Operator};

/// The ladder family of one mode, embedded in the full tensor product.
#[derive(Debug, Clone)]
pub struct ModeOperators {
    pub a: Operator,
    pub a_dag: Operator,
    pub q: Operator,
    pub p: Operator,
    /// `A = Q + iP = √2·a`.
    pub big_a: Operator,
    pub big_a_dag: Operator,
}

/// `a|n⟩ = √n |n−1⟩` on `dim` levels.
pub(crate) fn ladder(dim: usize) -> DMatrix<Complex64> {
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// `I ⊗ … ⊗ x ⊗ … ⊗ I` with `x` in slot `mode`; mode 0 is the leftmost factor.
fn embed(x: &DMatrix<Complex64>, mode: usize, space: &FockSpace) -> DMatrix<Complex64> {
    let d = space.dim();
    let left = d.pow(mode as u32);
    let right = d.pow((space.modes() - mode - 1) as u32);
    let mut m = x.clone();
    if left > 1 {
        m = DMatrix::identity(left, left).kronecker(&m);
    }
    if right > 1 {
        m = m.kronecker(&DMatrix::identity(right, right));
    }
    m
}

pub fn build_operators(space: &FockSpace) -> Result<Vec<ModeOperators>, FockError> {
    let a1 = ladder(space.dim());
    let i = Complex64::i();
    let root = Complex64::new(SQRT_2, 0.0);
    Ok((0..space.modes())
        .map(|mode| {
            let l = mode + 1;
            let a = embed(&a1, mode, space);
            let a_dag = a.adjoint();
            let q = (&a + &a_dag).unscale(SQRT_2);
            let p = (&a - &a_dag) / (i * root);
            let big_a = &a * root;
            let big_a_dag = &a_dag * root;
            ModeOperators {
                a: Operator::new(format!("a{l}"), a),
                a_dag: Operator::new(format!("a{l}†"), a_dag),
                q: Operator::new(format!("Q{l}"), q),
                p: Operator::new(format!("P{l}"), p),
                big_a: Operator::new(format!("A{l}"), big_a),
                big_a_dag: Operator::new(format!("A{l}†"), big_a_dag),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_c;

    fn top_corrupted_block(m: &DMatrix<Complex64>, keep: usize) -> f64 {
        max_abs_c(&m.view((0, 0), (keep, keep)).into_owned())
    }

    #[test]
    fn ladder_matrix_element() {
        let space = FockSpace::single(4).unwrap();
        let ops = &build_operators(&space).unwrap()[0];
        assert_eq!(ops.a.matrix()[(1, 2)], Complex64::new(2f64.sqrt(), 0.0));
        assert_eq!(ops.a.matrix()[(2, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn heisenberg_algebra_below_the_top_level() {
        let space = FockSpace::single(64).unwrap();
        let ops = &build_operators(&space).unwrap()[0];
        let id = DMatrix::<Complex64>::identity(64, 64);
        let qp = ops.q.commutator(&ops.p).matrix() - id.scale(1.0) * Complex64::i();
        assert!(top_corrupted_block(&qp, 62) < 1e-12);
        // the top level carries the truncation defect
        assert!((qp[(63, 63)].norm() - 64.0).abs() < 1e-9);
        let aa = ops.big_a.commutator(&ops.big_a_dag).matrix() - id * Complex64::new(2.0, 0.0);
        assert!(top_corrupted_block(&aa, 62) < 1e-12);
    }

    #[test]
    fn quadratures_are_hermitian_and_a_is_q_plus_ip() {
        let space = FockSpace::single(10).unwrap();
        let ops = &build_operators(&space).unwrap()[0];
        assert!(max_abs_c(&(ops.q.matrix() - ops.q.matrix().adjoint())) < 1e-15);
        assert!(max_abs_c(&(ops.p.matrix() - ops.p.matrix().adjoint())) < 1e-15);
        let a = ops.q.matrix() + ops.p.matrix() * Complex64::i();
        assert!(max_abs_c(&(a - ops.big_a.matrix())) < 1e-14);
    }

    #[test]
    fn modes_commute() {
        let space = FockSpace::new(5, 2).unwrap();
        let ops = build_operators(&space).unwrap();
        assert_eq!(ops[0].a.dim(), 25);
        let c = ops[0].a.commutator(&ops[1].a_dag);
        assert!(max_abs_c(c.matrix()) < 1e-15);
        // mode 0 is the leftmost tensor factor: a1 |0,1⟩ = 0, a1 |1,0⟩ = |0,0⟩
        assert_eq!(ops[0].a.matrix()[(0, 5)], Complex64::new(1.0, 0.0));
        assert_eq!(ops[1].a.matrix()[(0, 1)], Complex64::new(1.0, 0.0));
    }
}
