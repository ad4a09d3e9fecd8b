use num_complex::Complex64;

use super::{DualValue, EvalError, Func, Node};

/// Arithmetic needed to walk an expression tree.
pub(crate) trait Scalar: Sized {
    fn constant(c: Complex64, nvars: usize) -> Self;
    fn variable(x: f64, index: usize, nvars: usize) -> Self;
    fn add(self, rhs: Self) -> Self;
    fn sub(self, rhs: Self) -> Self;
    fn mul(self, rhs: Self) -> Self;
    fn neg(self) -> Self;
    fn recip(self) -> Result<Self, EvalError>;
    fn powi(self, k: i32) -> Result<Self, EvalError>;
    fn apply(self, f: Func) -> Result<Self, EvalError>;
}

fn sqrt_arg(z: Complex64) -> Result<f64, EvalError> {
    if z.re > 0.0 && z.im.abs() <= 1e-14 * z.re.max(1.0) {
        Ok(z.re)
    } else {
        Err(EvalError::SqrtDomain { re: z.re, im: z.im })
    }
}

fn is_zero(z: Complex64) -> bool {
    z.re == 0.0 && z.im == 0.0
}

impl Scalar for Complex64 {
    fn constant(c: Complex64, _: usize) -> Self {
        c
    }
    fn variable(x: f64, _: usize, _: usize) -> Self {
        Complex64::new(x, 0.0)
    }
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    fn sub(self, rhs: Self) -> Self {
        self - rhs
    }
    fn mul(self, rhs: Self) -> Self {
        self * rhs
    }
    fn neg(self) -> Self {
        -self
    }
    fn recip(self) -> Result<Self, EvalError> {
        if is_zero(self) {
            return Err(EvalError::DivisionByZero);
        }
        Ok(self.inv())
    }
    fn powi(self, k: i32) -> Result<Self, EvalError> {
        if k < 0 && is_zero(self) {
            return Err(EvalError::DivisionByZero);
        }
        Ok(if k == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::powi(&self, k)
        })
    }
    fn apply(self, f: Func) -> Result<Self, EvalError> {
        Ok(match f {
            Func::Exp => self.exp(),
            Func::Sin => self.sin(),
            Func::Cos => self.cos(),
            Func::Sqrt => Complex64::new(sqrt_arg(self)?.sqrt(), 0.0),
        })
    }
}

impl Scalar for DualValue {
    fn constant(c: Complex64, nvars: usize) -> Self {
        DualValue::constant(c, nvars)
    }
    fn variable(x: f64, index: usize, nvars: usize) -> Self {
        DualValue::variable(x, index, nvars)
    }
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    fn sub(self, rhs: Self) -> Self {
        self - rhs
    }
    fn mul(self, rhs: Self) -> Self {
        self * rhs
    }
    fn neg(self) -> Self {
        -self
    }
    fn recip(self) -> Result<Self, EvalError> {
        let v = self.value;
        if is_zero(v) {
            return Err(EvalError::DivisionByZero);
        }
        let inv = v.inv();
        Ok(self.chain(inv, -inv * inv))
    }
    fn powi(self, k: i32) -> Result<Self, EvalError> {
        let v = self.value;
        if k == 0 {
            let n = self.partials.len();
            return Ok(DualValue::constant(Complex64::new(1.0, 0.0), n));
        }
        if k < 0 && is_zero(v) {
            return Err(EvalError::DivisionByZero);
        }
        let f = Complex64::powi(&v, k);
        let df = if k == 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::powi(&v, k - 1) * k as f64
        };
        Ok(self.chain(f, df))
    }
    fn apply(self, f: Func) -> Result<Self, EvalError> {
        let v = self.value;
        let (val, der) = match f {
            Func::Exp => {
                let e = v.exp();
                (e, e)
            }
            Func::Sin => (v.sin(), v.cos()),
            Func::Cos => (v.cos(), -v.sin()),
            Func::Sqrt => {
                let s = sqrt_arg(v)?.sqrt();
                (Complex64::new(s, 0.0), Complex64::new(0.5 / s, 0.0))
            }
        };
        Ok(self.chain(val, der))
    }
}

pub(crate) fn evaluate<S: Scalar>(node: &Node, point: &[f64]) -> Result<S, EvalError> {
    let n = point.len();
    Ok(match node {
        Node::Num(v) => S::constant(Complex64::new(*v, 0.0), n),
        Node::ImagUnit => S::constant(Complex64::i(), n),
        Node::Var(k) => {
            let x = *point.get(*k).ok_or(EvalError::Index(*k))?;
            S::variable(x, *k, n)
        }
        Node::Neg(a) => evaluate::<S>(a, point)?.neg(),
        Node::Add(a, b) => evaluate::<S>(a, point)?.add(evaluate(b, point)?),
        Node::Sub(a, b) => evaluate::<S>(a, point)?.sub(evaluate(b, point)?),
        Node::Mul(a, b) => evaluate::<S>(a, point)?.mul(evaluate(b, point)?),
        Node::Div(a, b) => {
            let num = evaluate::<S>(a, point)?;
            let den = evaluate::<S>(b, point)?;
            num.mul(den.recip()?)
        }
        Node::Pow(a, k) => evaluate::<S>(a, point)?.powi(*k)?,
        Node::Call(f, a) => evaluate::<S>(a, point)?.apply(*f)?,
    })
}

#[cfg(test)]
mod tests {
    use crate::expr::{parse, EvalError};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn linear_expression() {
        let e = parse("q + i*p", &["q", "p"]).unwrap();
        let d = e.eval_dual(&[1.0, 2.0]).unwrap();
        assert_eq!(d.value, c(1.0, 2.0));
        assert_eq!(d.partials, vec![c(1.0, 0.0), c(0.0, 1.0)]);
    }

    #[test]
    fn power_rule() {
        let e = parse("q^2", &["q"]).unwrap();
        let d = e.eval_dual(&[3.0]).unwrap();
        assert_eq!(d.value, c(9.0, 0.0));
        assert_eq!(d.partials[0], c(6.0, 0.0));
    }

    #[test]
    fn exp_of_i_q_matches_central_differences() {
        let e = parse("exp(i*q)", &["q"]).unwrap();
        let d = e.eval_dual(&[0.0]).unwrap();
        let h = 1e-6;
        let fd = (e.eval(&[h]).unwrap() - e.eval(&[-h]).unwrap()) / (2.0 * h);
        assert!((d.value - c(1.0, 0.0)).norm() < 1e-15);
        assert!((d.partials[0] - fd).norm() < 1e-8);
        assert!((d.partials[0] - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn division_by_zero() {
        let e = parse("1/q", &["q"]).unwrap();
        assert_eq!(e.eval(&[0.0]), Err(EvalError::DivisionByZero));
        assert_eq!(e.eval_dual(&[0.0]), Err(EvalError::DivisionByZero));
        let e = parse("q^-1", &["q"]).unwrap();
        assert_eq!(e.eval_dual(&[0.0]), Err(EvalError::DivisionByZero));
    }

    #[test]
    fn sqrt_domain() {
        let e = parse("sqrt(q)", &["q"]).unwrap();
        assert!(matches!(e.eval(&[-1.0]), Err(EvalError::SqrtDomain { .. })));
        assert!(matches!(e.eval(&[0.0]), Err(EvalError::SqrtDomain { .. })));
        let d = e.eval_dual(&[4.0]).unwrap();
        assert_eq!(d.value, c(2.0, 0.0));
        assert_eq!(d.partials[0], c(0.25, 0.0));
        let e = parse("sqrt(i*q)", &["q"]).unwrap();
        assert!(e.eval(&[1.0]).is_err());
    }

    #[test]
    fn arity_mismatch() {
        let e = parse("q", &["q", "p"]).unwrap();
        assert_eq!(e.eval(&[1.0]), Err(EvalError::Arity { expected: 2, got: 1 }));
    }

    #[test]
    fn trig_derivatives() {
        let e = parse("sin(q)*cos(p)", &["q", "p"]).unwrap();
        let (q, p) = (0.4, -1.1);
        let d = e.eval_dual(&[q, p]).unwrap();
        assert!((d.partials[0].re - q.cos() * p.cos()).abs() < 1e-15);
        assert!((d.partials[1].re + q.sin() * p.sin()).abs() < 1e-15);
    }
}
