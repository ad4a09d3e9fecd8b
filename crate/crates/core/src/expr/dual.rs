use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// A complex value carrying its first partial derivatives with respect to
/// each declared real variable.
#[derive(Debug, Clone, PartialEq)]
pub struct DualValue {
    pub value: Complex64,
    pub partials: Vec<Complex64>,
}

impl DualValue {
    pub fn constant(value: Complex64, nvars: usize) -> Self {
        DualValue {
            value,
            partials: vec![Complex64::new(0.0, 0.0); nvars],
        }
    }

    /// The `index`-th coordinate evaluated at `value`.
    pub fn variable(value: f64, index: usize, nvars: usize) -> Self {
        let mut d = DualValue::constant(Complex64::new(value, 0.0), nvars);
        d.partials[index] = Complex64::new(1.0, 0.0);
        d
    }

    /// Chain rule for a scalar function with value `f` and derivative `df`
    /// at `self.value`.
    pub(crate) fn chain(self, f: Complex64, df: Complex64) -> Self {
        DualValue {
            value: f,
            partials: self.partials.into_iter().map(|p| p * df).collect(),
        }
    }
}

impl Add for DualValue {
    type Output = DualValue;
    fn add(mut self, rhs: DualValue) -> DualValue {
        self.value += rhs.value;
        for (a, b) in self.partials.iter_mut().zip(rhs.partials) {
            *a += b;
        }
        self
    }
}

impl Sub for DualValue {
    type Output = DualValue;
    fn sub(mut self, rhs: DualValue) -> DualValue {
        self.value -= rhs.value;
        for (a, b) in self.partials.iter_mut().zip(rhs.partials) {
            *a -= b;
        }
        self
    }
}

impl Mul for DualValue {
    type Output = DualValue;
    // product rule
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: DualValue) -> DualValue {
        let (u, v) = (self.value, rhs.value);
        DualValue {
            value: u * v,
            partials: self
                .partials
                .into_iter()
                .zip(rhs.partials)
                .map(|(du, dv)| du * v + u * dv)
                .collect(),
        }
    }
}

impl Neg for DualValue {
    type Output = DualValue;
    fn neg(self) -> DualValue {
        DualValue {
            value: -self.value,
            partials: self.partials.into_iter().map(|p| -p).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variable_partials_are_unit_vectors() {
        let d = DualValue::variable(2.0, 1, 3);
        assert_eq!(
            d.partials,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0)
            ]
        );
    }

    #[test]
    fn product_rule() {
        let x = DualValue::variable(3.0, 0, 2);
        let y = DualValue::variable(-2.0, 1, 2);
        let p = x.clone() * y.clone();
        assert_eq!(p.value, Complex64::new(-6.0, 0.0));
        assert_eq!(p.partials[0], Complex64::new(-2.0, 0.0));
        assert_eq!(p.partials[1], Complex64::new(3.0, 0.0));
        let s = x + y;
        assert_eq!(s.partials, vec![Complex64::new(1.0, 0.0); 2]);
    }
}
