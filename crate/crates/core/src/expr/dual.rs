use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::Real;

/// A value paired with its exact gradient with respect to the chart
/// coordinates (first-order forward-mode differentiation).
#[derive(Clone, Debug, PartialEq)]
pub struct DualValue<T> {
    pub value: T,
    pub derivatives: Vec<T>,
}

impl<T: Real> DualValue<T> {
    /// A constant: zero gradient.
    pub fn constant(value: T, dimension: usize) -> Self {
        DualValue {
            value,
            derivatives: vec![T::zero(); dimension],
        }
    }

    /// Coordinate function `x_{index+1}`: gradient is the standard basis vector.
    pub fn variable(value: T, index: usize, dimension: usize) -> Self {
        let mut derivatives = vec![T::zero(); dimension];
        derivatives[index] = T::one();
        DualValue { value, derivatives }
    }

    pub fn dimension(&self) -> usize {
        self.derivatives.len()
    }

    /// Applies a scalar function given its value and first derivative at
    /// `self.value`.
    pub fn chain(&self, value: T, slope: T) -> Self {
        DualValue {
            value,
            derivatives: self.derivatives.iter().map(|&d| d * slope).collect(),
        }
    }

    pub fn sin(&self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }

    pub fn cos(&self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e)
    }

    /// Natural logarithm; caller guarantees a positive argument.
    pub fn ln(&self) -> Self {
        self.chain(self.value.ln(), T::one() / self.value)
    }

    /// Square root; caller guarantees a positive argument.
    pub fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, T::one() / (s + s))
    }

    /// Constant real exponent.
    pub fn powf(&self, exponent: T) -> Self {
        if exponent == T::zero() {
            return DualValue::constant(T::one(), self.dimension());
        }
        let value = self.value.powf(exponent);
        let slope = exponent * self.value.powf(exponent - T::one());
        self.chain(value, slope)
    }

    /// Constant integer exponent; exact for negative bases.
    pub fn powi(&self, exponent: i32) -> Self {
        if exponent == 0 {
            return DualValue::constant(T::one(), self.dimension());
        }
        let value = self.value.powi(exponent);
        let slope = T::lit(exponent as f64) * self.value.powi(exponent - 1);
        self.chain(value, slope)
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.derivatives.iter().all(|d| d.is_finite())
    }
}

impl<T: Real> Add for DualValue<T> {
    type Output = DualValue<T>;
    fn add(mut self, rhs: Self) -> Self {
        self.value += rhs.value;
        for (a, b) in self.derivatives.iter_mut().zip(rhs.derivatives) {
            *a += b;
        }
        self
    }
}

impl<T: Real> Sub for DualValue<T> {
    type Output = DualValue<T>;
    fn sub(mut self, rhs: Self) -> Self {
        self.value -= rhs.value;
        for (a, b) in self.derivatives.iter_mut().zip(rhs.derivatives) {
            *a -= b;
        }
        self
    }
}

impl<T: Real> Mul for DualValue<T> {
    type Output = DualValue<T>;
    // product rule
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Self) -> Self {
        let (u, v) = (self.value, rhs.value);
        DualValue {
            value: u * v,
            derivatives: self
                .derivatives
                .iter()
                .zip(&rhs.derivatives)
                .map(|(&du, &dv)| du * v + u * dv)
                .collect(),
        }
    }
}

impl<T: Real> Div for DualValue<T> {
    type Output = DualValue<T>;
    /// Caller guarantees a nonzero denominator.
    fn div(self, rhs: Self) -> Self {
        let (u, v) = (self.value, rhs.value);
        let v2 = v * v;
        DualValue {
            value: u / v,
            derivatives: self
                .derivatives
                .iter()
                .zip(&rhs.derivatives)
                .map(|(&du, &dv)| (du * v - u * dv) / v2)
                .collect(),
        }
    }
}

impl<T: Real> Neg for DualValue<T> {
    type Output = DualValue<T>;
    fn neg(mut self) -> Self {
        self.value = -self.value;
        for d in &mut self.derivatives {
            *d = -*d;
        }
        self
    }
}
