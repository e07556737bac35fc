//! Degree-2 truncated Taylor jets.
//!
//! A [`Jet2`] carries a value together with its first and second derivative
//! with respect to a single scalar seed. Arithmetic on jets applies the
//! chain and Leibniz rules truncated at second order, so evaluating a field
//! written against `Jet2` at [`Jet2::lift`]`(y)` yields `(f(y), f'(y), f''(y))`
//! exactly up to floating-point rounding.
//!
//! Partial operations (`ln`, division, negative integer powers) return
//! [`JetError`] instead of producing non-finite values.

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Domain violations raised by partial jet primitives.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum JetError {
    #[error("logarithm of non-positive value {0}")]
    LogDomain(f64),
    #[error("division by a jet with zero value")]
    DivisionByZero,
    #[error("negative power {0} of a jet with zero value")]
    PowDomain(i32),
    #[error("primitive {0:?} expects a second operand")]
    MissingOperand(Primitive),
}

/// Value, first derivative and raw second derivative (not halved).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet2 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet2 {
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Jet2 { v, d1, d2 }
    }

    /// Seed jet of the identity map at `y`.
    pub const fn lift(y: f64) -> Self {
        Jet2 {
            v: y,
            d1: 1.0,
            d2: 0.0,
        }
    }

    pub const fn constant(c: f64) -> Self {
        Jet2 {
            v: c,
            d1: 0.0,
            d2: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }

    /// Composes a scalar function `g` with this jet given `g(v)`, `g'(v)`, `g''(v)`.
    #[inline]
    pub fn compose(self, g: f64, dg: f64, ddg: f64) -> Self {
        Jet2 {
            v: g,
            d1: dg * self.d1,
            d2: ddg * (self.d1 * self.d1) + dg * self.d2,
        }
    }

    pub fn scale(self, k: f64) -> Self {
        Jet2 {
            v: k * self.v,
            d1: k * self.d1,
            d2: k * self.d2,
        }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.compose(e, e, e)
    }

    pub fn ln(self) -> Result<Self, JetError> {
        if !(self.v > 0.0) {
            return Err(JetError::LogDomain(self.v));
        }
        let inv = 1.0 / self.v;
        Ok(self.compose(self.v.ln(), inv, -(inv * inv)))
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.compose(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.compose(c, -s, -c)
    }

    /// Integer power. Negative exponents require a non-zero value.
    pub fn powi(self, n: i32) -> Result<Self, JetError> {
        match n {
            0 => Ok(Jet2::constant(1.0)),
            1 => Ok(self),
            _ => {
                if n < 0 && self.v == 0.0 {
                    return Err(JetError::PowDomain(n));
                }
                let nf = f64::from(n);
                let g = self.v.powi(n);
                let dg = nf * self.v.powi(n - 1);
                let ddg = nf * (nf - 1.0) * self.v.powi(n - 2);
                Ok(self.compose(g, dg, ddg))
            }
        }
    }

    pub fn recip(self) -> Result<Self, JetError> {
        if self.v == 0.0 {
            return Err(JetError::DivisionByZero);
        }
        let inv = 1.0 / self.v;
        let inv2 = inv * inv;
        Ok(self.compose(inv, -inv2, 2.0 * inv2 * inv))
    }

    /// Quotient `self / rhs`, failing when `rhs.v == 0`.
    pub fn checked_div(self, rhs: Jet2) -> Result<Self, JetError> {
        if rhs.v == 0.0 {
            return Err(JetError::DivisionByZero);
        }
        // q = x/y, q' = (x' - q y')/y, q'' = (x'' - 2 q' y' - q y'')/y
        let q = self.v / rhs.v;
        let d1 = (self.d1 - q * rhs.d1) / rhs.v;
        let d2 = (self.d2 - 2.0 * d1 * rhs.d1 - q * rhs.d2) / rhs.v;
        Ok(Jet2 { v: q, d1, d2 })
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        Jet2 {
            v: self.v + rhs.v,
            d1: self.d1 + rhs.d1,
            d2: self.d2 + rhs.d2,
        }
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: f64) -> Jet2 {
        Jet2 {
            v: self.v + rhs,
            ..self
        }
    }
}

impl Add<Jet2> for f64 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        rhs + self
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        Jet2 {
            v: self.v - rhs.v,
            d1: self.d1 - rhs.d1,
            d2: self.d2 - rhs.d2,
        }
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: f64) -> Jet2 {
        Jet2 {
            v: self.v - rhs,
            ..self
        }
    }
}

impl Sub<Jet2> for f64 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        Jet2 {
            v: self - rhs.v,
            d1: -rhs.d1,
            d2: -rhs.d2,
        }
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        // The cross terms are grouped symmetrically so that x * y and y * x
        // agree bit-for-bit.
        Jet2 {
            v: self.v * rhs.v,
            d1: self.v * rhs.d1 + self.d1 * rhs.v,
            d2: (self.v * rhs.d2 + self.d2 * rhs.v) + 2.0 * (self.d1 * rhs.d1),
        }
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        self.scale(rhs)
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        rhs.scale(self)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2 {
            v: -self.v,
            d1: -self.d1,
            d2: -self.d2,
        }
    }
}

/// The fixed primitive set, for callers that dispatch on an operation tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Primitive {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Scale(f64),
    Exp,
    Ln,
    Sin,
    Cos,
    Powi(i32),
}

impl Primitive {
    pub fn is_binary(&self) -> bool {
        matches!(
            self,
            Primitive::Add | Primitive::Sub | Primitive::Mul | Primitive::Div
        )
    }

    /// Applies the primitive; binary operations read `rhs` and ignore it otherwise.
    pub fn apply(self, x: Jet2, rhs: Option<Jet2>) -> Result<Jet2, JetError> {
        let second = || rhs.ok_or(JetError::MissingOperand(self));
        match self {
            Primitive::Add => Ok(x + second()?),
            Primitive::Sub => Ok(x - second()?),
            Primitive::Mul => Ok(x * second()?),
            Primitive::Div => x.checked_div(second()?),
            Primitive::Neg => Ok(-x),
            Primitive::Scale(k) => Ok(x.scale(k)),
            Primitive::Exp => Ok(x.exp()),
            Primitive::Ln => x.ln(),
            Primitive::Sin => Ok(x.sin()),
            Primitive::Cos => Ok(x.cos()),
            Primitive::Powi(n) => x.powi(n),
        }
    }
}
