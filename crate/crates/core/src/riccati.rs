//! The local quadratic Taylor model and its exact Riccati flow.
//!
//! At a state `y` the right-hand side is replaced by `a w^2 + b w + c` with
//! `a = f''(y)/2`, `b = f'(y)`, `c = f(y)`. The increment `w(h)` of the
//! Riccati equation `w' = a w^2 + b w + c`, `w(0) = 0`, gives the next state
//! `y + w(h)`. Depending on the discriminant `delta = b^2 - 4ac` the increment
//! is evaluated with hyperbolic functions, trigonometric functions, or a
//! truncated expansion when `|delta|` is numerically zero. Finite-time blow-up
//! of the model is detected through [`QuadraticModel::h_max`].

use thiserror::Error;

use crate::field::{derivatives_of, Derivatives, EvalError, ScalarField};
use crate::special::arccot_real;

/// Coefficients of the quadratic model at one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticModel {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub delta: f64,
}

/// Why a step of the requested size is not admissible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UndefinedReason {
    /// `h` reaches the blow-up time of the model.
    StepExceedsHmax,
    /// `2 - h b` falls below `sqrt(tol0)`.
    StabilityDenominator,
}

impl std::fmt::Display for UndefinedReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UndefinedReason::StepExceedsHmax => f.write_str("step-exceeds-hmax"),
            UndefinedReason::StabilityDenominator => f.write_str("stability-denominator"),
        }
    }
}

/// Which step formula applies to `(h, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `delta >= 4 tol0`
    HyperbolicPlus,
    /// `delta <= -4 tol0`
    TrigMinus,
    /// `|delta| < 4 tol0`
    NearDegenerate,
    Undefined(UndefinedReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum RiccatiError {
    #[error("t = {t} is outside [0, {h_max}) where the Riccati solution exists")]
    OutsideExistenceInterval { t: f64, h_max: f64 },
}

impl QuadraticModel {
    /// Builds the model from its coefficients. All inputs must be finite.
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        QuadraticModel {
            a,
            b,
            c,
            delta: b * b - 4.0 * a * c,
        }
    }

    pub fn from_derivatives(d: Derivatives) -> Self {
        QuadraticModel::new(0.5 * d.fpp, d.fp, d.f)
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.delta.is_finite()
    }

    /// First positive time at which the model solution blows up (`+inf` if never).
    pub fn h_max(&self) -> f64 {
        let (b, delta) = (self.b, self.delta);
        if delta == 0.0 {
            if b > 0.0 {
                2.0 / b
            } else {
                f64::INFINITY
            }
        } else if delta > 0.0 {
            let s = delta.sqrt();
            if s < b {
                let gap = b - s;
                if gap <= 1e-300 {
                    return f64::INFINITY;
                }
                // ln((b+s)/(b-s)) / s
                (2.0 * s / gap).ln_1p() / s
            } else {
                f64::INFINITY
            }
        } else {
            let s = (-delta).sqrt();
            2.0 / s * arccot_real(b / s)
        }
    }

    /// Classifies `(h, y)` into the admissible regions.
    ///
    /// The stability denominator is checked first, then the blow-up time.
    pub fn classify(&self, h: f64, tol0: f64) -> Branch {
        if !(2.0 - h * self.b >= tol0.sqrt()) {
            return Branch::Undefined(UndefinedReason::StabilityDenominator);
        }
        let threshold = 4.0 * tol0;
        if self.delta >= threshold {
            if h < self.h_max() {
                Branch::HyperbolicPlus
            } else {
                Branch::Undefined(UndefinedReason::StepExceedsHmax)
            }
        } else if self.delta <= -threshold {
            if h < self.h_max() {
                Branch::TrigMinus
            } else {
                Branch::Undefined(UndefinedReason::StepExceedsHmax)
            }
        } else {
            Branch::NearDegenerate
        }
    }

    /// Increment of the sinh/cosh formula. Meaningful for `delta > 0`.
    pub fn increment_hyperbolic(&self, h: f64) -> f64 {
        let s = self.delta.sqrt();
        let x = 0.5 * s * h;
        let (sh, ch) = (x.sinh(), x.cosh());
        2.0 * self.c * sh / (s * ch - self.b * sh)
    }

    /// Increment of the sin/cos formula. Meaningful for `delta < 0`.
    pub fn increment_trig(&self, h: f64) -> f64 {
        let s = (-self.delta).sqrt();
        let x = 0.5 * s * h;
        let (sn, cs) = x.sin_cos();
        2.0 * self.c * sn / (s * cs - self.b * sn)
    }

    /// Increment of the expansion used when `delta` is numerically zero.
    pub fn increment_near_degenerate(&self, h: f64) -> f64 {
        let q = 2.0 - self.b * h;
        2.0 * self.c * h / q - h * h * h * self.c * self.delta / (3.0 * q * q)
    }

    /// Increment `w(h)` on the matched branch.
    pub fn increment(&self, h: f64, tol0: f64) -> Result<f64, UndefinedReason> {
        self.increment_on(self.classify(h, tol0), h)
    }

    /// Increment on an already classified branch.
    pub fn increment_on(&self, branch: Branch, h: f64) -> Result<f64, UndefinedReason> {
        match branch {
            Branch::HyperbolicPlus => Ok(self.increment_hyperbolic(h)),
            Branch::TrigMinus => Ok(self.increment_trig(h)),
            Branch::NearDegenerate => Ok(self.increment_near_degenerate(h)),
            Branch::Undefined(reason) => Err(reason),
        }
    }
}

/// Quadratic model of `field` at `y`.
pub fn quadratic_model<F: ScalarField + ?Sized>(
    field: &F,
    y: f64,
) -> Result<QuadraticModel, EvalError> {
    let m = QuadraticModel::from_derivatives(derivatives_of(field, y)?);
    if m.is_finite() {
        Ok(m)
    } else {
        Err(EvalError::NonFinite { y })
    }
}

pub fn h_max(model: &QuadraticModel) -> f64 {
    model.h_max()
}

pub fn classify_branch(model: &QuadraticModel, h: f64, tol0: f64) -> Branch {
    model.classify(h, tol0)
}

/// One step `y -> y + w(h)` of the third-order quadratic Taylor method.
pub fn qt3_step(model: &QuadraticModel, y: f64, h: f64, tol0: f64) -> Result<f64, UndefinedReason> {
    model.increment(h, tol0).map(|w| y + w)
}

const PSI_SERIES_CUTOFF: f64 = 1e-4;

/// `sinh(v) / (u sinh(v) + v cosh(v))` for real `v`, extended to `v = 0`.
pub fn psi(u: f64, v: f64) -> f64 {
    if v.abs() < PSI_SERIES_CUTOFF {
        let p = 1.0 + u;
        let v2 = v * v;
        1.0 / p - v2 / (3.0 * p * p) + (u + 6.0) * v2 * v2 / (45.0 * p * p * p)
    } else {
        let (sh, ch) = (v.sinh(), v.cosh());
        sh / (u * sh + v * ch)
    }
}

/// `psi(u, i theta)`, which is real: `sin(theta) / (u sin(theta) + theta cos(theta))`.
pub fn psi_imaginary(u: f64, theta: f64) -> f64 {
    if theta.abs() < PSI_SERIES_CUTOFF {
        let p = 1.0 + u;
        let t2 = theta * theta;
        1.0 / p + t2 / (3.0 * p * p) + (u + 6.0) * t2 * t2 / (45.0 * p * p * p)
    } else {
        let (sn, cs) = theta.sin_cos();
        sn / (u * sn + theta * cs)
    }
}

/// Exact solution of `w' = a w^2 + b w + c`, `w(0) = 0` at time `t`,
/// written as `c t psi(t alpha, t beta)` with `alpha = -b/2`, `beta = sqrt(delta)/2`.
pub fn riccati_exact(model: &QuadraticModel, t: f64) -> Result<f64, RiccatiError> {
    let h_max = model.h_max();
    if !(t >= 0.0 && t < h_max) {
        return Err(RiccatiError::OutsideExistenceInterval { t, h_max });
    }
    let u = -0.5 * model.b * t;
    let p = if model.delta >= 0.0 {
        psi(u, 0.5 * model.delta.sqrt() * t)
    } else {
        psi_imaginary(u, 0.5 * (-model.delta).sqrt() * t)
    };
    Ok(model.c * t * p)
}
