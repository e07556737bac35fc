//! Special functions needed by the step formulas and the reference solutions.

use std::f64::consts::{FRAC_PI_2, PI};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SpecialFnError {
    #[error("lambert_w0 requires x >= 0, got {0}")]
    NegativeArgument(f64),
    #[error("lambert_w0({x}) did not converge in {iterations} iterations")]
    NoConvergence { x: f64, iterations: u32 },
}

const LAMBERT_MAX_ITER: u32 = 50;

/// Principal branch of the Lambert W function on `x >= 0`.
///
/// Halley iteration on `w e^w - x = 0` started from `ln(1 + x)`, stopped once
/// the residual drops to `1e-14 (1 + x)`.
pub fn lambert_w0(x: f64) -> Result<f64, SpecialFnError> {
    if !(x >= 0.0) || x.is_infinite() {
        return Err(SpecialFnError::NegativeArgument(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let tol = 1e-14 * (1.0 + x);
    let mut w = x.ln_1p();
    for _ in 0..LAMBERT_MAX_ITER {
        let ew = w.exp();
        let r = w * ew - x;
        if r.abs() <= tol {
            return Ok(w);
        }
        let wp1 = w + 1.0;
        let step = r / (ew * wp1 - (w + 2.0) * r / (2.0 * wp1));
        w -= step;
    }
    let r = w * w.exp() - x;
    if r.abs() <= tol {
        Ok(w)
    } else {
        Err(SpecialFnError::NoConvergence {
            x,
            iterations: LAMBERT_MAX_ITER,
        })
    }
}

/// Arccotangent with range `(0, pi)`.
pub fn arccot_real(x: f64) -> f64 {
    if x > 0.0 {
        (1.0 / x).atan()
    } else if x < 0.0 {
        (1.0 / x).atan() + PI
    } else {
        FRAC_PI_2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, FRAC_PI_4};

    #[test]
    fn lambert_fixed_points() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(E).unwrap() - 1.0).abs() < 1e-15);
        // omega constant
        assert!((lambert_w0(1.0).unwrap() - 0.567_143_290_409_783_8).abs() < 1e-15);
    }

    #[test]
    fn lambert_rejects_negative() {
        assert_eq!(
            lambert_w0(-0.1),
            Err(SpecialFnError::NegativeArgument(-0.1))
        );
        assert!(lambert_w0(f64::NAN).is_err());
    }

    #[test]
    fn arccot_values() {
        assert_eq!(arccot_real(0.0), FRAC_PI_2);
        assert!((arccot_real(1.0) - FRAC_PI_4).abs() <= 1e-15);
        assert!((arccot_real(-1.0) - 3.0 * FRAC_PI_4).abs() <= 1e-15);
        assert!(arccot_real(1e300) > 0.0);
        assert!(arccot_real(-1e6) < PI);
    }
}
