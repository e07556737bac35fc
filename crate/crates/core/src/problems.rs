//! Built-in benchmark problems with their reference solutions.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::field::{Derivatives, FnField, ScalarField};
use crate::jet::Jet2;
use crate::special::{lambert_w0, SpecialFnError};

/// Growth rate `lambda` of the blow-up demonstration field.
pub const BLOWUP_LAMBDA: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("problem `{0}` has no closed-form solution")]
    NoExactSolution(String),
    #[error("unknown problem `{0}`")]
    Unknown(String),
    #[error(transparent)]
    Special(#[from] SpecialFnError),
}

type ExactFn = fn(f64) -> Result<f64, SpecialFnError>;

/// An initial value problem `y' = f(y)`, `y(0) = y0` on `[0, T]`.
#[derive(Clone)]
pub struct Problem {
    pub name: &'static str,
    pub field: Arc<dyn ScalarField>,
    pub y0: f64,
    pub t_end: f64,
    pub default_window: (f64, f64),
    exact: Option<ExactFn>,
}

impl Problem {
    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact(&self, t: f64) -> Result<f64, ProblemError> {
        exact_solution(self, t)
    }
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("y0", &self.y0)
            .field("t_end", &self.t_end)
            .field("default_window", &self.default_window)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

pub fn exact_solution(p: &Problem, t: f64) -> Result<f64, ProblemError> {
    let exact = p
        .exact
        .ok_or_else(|| ProblemError::NoExactSolution(p.name.to_string()))?;
    Ok(exact(t)?)
}

pub const PROBLEM_NAMES: [&str; 7] = [
    "logistic",
    "bernoulli_small",
    "bernoulli_one",
    "gompertz",
    "flame",
    "sine",
    "blowup_demo",
];

/// Problems with closed-form solutions, in table order.
pub const TABLE_PROBLEMS: [&str; 6] = [
    "logistic",
    "bernoulli_small",
    "bernoulli_one",
    "gompertz",
    "flame",
    "sine",
];

fn logistic_field() -> FnField {
    FnField::new("logistic", |y| Ok(y * (10.0 - y))).with_hand_derivatives(|y| Derivatives {
        f: y * (10.0 - y),
        fp: 10.0 - 2.0 * y,
        fpp: -2.0,
    })
}

fn bernoulli_field() -> FnField {
    FnField::new("bernoulli", |y: Jet2| {
        let r = y.scale(1.0 / 20.0);
        Ok(y * (1.0 - r * r))
    })
    .with_hand_derivatives(|y| Derivatives {
        f: y - y * y * y / 400.0,
        fp: 1.0 - 3.0 * y * y / 400.0,
        fpp: -6.0 * y / 400.0,
    })
}

fn gompertz_field() -> FnField {
    FnField::new("gompertz", |y: Jet2| {
        Ok(y * Jet2::constant(30.0).checked_div(y)?.ln()?)
    })
    .with_hand_derivatives(|y| {
        let l = (30.0 / y).ln();
        Derivatives {
            f: y * l,
            fp: l - 1.0,
            fpp: -1.0 / y,
        }
    })
}

fn flame_field() -> FnField {
    FnField::new("flame", |y: Jet2| Ok(y.powi(2)? - y.powi(3)?)).with_hand_derivatives(|y| {
        Derivatives {
            f: y * y - y * y * y,
            fp: 2.0 * y - 3.0 * y * y,
            fpp: 2.0 - 6.0 * y,
        }
    })
}

fn sine_field() -> FnField {
    FnField::new("sine", |y: Jet2| Ok(y.sin())).with_hand_derivatives(|y| Derivatives {
        f: y.sin(),
        fp: y.cos(),
        fpp: -y.sin(),
    })
}

/// `(y - lambda)(1 - y) exp(-y^4)`: bounded, but its quadratic model at 0
/// blows up at `ln(lambda)/(lambda - 1)`.
pub fn blowup_field(lambda: f64) -> FnField {
    FnField::new("blowup", move |y: Jet2| {
        Ok((y - lambda) * (1.0 - y) * (-y.powi(4)?).exp())
    })
    .with_hand_derivatives(move |y| {
        let p = (y - lambda) * (1.0 - y);
        let dp = 1.0 + lambda - 2.0 * y;
        let ddp = -2.0;
        let q = (-y.powi(4)).exp();
        let dq = -4.0 * y.powi(3) * q;
        let ddq = (16.0 * y.powi(6) - 12.0 * y * y) * q;
        Derivatives {
            f: p * q,
            fp: dp * q + p * dq,
            fpp: ddp * q + 2.0 * dp * dq + p * ddq,
        }
    })
}

fn logistic_exact(t: f64) -> Result<f64, SpecialFnError> {
    let e = (10.0 * t).exp();
    Ok(10.0 * e / (19.0 + e))
}

fn bernoulli_small_exact(t: f64) -> Result<f64, SpecialFnError> {
    // 4e10 - 1 is exactly representable
    let k = 4.0e10 - 1.0;
    Ok(20.0 / (k * (-2.0 * t).exp() + 1.0).sqrt())
}

fn bernoulli_one_exact(t: f64) -> Result<f64, SpecialFnError> {
    Ok(20.0 / (399.0 * (-2.0 * t).exp() + 1.0).sqrt())
}

fn gompertz_exact(t: f64) -> Result<f64, SpecialFnError> {
    Ok(30.0 * (29.0f64 / 30.0).powf((-t).exp()))
}

fn flame_exact(t: f64) -> Result<f64, SpecialFnError> {
    let x = (1.0 / 49.0) * (1.0 / 49.0 - t).exp();
    Ok(1.0 / (1.0 + lambert_w0(x)?))
}

fn sine_exact(t: f64) -> Result<f64, SpecialFnError> {
    Ok(2.0 * (0.005f64.tan() * t.exp()).atan())
}

fn problem(
    name: &'static str,
    field: FnField,
    y0: f64,
    t_end: f64,
    default_window: (f64, f64),
    exact: Option<ExactFn>,
) -> Problem {
    Problem {
        name,
        field: Arc::new(field),
        y0,
        t_end,
        default_window,
        exact,
    }
}

pub fn builtin_problems() -> Vec<Problem> {
    vec![
        problem(
            "logistic",
            logistic_field(),
            0.5,
            2.0,
            (0.0, 10.5),
            Some(logistic_exact),
        ),
        problem(
            "bernoulli_small",
            bernoulli_field(),
            1e-4,
            5.0,
            (0.0, 20.5),
            Some(bernoulli_small_exact),
        ),
        problem(
            "bernoulli_one",
            bernoulli_field(),
            1.0,
            5.0,
            (0.0, 20.5),
            Some(bernoulli_one_exact),
        ),
        // ln(30/y) is undefined at 0, so the window starts at 1
        problem(
            "gompertz",
            gompertz_field(),
            29.0,
            2.0,
            (1.0, 30.5),
            Some(gompertz_exact),
        ),
        problem(
            "flame",
            flame_field(),
            0.98,
            10.0,
            (0.0, 1.1),
            Some(flame_exact),
        ),
        problem(
            "sine",
            sine_field(),
            0.01,
            1.0,
            (0.0, std::f64::consts::PI),
            Some(sine_exact),
        ),
        // the true solution settles near -1.74
        problem(
            "blowup_demo",
            blowup_field(BLOWUP_LAMBDA),
            0.0,
            2.0,
            (-2.0, 2.0),
            None,
        ),
    ]
}

pub fn find_problem(name: &str) -> Result<Problem, ProblemError> {
    builtin_problems()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| ProblemError::Unknown(name.to_string()))
}
