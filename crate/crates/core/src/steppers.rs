//! One-step methods: explicit Runge-Kutta baselines, Euler, Rosenbrock-Euler
//! and the quadratic Taylor method.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::field::{derivatives_of, EvalError, ScalarField};
use crate::riccati::{quadratic_model, UndefinedReason};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("step undefined: {0}")]
    Undefined(UndefinedReason),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown method `{0}`")]
pub struct UnknownMethod(pub String);

/// Explicit Runge-Kutta coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    pub name: &'static str,
    /// Strictly lower triangular, `a[i][j]` for `j < i`.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableauError {
    #[error("tableau {0}: dimensions of a, b, c disagree")]
    Shape(&'static str),
    #[error("tableau {0}: a is not strictly lower triangular")]
    NotExplicit(&'static str),
    #[error("tableau {0}: weights sum to {1}, expected 1")]
    Weights(&'static str, f64),
    #[error("tableau {name}: row {row} sums to {sum}, node is {node}")]
    RowSum {
        name: &'static str,
        row: usize,
        sum: f64,
        node: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableauName {
    K3,
    BS3,
    RK4,
}

impl ButcherTableau {
    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// Checks explicitness, `sum b = 1` and `c_i = sum_j a_ij`.
    pub fn validate(&self) -> Result<(), TableauError> {
        let s = self.stages();
        if self.a.len() != s || self.c.len() != s || self.a.iter().any(|row| row.len() != s) {
            return Err(TableauError::Shape(self.name));
        }
        for (i, row) in self.a.iter().enumerate() {
            if row[i..].iter().any(|&x| x != 0.0) {
                return Err(TableauError::NotExplicit(self.name));
            }
        }
        let wsum: f64 = self.b.iter().sum();
        if (wsum - 1.0).abs() > 1e-15 {
            return Err(TableauError::Weights(self.name, wsum));
        }
        for (row, (coeffs, &node)) in self.a.iter().zip(&self.c).enumerate() {
            let sum: f64 = coeffs.iter().sum();
            if (sum - node).abs() > 1e-15 {
                return Err(TableauError::RowSum {
                    name: self.name,
                    row,
                    sum,
                    node,
                });
            }
        }
        Ok(())
    }
}

pub fn make_tableau(name: TableauName) -> ButcherTableau {
    match name {
        TableauName::K3 => ButcherTableau {
            name: "K3",
            a: vec![
                vec![0.0, 0.0, 0.0],
                vec![0.5, 0.0, 0.0],
                vec![-1.0, 2.0, 0.0],
            ],
            b: vec![1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
            c: vec![0.0, 0.5, 1.0],
        },
        TableauName::BS3 => ButcherTableau {
            name: "BS3",
            a: vec![
                vec![0.0, 0.0, 0.0, 0.0],
                vec![0.5, 0.0, 0.0, 0.0],
                vec![0.0, 0.75, 0.0, 0.0],
                vec![2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0, 0.0],
            ],
            b: vec![2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0, 0.0],
            c: vec![0.0, 0.5, 0.75, 1.0],
        },
        TableauName::RK4 => ButcherTableau {
            name: "RK4",
            a: vec![
                vec![0.0, 0.0, 0.0, 0.0],
                vec![0.5, 0.0, 0.0, 0.0],
                vec![0.0, 0.5, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0],
            ],
            b: vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
            c: vec![0.0, 0.5, 0.5, 1.0],
        },
    }
}

impl FromStr for TableauName {
    type Err = UnknownMethod;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "K3" => Ok(TableauName::K3),
            "BS3" => Ok(TableauName::BS3),
            "RK4" => Ok(TableauName::RK4),
            _ => Err(UnknownMethod(s.to_string())),
        }
    }
}

/// One explicit Runge-Kutta step for the autonomous equation.
pub fn rk_step<F: ScalarField + ?Sized>(
    tab: &ButcherTableau,
    field: &F,
    y: f64,
    h: f64,
) -> Result<f64, EvalError> {
    let mut k = Vec::with_capacity(tab.stages());
    for row in &tab.a {
        let incr: f64 = row.iter().zip(&k).map(|(a, k)| a * k).sum();
        k.push(field.value(y + h * incr)?);
    }
    let incr: f64 = tab.b.iter().zip(&k).map(|(b, k)| b * k).sum();
    Ok(y + h * incr)
}

pub fn euler_step<F: ScalarField + ?Sized>(field: &F, y: f64, h: f64) -> Result<f64, EvalError> {
    Ok(y + h * field.value(y)?)
}

const PHI1_SERIES_CUTOFF: f64 = 1e-5;

/// `(e^z - 1)/z`, with `phi1(0) = 1`.
pub fn phi1(z: f64) -> f64 {
    if z.abs() < PHI1_SERIES_CUTOFF {
        1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0))
    } else {
        z.exp_m1() / z
    }
}

pub fn rosenbrock_euler_step<F: ScalarField + ?Sized>(
    field: &F,
    y: f64,
    h: f64,
) -> Result<f64, EvalError> {
    let d = derivatives_of(field, y)?;
    Ok(y + h * phi1(d.fp * h) * d.f)
}

/// Quadratic Taylor step with the integrity check applied.
pub fn qt3_field_step<F: ScalarField + ?Sized>(
    field: &F,
    y: f64,
    h: f64,
    tol0: f64,
) -> Result<f64, StepError> {
    let model = quadratic_model(field, y)?;
    crate::riccati::qt3_step(&model, y, h, tol0).map_err(StepError::Undefined)
}

/// The built-in one-step methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Euler,
    RosenbrockEuler,
    K3,
    BS3,
    RK4,
    QT3,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Euler,
        Method::RosenbrockEuler,
        Method::K3,
        Method::BS3,
        Method::RK4,
        Method::QT3,
    ];

    /// Columns of the published comparison tables.
    pub const TABLE: [Method; 4] = [Method::K3, Method::BS3, Method::RK4, Method::QT3];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Euler => "Euler",
            Method::RosenbrockEuler => "RosenbrockEuler",
            Method::K3 => "K3",
            Method::BS3 => "BS3",
            Method::RK4 => "RK4",
            Method::QT3 => "QT3",
        }
    }

    /// Nominal convergence order.
    pub fn order(&self) -> u32 {
        match self {
            Method::Euler => 1,
            Method::RosenbrockEuler => 2,
            Method::K3 | Method::BS3 | Method::QT3 => 3,
            Method::RK4 => 4,
        }
    }

    pub fn tableau(&self) -> Option<ButcherTableau> {
        match self {
            Method::K3 => Some(make_tableau(TableauName::K3)),
            Method::BS3 => Some(make_tableau(TableauName::BS3)),
            Method::RK4 => Some(make_tableau(TableauName::RK4)),
            _ => None,
        }
    }

    /// Whether steps can be undefined for the chosen `h` (finite-time blow-up).
    pub fn needs_integrity_check(&self) -> bool {
        matches!(self, Method::QT3)
    }

    /// Advances `y` by one step of size `h`.
    pub fn step<F: ScalarField + ?Sized>(
        &self,
        field: &F,
        y: f64,
        h: f64,
        tol0: f64,
    ) -> Result<f64, StepError> {
        match self {
            Method::Euler => Ok(euler_step(field, y, h)?),
            Method::RosenbrockEuler => Ok(rosenbrock_euler_step(field, y, h)?),
            Method::K3 => Ok(rk_step(&K3, field, y, h)?),
            Method::BS3 => Ok(rk_step(&BS3, field, y, h)?),
            Method::RK4 => Ok(rk_step(&RK4, field, y, h)?),
            Method::QT3 => qt3_field_step(field, y, h, tol0),
        }
    }
}

// Cached tableaus so that `Method::step` does not allocate per step.
static K3: std::sync::LazyLock<ButcherTableau> =
    std::sync::LazyLock::new(|| make_tableau(TableauName::K3));
static BS3: std::sync::LazyLock<ButcherTableau> =
    std::sync::LazyLock::new(|| make_tableau(TableauName::BS3));
static RK4: std::sync::LazyLock<ButcherTableau> =
    std::sync::LazyLock::new(|| make_tableau(TableauName::RK4));

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = UnknownMethod;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "euler" => Ok(Method::Euler),
            "rosenbrockeuler" | "re" => Ok(Method::RosenbrockEuler),
            "k3" => Ok(Method::K3),
            "bs3" => Ok(Method::BS3),
            "rk4" => Ok(Method::RK4),
            "qt3" => Ok(Method::QT3),
            _ => Err(UnknownMethod(s.to_string())),
        }
    }
}
