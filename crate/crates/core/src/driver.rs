//! Equidistant integration loop with window tracking and step-size guards.

use std::fmt;

use thiserror::Error;

use crate::field::{EvalError, ScalarField};
use crate::riccati::{quadratic_model, Branch, QuadraticModel, UndefinedReason};
use crate::steppers::{Method, StepError};

pub const DEFAULT_TOL0: f64 = 1e-14;
pub const DEFAULT_GRID_POINTS: usize = 2049;

/// How the quadratic Taylor method guards against undefined steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum GuardMode {
    /// Check every step; an undefined step ends the run.
    #[default]
    Runtime,
    /// The caller chose `h` below the a priori bound; an undefined step is a
    /// broken promise and reported as an error.
    Apriori,
}

impl fmt::Display for GuardMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GuardMode::Runtime => "runtime",
            GuardMode::Apriori => "apriori",
        })
    }
}

impl std::str::FromStr for GuardMode {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "runtime" => Ok(GuardMode::Runtime),
            "apriori" | "a-priori" => Ok(GuardMode::Apriori),
            _ => Err(ConfigError::UnknownGuard(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("tol0 must lie in (0, 1e-3), got {0}")]
    Tol0(f64),
    #[error("step size must be positive and at most the horizon (h = {h}, T = {t_end})")]
    Step { h: f64, t_end: f64 },
    #[error("window [{0}, {1}] is empty")]
    Window(f64, f64),
    #[error("unknown guard mode `{0}`")]
    UnknownGuard(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub tol0: f64,
    pub h: f64,
    pub t_end: f64,
    pub window: (f64, f64),
    pub guard: GuardMode,
}

impl IntegratorConfig {
    pub fn new(h: f64, t_end: f64, window: (f64, f64)) -> Self {
        IntegratorConfig {
            tol0: DEFAULT_TOL0,
            h,
            t_end,
            window,
            guard: GuardMode::Runtime,
        }
    }

    pub fn with_tol0(mut self, tol0: f64) -> Self {
        self.tol0 = tol0;
        self
    }

    pub fn with_guard(mut self, guard: GuardMode) -> Self {
        self.guard = guard;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.tol0 > 0.0 && self.tol0 < 1e-3) {
            return Err(ConfigError::Tol0(self.tol0));
        }
        if !(self.h > 0.0 && self.t_end.is_finite() && self.h <= self.t_end) {
            return Err(ConfigError::Step {
                h: self.h,
                t_end: self.t_end,
            });
        }
        let (a, b) = self.window;
        if !(a < b) {
            return Err(ConfigError::Window(a, b));
        }
        Ok(())
    }

    /// Number of steps `N` with `N h <= T < (N + 1) h`.
    ///
    /// A ratio `T/h` within a relative `1e-9` of an integer counts as that
    /// integer, so that e.g. `T = 2, h = 0.1` takes 20 steps regardless of how
    /// `0.1` rounds.
    pub fn step_count(&self) -> usize {
        let ratio = self.t_end / self.h;
        let nearest = ratio.round();
        if (ratio - nearest).abs() <= 1e-9 * ratio.max(1.0) {
            nearest as usize
        } else {
            ratio.floor() as usize
        }
    }

    fn contains(&self, y: f64) -> bool {
        y >= self.window.0 && y <= self.window.1
    }
}

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    Success,
    InitialOutsideWindow,
    StepSizeUndefined {
        at_step: usize,
        reason: UndefinedReason,
    },
    LeftWindow {
        at_step: usize,
    },
}

impl Termination {
    pub fn is_success(&self) -> bool {
        matches!(self, Termination::Success)
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Termination::Success => f.write_str("Success"),
            Termination::InitialOutsideWindow => f.write_str("InitialOutsideWindow"),
            Termination::StepSizeUndefined { at_step, .. } => {
                write!(f, "StepSizeUndefined({at_step})")
            }
            Termination::LeftWindow { at_step } => write!(f, "LeftWindow({at_step})"),
        }
    }
}

/// Samples `y_n` at `t_n = n h` and the reason the run ended.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub h: f64,
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    pub status: Termination,
}

impl Trajectory {
    pub fn steps_completed(&self) -> usize {
        self.y.len().saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Human-readable account of a failed run.
    pub fn message(&self) -> String {
        let n = self.steps_completed();
        let covered = n as f64 * self.h;
        match self.status {
            Termination::Success => format!("completed {n} steps on [0, {covered}]"),
            Termination::InitialOutsideWindow => {
                "the initial value lies outside of the chosen tracking window".to_string()
            }
            Termination::StepSizeUndefined { at_step, reason } => format!(
                "the algorithm stops after {at_step} steps, approximating the solution on \
                 [0, {covered}], because the method becomes undefined in the next step due to \
                 the chosen step size ({reason}); rerun with a smaller step size"
            ),
            Termination::LeftWindow { at_step } => format!(
                "the algorithm stops after {at_step} steps, approximating the solution on \
                 [0, {covered}], because the approximate solution leaves the tracking window \
                 in the next step"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DriverError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("field evaluation failed at step {step}: {source}")]
    Eval { step: usize, source: EvalError },
    #[error("a priori guard violated at step {step} (y = {y}): {reason}")]
    AprioriViolation {
        step: usize,
        y: f64,
        reason: UndefinedReason,
    },
}

/// Integrates `y' = f(y)` from `y0` on `[0, T]` with fixed step `h`.
pub fn integrate<F: ScalarField + ?Sized>(
    method: Method,
    field: &F,
    y0: f64,
    config: &IntegratorConfig,
) -> Result<Trajectory, DriverError> {
    config.validate()?;
    let h = config.h;
    let mut traj = Trajectory {
        h,
        t: vec![0.0],
        y: vec![y0],
        status: Termination::Success,
    };
    if !config.contains(y0) {
        traj.status = Termination::InitialOutsideWindow;
        return Ok(traj);
    }

    let steps = config.step_count();
    traj.t.reserve(steps);
    traj.y.reserve(steps);
    let mut y = y0;
    for n in 0..steps {
        let next = if method.needs_integrity_check() {
            let model = quadratic_model(field, y)
                .map_err(|source| DriverError::Eval { step: n, source })?;
            match model.classify(h, config.tol0) {
                Branch::Undefined(reason) => match config.guard {
                    GuardMode::Runtime => {
                        traj.status = Termination::StepSizeUndefined { at_step: n, reason };
                        return Ok(traj);
                    }
                    GuardMode::Apriori => {
                        return Err(DriverError::AprioriViolation { step: n, y, reason });
                    }
                },
                branch => {
                    y + model
                        .increment_on(branch, h)
                        .expect("classified branch is defined")
                }
            }
        } else {
            method.step(field, y, h, config.tol0).map_err(|e| match e {
                StepError::Eval(source) => DriverError::Eval { step: n, source },
                StepError::Undefined(_) => unreachable!("baseline steps are always defined"),
            })?
        };
        if !(next.is_finite() && config.contains(next)) {
            traj.status = Termination::LeftWindow { at_step: n };
            return Ok(traj);
        }
        y = next;
        traj.t.push((n + 1) as f64 * h);
        traj.y.push(y);
    }
    Ok(traj)
}

/// Approximate maximum of `g` on `[lo, hi]`: a uniform grid of `grid_points`
/// samples (both endpoints included) refined by golden-section search in the
/// cells adjacent to the grid maximiser.
pub fn scan_max<G, E>(g: G, lo: f64, hi: f64, grid_points: usize) -> Result<f64, E>
where
    G: Fn(f64) -> Result<f64, E>,
{
    let n = grid_points.max(2);
    let dx = (hi - lo) / (n - 1) as f64;
    let at = |i: usize| if i == n - 1 { hi } else { lo + i as f64 * dx };
    let mut best_i = 0;
    let mut best = g(lo)?;
    for i in 1..n {
        let v = g(at(i))?;
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let a = at(best_i.saturating_sub(1));
    let b = at((best_i + 1).min(n - 1));
    Ok(best.max(golden_section_max(&g, a, b)?))
}

fn golden_section_max<G, E>(g: &G, mut a: f64, mut b: f64) -> Result<f64, E>
where
    G: Fn(f64) -> Result<f64, E>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = g(x1)?;
    let mut f2 = g(x2)?;
    for _ in 0..80 {
        if (b - a).abs() <= 1e-12 * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = g(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = g(x1)?;
        }
    }
    Ok(f1.max(f2))
}

/// Window-wide step bound from the maxima of `b` and `b^2 + |delta|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AprioriEstimate {
    pub b_max: f64,
    pub s_max: f64,
    pub h0: f64,
}

impl AprioriEstimate {
    pub fn suggestion(&self) -> String {
        format!("Suggest stepsize to be less than {}", self.h0)
    }
}

pub fn apriori_h0<F: ScalarField + ?Sized>(
    field: &F,
    window: (f64, f64),
    tol0: f64,
    t_end: f64,
    grid_points: usize,
) -> Result<AprioriEstimate, EvalError> {
    let (lo, hi) = window;
    let model = |y: f64| -> Result<QuadraticModel, EvalError> { quadratic_model(field, y) };
    let b_max = scan_max(|y| model(y).map(|m| m.b), lo, hi, grid_points)?;
    let s_max = scan_max(
        |y| model(y).map(|m| m.b * m.b + m.delta.abs()),
        lo,
        hi,
        grid_points,
    )?;
    let h0 = if s_max > tol0 {
        let blow_up = 2.0 / s_max.sqrt();
        if b_max > tol0 {
            blow_up.min((2.0 - tol0.sqrt()) / b_max).min(t_end)
        } else {
            blow_up.min(t_end)
        }
    } else {
        t_end
    };
    Ok(AprioriEstimate { b_max, s_max, h0 })
}
