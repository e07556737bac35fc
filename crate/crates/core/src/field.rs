//! Right-hand sides `f` of autonomous scalar equations `y' = f(y)`.

use std::fmt;

use thiserror::Error;

use crate::jet::{Jet2, JetError};

/// `f(y)`, `f'(y)` and `f''(y)` at one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub f: f64,
    pub fp: f64,
    pub fpp: f64,
}

impl From<Jet2> for Derivatives {
    fn from(j: Jet2) -> Self {
        Derivatives {
            f: j.v,
            fp: j.d1,
            fpp: j.d2,
        }
    }
}

/// Failure to evaluate a field at a given state.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    #[error("field undefined at y = {y}: {source}")]
    Domain { y: f64, source: JetError },
    #[error("field produced a non-finite value at y = {y}")]
    NonFinite { y: f64 },
}

/// A scalar right-hand side written once against [`Jet2`].
///
/// Implementors provide [`eval_jet`](ScalarField::eval_jet); plain values
/// and derivative triples are derived from it. A hand-coded derivative
/// triple may be supplied for cross-checking the jet rules.
pub trait ScalarField: Send + Sync {
    fn eval_jet(&self, y: Jet2) -> Result<Jet2, JetError>;

    fn value(&self, y: f64) -> Result<f64, EvalError> {
        let v = self
            .eval_jet(Jet2::constant(y))
            .map_err(|source| EvalError::Domain { y, source })?
            .v;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite { y })
        }
    }

    fn hand_derivatives(&self, _y: f64) -> Option<Derivatives> {
        None
    }
}

/// Evaluates the degree-2 jet of `field` at `y`.
pub fn derivatives_of<F: ScalarField + ?Sized>(
    field: &F,
    y: f64,
) -> Result<Derivatives, EvalError> {
    let j = field
        .eval_jet(Jet2::lift(y))
        .map_err(|source| EvalError::Domain { y, source })?;
    if !j.is_finite() {
        return Err(EvalError::NonFinite { y });
    }
    Ok(j.into())
}

type JetFn = dyn Fn(Jet2) -> Result<Jet2, JetError> + Send + Sync;
type HandFn = dyn Fn(f64) -> Derivatives + Send + Sync;

/// A field assembled from closures.
pub struct FnField {
    name: String,
    jet: Box<JetFn>,
    hand: Option<Box<HandFn>>,
}

impl FnField {
    pub fn new<F>(name: impl Into<String>, jet: F) -> Self
    where
        F: Fn(Jet2) -> Result<Jet2, JetError> + Send + Sync + 'static,
    {
        FnField {
            name: name.into(),
            jet: Box::new(jet),
            hand: None,
        }
    }

    pub fn with_hand_derivatives<H>(mut self, hand: H) -> Self
    where
        H: Fn(f64) -> Derivatives + Send + Sync + 'static,
    {
        self.hand = Some(Box::new(hand));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for FnField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnField")
            .field("name", &self.name)
            .field("hand", &self.hand.is_some())
            .finish()
    }
}

impl ScalarField for FnField {
    fn eval_jet(&self, y: Jet2) -> Result<Jet2, JetError> {
        (self.jet)(y)
    }

    fn hand_derivatives(&self, y: f64) -> Option<Derivatives> {
        self.hand.as_ref().map(|h| h(y))
    }
}
