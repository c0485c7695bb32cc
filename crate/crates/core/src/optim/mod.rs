//! Local optimizers: momentum gradient descent driven by parameter-shift
//! gradients (AQGD) and Powell's derivative-free COBYLA.

mod aqgd;
mod cobyla;
mod shift;

pub use aqgd::{aqgd_minimize, AqgdConfig};
pub use cobyla::{cobyla_minimize, cobyla_minimize_constrained, CobylaConfig};
pub use shift::{parameter_shift_full, parameter_shift_gradient, SHIFT};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A deterministic loss over a parameter vector.
pub trait Objective {
    fn value(&self, theta: &[f64]) -> Result<f64>;
}

/// An objective that can also report its gradient.
pub trait Differentiable: Objective {
    fn gradient(&self, theta: &[f64]) -> Result<Vec<f64>>;
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64,
{
    fn value(&self, theta: &[f64]) -> Result<f64> {
        Ok(self(theta))
    }
}

/// Pairs a value closure with a gradient closure.
pub struct WithGradient<F, G> {
    pub value: F,
    pub gradient: G,
}

impl<F, G> Objective for WithGradient<F, G>
where
    F: Fn(&[f64]) -> f64,
{
    fn value(&self, theta: &[f64]) -> Result<f64> {
        Ok((self.value)(theta))
    }
}

impl<F, G> Differentiable for WithGradient<F, G>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    fn gradient(&self, theta: &[f64]) -> Result<Vec<f64>> {
        Ok((self.gradient)(theta))
    }
}

/// Called once per optimizer iteration with `(iteration, θ, loss)`. Returning
/// `Ok(true)` stops the run early.
pub type Observer<'a> = &'a mut dyn FnMut(usize, &[f64], f64) -> Result<bool>;

/// Outcome of a minimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub best_theta: Vec<f64>,
    pub best_value: f64,
    /// Objective-value evaluations.
    pub evals: usize,
    /// Gradient evaluations (zero for derivative-free runs).
    pub grad_evals: usize,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<(usize, f64)>,
}

pub(crate) fn checked(value: f64, iteration: usize, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Numeric {
            iteration,
            message: format!("{what} is {value}"),
        })
    }
}
