use serde::{Deserialize, Serialize};

use super::{checked, Differentiable, Observer, OptResult};
use crate::error::{Error, Result};

/// Settings for momentum gradient descent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AqgdConfig {
    pub eta: f64,
    pub momentum: f64,
    pub maxiter: usize,
    /// Stop once the parameter step norm drops below this.
    pub tol: f64,
}

impl Default for AqgdConfig {
    fn default() -> Self {
        AqgdConfig {
            eta: 0.1,
            momentum: 0.25,
            maxiter: 100,
            tol: 1e-6,
        }
    }
}

impl AqgdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::validation(format!("eta must be > 0, got {}", self.eta)));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::validation(format!(
                "momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        if self.maxiter == 0 {
            return Err(Error::validation("maxiter must be at least 1"));
        }
        Ok(())
    }
}

/// Minimizes with `v ← μ·v − η·∇L(θ)`, `θ ← θ + v`.
///
/// The loss is evaluated at the start point and after every step; history
/// entry `k` holds the loss after step `k`. Returns the best iterate seen.
pub fn aqgd_minimize<O: Differentiable + ?Sized>(
    objective: &O,
    x0: &[f64],
    cfg: &AqgdConfig,
    mut observer: Option<Observer<'_>>,
) -> Result<OptResult> {
    cfg.validate()?;
    if x0.is_empty() {
        return Err(Error::validation("empty starting point"));
    }
    let mut theta = x0.to_vec();
    let mut velocity = vec![0.0; theta.len()];
    let mut value = checked(objective.value(&theta)?, 0, "loss")?;
    let (mut best_theta, mut best_value) = (theta.clone(), value);
    let mut history = Vec::with_capacity(cfg.maxiter);
    let (mut evals, mut grad_evals) = (1, 0);
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=cfg.maxiter {
        let grad = objective.gradient(&theta).map_err(|e| e.at_iteration(it))?;
        grad_evals += 1;
        if grad.len() != theta.len() {
            return Err(Error::validation(format!(
                "gradient has {} entries for {} parameters",
                grad.len(),
                theta.len()
            )));
        }
        let mut step_sq = 0.0;
        for ((t, v), g) in theta.iter_mut().zip(&mut velocity).zip(&grad) {
            checked(*g, it, "gradient component")?;
            *v = cfg.momentum * *v - cfg.eta * g;
            *t += *v;
            step_sq += *v * *v;
        }
        value = checked(objective.value(&theta).map_err(|e| e.at_iteration(it))?, it, "loss")?;
        evals += 1;
        iterations = it;
        history.push((it, value));
        if value < best_value {
            best_value = value;
            best_theta.clone_from(&theta);
        }
        if let Some(obs) = observer.as_mut() {
            if obs(it, &theta, value).map_err(|e| e.at_iteration(it))? {
                break;
            }
        }
        if step_sq.sqrt() < cfg.tol {
            converged = true;
            break;
        }
    }

    Ok(OptResult {
        best_theta,
        best_value,
        evals,
        grad_evals,
        iterations,
        converged,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::WithGradient;
    use approx::assert_abs_diff_eq;

    type Quadratic = WithGradient<Box<dyn Fn(&[f64]) -> f64>, Box<dyn Fn(&[f64]) -> Vec<f64>>>;

    fn quadratic(center: f64) -> Quadratic {
        WithGradient {
            value: Box::new(move |t: &[f64]| (t[0] - center).powi(2)),
            gradient: Box::new(move |t: &[f64]| vec![2.0 * (t[0] - center)]),
        }
    }

    #[test]
    fn one_exact_step() {
        let cfg = AqgdConfig {
            eta: 0.5,
            momentum: 0.0,
            maxiter: 1,
            ..AqgdConfig::default()
        };
        let r = aqgd_minimize(&quadratic(0.0), &[1.0], &cfg, None).unwrap();
        assert_eq!(r.best_theta, vec![0.0]);
        assert_eq!(r.best_value, 0.0);
        assert_eq!(r.history, vec![(1, 0.0)]);
    }

    #[test]
    fn shifted_quadratic_converges() {
        let cfg = AqgdConfig {
            eta: 0.05,
            maxiter: 2000,
            ..AqgdConfig::default()
        };
        let r = aqgd_minimize(&quadratic(2.0), &[-1.0], &cfg, None).unwrap();
        assert!((r.best_theta[0] - 2.0).abs() <= 1e-4);
        assert!(r.converged);
    }

    #[test]
    fn monotone_without_momentum() {
        // curvature 2, so any eta < 1 decreases the loss every step
        let cfg = AqgdConfig {
            eta: 0.3,
            momentum: 0.0,
            maxiter: 40,
            tol: 0.0,
        };
        let r = aqgd_minimize(&quadratic(-3.0), &[5.0], &cfg, None).unwrap();
        for w in r.history.windows(2) {
            assert!(w[1].1 <= w[0].1);
        }
    }

    #[test]
    fn non_finite_gradient_reports_iteration() {
        let obj = WithGradient {
            value: |t: &[f64]| t[0] * t[0],
            gradient: |t: &[f64]| vec![if t[0] < 0.5 { f64::NAN } else { 2.0 * t[0] }],
        };
        let cfg = AqgdConfig {
            eta: 0.3,
            momentum: 0.0,
            ..AqgdConfig::default()
        };
        match aqgd_minimize(&obj, &[1.0], &cfg, None) {
            Err(Error::Numeric { iteration, .. }) => assert_eq!(iteration, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn observer_can_stop() {
        let mut seen = 0;
        let mut obs = |_: usize, _: &[f64], _: f64| -> Result<bool> {
            seen += 1;
            Ok(seen == 3)
        };
        let r = aqgd_minimize(&quadratic(1.0), &[4.0], &AqgdConfig::default(), Some(&mut obs)).unwrap();
        assert_eq!(r.iterations, 3);
        assert_abs_diff_eq!(
            r.best_value,
            r.history.iter().map(|h| h.1).fold(f64::INFINITY, f64::min).min(9.0)
        );
    }

    #[test]
    fn config_validation() {
        let bad = AqgdConfig {
            momentum: 1.0,
            ..AqgdConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(AqgdConfig {
            eta: 0.0,
            ..AqgdConfig::default()
        }
        .validate()
        .is_err());
        assert!(AqgdConfig {
            maxiter: 0,
            ..AqgdConfig::default()
        }
        .validate()
        .is_err());
    }
}
