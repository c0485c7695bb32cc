//! Derivative-free COBYLA, unconstrained and with an inequality constraint.

use vqc::optim::{cobyla_minimize, cobyla_minimize_constrained, CobylaConfig};

fn main() -> vqc::Result<()> {
    let bowl = |x: &[f64]| (x[0] - 2.0).powi(2) + 3.0 * (x[1] + 1.0).powi(2) + (x[2] - 0.5).powi(2);
    let cfg = CobylaConfig {
        rhobeg: 0.5,
        rhoend: 1e-8,
        maxfun: 500,
    };
    let r = cobyla_minimize(&bowl, &[0.0; 3], &cfg, None)?;
    println!(
        "bowl: {:?} value {:.2e} in {} evaluations",
        r.best_theta, r.best_value, r.evals
    );

    // Minimize x + y on the unit disk: 1 − x² − y² ≥ 0.
    let linear = |x: &[f64]| x[0] + x[1];
    let disk = |x: &[f64]| 1.0 - x[0] * x[0] - x[1] * x[1];
    let r = cobyla_minimize_constrained(&linear, &[&disk], &[0.0, 0.0], &cfg, None)?;
    println!(
        "disk: ({:+.6}, {:+.6}) value {:+.6}, expected {:+.6}",
        r.best_theta[0],
        r.best_theta[1],
        r.best_value,
        -std::f64::consts::SQRT_2
    );
    Ok(())
}
