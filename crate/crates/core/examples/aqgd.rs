//! Momentum gradient descent on a smooth two-dimensional function.

use vqc::optim::{aqgd_minimize, AqgdConfig, WithGradient};

fn main() -> vqc::Result<()> {
    let objective = WithGradient {
        value: |x: &[f64]| (x[0] - 1.0).powi(2) + 4.0 * (x[1] + 0.5).powi(2) + x[0].sin(),
        gradient: |x: &[f64]| vec![2.0 * (x[0] - 1.0) + x[0].cos(), 8.0 * (x[1] + 0.5)],
    };
    let cfg = AqgdConfig {
        maxiter: 200,
        ..AqgdConfig::default()
    };
    let mut log = |k: usize, theta: &[f64], loss: f64| -> vqc::Result<bool> {
        if k.is_multiple_of(40) {
            println!(
                "iteration {k:3}  θ = ({:+.4}, {:+.4})  loss {loss:.6}",
                theta[0], theta[1]
            );
        }
        Ok(false)
    };
    let r = aqgd_minimize(&objective, &[3.0, 2.0], &cfg, Some(&mut log))?;
    println!(
        "best {:.8} at ({:+.6}, {:+.6}) after {} iterations, converged = {}",
        r.best_value, r.best_theta[0], r.best_theta[1], r.iterations, r.converged
    );
    Ok(())
}
