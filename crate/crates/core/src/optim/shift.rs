use rayon::prelude::*;

use super::checked;
use crate::error::{Error, Result};

/// Shift for rotations whose generator has eigenvalues ±1/2.
pub const SHIFT: f64 = std::f64::consts::FRAC_PI_2;

/// `[E(θ + π/2·e_j) − E(θ − π/2·e_j)] / 2`.
///
/// Exact when coordinate `j` enters the circuit only through RX/RY/RZ angles.
pub fn parameter_shift_gradient<F>(expectation: F, theta: &[f64], j: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if j >= theta.len() {
        return Err(Error::validation(format!(
            "coordinate {j} out of range for {} parameters",
            theta.len()
        )));
    }
    let mut shifted = theta.to_vec();
    shifted[j] = theta[j] + SHIFT;
    let plus = checked(expectation(&shifted)?, 0, "shifted expectation")?;
    shifted[j] = theta[j] - SHIFT;
    let minus = checked(expectation(&shifted)?, 0, "shifted expectation")?;
    Ok((plus - minus) / 2.0)
}

/// Full parameter-shift gradient. The `2·d` shifted evaluations run in
/// parallel; results are reduced in coordinate order.
pub fn parameter_shift_full<F>(expectation: F, theta: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    (0..theta.len())
        .into_par_iter()
        .map(|j| parameter_shift_gradient(&expectation, theta, j))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{Gate1, PauliObservable, Statevector};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn z_after_ry(theta: &[f64]) -> Result<f64> {
        let mut s = Statevector::zero_state(1)?;
        s.apply_single(&Gate1::ry(theta[0]), 0)?;
        s.expectation(&PauliObservable::single("Z")?)
    }

    #[test]
    fn cosine_derivative() {
        assert_abs_diff_eq!(
            parameter_shift_gradient(z_after_ry, &[0.0], 0).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            parameter_shift_gradient(z_after_ry, &[FRAC_PI_2], 0).unwrap(),
            -1.0,
            epsilon = 1e-15
        );
        for k in 0..50 {
            let t = -3.0 + 0.12 * k as f64;
            let g = parameter_shift_gradient(z_after_ry, &[t], 0).unwrap();
            assert_abs_diff_eq!(g, -t.sin(), epsilon = 1e-10);
        }
    }

    #[test]
    fn non_finite_oracle() {
        let r = parameter_shift_gradient(|_: &[f64]| Ok(f64::NAN), &[0.0], 0);
        assert!(matches!(r, Err(Error::Numeric { .. })));
        assert!(parameter_shift_gradient(z_after_ry, &[0.0], 1).is_err());
    }
}
