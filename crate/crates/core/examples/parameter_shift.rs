//! Parameter-shift gradients of an expectation value, against finite differences.

use vqc::circuit::AnsatzSpec;
use vqc::optim::{parameter_shift_full, parameter_shift_gradient};
use vqc::qsim::PauliObservable;

fn main() -> vqc::Result<()> {
    let spec = AnsatzSpec {
        reps: 1,
        ..AnsatzSpec::new(2)
    };
    let circuit = spec.build()?;
    let zz = PauliObservable::single("ZZ")?;
    let energy = |theta: &[f64]| circuit.bind(&[], theta)?.simulate()?.expectation(&zz);

    let theta = vec![0.3, -1.2, 0.8, 2.0, -0.5, 1.1, 0.4, -2.2];
    let grad = parameter_shift_full(energy, &theta)?;
    let h = 1e-6;
    for (j, g) in grad.iter().enumerate() {
        let mut up = theta.clone();
        up[j] += h;
        let mut down = theta.clone();
        down[j] -= h;
        let fd = (energy(&up)? - energy(&down)?) / (2.0 * h);
        println!("θ[{j}]  shift {g:+.8}  finite difference {fd:+.8}");
    }
    println!(
        "single coordinate: {:+.8}",
        parameter_shift_gradient(energy, &theta, 3)?
    );
    Ok(())
}
