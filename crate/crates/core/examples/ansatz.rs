//! The EfficientSU2 ansatz: parameter counts and a bound instance.

use vqc::circuit::{AnsatzSpec, Entanglement};

fn main() -> vqc::Result<()> {
    for n in [2, 3, 5] {
        for reps in [1, 3] {
            let spec = AnsatzSpec {
                reps,
                ..AnsatzSpec::new(n)
            };
            println!(
                "n = {n}, reps = {reps}: {} parameters, {} gates",
                spec.num_parameters(),
                spec.build()?.ops().len()
            );
        }
    }
    let spec = AnsatzSpec {
        reps: 1,
        entanglement: Entanglement::Full,
        ..AnsatzSpec::new(3)
    };
    print!("{}", spec.build()?.to_text());

    let theta: Vec<f64> = (0..spec.num_parameters()).map(|j| 0.1 * j as f64).collect();
    let psi = spec.build()?.bind(&[], &theta)?.simulate()?;
    println!("norm {:.15}", psi.norm_sqr());
    Ok(())
}
