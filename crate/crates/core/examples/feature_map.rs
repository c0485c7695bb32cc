//! Expands the Pauli-Z feature map for a few settings and encodes one sample.

use vqc::circuit::{Entanglement, FeatureMapSpec};

fn main() -> vqc::Result<()> {
    let base = FeatureMapSpec::new(3);
    println!("default patterns {:?}", base.patterns()?);

    let full = FeatureMapSpec {
        paulis: vec!["Z".into(), "ZZ".into(), "ZZZ".into()],
        entanglement: Entanglement::Full,
        reps: 1,
        ..FeatureMapSpec::new(3)
    };
    println!("full patterns    {:?}", full.patterns()?);
    print!("{}", full.build()?.to_text());

    let psi = base.build()?.bind(&[0.4, 1.9, 2.7], &[])?.simulate()?;
    let top = psi.probabilities().iter().cloned().fold(0.0, f64::max);
    println!(
        "encoded state: {} amplitudes, largest probability {top:.4}",
        psi.amplitudes().len()
    );
    Ok(())
}
