//! Writes a small parameterized circuit in the text format, parses it back,
//! binds it and checks that the inverse undoes it.

use vqc::circuit::Circuit;

const SRC: &str = "\
qubits 2
data 2
theta 2
# encode
H 0
H 1
MZ 0,1 ((pi - x[0]) * (pi - x[1]))
# trainable block
RY 0 t[0]
RZ 1 t[1]
CX 0,1
";

fn main() -> vqc::Result<()> {
    let c = Circuit::from_text(SRC)?;
    print!("{}", c.to_text());
    assert_eq!(Circuit::from_text(&c.to_text())?.ops(), c.ops());

    let bound = c.bind(&[0.3, 1.1], &[0.7, -0.2])?;
    let mut psi = bound.simulate()?;
    println!(
        "probabilities {:?}",
        psi.probabilities()
            .iter()
            .map(|p| format!("{p:.4}"))
            .collect::<Vec<_>>()
    );

    bound.inverse().apply_to(&mut psi)?;
    println!("after inverse, |⟨00|ψ⟩|² = {:.12}", psi.probabilities()[0]);
    Ok(())
}
