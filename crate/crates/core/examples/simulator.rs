//! Builds a Bell state by hand and reads off probabilities and Pauli expectations.

use vqc::qsim::{Gate1, Parity, PauliObservable, Statevector};

fn main() -> vqc::Result<()> {
    let mut psi = Statevector::zero_state(2)?;
    psi.apply_single(&Gate1::h(), 0)?;
    psi.apply_cx(0, 1)?;

    // Qubit 0 is the least significant bit of the basis index.
    for (i, p) in psi.probabilities().iter().enumerate() {
        println!("|{i:02b}⟩  p = {p:.3}");
    }
    for word in ["ZI", "IZ", "ZZ", "XX"] {
        println!("⟨{word}⟩ = {:+.3}", psi.expectation(&PauliObservable::single(word)?)?);
    }
    println!("odd-parity probability = {:.3}", psi.parity_probability(Parity::Odd));

    psi.apply_single(&Gate1::ry(0.4), 1)?;
    println!("norm after RY: {:.15}", psi.norm_sqr());
    Ok(())
}
