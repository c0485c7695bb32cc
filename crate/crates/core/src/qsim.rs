//! Dense statevector simulator.
//!
//! Amplitudes are stored in basis-index order with qubit 0 as the least
//! significant bit: basis index `k` has qubit `q` in state `(k >> q) & 1`.
//! All expectations are exact; there is no shot sampling.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register the dense simulator will allocate.
pub const MAX_QUBITS: usize = 20;

/// Tolerance used when a caller-supplied 2x2 matrix is checked for unitarity.
pub const UNITARY_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A pure state of `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

/// A single-qubit gate whose unitarity has been checked once, at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate1 {
    m: [[Complex64; 2]; 2],
}

/// Parity of the popcount of a measured bitstring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(index: usize) -> Parity {
        if index.count_ones().is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// A Pauli word. Letter `i` acts on qubit `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString(Vec<Pauli>);

/// Real linear combination of Pauli words, Hermitian by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliObservable {
    num_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl Gate1 {
    /// Validates that the columns of `m` are orthonormal within [`UNITARY_TOL`].
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let col = |j: usize| [m[0][j], m[1][j]];
        let dot = |a: [Complex64; 2], b: [Complex64; 2]| a[0].conj() * b[0] + a[1].conj() * b[1];
        let (c0, c1) = (col(0), col(1));
        let n0 = dot(c0, c0).re - 1.0;
        let n1 = dot(c1, c1).re - 1.0;
        let cross = dot(c0, c1).norm();
        if !m.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::validation("gate matrix has non-finite entries"));
        }
        if n0.abs() > UNITARY_TOL || n1.abs() > UNITARY_TOL || cross > UNITARY_TOL {
            return Err(Error::validation(format!(
                "gate matrix is not unitary (column norms off by {n0:.3e}, {n1:.3e}; overlap {cross:.3e})"
            )));
        }
        Ok(Gate1 { m })
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn h() -> Self {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Gate1 { m: [[s, s], [s, -s]] }
    }

    pub fn x() -> Self {
        Gate1 {
            m: [[ZERO, ONE], [ONE, ZERO]],
        }
    }

    /// `exp(-i θ X / 2)`
    pub fn rx(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        let c = Complex64::new(c, 0.0);
        let mis = Complex64::new(0.0, -s);
        Gate1 {
            m: [[c, mis], [mis, c]],
        }
    }

    /// `exp(-i θ Y / 2)`
    pub fn ry(theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Gate1 {
            m: [
                [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
            ],
        }
    }

    /// `exp(-i θ Z / 2)`
    pub fn rz(theta: f64) -> Self {
        let half = theta / 2.0;
        Gate1 {
            m: [
                [Complex64::from_polar(1.0, -half), ZERO],
                [ZERO, Complex64::from_polar(1.0, half)],
            ],
        }
    }
}

impl Statevector {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero_state(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Capacity(format!(
                "qubit count {n} outside supported range 1..={MAX_QUBITS}"
            )));
        }
        let mut amplitudes = vec![ZERO; 1 << n];
        amplitudes[0] = ONE;
        Ok(Statevector {
            num_qubits: n,
            amplitudes,
        })
    }

    /// Wraps caller-provided amplitudes. The length must be a power of two and
    /// the vector must be normalized within 1e-10.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::validation(format!(
                "amplitude count {len} is not a power of two ≥ 2"
            )));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(Error::Capacity(format!("{n} qubits exceeds {MAX_QUBITS}")));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::validation(format!("state norm² is {norm}, expected 1")));
        }
        Ok(Statevector {
            num_qubits: n,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::Index {
                index: q,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    /// Applies a single-qubit gate to `target` in place.
    pub fn apply_single(&mut self, gate: &Gate1, target: usize) -> Result<()> {
        self.check_qubit(target)?;
        let [[a, b], [c, d]] = gate.m;
        let stride = 1usize << target;
        for block in (0..self.amplitudes.len()).step_by(stride << 1) {
            for i in block..block + stride {
                let lo = self.amplitudes[i];
                let hi = self.amplitudes[i + stride];
                self.amplitudes[i] = a * lo + b * hi;
                self.amplitudes[i + stride] = c * lo + d * hi;
            }
        }
        Ok(())
    }

    /// Flips `target` on every basis state where `control` is 1.
    pub fn apply_cx(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::validation(format!(
                "CX control and target are both qubit {control}"
            )));
        }
        let cbit = 1usize << control;
        let tbit = 1usize << target;
        for i in 0..self.amplitudes.len() {
            // visit each swapped pair once, from its target-0 member
            if i & cbit != 0 && i & tbit == 0 {
                self.amplitudes.swap(i, i | tbit);
            }
        }
        Ok(())
    }

    /// Applies `exp(i φ ∏_{q∈S} Z_q)`: each amplitude is multiplied by
    /// `e^{iφ}` when the bits of `qubits` have even parity and `e^{-iφ}` when odd.
    pub fn apply_multi_z_phase(&mut self, qubits: &[usize], angle: f64) -> Result<()> {
        if qubits.is_empty() {
            return Err(Error::validation("multi-Z phase needs at least one qubit"));
        }
        let mut mask = 0usize;
        for &q in qubits {
            self.check_qubit(q)?;
            mask |= 1 << q;
        }
        if angle == 0.0 {
            return Ok(());
        }
        let even = Complex64::from_polar(1.0, angle);
        let odd = even.conj();
        for (k, amp) in self.amplitudes.iter_mut().enumerate() {
            *amp *= if (k & mask).count_ones().is_multiple_of(2) {
                even
            } else {
                odd
            };
        }
        Ok(())
    }

    /// Exact `⟨ψ|O|ψ⟩`.
    pub fn expectation(&self, obs: &PauliObservable) -> Result<f64> {
        if obs.num_qubits != self.num_qubits {
            return Err(Error::validation(format!(
                "observable acts on {} qubits, state has {}",
                obs.num_qubits, self.num_qubits
            )));
        }
        let mut total = 0.0;
        for (coeff, word) in &obs.terms {
            total += coeff * self.pauli_expectation(word);
        }
        Ok(total)
    }

    fn pauli_expectation(&self, word: &PauliString) -> f64 {
        let (mut flip, mut sign, mut n_y) = (0usize, 0usize, 0u32);
        for (q, p) in word.0.iter().enumerate() {
            match p {
                Pauli::I => {}
                Pauli::X => flip |= 1 << q,
                Pauli::Y => {
                    flip |= 1 << q;
                    sign |= 1 << q;
                    n_y += 1;
                }
                Pauli::Z => sign |= 1 << q,
            }
        }
        // P|k⟩ = i^{#Y} (-1)^{popcount(k & sign)} |k ⊕ flip⟩
        let global = match n_y % 4 {
            0 => ONE,
            1 => Complex64::new(0.0, 1.0),
            2 => -ONE,
            _ => Complex64::new(0.0, -1.0),
        };
        let mut acc = ZERO;
        for (k, amp) in self.amplitudes.iter().enumerate() {
            let term = self.amplitudes[k ^ flip].conj() * amp;
            if (k & sign).count_ones() % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        (global * acc).re
    }

    /// Total probability of measuring a bitstring with the requested popcount parity.
    pub fn parity_probability(&self, parity: Parity) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(k, _)| Parity::of(*k) == parity)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        PauliString(letters)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.0
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::validation(format!("unknown Pauli letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(PauliString)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            let c = match p {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl PauliObservable {
    pub fn new(num_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        for (c, w) in &terms {
            if w.len() != num_qubits {
                return Err(Error::validation(format!(
                    "Pauli word {w} has {} letters, expected {num_qubits}",
                    w.len()
                )));
            }
            if !c.is_finite() {
                return Err(Error::validation("non-finite observable coefficient"));
            }
        }
        Ok(PauliObservable { num_qubits, terms })
    }

    /// Single-term observable parsed from a Pauli word such as `"ZIZ"`.
    pub fn single(word: &str) -> Result<Self> {
        let w: PauliString = word.parse()?;
        PauliObservable::new(w.len(), vec![(1.0, w)])
    }

    /// `Z` on one qubit of an `n`-qubit register.
    pub fn z_on(n: usize, qubit: usize) -> Result<Self> {
        if qubit >= n {
            return Err(Error::Index {
                index: qubit,
                num_qubits: n,
            });
        }
        let mut letters = vec![Pauli::I; n];
        letters[qubit] = Pauli::Z;
        PauliObservable::new(n, vec![(1.0, PauliString(letters))])
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_state_shapes() {
        let s = Statevector::zero_state(1).unwrap();
        assert_eq!(s.amplitudes(), &[ONE, ZERO]);
        let s = Statevector::zero_state(5).unwrap();
        assert_eq!(s.amplitudes().len(), 32);
        assert_eq!(s.amplitudes()[0], ONE);
        assert!(s.amplitudes()[1..].iter().all(|a| *a == ZERO));
    }

    #[test]
    fn zero_state_capacity() {
        assert!(matches!(Statevector::zero_state(0), Err(Error::Capacity(_))));
        assert!(matches!(Statevector::zero_state(21), Err(Error::Capacity(_))));
    }

    #[test]
    fn hadamard_then_rz() {
        let mut s = Statevector::zero_state(1).unwrap();
        s.apply_single(&Gate1::h(), 0).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[0].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[1].re, FRAC_1_SQRT_2, epsilon = 1e-15);

        s.apply_single(&Gate1::rz(FRAC_PI_2), 0).unwrap();
        let want0 = Complex64::from_polar(1.0, -FRAC_PI_4) * FRAC_1_SQRT_2;
        let want1 = Complex64::from_polar(1.0, FRAC_PI_4) * FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0] - want0).norm() < 1e-15);
        assert!((s.amplitudes()[1] - want1).norm() < 1e-15);
    }

    #[test]
    fn non_unitary_rejected() {
        let m = [[ONE, ONE], [ZERO, ONE]];
        assert!(matches!(Gate1::new(m), Err(Error::Validation(_))));
        assert!(Gate1::new(Gate1::ry(0.3).matrix()).is_ok());
    }

    #[test]
    fn bad_target_index() {
        let mut s = Statevector::zero_state(2).unwrap();
        assert!(matches!(
            s.apply_single(&Gate1::h(), 2),
            Err(Error::Index { index: 2, .. })
        ));
    }

    #[test]
    fn cx_truth_table() {
        // Control qubit 0 set, target clear: basis index 1.
        let mut s = Statevector::from_amplitudes(vec![ZERO, ONE, ZERO, ZERO]).unwrap();
        s.apply_cx(0, 1).unwrap();
        assert_eq!(s.amplitudes(), &[ZERO, ZERO, ZERO, ONE]);

        let mut s = Statevector::zero_state(2).unwrap();
        s.apply_cx(0, 1).unwrap();
        assert_eq!(s.amplitudes(), &[ONE, ZERO, ZERO, ZERO]);

        assert!(matches!(s.apply_cx(1, 1), Err(Error::Validation(_))));
    }

    #[test]
    fn multi_z_phase_eigenvalues() {
        let phi = 0.37;
        let mut s = Statevector::zero_state(2).unwrap();
        s.apply_multi_z_phase(&[0, 1], phi).unwrap();
        assert!((s.amplitudes()[0] - Complex64::from_polar(1.0, phi)).norm() < 1e-15);

        let mut s = Statevector::from_amplitudes(vec![ZERO, ONE, ZERO, ZERO]).unwrap();
        s.apply_multi_z_phase(&[0, 1], phi).unwrap();
        assert!((s.amplitudes()[1] - Complex64::from_polar(1.0, -phi)).norm() < 1e-15);

        assert!(s.apply_multi_z_phase(&[], phi).is_err());
    }

    #[test]
    fn multi_z_zero_angle_is_identity() {
        let mut s = Statevector::zero_state(3).unwrap();
        s.apply_single(&Gate1::h(), 0).unwrap();
        s.apply_single(&Gate1::ry(0.4), 2).unwrap();
        let before = s.clone();
        s.apply_multi_z_phase(&[0, 2], 0.0).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn expectation_basics() {
        let z = PauliObservable::single("Z").unwrap();
        let mut s = Statevector::zero_state(1).unwrap();
        assert_abs_diff_eq!(s.expectation(&z).unwrap(), 1.0, epsilon = 1e-15);
        s.apply_single(&Gate1::h(), 0).unwrap();
        assert_abs_diff_eq!(s.expectation(&z).unwrap(), 0.0, epsilon = 1e-15);

        let mut bell = Statevector::zero_state(2).unwrap();
        bell.apply_single(&Gate1::h(), 0).unwrap();
        bell.apply_cx(0, 1).unwrap();
        let zz = PauliObservable::single("ZZ").unwrap();
        assert_abs_diff_eq!(bell.expectation(&zz).unwrap(), 1.0, epsilon = 1e-15);
        let xx = PauliObservable::single("XX").unwrap();
        assert_abs_diff_eq!(bell.expectation(&xx).unwrap(), 1.0, epsilon = 1e-15);
        let yy = PauliObservable::single("YY").unwrap();
        assert_abs_diff_eq!(bell.expectation(&yy).unwrap(), -1.0, epsilon = 1e-15);

        assert!(bell.expectation(&z).is_err());
    }

    #[test]
    fn y_expectation_sign() {
        // RX(-π/2)|0⟩ = (|0⟩ + i|1⟩)/√2 is the +1 eigenstate of Y
        let mut s = Statevector::zero_state(1).unwrap();
        s.apply_single(&Gate1::rx(-FRAC_PI_2), 0).unwrap();
        let y = PauliObservable::single("Y").unwrap();
        assert_abs_diff_eq!(s.expectation(&y).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn parity_basics() {
        let s = Statevector::zero_state(4).unwrap();
        assert_eq!(s.parity_probability(Parity::Even), 1.0);
        let mut s = Statevector::zero_state(2).unwrap();
        s.apply_single(&Gate1::h(), 0).unwrap();
        s.apply_single(&Gate1::h(), 1).unwrap();
        assert_abs_diff_eq!(s.parity_probability(Parity::Odd), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn from_amplitudes_validates() {
        assert!(Statevector::from_amplitudes(vec![ONE, ONE]).is_err());
        assert!(Statevector::from_amplitudes(vec![ONE, ZERO, ZERO]).is_err());
        assert!(Statevector::from_amplitudes(vec![c(0.6, 0.0), c(0.0, 0.8)]).is_ok());
    }
}
