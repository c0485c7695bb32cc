use serde::{Deserialize, Serialize};

use super::{Circuit, GateKind, GateOp, ParamExpr};
use crate::error::{Error, Result};

/// Which qubit groups an entangling layer (or a multi-qubit Pauli pattern) spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Entanglement {
    /// Consecutive qubits only: `{i, i+1, …}`.
    #[default]
    Linear,
    /// Every subset of the required size.
    Full,
}

/// How a Pauli pattern `S` turns the data vector into its phase `φ_S(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataMap {
    /// `φ_{i}(x) = x_i`, `φ_S(x) = ∏_{i∈S} (π − x_i)` for |S| > 1.
    #[default]
    PiMinusProduct,
    /// `φ_S(x) = ∏_{i∈S} x_i`.
    Product,
}

impl DataMap {
    pub fn phase_expr(self, pattern: &[usize]) -> ParamExpr {
        if let [i] = pattern {
            return ParamExpr::data(*i);
        }
        let factor = |i: usize| match self {
            DataMap::PiMinusProduct => ParamExpr::pi_minus_data(i),
            DataMap::Product => ParamExpr::data(i),
        };
        let mut it = pattern.iter().copied();
        let first = factor(it.next().expect("pattern checked non-empty"));
        it.fold(first, |acc, i| acc * factor(i))
    }
}

/// Configuration for the Pauli-Z feature map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureMapSpec {
    pub num_qubits: usize,
    pub reps: usize,
    /// Z-only Pauli words; a word of length k expands into k-qubit patterns.
    pub paulis: Vec<String>,
    pub entanglement: Entanglement,
    pub data_map: DataMap,
}

impl FeatureMapSpec {
    /// Singletons plus nearest-neighbour pairs, three repetitions.
    pub fn new(num_qubits: usize) -> Self {
        FeatureMapSpec {
            num_qubits,
            reps: 3,
            paulis: vec!["Z".into(), "ZZ".into()],
            entanglement: Entanglement::Linear,
            data_map: DataMap::PiMinusProduct,
        }
    }

    /// Expands the Pauli words into explicit qubit subsets, in order.
    pub fn patterns(&self) -> Result<Vec<Vec<usize>>> {
        let n = self.num_qubits;
        let mut out = Vec::new();
        for word in &self.paulis {
            let k = word.len();
            if k == 0 || !word.chars().all(|c| c.eq_ignore_ascii_case(&'z')) {
                return Err(Error::validation(format!(
                    "feature-map Pauli word {word:?} must be a non-empty run of Z"
                )));
            }
            if k > n {
                return Err(Error::validation(format!(
                    "Pauli word {word:?} is wider than {n} qubits"
                )));
            }
            match self.entanglement {
                Entanglement::Linear => out.extend((0..=n - k).map(|i| (i..i + k).collect())),
                Entanglement::Full => out.extend(combinations(n, k)),
            }
        }
        Ok(out)
    }

    pub fn build(&self) -> Result<Circuit> {
        build_pauli_feature_map(self.num_qubits, self.reps, &self.patterns()?, self.data_map)
    }
}

/// Configuration for the EfficientSU2 ansatz.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub num_qubits: usize,
    pub reps: usize,
    pub entanglement: Entanglement,
}

impl AnsatzSpec {
    pub fn new(num_qubits: usize) -> Self {
        AnsatzSpec {
            num_qubits,
            reps: 3,
            entanglement: Entanglement::Linear,
        }
    }

    pub fn num_parameters(&self) -> usize {
        2 * self.num_qubits * (self.reps + 1)
    }

    pub fn build(&self) -> Result<Circuit> {
        build_efficient_su2(self.num_qubits, self.reps, self.entanglement)
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// `reps` blocks of `H^{⊗n}` followed by one multi-Z phase per pattern.
///
/// The circuit has `n` data symbols and no trainable symbols.
pub fn build_pauli_feature_map(n: usize, reps: usize, patterns: &[Vec<usize>], data_map: DataMap) -> Result<Circuit> {
    if reps == 0 {
        return Err(Error::validation("feature map needs at least one repetition"));
    }
    for p in patterns {
        if p.is_empty() {
            return Err(Error::validation("empty Pauli pattern"));
        }
        if p.len() > n {
            return Err(Error::validation(format!("pattern {p:?} is larger than {n} qubits")));
        }
    }
    let mut c = Circuit::new(n, n, 0)?;
    for _ in 0..reps {
        for q in 0..n {
            c.push(GateOp::h(q))?;
        }
        for p in patterns {
            let op = GateOp::new(GateKind::MultiZPhase, p.clone(), Some(data_map.phase_expr(p)))?;
            c.push(op)?;
        }
    }
    Ok(c)
}

/// `reps + 1` layers of `RY(θ)` then `RZ(θ)` on every qubit, separated by CX
/// entangling layers. Has `2·n·(reps+1)` trainable symbols, numbered layer by
/// layer: all RY angles of a layer, then all RZ angles.
pub fn build_efficient_su2(n: usize, reps: usize, entanglement: Entanglement) -> Result<Circuit> {
    let mut c = Circuit::new(n, 0, 2 * n * (reps + 1))?;
    let mut next = 0;
    for layer in 0..=reps {
        for kind in [GateKind::RY, GateKind::RZ] {
            for q in 0..n {
                c.push(GateOp::rotation(kind, q, ParamExpr::theta(next))?)?;
                next += 1;
            }
        }
        if layer < reps {
            let pairs: Vec<(usize, usize)> = match entanglement {
                Entanglement::Linear => (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
                Entanglement::Full => combinations(n, 2).into_iter().map(|p| (p[0], p[1])).collect(),
            };
            for (a, b) in pairs {
                c.push(GateOp::cx(a, b)?)?;
            }
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn phases(c: &Circuit) -> Vec<f64> {
        c.ops()
            .iter()
            .filter(|op| op.kind() == GateKind::MultiZPhase)
            .map(|op| op.angle().unwrap().as_const().unwrap())
            .collect()
    }

    #[test]
    fn default_patterns() {
        let spec = FeatureMapSpec::new(5);
        let pats = spec.patterns().unwrap();
        assert_eq!(pats.len(), 9);
        assert_eq!(pats[5], vec![0, 1]);
        assert_eq!(pats[8], vec![3, 4]);

        let full = FeatureMapSpec {
            entanglement: Entanglement::Full,
            ..FeatureMapSpec::new(3)
        };
        assert_eq!(full.patterns().unwrap().len(), 3 + 3);
    }

    #[test]
    fn feature_map_phases() {
        let fm = build_pauli_feature_map(2, 1, &[vec![0], vec![1], vec![0, 1]], DataMap::default()).unwrap();
        assert_eq!(phases(&fm.bind(&[PI, PI], &[]).unwrap()), vec![PI, PI, 0.0]);
        assert_eq!(phases(&fm.bind(&[0.0, 0.0], &[]).unwrap()), vec![0.0, 0.0, PI * PI]);
    }

    #[test]
    fn feature_map_rejects_bad_patterns() {
        assert!(build_pauli_feature_map(2, 1, &[vec![]], DataMap::default()).is_err());
        assert!(build_pauli_feature_map(2, 1, &[vec![0, 1, 2]], DataMap::default()).is_err());
        assert!(build_pauli_feature_map(2, 0, &[vec![0]], DataMap::default()).is_err());
        let bad = FeatureMapSpec {
            paulis: vec!["ZX".into()],
            ..FeatureMapSpec::new(2)
        };
        assert!(bad.patterns().is_err());
    }

    #[test]
    fn feature_map_repetitions() {
        let spec = FeatureMapSpec::new(5);
        let c = spec.build().unwrap();
        assert_eq!(c.ops().len(), 3 * (5 + 9));
        assert_eq!(c.num_data(), 5);
        assert_eq!(c.num_theta(), 0);
    }

    #[test]
    fn su2_parameter_counts() {
        assert_eq!(build_efficient_su2(5, 3, Entanglement::Linear).unwrap().num_theta(), 40);
        let tiny = build_efficient_su2(1, 0, Entanglement::Linear).unwrap();
        assert_eq!(tiny.num_theta(), 2);
        assert!(tiny.ops().iter().all(|op| op.kind() != GateKind::CX));
        let full = build_efficient_su2(4, 2, Entanglement::Full).unwrap();
        let cx = full.ops().iter().filter(|op| op.kind() == GateKind::CX).count();
        assert_eq!(cx, 2 * 6);
    }

    #[test]
    fn su2_zero_angles_is_identity_on_zero_state() {
        let c = build_efficient_su2(2, 1, Entanglement::Linear).unwrap();
        let s = c.bind(&[], &[0.0; 8]).unwrap().simulate().unwrap();
        assert_eq!(s.amplitudes()[0].re, 1.0);
        assert!(s.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
    }
}
