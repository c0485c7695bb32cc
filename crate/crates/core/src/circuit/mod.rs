//! Parameterized circuit representation and the two circuit families used by
//! the classifier: a Pauli-Z feature map and the EfficientSU2 ansatz.

mod builders;
mod expr;
mod text;

pub use builders::{build_efficient_su2, build_pauli_feature_map, AnsatzSpec, DataMap, Entanglement, FeatureMapSpec};
pub use expr::{ParamExpr, Symbol};

use crate::error::{Error, Result};
use crate::qsim::{Gate1, Statevector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    RX,
    RY,
    RZ,
    CX,
    /// `exp(i φ ∏ Z_q)` over an arbitrary qubit subset.
    MultiZPhase,
}

impl GateKind {
    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::MultiZPhase)
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::RZ => "RZ",
            GateKind::CX => "CX",
            GateKind::MultiZPhase => "MZ",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<Self> {
        Some(match s {
            "H" => GateKind::H,
            "RX" => GateKind::RX,
            "RY" => GateKind::RY,
            "RZ" => GateKind::RZ,
            "CX" => GateKind::CX,
            "MZ" => GateKind::MultiZPhase,
            _ => return None,
        })
    }
}

/// One gate application.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    kind: GateKind,
    qubits: Vec<usize>,
    angle: Option<ParamExpr>,
}

impl GateOp {
    pub fn new(kind: GateKind, qubits: Vec<usize>, angle: Option<ParamExpr>) -> Result<Self> {
        let arity_ok = match kind {
            GateKind::H | GateKind::RX | GateKind::RY | GateKind::RZ => qubits.len() == 1,
            GateKind::CX => qubits.len() == 2 && qubits[0] != qubits[1],
            GateKind::MultiZPhase => {
                let mut sorted = qubits.clone();
                sorted.sort_unstable();
                sorted.dedup();
                !qubits.is_empty() && sorted.len() == qubits.len()
            }
        };
        if !arity_ok {
            return Err(Error::validation(format!(
                "{} cannot act on qubits {qubits:?}",
                kind.mnemonic()
            )));
        }
        if kind.is_rotation() != angle.is_some() {
            return Err(Error::validation(format!(
                "{} {} an angle",
                kind.mnemonic(),
                if kind.is_rotation() {
                    "requires"
                } else {
                    "does not take"
                }
            )));
        }
        Ok(GateOp { kind, qubits, angle })
    }

    pub fn h(q: usize) -> Self {
        GateOp {
            kind: GateKind::H,
            qubits: vec![q],
            angle: None,
        }
    }

    pub fn cx(control: usize, target: usize) -> Result<Self> {
        GateOp::new(GateKind::CX, vec![control, target], None)
    }

    pub fn rotation(kind: GateKind, q: usize, angle: ParamExpr) -> Result<Self> {
        GateOp::new(kind, vec![q], Some(angle))
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn angle(&self) -> Option<&ParamExpr> {
        self.angle.as_ref()
    }
}

/// Ordered gate list over `num_qubits` qubits with its free-symbol lists.
///
/// Data symbols are named `x[i]` and trainable symbols `t[j]`; the lists hold
/// their names in index order. A bound circuit has both lists empty and only
/// constant angles.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<GateOp>,
    data_symbols: Vec<String>,
    theta_symbols: Vec<String>,
}

impl Circuit {
    pub fn new(num_qubits: usize, num_data: usize, num_theta: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > crate::qsim::MAX_QUBITS {
            return Err(Error::Capacity(format!(
                "circuit width {num_qubits} outside 1..={}",
                crate::qsim::MAX_QUBITS
            )));
        }
        Ok(Circuit {
            num_qubits,
            ops: Vec::new(),
            data_symbols: (0..num_data).map(|i| format!("x[{i}]")).collect(),
            theta_symbols: (0..num_theta).map(|j| format!("t[{j}]")).collect(),
        })
    }

    /// Appends a gate after checking its qubits and symbols against this circuit.
    pub fn push(&mut self, op: GateOp) -> Result<()> {
        if let Some(&q) = op.qubits.iter().find(|&&q| q >= self.num_qubits) {
            return Err(Error::Index {
                index: q,
                num_qubits: self.num_qubits,
            });
        }
        if let Some(angle) = &op.angle {
            for s in angle.free_symbols() {
                let known = match s {
                    Symbol::Data(i) => i < self.data_symbols.len(),
                    Symbol::Theta(j) => j < self.theta_symbols.len(),
                };
                if !known {
                    return Err(Error::binding(format!(
                        "angle `{angle}` references undeclared symbol {s:?}"
                    )));
                }
            }
        }
        self.ops.push(op);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn data_symbols(&self) -> &[String] {
        &self.data_symbols
    }

    pub fn theta_symbols(&self) -> &[String] {
        &self.theta_symbols
    }

    pub fn num_data(&self) -> usize {
        self.data_symbols.len()
    }

    pub fn num_theta(&self) -> usize {
        self.theta_symbols.len()
    }

    pub fn is_bound(&self) -> bool {
        self.ops
            .iter()
            .all(|op| op.angle.as_ref().is_none_or(|a| a.as_const().is_some()))
    }

    /// `self` followed by `other`. Symbols of `other` are renumbered after
    /// those of `self`.
    pub fn compose(&self, other: &Circuit) -> Result<Circuit> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::validation(format!(
                "cannot compose {}-qubit and {}-qubit circuits",
                self.num_qubits, other.num_qubits
            )));
        }
        let (dn, tn) = (self.num_data(), self.num_theta());
        let mut out = Circuit::new(self.num_qubits, dn + other.num_data(), tn + other.num_theta())?;
        out.ops = self.ops.clone();
        out.ops.extend(other.ops.iter().map(|op| GateOp {
            kind: op.kind,
            qubits: op.qubits.clone(),
            angle: op.angle.as_ref().map(|a| a.shift_symbols(dn, tn)),
        }));
        Ok(out)
    }

    /// Substitutes data and trainable values, reducing every angle to a constant.
    pub fn bind(&self, data: &[f64], theta: &[f64]) -> Result<Circuit> {
        if data.len() != self.num_data() || theta.len() != self.num_theta() {
            return Err(Error::binding(format!(
                "expected {} data and {} trainable values, got {} and {}",
                self.num_data(),
                self.num_theta(),
                data.len(),
                theta.len()
            )));
        }
        let mut ops = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let angle = match &op.angle {
                Some(a) => {
                    let v = a.eval(data, theta)?;
                    if !v.is_finite() {
                        return Err(Error::binding(format!("angle `{a}` evaluated to {v}")));
                    }
                    Some(ParamExpr::Const(v))
                }
                None => None,
            };
            ops.push(GateOp {
                kind: op.kind,
                qubits: op.qubits.clone(),
                angle,
            });
        }
        Ok(Circuit {
            num_qubits: self.num_qubits,
            ops,
            data_symbols: Vec::new(),
            theta_symbols: Vec::new(),
        })
    }

    /// Runs the bound circuit from `|0…0⟩`.
    pub fn simulate(&self) -> Result<Statevector> {
        let mut state = Statevector::zero_state(self.num_qubits)?;
        self.apply_to(&mut state)?;
        Ok(state)
    }

    /// Applies the bound circuit to an existing state.
    pub fn apply_to(&self, state: &mut Statevector) -> Result<()> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::validation(format!(
                "{}-qubit circuit applied to {}-qubit state",
                self.num_qubits,
                state.num_qubits()
            )));
        }
        for op in &self.ops {
            let angle = match &op.angle {
                None => 0.0,
                Some(a) => a
                    .as_const()
                    .ok_or_else(|| Error::binding(format!("angle `{a}` still has free symbols")))?,
            };
            match op.kind {
                GateKind::H => state.apply_single(&Gate1::h(), op.qubits[0])?,
                GateKind::RX => state.apply_single(&Gate1::rx(angle), op.qubits[0])?,
                GateKind::RY => state.apply_single(&Gate1::ry(angle), op.qubits[0])?,
                GateKind::RZ => state.apply_single(&Gate1::rz(angle), op.qubits[0])?,
                GateKind::CX => state.apply_cx(op.qubits[0], op.qubits[1])?,
                GateKind::MultiZPhase => state.apply_multi_z_phase(&op.qubits, angle)?,
            }
        }
        Ok(())
    }

    /// The adjoint circuit: reversed order with negated angles.
    pub fn inverse(&self) -> Circuit {
        let ops = self
            .ops
            .iter()
            .rev()
            .map(|op| GateOp {
                kind: op.kind,
                qubits: op.qubits.clone(),
                angle: op.angle.as_ref().map(ParamExpr::negated),
            })
            .collect();
        Circuit {
            num_qubits: self.num_qubits,
            ops,
            data_symbols: self.data_symbols.clone(),
            theta_symbols: self.theta_symbols.clone(),
        }
    }
}
