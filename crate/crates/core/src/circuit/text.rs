//! Line-oriented circuit text format.
//!
//! ```text
//! qubits 2
//! data 2
//! theta 0
//! H 0
//! MZ 0,1 ((pi - x[0]) * (pi - x[1]))
//! RY 1 -0.25
//! CX 0,1
//! ```
//!
//! Three header lines declare the width and the number of data (`x[i]`) and
//! trainable (`t[j]`) symbols. Every following line is one gate:
//! `KIND q0[,q1,…] [angle]`. Blank lines and `#` comments are ignored.
//! Printing then parsing yields a structurally identical circuit.

use std::fmt::Write as _;

use super::{Circuit, GateKind, GateOp, ParamExpr};
use crate::error::{Error, Result};

impl Circuit {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "qubits {}", self.num_qubits);
        let _ = writeln!(out, "data {}", self.num_data());
        let _ = writeln!(out, "theta {}", self.num_theta());
        for op in &self.ops {
            let qubits = op.qubits.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",");
            match &op.angle {
                Some(a) => {
                    let _ = writeln!(out, "{} {qubits} {a}", op.kind.mnemonic());
                }
                None => {
                    let _ = writeln!(out, "{} {qubits}", op.kind.mnemonic());
                }
            }
        }
        out
    }

    pub fn from_text(src: &str) -> Result<Circuit> {
        let err = |line: usize, message: String| Error::Parse {
            path: "<circuit>".into(),
            line,
            message,
        };
        let mut lines = src
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let mut header = |key: &str| -> Result<usize> {
            let (no, line) = lines.next().ok_or_else(|| err(0, format!("missing `{key}` header")))?;
            line.strip_prefix(key)
                .and_then(|rest| rest.trim().parse().ok())
                .ok_or_else(|| err(no, format!("expected `{key} <count>`, got {line:?}")))
        };
        let qubits = header("qubits")?;
        let data = header("data")?;
        let theta = header("theta")?;
        let mut c = Circuit::new(qubits, data, theta)?;

        for (no, line) in lines {
            let mut parts = line.splitn(3, char::is_whitespace);
            let kind_s = parts.next().unwrap_or_default();
            let kind =
                GateKind::from_mnemonic(kind_s).ok_or_else(|| err(no, format!("unknown gate kind {kind_s:?}")))?;
            let qubit_s = parts.next().ok_or_else(|| err(no, "missing qubit list".into()))?;
            let qs = qubit_s
                .split(',')
                .map(|q| q.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| err(no, format!("bad qubit list {qubit_s:?}: {e}")))?;
            let angle = parts
                .next()
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(ParamExpr::parse)
                .transpose()
                .map_err(|e| err(no, e.to_string()))?;
            let op = GateOp::new(kind, qs, angle).map_err(|e| err(no, e.to_string()))?;
            c.push(op).map_err(|e| err(no, e.to_string()))?;
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{build_efficient_su2, Entanglement, FeatureMapSpec};
    use super::*;

    #[test]
    fn symbolic_round_trip() {
        let fm = FeatureMapSpec::new(3).build().unwrap();
        let su2 = build_efficient_su2(3, 2, Entanglement::Full).unwrap();
        let c = fm.compose(&su2).unwrap();
        let text = c.to_text();
        assert_eq!(Circuit::from_text(&text).unwrap(), c);
    }

    #[test]
    fn bound_round_trip_is_bit_exact() {
        let su2 = build_efficient_su2(2, 1, Entanglement::Linear).unwrap();
        let theta: Vec<f64> = (0..8).map(|i| (i as f64 * 0.731).sin() / 3.0).collect();
        let b = su2.bind(&[], &theta).unwrap();
        let back = Circuit::from_text(&b.to_text()).unwrap();
        for (x, y) in b.ops().iter().zip(back.ops()) {
            let (x, y) = (x.angle().map(|a| a.as_const()), y.angle().map(|a| a.as_const()));
            assert_eq!(x.map(|v| v.map(f64::to_bits)), y.map(|v| v.map(f64::to_bits)));
        }
        assert_eq!(back, b);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let src = "qubits 2\ndata 0\ntheta 0\nH 0\nFOO 1\n";
        match Circuit::from_text(src) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Circuit::from_text("qubits 2\ndata 0\ntheta 0\nRY 0\n").is_err());
        assert!(Circuit::from_text("qubits 2\ndata 0\n").is_err());
        assert!(Circuit::from_text("qubits 1\ndata 0\ntheta 0\nRZ 0 x[0]\n").is_err());
    }
}
