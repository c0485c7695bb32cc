//! The variational classifier: feature map, then ansatz, then parity readout.
//!
//! `p_positive(x; θ)` is the probability of measuring a bitstring whose
//! popcount has the positive parity (odd by default). The loss is averaged
//! over samples; its gradient is assembled by the chain rule from
//! parameter-shift derivatives of `p`, which is exact because `p` is the
//! expectation of a parity projector and every θ enters through RY/RZ.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{AnsatzSpec, Circuit, FeatureMapSpec};
use crate::error::{Error, Result};
use crate::optim::{
    aqgd_minimize, cobyla_minimize, AqgdConfig, CobylaConfig, Differentiable, Objective, OptResult, SHIFT,
};
use crate::qsim::{Parity, Statevector};

/// Probabilities are clamped to `[EPS, 1 − EPS]` before the loss.
pub const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    #[default]
    BinaryCrossEntropy,
    SquaredError,
}

impl LossKind {
    pub fn pointwise(self, p: f64, y: u8) -> f64 {
        let y = f64::from(y);
        match self {
            LossKind::BinaryCrossEntropy => {
                let p = p.clamp(EPS, 1.0 - EPS);
                -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
            }
            LossKind::SquaredError => (p - y) * (p - y),
        }
    }

    /// `∂L/∂p` at the clamped probability.
    pub fn derivative(self, p: f64, y: u8) -> f64 {
        let y = f64::from(y);
        match self {
            LossKind::BinaryCrossEntropy => {
                let p = p.clamp(EPS, 1.0 - EPS);
                -y / p + (1.0 - y) / (1.0 - p)
            }
            LossKind::SquaredError => 2.0 * (p - y),
        }
    }
}

/// Which measured parity is read as the positive label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMap {
    pub positive: Parity,
}

impl Default for LabelMap {
    fn default() -> Self {
        LabelMap { positive: Parity::Odd }
    }
}

/// Feature vectors with binary labels.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Samples {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
}

impl Samples {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<u8>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::validation(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        if let Some(i) = labels.iter().position(|&y| y > 1) {
            return Err(Error::validation(format!(
                "label {} at row {i} is not 0 or 1",
                labels[i]
            )));
        }
        Ok(Samples { features, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Encoded samples: the feature-map state of every row, computed once.
#[derive(Debug, Clone)]
pub struct Prepared {
    states: Vec<Statevector>,
    labels: Vec<u8>,
}

impl Prepared {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }
}

/// A classifier over explicit circuits. The feature map may use only data
/// symbols and the ansatz only trainable ones.
#[derive(Debug, Clone)]
pub struct Classifier {
    feature_map: Circuit,
    ansatz: Circuit,
    positive: Parity,
}

impl Classifier {
    pub fn new(feature_map: Circuit, ansatz: Circuit, positive: Parity) -> Result<Self> {
        if feature_map.num_qubits() != ansatz.num_qubits() {
            return Err(Error::validation(format!(
                "feature map acts on {} qubits, ansatz on {}",
                feature_map.num_qubits(),
                ansatz.num_qubits()
            )));
        }
        if feature_map.num_theta() != 0 || ansatz.num_data() != 0 {
            return Err(Error::validation(
                "feature map must be data-only and ansatz trainable-only",
            ));
        }
        Ok(Classifier {
            feature_map,
            ansatz,
            positive,
        })
    }

    pub fn num_features(&self) -> usize {
        self.feature_map.num_data()
    }

    pub fn num_parameters(&self) -> usize {
        self.ansatz.num_theta()
    }

    pub fn encode(&self, x: &[f64]) -> Result<Statevector> {
        if x.len() != self.num_features() {
            return Err(Error::validation(format!(
                "feature vector has {} entries, feature map expects {}",
                x.len(),
                self.num_features()
            )));
        }
        self.feature_map.bind(x, &[])?.simulate()
    }

    pub fn prepare(&self, samples: &Samples) -> Result<Prepared> {
        let states = samples
            .features
            .par_iter()
            .map(|x| self.encode(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(Prepared {
            states,
            labels: samples.labels.clone(),
        })
    }

    fn bind_theta(&self, theta: &[f64]) -> Result<Circuit> {
        self.ansatz.bind(&[], theta)
    }

    fn readout(&self, state: &Statevector, bound: &Circuit) -> Result<f64> {
        let mut s = state.clone();
        bound.apply_to(&mut s)?;
        Ok(s.parity_probability(self.positive))
    }

    pub fn forward(&self, x: &[f64], theta: &[f64]) -> Result<f64> {
        let state = self.encode(x)?;
        self.readout(&state, &self.bind_theta(theta)?)
    }

    pub fn probabilities(&self, data: &Prepared, theta: &[f64]) -> Result<Vec<f64>> {
        let bound = self.bind_theta(theta)?;
        data.states.par_iter().map(|s| self.readout(s, &bound)).collect()
    }

    pub fn loss(&self, data: &Prepared, theta: &[f64], kind: LossKind) -> Result<f64> {
        if data.is_empty() {
            return Err(Error::validation("loss over an empty sample set"));
        }
        let p = self.probabilities(data, theta)?;
        let total: f64 = p.iter().zip(&data.labels).map(|(&p, &y)| kind.pointwise(p, y)).sum();
        Ok(total / data.len() as f64)
    }

    pub fn loss_gradient(&self, data: &Prepared, theta: &[f64], kind: LossKind) -> Result<Vec<f64>> {
        if data.is_empty() {
            return Err(Error::validation("gradient over an empty sample set"));
        }
        let d = theta.len();
        let center = self.bind_theta(theta)?;
        let mut shifted = Vec::with_capacity(2 * d);
        let mut t = theta.to_vec();
        for j in 0..d {
            t[j] = theta[j] + SHIFT;
            shifted.push(self.bind_theta(&t)?);
            t[j] = theta[j] - SHIFT;
            shifted.push(self.bind_theta(&t)?);
            t[j] = theta[j];
        }
        // Per sample: dL/dp times the shift derivative of p for every coordinate.
        let rows = data
            .states
            .par_iter()
            .zip(&data.labels)
            .map(|(s, &y)| {
                let weight = kind.derivative(self.readout(s, &center)?, y);
                (0..d)
                    .map(|j| {
                        let plus = self.readout(s, &shifted[2 * j])?;
                        let minus = self.readout(s, &shifted[2 * j + 1])?;
                        Ok(weight * (plus - minus) / 2.0)
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut grad = vec![0.0; d];
        for row in &rows {
            for (g, v) in grad.iter_mut().zip(row) {
                *g += v;
            }
        }
        let m = data.len() as f64;
        grad.iter_mut().for_each(|g| *g /= m);
        Ok(grad)
    }
}

/// The trained artifact: circuit configuration, weights and decision rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqcModel {
    pub feature_map: FeatureMapSpec,
    pub ansatz: AnsatzSpec,
    pub theta: Vec<f64>,
    /// Offset added to the 0.5 decision threshold.
    pub bias: f64,
    pub label_map: LabelMap,
}

impl VqcModel {
    /// Default circuits on `n` qubits with θ = 0.
    pub fn new(num_qubits: usize) -> Self {
        Self::from_specs(FeatureMapSpec::new(num_qubits), AnsatzSpec::new(num_qubits))
    }

    pub fn from_specs(feature_map: FeatureMapSpec, ansatz: AnsatzSpec) -> Self {
        let theta = vec![0.0; ansatz.num_parameters()];
        VqcModel {
            feature_map,
            ansatz,
            theta,
            bias: 0.0,
            label_map: LabelMap::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta.len() != self.ansatz.num_parameters() {
            return Err(Error::validation(format!(
                "theta has {} entries, ansatz has {} parameters",
                self.theta.len(),
                self.ansatz.num_parameters()
            )));
        }
        let threshold = 0.5 + self.bias;
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::validation(format!(
                "decision threshold {threshold} is outside (0, 1)"
            )));
        }
        if let Some(t) = self.theta.iter().find(|t| !t.is_finite()) {
            return Err(Error::validation(format!("non-finite theta entry {t}")));
        }
        Ok(())
    }

    pub fn classifier(&self) -> Result<Classifier> {
        self.validate()?;
        Classifier::new(self.feature_map.build()?, self.ansatz.build()?, self.label_map.positive)
    }

    /// Draws θ uniformly from [−0.1, 0.1].
    pub fn init_theta(&mut self, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.theta = (0..self.ansatz.num_parameters())
            .map(|_| rng.gen_range(-0.1..=0.1))
            .collect();
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        self.classifier()?.forward(x, &self.theta)
    }

    pub fn decide(&self, p: f64) -> u8 {
        u8::from(p > 0.5 + self.bias)
    }

    pub fn predict(&self, x: &[f64]) -> Result<u8> {
        Ok(self.decide(self.forward(x)?))
    }

    /// Predictions and positive-class probabilities for every row.
    pub fn predict_all(&self, features: &[Vec<f64>]) -> Result<(Vec<u8>, Vec<f64>)> {
        let clf = self.classifier()?;
        let bound = clf.bind_theta(&self.theta)?;
        let p = features
            .par_iter()
            .map(|x| clf.readout(&clf.encode(x)?, &bound))
            .collect::<Result<Vec<f64>>>()?;
        Ok((p.iter().map(|&p| self.decide(p)).collect(), p))
    }

    pub fn loss(&self, data: &Samples, kind: LossKind) -> Result<f64> {
        let clf = self.classifier()?;
        clf.loss(&clf.prepare(data)?, &self.theta, kind)
    }

    pub fn loss_gradient(&self, data: &Samples, kind: LossKind) -> Result<Vec<f64>> {
        let clf = self.classifier()?;
        clf.loss_gradient(&clf.prepare(data)?, &self.theta, kind)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let model: VqcModel = serde_json::from_str(src)?;
        model.validate()?;
        Ok(model)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    #[default]
    Aqgd,
    Cobyla,
}

impl std::str::FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aqgd" => Ok(OptimizerKind::Aqgd),
            "cobyla" => Ok(OptimizerKind::Cobyla),
            other => Err(Error::validation(format!("unknown optimizer {other:?}"))),
        }
    }
}

/// Training settings. `epochs` becomes `maxiter` for AQGD and `maxfun` for COBYLA.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub optimizer: OptimizerKind,
    pub epochs: usize,
    pub loss: LossKind,
    pub seed: u64,
    pub aqgd: AqgdConfig,
    pub cobyla: CobylaConfig,
    /// Stop after this many iterations without a new best validation loss.
    pub patience: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            optimizer: OptimizerKind::Aqgd,
            epochs: 100,
            loss: LossKind::BinaryCrossEntropy,
            seed: 0,
            aqgd: AqgdConfig::default(),
            cobyla: CobylaConfig::default(),
            patience: None,
        }
    }
}

/// What happened during training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub train_loss: Vec<(usize, f64)>,
    pub val_loss: Vec<(usize, f64)>,
    /// Iteration whose θ was kept.
    pub best_iteration: usize,
    pub best_val_loss: f64,
    pub evals: usize,
    pub grad_evals: usize,
    pub iterations: usize,
    pub converged: bool,
    /// θ after every iteration.
    #[serde(skip)]
    pub theta_trace: Vec<Vec<f64>>,
}

struct TrainingLoss<'a> {
    clf: &'a Classifier,
    data: &'a Prepared,
    kind: LossKind,
}

impl Objective for TrainingLoss<'_> {
    fn value(&self, theta: &[f64]) -> Result<f64> {
        self.clf.loss(self.data, theta, self.kind)
    }
}

impl Differentiable for TrainingLoss<'_> {
    fn gradient(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.clf.loss_gradient(self.data, theta, self.kind)
    }
}

/// Initializes θ from `cfg.seed`, minimizes the training loss and keeps the
/// iterate with the lowest validation loss. With an empty validation set the
/// training loss picks the checkpoint instead.
pub fn train(
    template: &VqcModel,
    train: &Samples,
    val: &Samples,
    cfg: &TrainConfig,
) -> Result<(VqcModel, TrainReport)> {
    if cfg.epochs == 0 {
        return Err(Error::validation("training budget must be at least 1"));
    }
    if train.is_empty() {
        return Err(Error::validation("empty training set"));
    }
    let mut model = template.clone();
    model.init_theta(cfg.seed);
    let clf = model.classifier()?;
    let train_set = clf.prepare(train)?;
    let val_set = if val.is_empty() { None } else { Some(clf.prepare(val)?) };
    let objective = TrainingLoss {
        clf: &clf,
        data: &train_set,
        kind: cfg.loss,
    };

    let mut val_loss = Vec::new();
    let mut trace = Vec::new();
    let mut best: Option<(usize, f64, Vec<f64>)> = None;
    let mut observer = |it: usize, theta: &[f64], train_value: f64| -> Result<bool> {
        let v = match &val_set {
            Some(vs) => clf.loss(vs, theta, cfg.loss)?,
            None => train_value,
        };
        val_loss.push((it, v));
        trace.push(theta.to_vec());
        if best.as_ref().is_none_or(|b| v < b.1) {
            best = Some((it, v, theta.to_vec()));
        }
        let stale = best.as_ref().map_or(0, |b| it - b.0);
        Ok(cfg.patience.is_some_and(|p| stale >= p))
    };

    let result: OptResult = match cfg.optimizer {
        OptimizerKind::Aqgd => {
            let opt = AqgdConfig {
                maxiter: cfg.epochs,
                ..cfg.aqgd.clone()
            };
            aqgd_minimize(&objective, &model.theta, &opt, Some(&mut observer))?
        }
        OptimizerKind::Cobyla => {
            let opt = CobylaConfig {
                maxfun: cfg.epochs,
                ..cfg.cobyla.clone()
            };
            cobyla_minimize(&objective, &model.theta, &opt, Some(&mut observer))?
        }
    };

    let (best_iteration, best_val_loss, best_theta) = best.expect("optimizers report at least one iteration");
    model.theta = best_theta;
    let report = TrainReport {
        train_loss: result.history,
        val_loss,
        best_iteration,
        best_val_loss,
        evals: result.evals,
        grad_evals: result.grad_evals,
        iterations: result.iterations,
        converged: result.converged,
        theta_trace: trace,
    };
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{GateKind, GateOp, ParamExpr};
    use approx::assert_abs_diff_eq;

    /// One qubit, no encoding, ansatz RY(t0): p_odd = sin²(θ/2).
    fn ry_classifier() -> Classifier {
        let fm = Circuit::new(1, 1, 0).unwrap();
        let mut ansatz = Circuit::new(1, 0, 1).unwrap();
        ansatz
            .push(GateOp::rotation(GateKind::RY, 0, ParamExpr::theta(0)).unwrap())
            .unwrap();
        Classifier::new(fm, ansatz, Parity::Odd).unwrap()
    }

    #[test]
    fn ry_pi_is_certainly_odd() {
        let clf = ry_classifier();
        assert_abs_diff_eq!(
            clf.forward(&[0.0], &[std::f64::consts::PI]).unwrap(),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn uniform_superposition_is_half() {
        let mut fm = Circuit::new(2, 2, 0).unwrap();
        fm.push(GateOp::h(0)).unwrap();
        fm.push(GateOp::h(1)).unwrap();
        let ansatz = crate::circuit::build_efficient_su2(2, 0, Default::default()).unwrap();
        let clf = Classifier::new(fm, ansatz, Parity::Odd).unwrap();
        assert_abs_diff_eq!(clf.forward(&[0.0, 0.0], &[0.0; 4]).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn loss_values() {
        let k = LossKind::BinaryCrossEntropy;
        assert_abs_diff_eq!(k.pointwise(0.5, 1), std::f64::consts::LN_2, epsilon = 1e-15);
        assert!(k.pointwise(1.0, 1) <= 1e-11);
        assert!(k.pointwise(0.0, 0) <= 1e-11);
        assert!(k.pointwise(0.0, 1).is_finite());
        assert_eq!(LossKind::SquaredError.pointwise(0.25, 1), 0.5625);
    }

    #[test]
    fn closed_form_gradient() {
        // p = sin²(θ/2), dp/dθ = sin(θ)/2
        let clf = ry_classifier();
        for (theta, y) in [(0.3, 1u8), (1.7, 0), (-2.2, 1), (2.9, 0)] {
            let samples = Samples::new(vec![vec![0.0]], vec![y]).unwrap();
            let data = clf.prepare(&samples).unwrap();
            let g = clf
                .loss_gradient(&data, &[theta], LossKind::BinaryCrossEntropy)
                .unwrap()[0];
            let p = (theta / 2.0f64).sin().powi(2);
            let dl_dp = if y == 1 { -1.0 / p } else { 1.0 / (1.0 - p) };
            assert_abs_diff_eq!(g, dl_dp * theta.sin() / 2.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn theta_independent_circuit_has_zero_gradient() {
        let fm = FeatureMapSpec::new(2).build().unwrap();
        let ansatz = Circuit::new(2, 0, 3).unwrap();
        let clf = Classifier::new(fm, ansatz, Parity::Odd).unwrap();
        let s = Samples::new(vec![vec![0.4, 1.1], vec![2.0, 0.3]], vec![1, 0]).unwrap();
        let g = clf
            .loss_gradient(
                &clf.prepare(&s).unwrap(),
                &[0.1, 0.2, 0.3],
                LossKind::BinaryCrossEntropy,
            )
            .unwrap();
        assert_eq!(g, vec![0.0; 3]);
    }

    #[test]
    fn tie_resolves_to_negative() {
        let m = VqcModel::new(2);
        assert_eq!(m.decide(0.5), 0);
        assert_eq!(m.decide(1.0), 1);
        let shifted = VqcModel { bias: 0.2, ..m.clone() };
        assert_eq!(shifted.decide(0.65), 0);
        assert!(VqcModel { bias: 0.5, ..m }.validate().is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let m = VqcModel::new(3);
        assert!(matches!(m.forward(&[0.1, 0.2]), Err(Error::Validation(_))));
        assert!(Samples::new(vec![vec![0.0]], vec![2]).is_err());
        assert!(m.loss(&Samples::default(), LossKind::BinaryCrossEntropy).is_err());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let mut m = VqcModel::new(3);
        m.init_theta(17);
        m.theta[0] = 0.1 + 0.2;
        m.theta[1] = -1e-300;
        m.bias = 1.0 / 3.0 - 0.3;
        let back = VqcModel::from_json(&m.to_json().unwrap()).unwrap();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back.theta), bits(&m.theta));
        assert_eq!(back.bias.to_bits(), m.bias.to_bits());
        assert_eq!(back, m);
    }

    #[test]
    fn init_is_seeded_and_small() {
        let mut a = VqcModel::new(5);
        let mut b = VqcModel::new(5);
        a.init_theta(3);
        b.init_theta(3);
        assert_eq!(a.theta, b.theta);
        assert_eq!(a.theta.len(), 40);
        assert!(a.theta.iter().all(|t| t.abs() <= 0.1));
        b.init_theta(4);
        assert_ne!(a.theta, b.theta);
    }

    #[test]
    fn budget_of_one_is_one_iteration() {
        let m = VqcModel::new(2);
        let s = Samples::new(vec![vec![0.5, 1.0], vec![2.5, 0.2]], vec![1, 0]).unwrap();
        let cfg = TrainConfig {
            epochs: 1,
            ..TrainConfig::default()
        };
        let (_, report) = train(&m, &s, &s, &cfg).unwrap();
        assert_eq!(report.iterations, 1);
        assert_eq!(report.train_loss.len(), 1);
        assert_eq!(report.val_loss.len(), 1);
    }
}
