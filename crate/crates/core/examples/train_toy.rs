//! Trains a two-qubit classifier on a separable toy set with both optimizers.

use vqc::circuit::{AnsatzSpec, FeatureMapSpec};
use vqc::harness::toy_dataset;
use vqc::model::{train, OptimizerKind, Samples, TrainConfig, VqcModel};

fn main() -> vqc::Result<()> {
    let data = toy_dataset(40, 0);
    let template = VqcModel::from_specs(
        FeatureMapSpec {
            reps: 1,
            paulis: vec!["Z".into()],
            ..FeatureMapSpec::new(2)
        },
        AnsatzSpec::new(2),
    );
    let none = Samples::new(vec![], vec![])?;
    for optimizer in [OptimizerKind::Aqgd, OptimizerKind::Cobyla] {
        let cfg = TrainConfig {
            optimizer,
            epochs: 100,
            ..TrainConfig::default()
        };
        let (model, report) = train(&template, &data, &none, &cfg)?;
        let (pred, _) = model.predict_all(&data.features)?;
        let correct = pred.iter().zip(&data.labels).filter(|(a, b)| a == b).count();
        println!(
            "{optimizer:?}: loss {:.4} -> {:.4}, training accuracy {}/{}",
            report.train_loss.first().map_or(f64::NAN, |p| p.1),
            report.train_loss.last().map_or(f64::NAN, |p| p.1),
            correct,
            data.len()
        );
    }
    Ok(())
}
