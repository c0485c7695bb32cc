use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::dataset::sha256_hex;
use super::split::SplitSpec;
use crate::circuit::{AnsatzSpec, DataMap, Entanglement, FeatureMapSpec};
use crate::error::{Error, Result};
use crate::model::{LossKind, OptimizerKind, TrainConfig, VqcModel};
use crate::optim::{AqgdConfig, CobylaConfig};
use crate::textfeat::{parse_manifest, LexiconSet, PipelineConfig, BUNDLED_MANIFEST};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSettings {
    pub train: usize,
    pub val: usize,
    pub test: usize,
    pub stratified: bool,
}

impl Default for SplitSettings {
    fn default() -> Self {
        SplitSettings {
            train: 600,
            val: 200,
            test: 200,
            stratified: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureSettings {
    /// PCA components, which is also the qubit count.
    pub components: usize,
    pub standardize: bool,
    /// Feature manifest file; the bundled 21-feature manifest when absent.
    pub manifest: Option<PathBuf>,
    /// Directory of lexicon files; the bundled lexicons when absent.
    pub lexicon_dir: Option<PathBuf>,
}

impl Default for FeatureSettings {
    fn default() -> Self {
        FeatureSettings {
            components: 5,
            standardize: true,
            manifest: None,
            lexicon_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureMapSettings {
    pub reps: usize,
    pub paulis: Vec<String>,
    pub entanglement: Entanglement,
    pub data_map: DataMap,
}

/// Experiment default: one layer of single-qubit phases. It beat the
/// library's `Z`+`ZZ`, three-layer map on validation accuracy for both
/// optimizers on held-out development data.
impl Default for FeatureMapSettings {
    fn default() -> Self {
        let spec = FeatureMapSpec::new(1);
        FeatureMapSettings {
            reps: 1,
            paulis: vec!["Z".into()],
            entanglement: spec.entanglement,
            data_map: spec.data_map,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnsatzSettings {
    pub reps: usize,
    pub entanglement: Entanglement,
}

impl Default for AnsatzSettings {
    fn default() -> Self {
        let spec = AnsatzSpec::new(1);
        AnsatzSettings {
            reps: spec.reps,
            entanglement: spec.entanglement,
        }
    }
}

/// AQGD knobs. The iteration count comes from `epochs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AqgdSettings {
    pub eta: f64,
    pub momentum: f64,
    pub tol: f64,
}

/// A larger step than [`AqgdConfig::default`]: at η = 0.1 training is
/// still far from converged after 100 iterations.
impl Default for AqgdSettings {
    fn default() -> Self {
        let lib = AqgdConfig::default();
        AqgdSettings {
            eta: 1.0,
            momentum: lib.momentum,
            tol: lib.tol,
        }
    }
}

/// COBYLA knobs. The evaluation budget comes from `epochs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CobylaSettings {
    pub rhobeg: f64,
    pub rhoend: f64,
}

impl Default for CobylaSettings {
    fn default() -> Self {
        CobylaSettings {
            rhobeg: 0.5,
            rhoend: CobylaConfig::default().rhoend,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSettings {
    pub optimizer: OptimizerKind,
    /// AQGD iterations or COBYLA function evaluations.
    pub epochs: usize,
    pub loss: LossKind,
    pub patience: Option<usize>,
    pub aqgd: AqgdSettings,
    pub cobyla: CobylaSettings,
}

impl Default for TrainSettings {
    fn default() -> Self {
        let t = TrainConfig::default();
        TrainSettings {
            optimizer: t.optimizer,
            epochs: t.epochs,
            loss: t.loss,
            patience: t.patience,
            aqgd: AqgdSettings::default(),
            cobyla: CobylaSettings::default(),
        }
    }
}

/// Everything that determines an experiment besides the data.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Drives the split and the initial weights.
    pub seed: u64,
    pub split: SplitSettings,
    pub features: FeatureSettings,
    pub feature_map: FeatureMapSettings,
    pub ansatz: AnsatzSettings,
    pub train: TrainSettings,
}

/// Converts a byte offset into a 1-based line number.
fn line_of(src: &str, offset: usize) -> usize {
    1 + src.as_bytes()[..offset.min(src.len())]
        .iter()
        .filter(|&&b| b == b'\n')
        .count()
}

impl RunConfig {
    pub fn from_toml(src: &str, origin: &str) -> Result<Self> {
        toml::from_str(src).map_err(|e| Error::Parse {
            path: origin.to_string(),
            line: e.span().map_or(0, |s| line_of(src, s.start)),
            message: e.message().to_string(),
        })
    }

    /// Reads a TOML file. Relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&src, &path.display().to_string())?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.features.manifest, &mut cfg.features.lexicon_dir]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serde(e.to_string()))
    }

    /// SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        sha256_hex(&serde_json::to_vec(self).expect("config serializes"))
    }

    /// Checks values and that every referenced file exists.
    pub fn validate(&self) -> Result<()> {
        if self.features.components == 0 {
            return Err(Error::validation("features.components must be at least 1"));
        }
        if self.train.epochs == 0 {
            return Err(Error::validation("train.epochs must be at least 1"));
        }
        if self.split.train == 0 {
            return Err(Error::validation("split.train must be at least 1"));
        }
        if let Some(m) = &self.features.manifest {
            if !m.is_file() {
                return Err(Error::validation(format!(
                    "feature manifest {} does not exist",
                    m.display()
                )));
            }
        }
        if let Some(d) = &self.features.lexicon_dir {
            if !d.is_dir() {
                return Err(Error::validation(format!(
                    "lexicon directory {} does not exist",
                    d.display()
                )));
            }
        }
        let model = self.model_template();
        model.validate()?;
        model.feature_map.patterns()?;
        let t = self.train_config();
        match t.optimizer {
            OptimizerKind::Aqgd => t.aqgd.validate(),
            OptimizerKind::Cobyla => t.cobyla.validate(model.ansatz.num_parameters()),
        }
    }

    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            train_n: self.split.train,
            val_n: self.split.val,
            test_n: self.split.test,
            seed: self.seed,
            stratified: self.split.stratified,
        }
    }

    pub fn lexicons(&self) -> Result<LexiconSet> {
        match &self.features.lexicon_dir {
            Some(dir) => LexiconSet::load_dir(dir),
            None => Ok(LexiconSet::bundled()),
        }
    }

    pub fn pipeline_config(&self) -> Result<PipelineConfig> {
        let manifest = match &self.features.manifest {
            Some(p) => parse_manifest(&std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?),
            None => parse_manifest(BUNDLED_MANIFEST),
        };
        Ok(PipelineConfig {
            manifest,
            components: self.features.components,
            standardize: self.features.standardize,
        })
    }

    /// Untrained model whose width matches the PCA output.
    pub fn model_template(&self) -> VqcModel {
        let n = self.features.components;
        let fm = FeatureMapSpec {
            num_qubits: n,
            reps: self.feature_map.reps,
            paulis: self.feature_map.paulis.clone(),
            entanglement: self.feature_map.entanglement,
            data_map: self.feature_map.data_map,
        };
        let ansatz = AnsatzSpec {
            num_qubits: n,
            reps: self.ansatz.reps,
            entanglement: self.ansatz.entanglement,
        };
        VqcModel::from_specs(fm, ansatz)
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            optimizer: self.train.optimizer,
            epochs: self.train.epochs,
            loss: self.train.loss,
            seed: self.seed,
            aqgd: AqgdConfig {
                eta: self.train.aqgd.eta,
                momentum: self.train.aqgd.momentum,
                maxiter: self.train.epochs,
                tol: self.train.aqgd.tol,
            },
            cobyla: CobylaConfig {
                rhobeg: self.train.cobyla.rhobeg,
                rhoend: self.train.cobyla.rhoend,
                maxfun: self.train.epochs,
            },
            patience: self.train.patience,
        }
    }

    /// Short label such as `EfficientSU2 100 Epochs with AQGD`.
    pub fn model_name(&self) -> String {
        let opt = match self.train.optimizer {
            OptimizerKind::Aqgd => "AQGD",
            OptimizerKind::Cobyla => "COBYLA",
        };
        format!("EfficientSU2 {} Epochs with {opt}", self.train.epochs)
    }
}
