use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::dataset::{load_dataset, sha256_hex, Dataset, Review};
use super::split::{split_indices, SplitIndices, SplitSpec};
use crate::error::{Error, Result};
use crate::eval::{confusion, metrics, report_table, ConfusionMatrix, MetricsRow, Report, ReportRow};
use crate::model::{train, OptimizerKind, Samples, TrainReport, VqcModel};
use crate::textfeat::{FeaturePipeline, LexiconSet};

pub const MODEL_FORMAT: &str = "vqc-model/1";
pub const RECORD_FORMAT: &str = "vqc-result/1";
pub const MODEL_FILE: &str = "model.json";
pub const RECORD_FILE: &str = "result.json";
pub const REPORT_CSV: &str = "report.csv";
pub const REPORT_MD: &str = "report.md";

/// Identifies the lexicons a pipeline was fitted with.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconRef {
    /// `bundled`, or the directory the files were read from.
    pub source: String,
    pub sha256: String,
}

impl LexiconRef {
    pub fn of(lex: &LexiconSet, dir: Option<&Path>) -> Self {
        LexiconRef {
            source: dir.map_or_else(|| "bundled".to_string(), |d| d.display().to_string()),
            sha256: sha256_hex(format!("{lex:?}").as_bytes()),
        }
    }
}

/// Split, fitted transforms and the three encoded sample sets.
#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub dataset_digest: String,
    pub indices: SplitIndices,
    pub lexicon: LexiconRef,
    pub pipeline: FeaturePipeline,
    pub train: Samples,
    pub val: Samples,
    pub test: Samples,
}

/// The parts of a [`TrainReport`] worth persisting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSummary {
    pub best_iteration: usize,
    pub best_val_loss: f64,
    pub final_train_loss: f64,
    pub evals: usize,
    pub grad_evals: usize,
    pub iterations: usize,
    pub converged: bool,
}

impl From<&TrainReport> for TrainSummary {
    fn from(r: &TrainReport) -> Self {
        TrainSummary {
            best_iteration: r.best_iteration,
            best_val_loss: r.best_val_loss,
            final_train_loss: r.train_loss.last().map_or(f64::NAN, |&(_, v)| v),
            evals: r.evals,
            grad_evals: r.grad_evals,
            iterations: r.iterations,
            converged: r.converged,
        }
    }
}

/// Everything needed to classify new text: weights plus fitted transforms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub format: String,
    pub name: String,
    pub config_digest: String,
    pub dataset_digest: String,
    pub split: SplitSpec,
    pub lexicon: LexiconRef,
    pub config: RunConfig,
    pub training: TrainSummary,
    pub pipeline: FeaturePipeline,
    pub model: VqcModel,
}

impl ModelArtifact {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let a: ModelArtifact = serde_json::from_str(src)?;
        if a.format != MODEL_FORMAT {
            return Err(Error::validation(format!("unsupported model format {:?}", a.format)));
        }
        a.model.validate()?;
        Ok(a)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    /// Labels and positive-class probabilities for raw review texts.
    pub fn classify(&self, texts: &[String], lex: &LexiconSet) -> Result<(Vec<u8>, Vec<f64>)> {
        self.model.predict_all(&self.pipeline.transform(texts, lex)?)
    }
}

/// One run's outcome. Contains no timestamps, so identical inputs give
/// identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub format: String,
    pub name: String,
    pub config_digest: String,
    pub dataset_digest: String,
    pub seed: u64,
    pub optimizer: OptimizerKind,
    pub epochs: usize,
    pub split: [usize; 3],
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsRow,
    pub training: TrainSummary,
}

impl ResultRecord {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let r: ResultRecord = serde_json::from_str(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)?;
        if r.format != RECORD_FORMAT {
            return Err(Error::validation(format!("unsupported result format {:?}", r.format)));
        }
        Ok(r)
    }

    pub fn report_row(&self) -> ReportRow {
        ReportRow::new(self.name.clone(), self.metrics)
    }
}

fn texts_and_labels(rows: &[Review], idx: &[usize]) -> (Vec<String>, Vec<u8>) {
    idx.iter().map(|&i| (rows[i].text.clone(), rows[i].label)).unzip()
}

/// Splits the data and fits the text transforms on the training part only.
pub fn preprocess(cfg: &RunConfig, ds: &Dataset) -> Result<Preprocessed> {
    let indices = split_indices(&ds.labels(), &cfg.split_spec()).map_err(|e| e.in_stage("split"))?;
    let stage = |e: Error| e.in_stage("preprocess");
    let lex = cfg.lexicons().map_err(stage)?;
    let pcfg = cfg.pipeline_config().map_err(stage)?;
    let (train_text, train_y) = texts_and_labels(&ds.rows, &indices.train);
    let (pipeline, train_x) = FeaturePipeline::fit(&train_text, &lex, &pcfg).map_err(stage)?;
    let encode = |idx: &[usize]| -> Result<Samples> {
        let (text, y) = texts_and_labels(&ds.rows, idx);
        if text.is_empty() {
            return Ok(Samples::default());
        }
        Samples::new(pipeline.transform(&text, &lex)?, y)
    };
    let val = encode(&indices.val).map_err(stage)?;
    let test = encode(&indices.test).map_err(stage)?;
    Ok(Preprocessed {
        dataset_digest: ds.provenance.sha256.clone(),
        lexicon: LexiconRef::of(&lex, cfg.features.lexicon_dir.as_deref()),
        train: Samples::new(train_x, train_y).map_err(stage)?,
        indices,
        pipeline,
        val,
        test,
    })
}

/// Trains on preprocessed data and packages the result.
pub fn fit(cfg: &RunConfig, prep: &Preprocessed) -> Result<(ModelArtifact, TrainReport)> {
    let (model, report) =
        train(&cfg.model_template(), &prep.train, &prep.val, &cfg.train_config()).map_err(|e| e.in_stage("train"))?;
    let artifact = ModelArtifact {
        format: MODEL_FORMAT.into(),
        name: cfg.model_name(),
        config_digest: cfg.digest(),
        dataset_digest: prep.dataset_digest.clone(),
        split: cfg.split_spec(),
        lexicon: prep.lexicon.clone(),
        config: cfg.clone(),
        training: TrainSummary::from(&report),
        pipeline: prep.pipeline.clone(),
        model,
    };
    Ok((artifact, report))
}

/// Confusion matrix and metrics of `model` on encoded samples.
pub fn score(model: &VqcModel, samples: &Samples) -> Result<(ConfusionMatrix, MetricsRow)> {
    let (pred, _) = model.predict_all(&samples.features)?;
    let cm = confusion(&samples.labels, &pred)?;
    Ok((cm, metrics(&cm)?))
}

fn record(artifact: &ModelArtifact, cm: ConfusionMatrix, m: MetricsRow) -> ResultRecord {
    let cfg = &artifact.config;
    ResultRecord {
        format: RECORD_FORMAT.into(),
        name: artifact.name.clone(),
        config_digest: artifact.config_digest.clone(),
        dataset_digest: artifact.dataset_digest.clone(),
        seed: cfg.seed,
        optimizer: cfg.train.optimizer,
        epochs: cfg.train.epochs,
        split: [artifact.split.train_n, artifact.split.val_n, artifact.split.test_n],
        confusion: cm,
        metrics: m,
        training: artifact.training.clone(),
    }
}

/// Re-derives the test split recorded in the artifact and scores it. The
/// dataset and lexicons must be the ones the artifact was trained with.
pub fn evaluate(artifact: &ModelArtifact, ds: &Dataset) -> Result<ResultRecord> {
    let stage = |e: Error| e.in_stage("evaluate");
    if ds.provenance.sha256 != artifact.dataset_digest {
        return Err(stage(Error::validation(format!(
            "dataset digest {} differs from the training digest {}",
            ds.provenance.sha256, artifact.dataset_digest
        ))));
    }
    let lex = artifact.config.lexicons().map_err(stage)?;
    let lex_ref = LexiconRef::of(&lex, artifact.config.features.lexicon_dir.as_deref());
    if lex_ref.sha256 != artifact.lexicon.sha256 {
        return Err(stage(Error::validation("lexicons changed since training")));
    }
    let idx = split_indices(&ds.labels(), &artifact.split).map_err(stage)?;
    let (text, y) = texts_and_labels(&ds.rows, &idx.test);
    if text.is_empty() {
        return Err(stage(Error::validation("test split is empty")));
    }
    let (pred, _) = artifact.classify(&text, &lex).map_err(stage)?;
    let cm = confusion(&y, &pred).map_err(stage)?;
    Ok(record(artifact, cm, metrics(&cm).map_err(stage)?))
}

/// Paths written by [`run_experiment`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunPaths {
    pub model: PathBuf,
    pub record: PathBuf,
    pub report_csv: PathBuf,
    pub report_md: PathBuf,
}

impl RunPaths {
    pub fn in_dir(dir: &Path) -> Self {
        RunPaths {
            model: dir.join(MODEL_FILE),
            record: dir.join(RECORD_FILE),
            report_csv: dir.join(REPORT_CSV),
            report_md: dir.join(REPORT_MD),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub artifact: ModelArtifact,
    pub record: ResultRecord,
    pub report: TrainReport,
    pub paths: RunPaths,
}

/// Files written so far; removed again unless [`commit`](Self::commit) is called.
#[derive(Debug, Default)]
pub struct Staging {
    files: Vec<PathBuf>,
    created_dir: Option<PathBuf>,
    committed: bool,
}

impl Staging {
    pub fn new(dir: &Path) -> Result<Self> {
        let mut s = Staging::default();
        if !dir.exists() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            s.created_dir = Some(dir.to_path_buf());
        }
        Ok(s)
    }

    pub fn write(&mut self, path: &Path, contents: &str) -> Result<()> {
        self.files.push(path.to_path_buf());
        std::fs::write(path, contents).map_err(|e| Error::io(path, e))
    }

    pub fn commit(mut self) {
        self.committed = true;
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        for f in &self.files {
            let _ = std::fs::remove_file(f);
        }
        if let Some(d) = &self.created_dir {
            let _ = std::fs::remove_dir(d);
        }
    }
}

/// Writes the markdown and CSV renderings of a report.
pub fn write_report(staging: &mut Staging, report: &Report, csv: &Path, md: &Path) -> Result<()> {
    staging.write(csv, &report.csv)?;
    staging.write(md, &report.markdown)
}

/// Loads, preprocesses, trains, evaluates on the test split and writes the
/// model, the result record and a one-row report into `out_dir`. On failure
/// nothing is left behind.
pub fn run_experiment(cfg: &RunConfig, data_path: &Path, out_dir: &Path) -> Result<RunOutcome> {
    cfg.validate().map_err(|e| e.in_stage("config"))?;
    let ds = load_dataset(data_path).map_err(|e| e.in_stage("load"))?;
    let prep = preprocess(cfg, &ds)?;
    let (artifact, report) = fit(cfg, &prep)?;
    if prep.test.is_empty() {
        return Err(Error::validation("test split is empty").in_stage("evaluate"));
    }
    let (cm, m) = score(&artifact.model, &prep.test).map_err(|e| e.in_stage("evaluate"))?;
    let rec = record(&artifact, cm, m);

    let paths = RunPaths::in_dir(out_dir);
    let write = |staging: &mut Staging| -> Result<()> {
        staging.write(&paths.model, &artifact.to_json()?)?;
        staging.write(&paths.record, &rec.to_json()?)?;
        write_report(
            staging,
            &report_table(&[rec.report_row()]),
            &paths.report_csv,
            &paths.report_md,
        )
    };
    let mut staging = Staging::new(out_dir).map_err(|e| e.in_stage("write"))?;
    write(&mut staging).map_err(|e| e.in_stage("write"))?;
    staging.commit();
    Ok(RunOutcome {
        artifact,
        record: rec,
        report,
        paths,
    })
}
