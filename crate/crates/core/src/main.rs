use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use vqc::eval::report_table;
use vqc::harness::{
    evaluate, fit, load_dataset, preprocess, run_experiment, selftest, synthetic_reviews, write_report, write_tsv,
    LexiconRef, ModelArtifact, ResultRecord, ReviewStyle, RunConfig, RunPaths, SplitIndices, Staging,
};
use vqc::model::{OptimizerKind, Samples};
use vqc::textfeat::FeaturePipeline;
use vqc::{Error, Result};

#[derive(Parser)]
#[command(name = "vqc", version, about = "Variational quantum classifier for review sentiment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Review file: `text<TAB>label` per line, optional header.
    #[arg(long)]
    data: PathBuf,
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_parser = parse_optimizer)]
    optimizer: Option<OptimizerKind>,
    /// AQGD iterations or COBYLA evaluations.
    #[arg(long)]
    epochs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Split the data, fit the text transforms and write the encoded sets.
    Preprocess(Common),
    /// Preprocess and train; writes the model file.
    Train(Common),
    /// Score a trained model on its test split.
    Evaluate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train and evaluate in one go.
    Run(Common),
    /// Combine result records into one CSV and markdown table.
    Report {
        #[arg(long)]
        out: PathBuf,
        #[arg(required = true)]
        results: Vec<PathBuf>,
    },
    /// Write a synthetic review file.
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1000)]
        rows: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the published metric table and numerical invariants.
    Selftest,
}

fn parse_optimizer(s: &str) -> std::result::Result<OptimizerKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn config(c: &Common) -> Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p).map_err(|e| e.in_stage("config"))?,
        None => RunConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(o) = c.optimizer {
        cfg.train.optimizer = o;
    }
    if let Some(e) = c.epochs {
        cfg.train.epochs = e;
    }
    cfg.validate().map_err(|e| e.in_stage("config"))?;
    Ok(cfg)
}

#[derive(Serialize)]
struct Features<'a> {
    config_digest: String,
    dataset_digest: &'a str,
    lexicon: &'a LexiconRef,
    split: &'a SplitIndices,
    pipeline: &'a FeaturePipeline,
    train: &'a Samples,
    val: &'a Samples,
    test: &'a Samples,
}

fn write_files(files: &[(&Path, String)], out: &Path) -> Result<()> {
    let mut staging = Staging::new(out).map_err(|e| e.in_stage("write"))?;
    for (path, body) in files {
        staging.write(path, body).map_err(|e| e.in_stage("write"))?;
    }
    staging.commit();
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Preprocess(c) => {
            let cfg = config(&c)?;
            let ds = load_dataset(&c.data).map_err(|e| e.in_stage("load"))?;
            let p = preprocess(&cfg, &ds)?;
            let f = Features {
                config_digest: cfg.digest(),
                dataset_digest: &p.dataset_digest,
                lexicon: &p.lexicon,
                split: &p.indices,
                pipeline: &p.pipeline,
                train: &p.train,
                val: &p.val,
                test: &p.test,
            };
            let path = c.out.join("features.json");
            write_files(&[(&path, serde_json::to_string_pretty(&f)?)], &c.out)?;
            println!("wrote {}", path.display());
        }
        Command::Train(c) => {
            let cfg = config(&c)?;
            let ds = load_dataset(&c.data).map_err(|e| e.in_stage("load"))?;
            let (artifact, report) = fit(&cfg, &preprocess(&cfg, &ds)?)?;
            let path = RunPaths::in_dir(&c.out).model;
            write_files(&[(&path, artifact.to_json()?)], &c.out)?;
            println!(
                "{}: kept iteration {} (validation loss {:.6}); wrote {}",
                artifact.name,
                report.best_iteration,
                report.best_val_loss,
                path.display()
            );
        }
        Command::Evaluate { data, model, out } => {
            let artifact = ModelArtifact::load(&model).map_err(|e| e.in_stage("load"))?;
            let ds = load_dataset(&data).map_err(|e| e.in_stage("load"))?;
            let rec = evaluate(&artifact, &ds)?;
            let paths = RunPaths::in_dir(&out);
            let table = report_table(&[rec.report_row()]);
            write_files(
                &[
                    (&paths.record, rec.to_json()?),
                    (&paths.report_csv, table.csv),
                    (&paths.report_md, table.markdown.clone()),
                ],
                &out,
            )?;
            print!("{}", table.markdown);
        }
        Command::Run(c) => {
            let cfg = config(&c)?;
            let outcome = run_experiment(&cfg, &c.data, &c.out)?;
            print!("{}", report_table(&[outcome.record.report_row()]).markdown);
        }
        Command::Report { out, results } => {
            let rows = results
                .iter()
                .map(|p| ResultRecord::load(p).map(|r| r.report_row()))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| e.in_stage("load"))?;
            let table = report_table(&rows);
            let paths = RunPaths::in_dir(&out);
            let mut staging = Staging::new(&out).map_err(|e| e.in_stage("write"))?;
            write_report(&mut staging, &table, &paths.report_csv, &paths.report_md).map_err(|e| e.in_stage("write"))?;
            staging.commit();
            print!("{}", table.markdown);
        }
        Command::Generate { out, rows, seed } => {
            write_tsv(&out, &synthetic_reviews(rows, seed, &ReviewStyle::default()))
                .map_err(|e| e.in_stage("write"))?;
            println!("wrote {rows} reviews to {}", out.display());
        }
        Command::Selftest => {
            let checks = selftest();
            for c in &checks {
                println!("{c}");
            }
            return Ok(checks.iter().all(|c| c.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
