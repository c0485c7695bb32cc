//! A complete experiment on a generated review corpus: split, features,
//! training, evaluation and the written artifacts.

use vqc::harness::{run_experiment, synthetic_reviews, write_tsv, ReviewStyle, RunConfig};

fn main() -> vqc::Result<()> {
    let dir = std::env::temp_dir().join("vqc-example-run");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let data = dir.join("reviews.tsv");
    write_tsv(&data, &synthetic_reviews(400, 11, &ReviewStyle::default()))?;

    let mut cfg = RunConfig::default();
    cfg.split.train = 240;
    cfg.split.val = 80;
    cfg.split.test = 80;
    cfg.train.epochs = 30;
    print!("{}", cfg.to_toml()?);

    let out = run_experiment(&cfg, &data, &dir.join("out"))?;
    println!(
        "\n{}",
        std::fs::read_to_string(&out.paths.report_md).expect("report written")
    );
    println!("confusion {:?}", out.record.confusion);
    println!("model saved to {}", out.paths.model.display());
    Ok(())
}
