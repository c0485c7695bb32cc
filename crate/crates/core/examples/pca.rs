//! Principal components of correlated data, then the full feature pipeline
//! that maps review text to rotation angles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vqc::harness::{synthetic_reviews, ReviewStyle};
use vqc::textfeat::{pca_fit, FeaturePipeline, LexiconSet, PipelineConfig};

fn main() -> vqc::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x: Vec<Vec<f64>> = (0..500)
        .map(|_| {
            let a: f64 = rng.gen_range(-1.0..1.0);
            let b: f64 = rng.gen_range(-0.1..0.1);
            vec![a, 2.0 * a + b, -a + 3.0 * b]
        })
        .collect();
    let pca = pca_fit(&x, 2)?;
    println!("explained variance ratio {:?}", pca.explained_variance_ratio());
    println!("first component {:?}", pca.components[0]);

    let reviews = synthetic_reviews(200, 3, &ReviewStyle::default());
    let texts: Vec<String> = reviews.iter().map(|r| r.text.clone()).collect();
    let (pipeline, angles) = FeaturePipeline::fit(&texts, &LexiconSet::bundled(), &PipelineConfig::default())?;
    println!(
        "{} manifest features -> {} angles per review",
        pipeline.manifest.len(),
        angles[0].len()
    );
    for (r, a) in reviews.iter().zip(&angles).take(3) {
        println!(
            "label {}  {:?}  {}",
            r.label,
            a.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>(),
            r.text
        );
    }
    Ok(())
}
