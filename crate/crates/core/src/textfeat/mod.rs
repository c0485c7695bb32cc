//! Review text to qubit angles: tokenization, hand-crafted counts and
//! lexicon scores, collapsed tf-idf columns, PCA and min-max scaling.

mod features;
mod lexicon;
mod pca;
mod scale;
mod tfidf;
mod tokenize;

pub use features::{extract_features, feature_index, is_elongated, stem, RawFeatures, FEATURE_NAMES};
pub use lexicon::{parse_manifest, LexiconSet, Polarity, PosTag, BUNDLED_MANIFEST};
pub use pca::{covariance, jacobi_eigen, pca_fit, PcaModel, JACOBI_TOL};
pub use scale::{MinMaxScaler, Standardizer};
pub use tfidf::{collapse_to_column, ngrams, tfidf_matrix, TfIdfModel};
pub use tokenize::{Token, TokenKind, Tokenizer};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

impl LexiconSet {
    pub fn tokenizer(&self) -> Tokenizer {
        Tokenizer::new(self.emoticons.keys().map(String::as_str))
    }
}

/// Tokenizes with the bundled emoticon list.
pub fn tokenize(text: &str) -> Vec<Token> {
    LexiconSet::bundled().tokenizer().tokenize(text)
}

/// Lowercase non-stopword words: the tf-idf view of a review.
pub fn content_terms(tokens: &[Token], lex: &LexiconSet) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| t.is_word() && !lex.stopwords.contains(&t.lower))
        .map(|t| t.lower.clone())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Feature names fed to PCA, in order.
    pub manifest: Vec<String>,
    pub components: usize,
    /// Standardize columns before PCA so no single count dominates.
    pub standardize: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            manifest: parse_manifest(BUNDLED_MANIFEST),
            components: 5,
            standardize: true,
        }
    }
}

/// Every transform fitted on the training texts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturePipeline {
    pub manifest: Vec<String>,
    /// Unigram, bigram and trigram models.
    pub tfidf: Vec<TfIdfModel>,
    pub standardizer: Option<Standardizer>,
    pub pca: PcaModel,
    pub scaler: MinMaxScaler,
}

struct Analyzed {
    features: Vec<RawFeatures>,
    terms: Vec<Vec<String>>,
}

fn analyze(texts: &[String], lex: &LexiconSet) -> Analyzed {
    let tok = lex.tokenizer();
    let (features, terms) = texts
        .par_iter()
        .map(|t| {
            let tokens = tok.tokenize(t);
            (extract_features(&tokens, lex), content_terms(&tokens, lex))
        })
        .unzip();
    Analyzed { features, terms }
}

const TFIDF_FEATURES: [&str; 3] = [
    "tfidf_unigram_collapsed",
    "tfidf_bigram_collapsed",
    "tfidf_trigram_collapsed",
];

fn fill_tfidf(a: &mut Analyzed, models: &[TfIdfModel]) {
    for (model, name) in models.iter().zip(TFIDF_FEATURES) {
        let col = model.transform_collapsed(&a.terms);
        for (f, v) in a.features.iter_mut().zip(col) {
            f.set(name, v).expect("known feature");
        }
    }
}

impl FeaturePipeline {
    /// Fits every transform on `texts` and returns the pipeline with the
    /// transformed training rows.
    pub fn fit(texts: &[String], lex: &LexiconSet, cfg: &PipelineConfig) -> Result<(Self, Vec<Vec<f64>>)> {
        if cfg.manifest.is_empty() {
            return Err(Error::validation("feature manifest is empty"));
        }
        for name in &cfg.manifest {
            feature_index(name)?;
        }
        let mut a = analyze(texts, lex);
        let tfidf = (1..=3)
            .map(|n| TfIdfModel::fit(&a.terms, n))
            .collect::<Result<Vec<_>>>()?;
        fill_tfidf(&mut a, &tfidf);
        let raw = select_all(&a.features, &cfg.manifest)?;
        let standardizer = cfg.standardize.then(|| Standardizer::fit(&raw)).transpose()?;
        let centered = match &standardizer {
            Some(s) => s.transform(&raw)?,
            None => raw,
        };
        let pca = pca_fit(&centered, cfg.components)?;
        let projected = pca.transform(&centered)?;
        let scaler = MinMaxScaler::fit(&projected)?;
        let out = scaler.transform(&projected)?;
        let pipeline = FeaturePipeline {
            manifest: cfg.manifest.clone(),
            tfidf,
            standardizer,
            pca,
            scaler,
        };
        Ok((pipeline, out))
    }

    /// Full raw feature vectors, with tf-idf columns from the fitted vocabularies.
    pub fn raw_features(&self, texts: &[String], lex: &LexiconSet) -> Vec<RawFeatures> {
        let mut a = analyze(texts, lex);
        fill_tfidf(&mut a, &self.tfidf);
        a.features
    }

    /// Angles in `[0, π]`, one row per text.
    pub fn transform(&self, texts: &[String], lex: &LexiconSet) -> Result<Vec<Vec<f64>>> {
        let raw = select_all(&self.raw_features(texts, lex), &self.manifest)?;
        let centered = match &self.standardizer {
            Some(s) => s.transform(&raw)?,
            None => raw,
        };
        self.scaler.transform(&self.pca.transform(&centered)?)
    }
}

fn select_all(features: &[RawFeatures], manifest: &[String]) -> Result<Vec<Vec<f64>>> {
    features.iter().map(|f| f.select(manifest)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus() -> Vec<String> {
        [
            "Great food and friendly staff :)",
            "The pizza was cold and bland. Not good!",
            "Loved the pasta, will come back!!!",
            "Terrible service, rude waiter :(",
            "Nice place, decent prices.",
            "Worst burger ever... never again",
            "Amazing sushi, sooo fresh",
            "The soup was not hot and the bread was stale",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect()
    }

    #[test]
    fn pipeline_output_is_bounded_and_repeatable() {
        let lex = LexiconSet::bundled();
        let cfg = PipelineConfig::default();
        let (p, train) = FeaturePipeline::fit(&corpus(), &lex, &cfg).unwrap();
        assert_eq!(train.len(), 8);
        assert!(train.iter().all(|r| r.len() == 5));
        assert!(train.iter().flatten().all(|v| (0.0..=std::f64::consts::PI).contains(v)));
        assert_eq!(p.transform(&corpus(), &lex).unwrap(), train);
        let unseen = p
            .transform(&["Absolutely AWFUL, never coming back!!!!!!".to_string()], &lex)
            .unwrap();
        assert!(unseen[0].iter().all(|v| (0.0..=std::f64::consts::PI).contains(v)));
    }

    #[test]
    fn bad_manifest_is_rejected() {
        let lex = LexiconSet::bundled();
        let cfg = PipelineConfig {
            manifest: vec!["no_such_feature".into()],
            ..PipelineConfig::default()
        };
        assert!(FeaturePipeline::fit(&corpus(), &lex, &cfg).is_err());
    }
}
