use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Space-joined n-grams of a token sequence.
pub fn ngrams(tokens: &[String], n: usize) -> Vec<String> {
    if n == 0 || tokens.len() < n {
        return Vec::new();
    }
    tokens.windows(n).map(|w| w.join(" ")).collect()
}

/// Vocabulary and smoothed idf fitted on a corpus.
///
/// `idf(t) = ln((1 + m) / (1 + df(t))) + 1`; an entry is the raw count of
/// the term in the document times its idf. The vocabulary is sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfIdfModel {
    pub ngram: usize,
    pub vocabulary: Vec<String>,
    pub idf: Vec<f64>,
}

impl TfIdfModel {
    pub fn fit(corpus: &[Vec<String>], ngram: usize) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::validation("tf-idf over an empty corpus"));
        }
        if ngram == 0 {
            return Err(Error::validation("n-gram size must be at least 1"));
        }
        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        for doc in corpus {
            let mut grams = ngrams(doc, ngram);
            grams.sort_unstable();
            grams.dedup();
            for g in grams {
                *df.entry(g).or_default() += 1;
            }
        }
        let m = corpus.len() as f64;
        let (vocabulary, idf) = df
            .into_iter()
            .map(|(term, d)| (term, ((1.0 + m) / (1.0 + d as f64)).ln() + 1.0))
            .unzip();
        Ok(TfIdfModel { ngram, vocabulary, idf })
    }

    /// Term counts of one document keyed by vocabulary index; unknown terms are dropped.
    fn counts(&self, doc: &[String]) -> BTreeMap<usize, usize> {
        let mut counts = BTreeMap::new();
        for g in ngrams(doc, self.ngram) {
            if let Ok(i) = self.vocabulary.binary_search(&g) {
                *counts.entry(i).or_default() += 1;
            }
        }
        counts
    }

    /// Dense `m × k` matrix.
    pub fn transform(&self, corpus: &[Vec<String>]) -> Vec<Vec<f64>> {
        corpus
            .iter()
            .map(|doc| {
                let mut row = vec![0.0; self.vocabulary.len()];
                for (i, c) in self.counts(doc) {
                    row[i] = c as f64 * self.idf[i];
                }
                row
            })
            .collect()
    }

    /// Row sums of [`transform`](Self::transform) without building the dense
    /// matrix. Terms are added in vocabulary order, so the result equals
    /// `collapse_to_column(transform(corpus))` bit for bit.
    pub fn transform_collapsed(&self, corpus: &[Vec<String>]) -> Vec<f64> {
        corpus
            .iter()
            .map(|doc| {
                self.counts(doc)
                    .into_iter()
                    .map(|(i, c)| c as f64 * self.idf[i])
                    .fold(0.0, |acc, v| acc + v)
            })
            .collect()
    }
}

/// Fits on `corpus` and returns its own matrix with the vocabulary.
pub fn tfidf_matrix(corpus: &[Vec<String>], ngram: usize) -> Result<(Vec<Vec<f64>>, Vec<String>)> {
    let model = TfIdfModel::fit(corpus, ngram)?;
    Ok((model.transform(corpus), model.vocabulary))
}

/// Multiplies by the all-ones column: each row becomes its sum.
pub fn collapse_to_column(m: &[Vec<f64>]) -> Vec<f64> {
    m.iter().map(|row| row.iter().fold(0.0, |acc, v| acc + v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn docs(src: &[&str]) -> Vec<Vec<String>> {
        src.iter()
            .map(|d| d.split_whitespace().map(String::from).collect())
            .collect()
    }

    #[test]
    fn single_term_single_doc() {
        let (m, vocab) = tfidf_matrix(&docs(&["food"]), 1).unwrap();
        assert_eq!(vocab, ["food"]);
        assert_eq!(m, vec![vec![1.0]]);
    }

    #[test]
    fn ubiquitous_term_has_unit_idf() {
        let model = TfIdfModel::fit(&docs(&["good food", "bad food", "food"]), 1).unwrap();
        let i = model.vocabulary.iter().position(|t| t == "food").unwrap();
        assert_eq!(model.idf[i], 1.0);
    }

    #[test]
    fn three_document_corpus() {
        let corpus = docs(&["good good food", "bad food", "good service"]);
        let (m, vocab) = tfidf_matrix(&corpus, 1).unwrap();
        assert_eq!(vocab, ["bad", "food", "good", "service"]);
        let idf = |df: f64| (4.0 / (1.0 + df)).ln() + 1.0;
        let want = [
            [0.0, idf(2.0), 2.0 * idf(2.0), 0.0],
            [idf(1.0), idf(2.0), 0.0, 0.0],
            [0.0, 0.0, idf(2.0), idf(1.0)],
        ];
        for (row, w) in m.iter().zip(want) {
            for (a, b) in row.iter().zip(w) {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn bigrams_and_unknown_terms() {
        let model = TfIdfModel::fit(&docs(&["very good food", "good food"]), 2).unwrap();
        assert_eq!(model.vocabulary, ["good food", "very good"]);
        let m = model.transform(&docs(&["good food good food", "nothing here"]));
        assert_abs_diff_eq!(m[0][0], 2.0);
        assert_eq!(m[1], vec![0.0, 0.0]);
        assert!(ngrams(&docs(&["one"])[0], 2).is_empty());
    }

    #[test]
    fn collapse_matches_row_sums() {
        assert_eq!(
            collapse_to_column(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]),
            [6.0, 15.0]
        );
        assert_eq!(collapse_to_column(&vec![vec![0.0; 4]; 3]), [0.0; 3]);
        let corpus = docs(&["a b c a", "b b d", "e", "a e e e b"]);
        let model = TfIdfModel::fit(&corpus, 1).unwrap();
        let dense = model.transform(&corpus);
        assert_eq!(model.transform_collapsed(&corpus), collapse_to_column(&dense));
        for (row, s) in dense.iter().zip(collapse_to_column(&dense)) {
            let reversed: f64 = row.iter().rev().sum();
            assert_abs_diff_eq!(reversed, s, epsilon = 1e-12);
        }
    }

    #[test]
    fn empty_corpus_is_rejected() {
        assert!(tfidf_matrix(&[], 1).is_err());
    }
}
