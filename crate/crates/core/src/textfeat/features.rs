use serde::{Deserialize, Serialize};

use super::lexicon::{LexiconSet, Polarity, PosTag};
use super::tokenize::{Token, TokenKind};
use crate::error::{Error, Result};

/// Every feature the extractor knows, in canonical order.
pub const FEATURE_NAMES: [&str; 21] = [
    "punctuation_count",
    "review_length",
    "tfidf_unigram_collapsed",
    "tfidf_bigram_collapsed",
    "tfidf_trigram_collapsed",
    "stopword_count",
    "content_word_count",
    "noun_count",
    "verb_count",
    "lemmatized_count",
    "allcaps_count",
    "elongated_count",
    "pos_emoticon_count",
    "neg_emoticon_count",
    "neutral_emoticon_count",
    "slang_count",
    "negation_count",
    "pos_score_negated_ctx",
    "neg_score_negated_ctx",
    "pos_score_positive_ctx",
    "neg_score_negative_ctx",
];

pub fn feature_index(name: &str) -> Result<usize> {
    FEATURE_NAMES
        .iter()
        .position(|n| *n == name)
        .ok_or_else(|| Error::validation(format!("unknown feature {name:?}")))
}

/// The full named feature vector of one review.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawFeatures(pub [f64; 21]);

impl Default for RawFeatures {
    fn default() -> Self {
        RawFeatures([0.0; 21])
    }
}

impl RawFeatures {
    pub fn get(&self, name: &str) -> Result<f64> {
        Ok(self.0[feature_index(name)?])
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        self.0[feature_index(name)?] = value;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        FEATURE_NAMES.iter().copied().zip(self.0.iter().copied())
    }

    /// Values of the named features, in the given order.
    pub fn select(&self, names: &[String]) -> Result<Vec<f64>> {
        names.iter().map(|n| self.get(n)).collect()
    }
}

/// Suffix-stripping stemmer for the -ing/-ed/-es/-s/-ly families.
///
/// A suffix is only removed when at least three characters remain, which
/// keeps words like `bed`, `is` and `sing` intact.
pub fn stem(word: &str) -> String {
    const SUFFIXES: [&str; 7] = ["ingly", "edly", "ing", "ies", "ed", "es", "ly"];
    let w = word.to_lowercase();
    for suf in SUFFIXES {
        if let Some(base) = w.strip_suffix(suf) {
            if base.chars().count() >= 3 {
                return if suf == "ies" {
                    format!("{base}y")
                } else {
                    base.to_string()
                };
            }
        }
    }
    if let Some(base) = w.strip_suffix('s') {
        if base.chars().count() >= 3 && !base.ends_with('s') && !base.ends_with('u') && !base.ends_with('i') {
            return base.to_string();
        }
    }
    w
}

/// Some letter appears three or more times in a row (`soooo`).
pub fn is_elongated(word: &str) -> bool {
    let mut run = 0;
    let mut prev = None;
    for c in word.chars().flat_map(char::to_lowercase) {
        if c.is_alphabetic() && Some(c) == prev {
            run += 1;
            if run >= 3 {
                return true;
            }
        } else {
            run = 1;
        }
        prev = Some(c);
    }
    false
}

fn is_allcaps(word: &str) -> bool {
    let letters: Vec<char> = word.chars().filter(|c| c.is_alphabetic()).collect();
    letters.len() >= 2 && letters.iter().all(|c| c.is_uppercase())
}

/// Per-review counts and scores. The tf-idf entries are left at zero; they
/// need corpus statistics and are filled in by the pipeline.
///
/// `review_length` counts word tokens. A negation word opens a scope that
/// runs to the next punctuation token; sentiment inside a scope goes to the
/// `*_negated_ctx` scores, everything else to the plain-context scores.
pub fn extract_features(tokens: &[Token], lex: &LexiconSet) -> RawFeatures {
    let mut f = RawFeatures::default();
    let mut add = |name: &str, v: f64| {
        let i = feature_index(name).expect("known feature");
        f.0[i] += v;
    };
    let mut negated = false;
    for t in tokens {
        match t.kind {
            TokenKind::Punct => {
                add("punctuation_count", 1.0);
                negated = false;
            }
            TokenKind::Emoticon => match lex.emoticons.get(&t.text) {
                Some(Polarity::Pos) => add("pos_emoticon_count", 1.0),
                Some(Polarity::Neg) => add("neg_emoticon_count", 1.0),
                Some(Polarity::Neutral) => add("neutral_emoticon_count", 1.0),
                None => {}
            },
            TokenKind::Word => {
                let w = t.lower.as_str();
                add("review_length", 1.0);
                if lex.stopwords.contains(w) {
                    add("stopword_count", 1.0);
                } else {
                    add("content_word_count", 1.0);
                }
                match lex.pos_tags.get(w) {
                    Some(PosTag::Noun) => add("noun_count", 1.0),
                    Some(PosTag::Verb) => add("verb_count", 1.0),
                    _ => {}
                }
                if stem(w) != w {
                    add("lemmatized_count", 1.0);
                }
                if is_allcaps(&t.text) {
                    add("allcaps_count", 1.0);
                }
                if is_elongated(w) {
                    add("elongated_count", 1.0);
                }
                if lex.slang.contains(w) {
                    add("slang_count", 1.0);
                }
                if let Some(&(p, n)) = lex.sentiment.get(w) {
                    if negated {
                        add("pos_score_negated_ctx", p);
                        add("neg_score_negated_ctx", n);
                    } else {
                        add("pos_score_positive_ctx", p);
                        add("neg_score_negative_ctx", n);
                    }
                }
                if lex.negation.contains(w) {
                    add("negation_count", 1.0);
                    negated = true;
                }
            }
        }
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textfeat::Tokenizer;
    use std::collections::BTreeMap;

    fn small_lexicon() -> LexiconSet {
        let mut lex = LexiconSet {
            sentiment: BTreeMap::from([("great".into(), (0.8, 0.0)), ("good".into(), (0.7, 0.0))]),
            ..LexiconSet::default()
        };
        lex.negation.insert("not".into());
        lex.emoticons.insert(":)".into(), Polarity::Pos);
        lex
    }

    fn features(text: &str, lex: &LexiconSet) -> RawFeatures {
        let tok = Tokenizer::new(lex.emoticons.keys().map(String::as_str));
        extract_features(&tok.tokenize(text), lex)
    }

    #[test]
    fn empty_review_is_all_zero() {
        assert_eq!(features("", &small_lexicon()), RawFeatures::default());
    }

    #[test]
    fn exclamations_and_emoticon() {
        let f = features("Great food!!! :)", &small_lexicon());
        assert_eq!(f.get("punctuation_count").unwrap(), 3.0);
        assert_eq!(f.get("pos_emoticon_count").unwrap(), 1.0);
        assert_eq!(f.get("pos_score_positive_ctx").unwrap(), 0.8);
        assert_eq!(f.get("pos_score_negated_ctx").unwrap(), 0.0);
        assert_eq!(f.get("review_length").unwrap(), 2.0);
    }

    #[test]
    fn negation_scope() {
        let f = features("not good .", &small_lexicon());
        assert_eq!(f.get("pos_score_negated_ctx").unwrap(), 0.7);
        assert_eq!(f.get("pos_score_positive_ctx").unwrap(), 0.0);
        assert_eq!(f.get("negation_count").unwrap(), 1.0);
        // the scope closes at punctuation
        let f = features("not bad, good", &small_lexicon());
        assert_eq!(f.get("pos_score_positive_ctx").unwrap(), 0.7);
    }

    #[test]
    fn word_shape_counts() {
        let lex = LexiconSet::bundled();
        let f = features("The FOOD was sooo tasty and the waiters were rushing", &lex);
        assert_eq!(f.get("allcaps_count").unwrap(), 1.0);
        assert_eq!(f.get("elongated_count").unwrap(), 1.0);
        assert_eq!(f.get("stopword_count").unwrap(), 5.0);
        assert_eq!(f.get("content_word_count").unwrap(), 5.0);
        // waiters, rushing
        assert_eq!(f.get("lemmatized_count").unwrap(), 2.0);
        assert_eq!(f.get("noun_count").unwrap(), 1.0);
    }

    #[test]
    fn stemmer_families() {
        assert_eq!(stem("loved"), "lov");
        assert_eq!(stem("cooking"), "cook");
        assert_eq!(stem("dishes"), "dish");
        assert_eq!(stem("berries"), "berry");
        assert_eq!(stem("fries"), "fri");
        assert_eq!(stem("quickly"), "quick");
        assert_eq!(stem("tables"), "tabl");
        assert_eq!(stem("glass"), "glass");
        assert_eq!(stem("bed"), "bed");
        assert_eq!(stem("sing"), "sing");
    }

    #[test]
    fn elongation() {
        assert!(is_elongated("soooo"));
        assert!(is_elongated("YUMMMM"));
        assert!(!is_elongated("good"));
        assert!(!is_elongated("1000"));
    }
}
