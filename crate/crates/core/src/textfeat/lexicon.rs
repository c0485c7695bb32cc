use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Pos,
    Neg,
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PosTag {
    Noun,
    Verb,
    Adj,
    Adv,
}

/// Term lists used by the feature extractor. Word terms are lowercase;
/// emoticons keep their case (`:D` and `:d` differ).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LexiconSet {
    pub stopwords: BTreeSet<String>,
    pub slang: BTreeSet<String>,
    pub negation: BTreeSet<String>,
    pub emoticons: BTreeMap<String, Polarity>,
    /// term → (positive score, negative score)
    pub sentiment: BTreeMap<String, (f64, f64)>,
    pub pos_tags: BTreeMap<String, PosTag>,
}

pub const STOPWORDS_FILE: &str = "stopwords.txt";
pub const SLANG_FILE: &str = "slang.txt";
pub const NEGATION_FILE: &str = "negation.txt";
pub const EMOTICONS_FILE: &str = "emoticons.tsv";
pub const SENTIMENT_FILE: &str = "sentiment.tsv";
pub const POS_FILE: &str = "pos.tsv";

const BUNDLED: [(&str, &str); 6] = [
    (STOPWORDS_FILE, include_str!("../../data/stopwords.txt")),
    (SLANG_FILE, include_str!("../../data/slang.txt")),
    (NEGATION_FILE, include_str!("../../data/negation.txt")),
    (EMOTICONS_FILE, include_str!("../../data/emoticons.tsv")),
    (SENTIMENT_FILE, include_str!("../../data/sentiment.tsv")),
    (POS_FILE, include_str!("../../data/pos.tsv")),
];

/// The 21-entry default feature manifest.
pub const BUNDLED_MANIFEST: &str = include_str!("../../data/features.txt");

impl LexiconSet {
    /// The small lexicons compiled into the crate.
    pub fn bundled() -> Self {
        let get = |name: &str| BUNDLED.iter().find(|(n, _)| *n == name).expect("bundled file").1;
        Self::parse(get).expect("bundled lexicons parse")
    }

    /// Loads the six lexicon files from a directory.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let mut contents = BTreeMap::new();
        for (name, _) in BUNDLED {
            let path = dir.join(name);
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            contents.insert(name, text);
        }
        Self::parse(|name| contents[name].as_str()).map_err(|e| match e {
            Error::Parse { path, line, message } => Error::Parse {
                path: dir.join(path).display().to_string(),
                line,
                message,
            },
            other => other,
        })
    }

    fn parse<'a>(get: impl Fn(&str) -> &'a str) -> Result<Self> {
        let terms = |name: &str| -> Result<BTreeSet<String>> {
            let mut set = BTreeSet::new();
            for (no, line) in entries(get(name)) {
                if !set.insert(line.to_lowercase()) {
                    return Err(parse_err(name, no, format!("duplicate term {line:?}")));
                }
            }
            Ok(set)
        };
        let mut lex = LexiconSet {
            stopwords: terms(STOPWORDS_FILE)?,
            slang: terms(SLANG_FILE)?,
            negation: terms(NEGATION_FILE)?,
            ..Default::default()
        };
        for (no, line) in entries(get(EMOTICONS_FILE)) {
            let (term, class) = line
                .split_once('\t')
                .ok_or_else(|| parse_err(EMOTICONS_FILE, no, "expected `emoticon<TAB>class`".into()))?;
            let polarity = match class.trim() {
                "pos" => Polarity::Pos,
                "neg" => Polarity::Neg,
                "neutral" => Polarity::Neutral,
                other => return Err(parse_err(EMOTICONS_FILE, no, format!("unknown class {other:?}"))),
            };
            lex.emoticons.insert(term.to_string(), polarity);
        }
        for (no, line) in entries(get(SENTIMENT_FILE)) {
            let cols: Vec<&str> = line.split('\t').collect();
            let score = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite() && *v >= 0.0)
                    .ok_or_else(|| parse_err(SENTIMENT_FILE, no, format!("bad score {s:?}")))
            };
            if cols.len() != 3 {
                return Err(parse_err(SENTIMENT_FILE, no, "expected `term<TAB>pos<TAB>neg`".into()));
            }
            lex.sentiment
                .insert(cols[0].to_lowercase(), (score(cols[1])?, score(cols[2])?));
        }
        for (no, line) in entries(get(POS_FILE)) {
            let (term, tag) = line
                .split_once('\t')
                .ok_or_else(|| parse_err(POS_FILE, no, "expected `word<TAB>tag`".into()))?;
            let tag = match tag.trim() {
                "noun" => PosTag::Noun,
                "verb" => PosTag::Verb,
                "adj" => PosTag::Adj,
                "adv" => PosTag::Adv,
                other => return Err(parse_err(POS_FILE, no, format!("unknown tag {other:?}"))),
            };
            lex.pos_tags.insert(term.to_lowercase(), tag);
        }
        Ok(lex)
    }
}

fn entries(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

fn parse_err(file: &str, line: usize, message: String) -> Error {
    Error::Parse {
        path: file.to_string(),
        line,
        message,
    }
}

/// Parses a feature manifest: one feature name per line.
pub fn parse_manifest(text: &str) -> Vec<String> {
    entries(text).map(|(_, l)| l.trim().to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_sets_load() {
        let lex = LexiconSet::bundled();
        assert!(lex.stopwords.contains("the"));
        assert!(lex.negation.contains("not"));
        assert_eq!(lex.emoticons.get(":)"), Some(&Polarity::Pos));
        assert_eq!(lex.sentiment.get("great"), Some(&(0.8, 0.0)));
        assert_eq!(lex.pos_tags.get("food"), Some(&PosTag::Noun));
        assert_eq!(parse_manifest(BUNDLED_MANIFEST).len(), 21);
    }

    #[test]
    fn load_dir_reports_bad_lines() {
        let dir = tempfile::tempdir().unwrap();
        for (name, text) in BUNDLED {
            std::fs::write(dir.path().join(name), text).unwrap();
        }
        assert_eq!(LexiconSet::load_dir(dir.path()).unwrap(), LexiconSet::bundled());
        std::fs::write(dir.path().join(SENTIMENT_FILE), "good\t0.7\t0\nbad\tx\t0.5\n").unwrap();
        match LexiconSet::load_dir(dir.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
