use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TokenKind {
    Word,
    Punct,
    Emoticon,
}

/// A token with its original text and a lowercase shadow for lookups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub lower: String,
    pub kind: TokenKind,
}

impl Token {
    fn new(text: &str, kind: TokenKind) -> Self {
        Token {
            text: text.to_string(),
            lower: text.to_lowercase(),
            kind,
        }
    }

    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }
}

/// Splits text into emoticons, words and single punctuation characters.
///
/// Emoticons are matched first (longest wins) inside each whitespace-separated
/// chunk. An emoticon that begins or ends with a letter or digit only matches
/// at a word boundary, so `:D` matches in `great:D` but not in `:Delicious`.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    emoticons: Vec<Vec<char>>,
}

impl Tokenizer {
    pub fn new<'a>(emoticons: impl IntoIterator<Item = &'a str>) -> Self {
        let mut emoticons: Vec<Vec<char>> = emoticons
            .into_iter()
            .filter(|e| !e.is_empty())
            .map(|e| e.chars().collect())
            .collect();
        emoticons.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        emoticons.dedup();
        Tokenizer { emoticons }
    }

    pub fn tokenize(&self, text: &str) -> Vec<Token> {
        let mut out = Vec::new();
        for chunk in text.split_whitespace() {
            let chars: Vec<char> = chunk.chars().collect();
            let mut rest_start = 0;
            let mut i = 0;
            while i < chars.len() {
                if let Some(len) = self.emoticon_at(&chars, i) {
                    split_plain(&chars[rest_start..i], &mut out);
                    let s: String = chars[i..i + len].iter().collect();
                    out.push(Token::new(&s, TokenKind::Emoticon));
                    i += len;
                    rest_start = i;
                } else {
                    i += 1;
                }
            }
            split_plain(&chars[rest_start..], &mut out);
        }
        out
    }

    fn emoticon_at(&self, chars: &[char], i: usize) -> Option<usize> {
        self.emoticons.iter().find_map(|e| {
            let end = i + e.len();
            if end > chars.len() || chars[i..end] != e[..] {
                return None;
            }
            let starts_ok = !e[0].is_alphanumeric() || i == 0 || !chars[i - 1].is_alphanumeric();
            let last = e[e.len() - 1];
            let ends_ok = !last.is_alphanumeric() || end == chars.len() || !chars[end].is_alphanumeric();
            (starts_ok && ends_ok).then_some(e.len())
        })
    }
}

/// Words are runs of letters and digits, with apostrophes allowed between
/// letters (`don't`). Every other character is its own punctuation token.
fn split_plain(chars: &[char], out: &mut Vec<Token>) {
    let mut word = String::new();
    for (k, &c) in chars.iter().enumerate() {
        let inner_apostrophe =
            (c == '\'' || c == '’') && !word.is_empty() && chars.get(k + 1).is_some_and(|n| n.is_alphanumeric());
        if c.is_alphanumeric() || inner_apostrophe {
            word.push(c);
            continue;
        }
        if !word.is_empty() {
            out.push(Token::new(&word, TokenKind::Word));
            word.clear();
        }
        out.push(Token::new(&c.to_string(), TokenKind::Punct));
    }
    if !word.is_empty() {
        out.push(Token::new(&word, TokenKind::Word));
    }
}
