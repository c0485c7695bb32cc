//! Tokenizes a few reviews, prints the hand-crafted features and the
//! collapsed tf-idf columns.

use vqc::textfeat::{content_terms, extract_features, LexiconSet, TfIdfModel};

const REVIEWS: [&str; 3] = [
    "The pasta was sooo good :) and the staff were lovely!",
    "NEVER AGAIN. Cold fries, rude waiter, not worth it",
    "Decent coffee, nothing special tbh",
];

fn main() -> vqc::Result<()> {
    let lex = LexiconSet::bundled();
    let tok = lex.tokenizer();
    let mut corpus = Vec::new();
    for text in REVIEWS {
        let tokens = tok.tokenize(text);
        println!("{text}");
        println!(
            "  tokens: {:?}",
            tokens.iter().map(|t| t.text.as_str()).collect::<Vec<_>>()
        );
        for (name, v) in extract_features(&tokens, &lex).iter().filter(|(_, v)| *v != 0.0) {
            println!("  {name:24} {v:.3}");
        }
        corpus.push(content_terms(&tokens, &lex));
    }
    for n in 1..=3 {
        let model = TfIdfModel::fit(&corpus, n)?;
        let col: Vec<String> = model
            .transform_collapsed(&corpus)
            .iter()
            .map(|v| format!("{v:.3}"))
            .collect();
        println!("{n}-gram tf-idf row sums: {col:?}");
    }
    Ok(())
}
