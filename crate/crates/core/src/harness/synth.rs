//! Offline fixtures: a restaurant-review generator and a separable
//! two-feature toy problem.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dataset::Review;
use crate::model::Samples;

/// Knobs of the review generator. The defaults were fixed before any model
/// was trained on the output.
#[derive(Debug, Clone, PartialEq)]
pub struct ReviewStyle {
    /// Chance that a clause agrees with the review's sentiment.
    pub agree: f64,
    /// Chance that a clause contradicts it; the rest are neutral.
    pub contradict: f64,
    /// Chance that a polar clause is phrased as a negated opposite.
    pub negate: f64,
    /// Chance that an adjective comes from outside the bundled lexicon.
    pub unseen_word: f64,
    /// Chance that a label is flipped after generation.
    pub label_noise: f64,
}

impl Default for ReviewStyle {
    fn default() -> Self {
        ReviewStyle {
            agree: 0.7,
            contradict: 0.2,
            negate: 0.25,
            unseen_word: 0.2,
            label_noise: 0.1,
        }
    }
}

impl ReviewStyle {
    /// No contradictions, no neutral filler, no label noise.
    pub fn clean() -> Self {
        ReviewStyle {
            agree: 1.0,
            contradict: 0.0,
            negate: 0.1,
            unseen_word: 0.0,
            label_noise: 0.0,
        }
    }
}

const ASPECTS: &[&str] = &[
    "food",
    "service",
    "pizza",
    "pasta",
    "burger",
    "steak",
    "sushi",
    "salad",
    "soup",
    "staff",
    "waiter",
    "waitress",
    "ambiance",
    "dessert",
    "fries",
    "coffee",
    "wine list",
    "portions",
    "prices",
    "place",
];
const POS_ADJ: &[&str] = &[
    "great",
    "good",
    "delicious",
    "amazing",
    "excellent",
    "fantastic",
    "friendly",
    "fresh",
    "tasty",
    "wonderful",
    "perfect",
    "lovely",
    "awesome",
    "outstanding",
    "superb",
    "flavorful",
    "nice",
    "attentive",
];
const NEG_ADJ: &[&str] = &[
    "bad",
    "terrible",
    "awful",
    "bland",
    "cold",
    "rude",
    "slow",
    "horrible",
    "disgusting",
    "mediocre",
    "overpriced",
    "stale",
    "soggy",
    "greasy",
    "tasteless",
    "dirty",
    "poor",
    "disappointing",
];
const POS_UNSEEN: &[&str] = &[
    "scrumptious",
    "divine",
    "heavenly",
    "top-notch",
    "delightful",
    "mouthwatering",
];
const NEG_UNSEEN: &[&str] = &["forgettable", "underwhelming", "soulless", "watery", "chewy", "sloppy"];
const NEUTRAL_ADJ: &[&str] = &["ok", "average", "fine", "decent", "okay"];
const POS_VERB: &[&str] = &["loved", "enjoyed", "liked", "recommend"];
const NEG_VERB: &[&str] = &["hated", "regret ordering", "disliked", "could not finish"];
const NEUTRAL: &[&str] = &[
    "we came here for lunch",
    "we stopped by on a Friday night",
    "it was my first time here",
    "the menu has a lot of choices",
    "we sat outside",
    "parking is on the street",
];
const POS_CLOSE: &[&str] = &[
    "will be back",
    "highly recommend it",
    "this is my new favorite spot",
    "ten out of ten",
];
const NEG_CLOSE: &[&str] = &[
    "will not be back",
    "never again",
    "avoid this place",
    "what a waste of money",
];
const POS_EMO: &[&str] = &[":)", ":D", "<3", ";)"];
const NEG_EMO: &[&str] = &[":(", ":/", "-_-", ">:("];
const SLANG: &[&str] = &["lol", "tbh", "def", "omg", "legit", "imo"];

fn pick<'a>(rng: &mut ChaCha8Rng, words: &[&'a str]) -> &'a str {
    words.choose(rng).expect("word lists are non-empty")
}

fn adjective(rng: &mut ChaCha8Rng, positive: bool, style: &ReviewStyle) -> String {
    let unseen = rng.gen_bool(style.unseen_word);
    let word = match (positive, unseen) {
        (true, false) => pick(rng, POS_ADJ),
        (true, true) => pick(rng, POS_UNSEEN),
        (false, false) => pick(rng, NEG_ADJ),
        (false, true) => pick(rng, NEG_UNSEEN),
    };
    if positive && rng.gen_bool(0.05) {
        // stretch the last vowel: "goooood"
        if let Some(i) = word.rfind(['a', 'e', 'i', 'o', 'u']) {
            let v = &word[i..=i];
            return format!("{}{}{}", &word[..i], v.repeat(4), &word[i + 1..]);
        }
    }
    word.to_string()
}

fn polar_clause(rng: &mut ChaCha8Rng, positive: bool, style: &ReviewStyle) -> String {
    let aspect = pick(rng, ASPECTS);
    let verb = if aspect.ends_with('s') && aspect != "ambiance" {
        "were"
    } else {
        "was"
    };
    if rng.gen_bool(style.negate) {
        let opposite = adjective(rng, !positive, style);
        return match rng.gen_range(0..2) {
            0 => format!("the {aspect} {verb} not {opposite}"),
            _ => format!("the {aspect} {verb} never {opposite}"),
        };
    }
    let adj = adjective(rng, positive, style);
    match rng.gen_range(0..4) {
        0 => format!("the {aspect} {verb} {adj}"),
        1 => format!("{adj} {aspect}"),
        2 => {
            let v = pick(rng, if positive { POS_VERB } else { NEG_VERB });
            format!("I {v} the {aspect}")
        }
        _ => format!("the {aspect} {verb} really {adj}"),
    }
}

fn neutral_clause(rng: &mut ChaCha8Rng) -> String {
    if rng.gen_bool(0.5) {
        pick(rng, NEUTRAL).to_string()
    } else {
        let aspect = pick(rng, ASPECTS);
        format!("the {aspect} was {}", pick(rng, NEUTRAL_ADJ))
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// One review text with the given underlying sentiment.
pub fn synthetic_review(rng: &mut ChaCha8Rng, positive: bool, style: &ReviewStyle) -> String {
    let clauses = rng.gen_range(1..=3);
    let mut parts = Vec::with_capacity(clauses + 1);
    for _ in 0..clauses {
        let u: f64 = rng.gen();
        let clause = if u < style.agree {
            polar_clause(rng, positive, style)
        } else if u < style.agree + style.contradict {
            polar_clause(rng, !positive, style)
        } else {
            neutral_clause(rng)
        };
        parts.push(clause);
    }
    if rng.gen_bool(0.3) {
        parts.push(pick(rng, if positive { POS_CLOSE } else { NEG_CLOSE }).to_string());
    }
    let mut text = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            text.push_str(if rng.gen_bool(0.5) { ". " } else { ", and " });
        }
        text.push_str(p);
    }
    let mut text = capitalize(&text);
    if !positive && rng.gen_bool(0.1) {
        text.push_str(". NEVER AGAIN");
    }
    let bang = if positive { 0.2 } else { 0.15 };
    if rng.gen_bool(bang) {
        text.push_str(&"!".repeat(rng.gen_range(1..=3)));
    } else {
        text.push('.');
    }
    if rng.gen_bool(0.05) {
        text.push(' ');
        text.push_str(pick(rng, SLANG));
    }
    if rng.gen_bool(0.1) {
        text.push(' ');
        text.push_str(pick(rng, if positive { POS_EMO } else { NEG_EMO }));
    }
    text
}

/// `n` reviews, half positive (the odd one out is negative), in random
/// order. Some labels are flipped according to `style.label_noise`.
pub fn synthetic_reviews(n: usize, seed: u64, style: &ReviewStyle) -> Vec<Review> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sentiments: Vec<bool> = (0..n).map(|i| i < n / 2).collect();
    sentiments.shuffle(&mut rng);
    sentiments
        .into_iter()
        .map(|positive| {
            let text = synthetic_review(&mut rng, positive, style);
            let flip = rng.gen_bool(style.label_noise);
            Review::new(text, u8::from(positive != flip))
        })
        .collect()
}

/// Linearly separable points used directly as angles: `x0 = ±U(0.1, 1)`
/// with alternating sign, `x1 = U(−1, 1)`, label 1 iff `x0 > 0`.
pub fn toy_dataset(n: usize, seed: u64) -> Samples {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let x0 = sign * rng.gen_range(0.1..1.0);
        let x1 = rng.gen_range(-1.0..1.0);
        features.push(vec![x0, x1]);
        labels.push(u8::from(x0 > 0.0));
    }
    Samples::new(features, labels).expect("toy rows are well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_and_repeatable() {
        let style = ReviewStyle {
            label_noise: 0.0,
            ..ReviewStyle::default()
        };
        let a = synthetic_reviews(200, 9, &style);
        assert_eq!(a, synthetic_reviews(200, 9, &style));
        assert_eq!(a.iter().filter(|r| r.label == 1).count(), 100);
        assert!(a.iter().all(|r| !r.text.contains(['\t', '\n'])));
        assert_ne!(a, synthetic_reviews(200, 10, &style));
    }

    #[test]
    fn noise_flips_some_labels() {
        let clean = synthetic_reviews(1000, 1, &ReviewStyle::default());
        let pos = clean.iter().filter(|r| r.label == 1).count();
        assert!(pos != 500 && (430..570).contains(&pos), "{pos}");
    }

    #[test]
    fn toy_is_separable() {
        let t = toy_dataset(40, 0);
        for (x, &y) in t.features.iter().zip(&t.labels) {
            assert_eq!(u8::from(x[0] > 0.0), y);
            assert!(x[0].abs() >= 0.1);
        }
    }
}
