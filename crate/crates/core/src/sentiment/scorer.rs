//! VADER-style valence scoring.
//!
//! Covered rules: lexicon lookup, negation in the three preceding tokens
//! (including the `no <word>` form), booster/dampener shifts decayed by
//! distance, ALL-CAPS emphasis, and exclamation emphasis. Idiom tables,
//! `but`-clause reweighting, `least`, and question-mark emphasis are not
//! implemented.

use super::{Lexicon, SentimentScore};

pub const NEGATION_SCALAR: f64 = -0.74;
pub const CAPS_INCR: f64 = 0.733;
pub const EXCLAMATION_INCR: f64 = 0.292;
pub const MAX_EXCLAMATIONS: usize = 4;
pub const NORMALIZATION_ALPHA: f64 = 15.0;

const ASCII_PUNCT: &str = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";

/// Strips leading/trailing ASCII punctuation unless that leaves two or
/// fewer characters (which keeps emoticons such as `:)` intact).
fn strip_punct_if_word(token: &str) -> &str {
    let stripped = token.trim_matches(|c: char| ASCII_PUNCT.contains(c));
    if stripped.chars().count() <= 2 {
        token
    } else {
        stripped
    }
}

/// Python's `str.isupper`: at least one cased character, none lowercase.
fn is_upper(token: &str) -> bool {
    let mut cased = false;
    for c in token.chars() {
        if c.is_lowercase() {
            return false;
        }
        if c.is_uppercase() {
            cased = true;
        }
    }
    cased
}

/// Squashes a signed valence sum into [-1, 1].
pub fn normalize(sum: f64) -> f64 {
    (sum / (sum * sum + NORMALIZATION_ALPHA).sqrt()).clamp(-1.0, 1.0)
}

struct Tokens<'a> {
    raw: Vec<&'a str>,
    lower: Vec<String>,
    cap_diff: bool,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let raw: Vec<&str> = text.split_whitespace().map(strip_punct_if_word).collect();
        let lower = raw.iter().map(|t| t.to_lowercase()).collect();
        let caps = raw.iter().filter(|t| is_upper(t)).count();
        let cap_diff = caps > 0 && caps < raw.len();
        Self {
            raw,
            lower,
            cap_diff,
        }
    }

    fn len(&self) -> usize {
        self.raw.len()
    }
}

fn booster_shift(lexicon: &Lexicon, raw: &str, lower: &str, valence: f64, cap_diff: bool) -> f64 {
    let Some(mut scalar) = lexicon.booster(lower) else {
        return 0.0;
    };
    if valence < 0.0 {
        scalar = -scalar;
    }
    if is_upper(raw) && cap_diff {
        scalar += if valence > 0.0 { CAPS_INCR } else { -CAPS_INCR };
    }
    scalar
}

fn token_valence(lexicon: &Lexicon, tokens: &Tokens<'_>, i: usize) -> f64 {
    let lower = &tokens.lower;
    let Some(base) = lexicon.valence(&lower[i]) else {
        return 0.0;
    };
    let mut valence = base;
    // `no` directly before another lexicon word acts as a negator, not as a
    // sentiment word of its own.
    if lower[i] == "no" && i + 1 < tokens.len() && lexicon.contains(&lower[i + 1]) {
        valence = 0.0;
    }
    if (i > 0 && lower[i - 1] == "no")
        || (i > 1 && lower[i - 2] == "no")
        || (i > 2 && lower[i - 3] == "no" && (lower[i - 1] == "or" || lower[i - 1] == "nor"))
    {
        valence = base * NEGATION_SCALAR;
    }
    if is_upper(tokens.raw[i]) && tokens.cap_diff {
        valence += if valence > 0.0 { CAPS_INCR } else { -CAPS_INCR };
    }
    for distance in 0..3 {
        if i <= distance {
            break;
        }
        let j = i - distance - 1;
        if lexicon.contains(&lower[j]) {
            continue;
        }
        let mut shift = booster_shift(lexicon, tokens.raw[j], &lower[j], valence, tokens.cap_diff);
        if shift != 0.0 {
            match distance {
                1 => shift *= 0.95,
                2 => shift *= 0.9,
                _ => {}
            }
        }
        valence += shift;
        if lexicon.is_negation(&lower[j]) {
            valence *= NEGATION_SCALAR;
        }
    }
    valence
}

/// Per-token valences, in token order. Boosters score 0.
pub fn token_valences(text: &str, lexicon: &Lexicon) -> Vec<f64> {
    let tokens = Tokens::new(text);
    (0..tokens.len())
        .map(|i| {
            if lexicon.booster(&tokens.lower[i]).is_some() {
                0.0
            } else {
                token_valence(lexicon, &tokens, i)
            }
        })
        .collect()
}

fn exclamation_emphasis(text: &str) -> f64 {
    let count = text
        .chars()
        .filter(|&c| c == '!')
        .count()
        .min(MAX_EXCLAMATIONS);
    count as f64 * EXCLAMATION_INCR
}

/// Scores a text, returning the four-component sentiment cloud.
///
/// Empty (or whitespace-only) text scores all zeros; text without any
/// lexicon token is fully neutral.
pub fn score_text(text: &str, lexicon: &Lexicon) -> SentimentScore {
    let sentiments = token_valences(text, lexicon);
    if sentiments.is_empty() {
        return SentimentScore::EMPTY;
    }
    let emphasis = exclamation_emphasis(text);
    let mut sum: f64 = sentiments.iter().sum();
    if sum > 0.0 {
        sum += emphasis;
    } else if sum < 0.0 {
        sum -= emphasis;
    }
    let compound = normalize(sum);

    // Each sentiment-bearing token contributes |valence| + 1 of mass so that
    // it outweighs a neutral token, which contributes 1.
    let mut pos_sum = 0.0;
    let mut neg_sum = 0.0;
    let mut neu_count = 0usize;
    for &s in &sentiments {
        if s > 0.0 {
            pos_sum += s + 1.0;
        } else if s < 0.0 {
            neg_sum += s - 1.0;
        } else {
            neu_count += 1;
        }
    }
    if pos_sum > neg_sum.abs() {
        pos_sum += emphasis;
    } else if pos_sum < neg_sum.abs() {
        neg_sum -= emphasis;
    }
    let total = pos_sum + neg_sum.abs() + neu_count as f64;
    SentimentScore {
        pos: (pos_sum / total).abs(),
        neg: (neg_sum / total).abs(),
        neu: (neu_count as f64 / total).abs(),
        compound,
    }
}
