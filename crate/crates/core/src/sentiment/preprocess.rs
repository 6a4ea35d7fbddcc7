use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::Lexicon;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub remove_stopwords: bool,
    pub remove_special_chars: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            remove_stopwords: true,
            remove_special_chars: true,
        }
    }
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Drops possessive `'s` and every character that is not alphanumeric,
/// whitespace or `!`. Runs of `!` become standalone tokens.
fn strip_special(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut kept = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if is_apostrophe(c)
            && chars.get(i + 1) == Some(&'s')
            && !chars.get(i + 2).is_some_and(|n| n.is_alphanumeric())
        {
            i += 2;
            continue;
        }
        if c.is_alphanumeric() || c.is_whitespace() || c == '!' {
            kept.push(c);
        }
        i += 1;
    }
    let mut out = String::with_capacity(kept.len() + 8);
    let mut prev: Option<char> = None;
    for c in kept.chars() {
        if let Some(p) = prev {
            let boundary = (c == '!') != (p == '!') && !c.is_whitespace() && !p.is_whitespace();
            if boundary {
                out.push(' ');
            }
        }
        out.push(c);
        prev = Some(c);
    }
    out
}

/// Lowercases and cleans a headline before scoring.
///
/// Stopword removal never drops negators or boosters known to `lexicon`,
/// since the scorer depends on them.
pub fn preprocess_text(
    raw: &str,
    config: PreprocessConfig,
    stopwords: &HashSet<String>,
    lexicon: &Lexicon,
) -> String {
    let lowered = raw.to_lowercase();
    let cleaned = if config.remove_special_chars {
        strip_special(&lowered)
    } else {
        lowered
    };
    let tokens = cleaned
        .split_whitespace()
        .filter(|t| !config.remove_stopwords || !stopwords.contains(*t) || lexicon.is_protected(t));
    tokens.collect::<Vec<_>>().join(" ")
}
