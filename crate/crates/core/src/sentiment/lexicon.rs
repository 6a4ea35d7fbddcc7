use std::collections::{HashMap, HashSet};

use super::SentimentError;

/// Intensity shift of a booster ("very") or dampener ("slightly").
pub const BOOSTER_INCR: f64 = 0.293;
pub const BOOSTER_DECR: f64 = -0.293;

const BUNDLED_LEXICON: &str = include_str!("../../data/vader_lexicon.tsv");
const BUNDLED_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");

const NEGATIONS: &[&str] = &[
    "aint",
    "arent",
    "cannot",
    "cant",
    "couldnt",
    "darent",
    "didnt",
    "doesnt",
    "ain't",
    "aren't",
    "can't",
    "couldn't",
    "daren't",
    "didn't",
    "doesn't",
    "dont",
    "hadnt",
    "hasnt",
    "havent",
    "isnt",
    "mightnt",
    "mustnt",
    "neither",
    "don't",
    "hadn't",
    "hasn't",
    "haven't",
    "isn't",
    "mightn't",
    "mustn't",
    "neednt",
    "needn't",
    "never",
    "none",
    "nope",
    "nor",
    "not",
    "nothing",
    "nowhere",
    "oughtnt",
    "shant",
    "shouldnt",
    "uhuh",
    "wasnt",
    "werent",
    "oughtn't",
    "shan't",
    "shouldn't",
    "uh-uh",
    "wasn't",
    "weren't",
    "without",
    "wont",
    "wouldnt",
    "won't",
    "wouldn't",
    "rarely",
    "seldom",
    "despite",
];

const BOOSTERS_UP: &[&str] = &[
    "absolutely",
    "amazingly",
    "awfully",
    "completely",
    "considerable",
    "considerably",
    "decidedly",
    "deeply",
    "effing",
    "enormous",
    "enormously",
    "entirely",
    "especially",
    "exceptional",
    "exceptionally",
    "extreme",
    "extremely",
    "fabulously",
    "flipping",
    "flippin",
    "frackin",
    "fracking",
    "fricking",
    "frickin",
    "frigging",
    "friggin",
    "fully",
    "fuckin",
    "fucking",
    "fuggin",
    "fugging",
    "greatly",
    "hella",
    "highly",
    "hugely",
    "incredible",
    "incredibly",
    "intensely",
    "major",
    "majorly",
    "more",
    "most",
    "particularly",
    "purely",
    "quite",
    "really",
    "remarkably",
    "so",
    "substantially",
    "thoroughly",
    "total",
    "totally",
    "tremendous",
    "tremendously",
    "uber",
    "unbelievably",
    "unusually",
    "utter",
    "utterly",
    "very",
];

const BOOSTERS_DOWN: &[&str] = &[
    "almost",
    "barely",
    "hardly",
    "kinda",
    "kindof",
    "kind-of",
    "less",
    "little",
    "marginal",
    "marginally",
    "occasional",
    "occasionally",
    "partly",
    "scarce",
    "scarcely",
    "slight",
    "slightly",
    "somewhat",
    "sorta",
    "sortof",
    "sort-of",
];

/// Token valences plus the booster and negation vocabularies.
#[derive(Debug, Clone)]
pub struct Lexicon {
    valences: HashMap<String, f64>,
    boosters: HashMap<String, f64>,
    negations: HashSet<String>,
}

impl Lexicon {
    /// Parses a `token<TAB>valence` file. Lines starting with `#` and blank
    /// lines are ignored; extra tab-separated columns are tolerated.
    pub fn parse(text: &str) -> Result<Self, SentimentError> {
        let mut valences = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx as u64 + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split('\t');
            let token = parts.next().unwrap_or_default().trim();
            let bad = |message: String| SentimentError::Lexicon {
                line: line_no,
                message,
            };
            if token.is_empty() {
                return Err(bad("empty token".into()));
            }
            if token.to_lowercase() != token {
                return Err(bad(format!("token `{token}` is not lowercase")));
            }
            let cell = parts
                .next()
                .ok_or_else(|| bad(format!("missing valence for `{token}`")))?;
            let valence: f64 = cell
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad valence `{cell}`")))?;
            if !valence.is_finite() || !(-4.0..=4.0).contains(&valence) {
                return Err(bad(format!("valence {valence} outside [-4, 4]")));
            }
            if valences.insert(token.to_string(), valence).is_some() {
                return Err(bad(format!("duplicate token `{token}`")));
            }
        }
        let boosters = BOOSTERS_UP
            .iter()
            .map(|w| (w.to_string(), BOOSTER_INCR))
            .chain(BOOSTERS_DOWN.iter().map(|w| (w.to_string(), BOOSTER_DECR)))
            .collect();
        Ok(Self {
            valences,
            boosters,
            negations: NEGATIONS.iter().map(|w| w.to_string()).collect(),
        })
    }

    /// The lexicon shipped with this crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_LEXICON).expect("bundled lexicon is valid")
    }

    pub fn len(&self) -> usize {
        self.valences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valences.is_empty()
    }

    pub fn valence(&self, token: &str) -> Option<f64> {
        self.valences.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.valences.contains_key(token)
    }

    pub fn booster(&self, token: &str) -> Option<f64> {
        self.boosters.get(token).copied()
    }

    /// Explicit negator, or any contraction containing `n't`.
    pub fn is_negation(&self, token: &str) -> bool {
        self.negations.contains(token) || token.contains("n't")
    }

    /// Tokens that stopword removal must keep: negators, boosters and `no`.
    pub fn is_protected(&self, token: &str) -> bool {
        token == "no" || self.negations.contains(token) || self.boosters.contains_key(token)
    }
}

/// Parses a one-token-per-line stopword list.
pub fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

pub fn bundled_stopwords() -> HashSet<String> {
    parse_stopwords(BUNDLED_STOPWORDS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_lexicon_loads() {
        let lex = Lexicon::bundled();
        assert!(lex.len() > 7000);
        assert_eq!(lex.valence("good"), Some(1.9));
        assert!(lex.is_negation("not"));
        assert!(lex.is_negation("shouldn't"));
        assert_eq!(lex.booster("very"), Some(BOOSTER_INCR));
        assert_eq!(lex.booster("slightly"), Some(BOOSTER_DECR));
        assert_eq!(bundled_stopwords().len(), 179);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(
            Lexicon::parse("good\t9.0\n"),
            Err(SentimentError::Lexicon { line: 1, .. })
        ));
        assert!(matches!(
            Lexicon::parse("# c\nGood\t1.0\n"),
            Err(SentimentError::Lexicon { line: 2, .. })
        ));
        assert!(Lexicon::parse("a\t1\na\t2\n").is_err());
        assert!(Lexicon::parse("a\tx\n").is_err());
        let lex = Lexicon::parse("# comment\n\nup\t1.5\textra\n").unwrap();
        assert_eq!(lex.valence("up"), Some(1.5));
    }
}
