//! Name normalization, vocabulary extraction, and compound-word segmentation.
//!
//! Corpus names arrive in wildly inconsistent shapes (`"Light-Sky-Blue"`,
//! `"lightskyblue"`, `" PASTEL  pink "`). Normalization canonicalizes the
//! spelling; segmentation then splits run-together tokens into known words so
//! that merged and spaced variants of the same name coincide.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// Errors produced while canonicalizing names.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LexiconError {
    /// The raw name contains no alphabetic characters at all.
    #[error("name {0:?} is empty after normalization")]
    EmptyAfterNormalization(String),
}

/// A canonical color name: lowercase ASCII words separated by single spaces,
/// with no leading or trailing space. Normalization is idempotent, so a
/// `NormalizedName` re-normalizes to itself.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalizedName(String);

impl NormalizedName {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The words of the name, in order.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.0.split(' ')
    }

    pub(crate) fn from_canonical(s: String) -> Self {
        debug_assert!(!s.is_empty() && !s.starts_with(' ') && !s.ends_with(' '));
        NormalizedName(s)
    }
}

impl fmt::Display for NormalizedName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for NormalizedName {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Lowercases the input, replaces every non-alphabetic run with a single
/// space, and trims the ends.
pub fn normalize_name(raw: &str) -> Result<NormalizedName, LexiconError> {
    let mut out = String::with_capacity(raw.len());
    let mut gap = false;
    for ch in raw.chars().flat_map(|c| c.to_lowercase()) {
        if ch.is_ascii_lowercase() {
            if gap && !out.is_empty() {
                out.push(' ');
            }
            gap = false;
            out.push(ch);
        } else {
            gap = true;
        }
    }
    if out.is_empty() {
        return Err(LexiconError::EmptyAfterNormalization(raw.to_string()));
    }
    Ok(NormalizedName(out))
}

/// The set of known words, harvested from multi-word corpus names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    words: HashSet<String>,
}

impl Vocabulary {
    /// Words shorter than this never enter the vocabulary, which keeps
    /// fragments like "of" or "la" from shredding longer tokens.
    pub const MIN_WORD_LEN: usize = 3;

    /// Builds a vocabulary from an explicit word list, applying the length
    /// floor.
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Vocabulary {
            words: words
                .into_iter()
                .map(Into::into)
                .filter(|w| w.len() >= Self::MIN_WORD_LEN)
                .collect(),
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }
}

/// Collects the vocabulary: every word of every multi-word name, subject to
/// the length floor. Single-word names contribute nothing; they are exactly
/// the tokens segmentation is meant to split.
pub fn build_vocabulary(names: &[NormalizedName]) -> Vocabulary {
    let mut words = HashSet::new();
    for name in names {
        if name.words().nth(1).is_none() {
            continue;
        }
        for word in name.words() {
            if word.len() >= Vocabulary::MIN_WORD_LEN {
                words.insert(word.to_string());
            }
        }
    }
    Vocabulary { words }
}

/// Splits run-together tokens into vocabulary words.
///
/// Each token already in the vocabulary is kept whole. Otherwise, if the
/// token can be written as a concatenation of vocabulary words, it is
/// replaced by the split with the fewest words, ties broken by the
/// lexicographically earliest word sequence. Unsplittable tokens pass
/// through unchanged, so the output always conserves the input's letters.
pub fn segment_name(name: &NormalizedName, vocab: &Vocabulary) -> NormalizedName {
    let mut out = String::with_capacity(name.as_str().len());
    for token in name.words() {
        if !out.is_empty() {
            out.push(' ');
        }
        if !vocab.contains(token) && token.len() >= 2 * Vocabulary::MIN_WORD_LEN {
            if let Some(words) = split_token(token, vocab) {
                out.push_str(&words.join(" "));
                continue;
            }
        }
        out.push_str(token);
    }
    NormalizedName::from_canonical(out)
}

/// Finds the minimal cover of `token` by vocabulary words, if one exists.
/// Tokens are ASCII lowercase, so byte indexing is safe.
fn split_token<'t>(token: &'t str, vocab: &Vocabulary) -> Option<Vec<&'t str>> {
    let n = token.len();
    // best[i] covers token[i..]: (word count, end of first word), where the
    // first word is the lexicographically smallest among minimal covers.
    // Suffix-ordering by first word alone is sound because two distinct
    // candidate words at the same position always differ as strings.
    let mut best: Vec<Option<(usize, usize)>> = vec![None; n + 1];
    best[n] = Some((0, n));
    for i in (0..n).rev() {
        let mut choice: Option<(usize, usize)> = None;
        for j in i + Vocabulary::MIN_WORD_LEN..=n {
            if !vocab.contains(&token[i..j]) {
                continue;
            }
            let Some((tail, _)) = best[j] else { continue };
            let count = tail + 1;
            let better = match choice {
                None => true,
                Some((c, bj)) => count < c || (count == c && token[i..j] < token[i..bj]),
            };
            if better {
                choice = Some((count, j));
            }
        }
        best[i] = choice;
    }
    let (count, _) = best[0]?;
    if count < 2 {
        return None;
    }
    let mut words = Vec::with_capacity(count);
    let mut i = 0;
    while i < n {
        let (_, j) = best[i].unwrap();
        words.push(&token[i..j]);
        i = j;
    }
    Some(words)
}
