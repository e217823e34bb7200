//! Queries against a built palette: naming colors and finding entries by
//! name.

use thiserror::Error;

use crate::color::{rgb_to_lab, RgbColor};
use crate::delta_e::ciede2000;
use crate::lexicon::{normalize_name, LexiconError};
use crate::palette::{NameFrequency, Palette, PaletteEntry};

/// Errors produced by palette queries.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("palette has no entries")]
    EmptyPalette,
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
}

/// Default Levenshtein tolerance for name lookups.
pub const DEFAULT_MAX_DISTANCE: usize = 2;

/// Finds the palette entry nearest to `color` under CIEDE2000, breaking
/// exact ties by lower entry id.
///
/// Distance is measured to the entry's sRGB color — the color the palette
/// actually presents — so querying an entry's own `centroid_rgb` always
/// returns that entry at distance exactly 0, regardless of the quantization
/// between the stored LAB mean and its 8-bit rendering.
pub fn nearest_entry(
    palette: &Palette,
    color: RgbColor,
) -> Result<(&PaletteEntry, f64), QueryError> {
    if palette.is_empty() {
        return Err(QueryError::EmptyPalette);
    }
    let lab = rgb_to_lab(color);
    let mut best: Option<(&PaletteEntry, f64)> = None;
    for entry in &palette.entries {
        let d = ciede2000(lab, rgb_to_lab(entry.centroid_rgb));
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((entry, d));
        }
    }
    Ok(best.unwrap())
}

/// The result of naming a color: the nearest palette entry's names.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedColor {
    pub entry_id: usize,
    /// The entry's stored names, most frequent first.
    pub names: Vec<NameFrequency>,
    /// CIEDE2000 from the query color to the entry centroid.
    pub distance: f64,
}

/// Names a color with the stored names of its nearest palette entry.
pub fn name_color(palette: &Palette, color: RgbColor) -> Result<NamedColor, QueryError> {
    let (entry, distance) = nearest_entry(palette, color)?;
    Ok(NamedColor {
        entry_id: entry.id,
        names: entry.names.clone(),
        distance,
    })
}

/// How a lookup hit matched the query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchKind {
    Exact,
    Fuzzy,
}

/// One hit of [`lookup_by_name`].
#[derive(Debug, Clone, PartialEq)]
pub struct NameMatch {
    pub entry_id: usize,
    /// The stored name that matched.
    pub matched_name: String,
    pub kind: MatchKind,
    /// Levenshtein distance from the normalized query; 0 for exact hits.
    pub distance: usize,
    /// The matched name's stored probability.
    pub probability: f64,
}

/// Finds palette entries by name. The query is normalized first. Exact
/// matches win; only when there are none do fuzzy hits within `max_distance`
/// edits count. Hits are sorted by (distance, probability descending,
/// entry id).
pub fn lookup_by_name(
    palette: &Palette,
    query: &str,
    max_distance: usize,
) -> Result<Vec<NameMatch>, QueryError> {
    if palette.is_empty() {
        return Err(QueryError::EmptyPalette);
    }
    let q = normalize_name(query)?;
    let mut hits = Vec::new();
    for entry in &palette.entries {
        for nf in &entry.names {
            if nf.name == q {
                hits.push(NameMatch {
                    entry_id: entry.id,
                    matched_name: nf.name.as_str().to_string(),
                    kind: MatchKind::Exact,
                    distance: 0,
                    probability: nf.probability,
                });
            }
        }
    }
    if hits.is_empty() && max_distance > 0 {
        for entry in &palette.entries {
            for nf in &entry.names {
                let d = levenshtein(q.as_str(), nf.name.as_str());
                if d > 0 && d <= max_distance {
                    hits.push(NameMatch {
                        entry_id: entry.id,
                        matched_name: nf.name.as_str().to_string(),
                        kind: MatchKind::Fuzzy,
                        distance: d,
                        probability: nf.probability,
                    });
                }
            }
        }
    }
    hits.sort_by(|a, b| {
        a.distance
            .cmp(&b.distance)
            .then_with(|| b.probability.partial_cmp(&a.probability).unwrap())
            .then_with(|| a.entry_id.cmp(&b.entry_id))
            .then_with(|| a.matched_name.cmp(&b.matched_name))
    });
    Ok(hits)
}

/// Classic two-row Levenshtein distance over characters.
fn levenshtein(a: &str, b: &str) -> usize {
    if a == b {
        return 0;
    }
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            curr[j + 1] = sub.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}
