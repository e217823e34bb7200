//! Corpus ingestion: reading `name,hex,rgb,source` CSV files into a
//! validated, canonicalized entry list.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::BufRead;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::color::{rgb_to_lab, HexCode, LabPoint, RgbColor};
use crate::lexicon::{build_vocabulary, normalize_name, segment_name, NormalizedName};

/// Errors produced while loading a corpus.
#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read corpus file {path}: {source}")]
    FileUnreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Strict mode only: the first defective row aborts the load.
    #[error("line {line}: {message}")]
    MalformedRow { line: u64, message: String },
    #[error("corpus {path} contains no usable entries")]
    EmptyCorpus { path: PathBuf },
}

/// One canonicalized corpus row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorEntry {
    /// The name as it appeared in the file, minus surrounding whitespace.
    pub raw_name: String,
    /// The normalized and segmented name.
    pub name: NormalizedName,
    pub hex: HexCode,
    pub rgb: RgbColor,
    pub source: String,
}

/// A row that failed validation and was skipped (or, in strict mode, aborted
/// the load).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowDefect {
    /// 1-based line number in the file, counting the header.
    pub line: u64,
    pub message: String,
}

/// Summary statistics over a loaded corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusStats {
    pub entries: usize,
    pub distinct_names: usize,
    pub distinct_rgb: usize,
    pub source_counts: BTreeMap<String, usize>,
}

/// A validated color-name corpus. Entries keep file order.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    entries: Vec<ColorEntry>,
    digest: String,
}

impl Corpus {
    pub fn entries(&self) -> &[ColorEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// SHA-256 over the canonical entry list; identifies the dataset in
    /// palette provenance.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    /// The CIELAB coordinates of every entry, in entry order.
    pub fn lab_matrix(&self) -> Vec<LabPoint> {
        self.entries.iter().map(|e| rgb_to_lab(e.rgb)).collect()
    }

    pub fn stats(&self) -> CorpusStats {
        let mut source_counts = BTreeMap::new();
        let mut names = HashSet::new();
        let mut rgbs = HashSet::new();
        for e in &self.entries {
            *source_counts.entry(e.source.clone()).or_insert(0) += 1;
            names.insert(&e.name);
            rgbs.insert(e.rgb);
        }
        CorpusStats {
            entries: self.entries.len(),
            distinct_names: names.len(),
            distinct_rgb: rgbs.len(),
            source_counts,
        }
    }

    fn compute_digest(entries: &[ColorEntry]) -> String {
        let mut hasher = Sha256::new();
        for e in entries {
            hasher.update(e.name.as_str().as_bytes());
            hasher.update([0x1f]);
            hasher.update(e.hex.as_str().as_bytes());
            hasher.update([0x1f]);
            hasher.update(e.source.as_bytes());
            hasher.update([0x0a]);
        }
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Deserialize)]
struct RawRow {
    name: String,
    hex: String,
    rgb: String,
    source: String,
}

/// Parses an `R;G;B` triple with each channel in 0..=255.
fn parse_rgb_triple(text: &str) -> Result<RgbColor, String> {
    let parts: Vec<&str> = text.split(';').collect();
    if parts.len() != 3 {
        return Err(format!("rgb {text:?}: expected 3 fields separated by ';'"));
    }
    let channel = |s: &str| {
        s.trim()
            .parse::<u8>()
            .map_err(|_| format!("rgb {text:?}: invalid channel {s:?}"))
    };
    Ok(RgbColor::new(
        channel(parts[0])?,
        channel(parts[1])?,
        channel(parts[2])?,
    ))
}

/// Loads and canonicalizes a corpus.
///
/// Defective rows (bad hex, bad rgb triple, hex/rgb disagreement, empty
/// name, duplicate of an earlier row) are skipped and reported. With
/// `strict` set, the first defect aborts instead. Returns the corpus and
/// the defect report; a corpus with zero surviving rows is an error.
///
/// Names are processed in two passes: every row is normalized first, then
/// the vocabulary of multi-word names drives segmentation of merged tokens.
/// Duplicates are detected on the post-segmentation `(name, rgb, source)`
/// triple, keeping the first occurrence.
pub fn load_corpus(path: &Path, strict: bool) -> Result<(Corpus, Vec<RowDefect>), CorpusError> {
    let file = File::open(path).map_err(|e| CorpusError::FileUnreadable {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));

    struct PendingRow {
        line: u64,
        raw_name: String,
        name: NormalizedName,
        hex: HexCode,
        rgb: RgbColor,
        source: String,
    }

    let mut defects = Vec::new();
    let mut pending = Vec::new();
    let mut record = csv::StringRecord::new();
    let headers = reader
        .headers()
        .map_err(|e| CorpusError::FileUnreadable {
            path: path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
        })?
        .clone();

    let defect = |defects: &mut Vec<RowDefect>, line: u64, message: String| {
        if strict {
            return Err(CorpusError::MalformedRow { line, message });
        }
        defects.push(RowDefect { line, message });
        Ok(())
    };

    loop {
        let line = reader.position().line();
        let byte = reader.position().byte();
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                // A parse error that consumed no input cannot be skipped.
                if reader.position().byte() == byte {
                    return Err(CorpusError::FileUnreadable {
                        path: path.to_path_buf(),
                        source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
                    });
                }
                defect(&mut defects, line, format!("unreadable row: {e}"))?;
                continue;
            }
        }
        let row: RawRow = match record.deserialize(Some(&headers)) {
            Ok(row) => row,
            Err(e) => {
                defect(&mut defects, line, format!("unreadable row: {e}"))?;
                continue;
            }
        };
        let hex = match HexCode::parse(&row.hex) {
            Ok(hex) => hex,
            Err(e) => {
                defect(&mut defects, line, e.to_string())?;
                continue;
            }
        };
        let rgb = match parse_rgb_triple(&row.rgb) {
            Ok(rgb) => rgb,
            Err(message) => {
                defect(&mut defects, line, message)?;
                continue;
            }
        };
        if hex.rgb() != rgb {
            defect(
                &mut defects,
                line,
                format!("hex {hex} decodes to {} but rgb column says {rgb}", hex.rgb()),
            )?;
            continue;
        }
        let name = match normalize_name(&row.name) {
            Ok(name) => name,
            Err(e) => {
                defect(&mut defects, line, e.to_string())?;
                continue;
            }
        };
        if row.source.is_empty() {
            defect(&mut defects, line, "empty source field".to_string())?;
            continue;
        }
        pending.push(PendingRow {
            line,
            raw_name: row.name,
            name,
            hex,
            rgb,
            source: row.source,
        });
    }

    let names: Vec<NormalizedName> = pending.iter().map(|r| r.name.clone()).collect();
    let vocabulary = build_vocabulary(&names);

    let mut seen: HashSet<(NormalizedName, RgbColor, String)> = HashSet::new();
    let mut entries = Vec::with_capacity(pending.len());
    for row in pending {
        let name = segment_name(&row.name, &vocabulary);
        let key = (name.clone(), row.rgb, row.source.clone());
        if !seen.insert(key) {
            defect(
                &mut defects,
                row.line,
                format!(
                    "duplicate of an earlier row: name {:?}, rgb {}, source {:?}",
                    name.as_str(),
                    row.rgb,
                    row.source
                ),
            )?;
            continue;
        }
        entries.push(ColorEntry {
            raw_name: row.raw_name,
            name,
            hex: row.hex,
            rgb: row.rgb,
            source: row.source,
        });
    }

    if entries.is_empty() {
        return Err(CorpusError::EmptyCorpus {
            path: path.to_path_buf(),
        });
    }
    let digest = Corpus::compute_digest(&entries);
    Ok((Corpus { entries, digest }, defects))
}

/// Builds a corpus directly from canonical parts; used by tests and tools
/// that synthesize corpora in memory.
pub fn corpus_from_entries(entries: Vec<ColorEntry>) -> Corpus {
    let digest = Corpus::compute_digest(&entries);
    Corpus { entries, digest }
}

/// Counts the data lines of a corpus file without validating them.
pub fn count_rows(path: &Path) -> Result<usize, CorpusError> {
    let file = File::open(path).map_err(|e| CorpusError::FileUnreadable {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(BufReader::new(file)
        .lines()
        .skip(1)
        .filter(|l| l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(false))
        .count())
}
