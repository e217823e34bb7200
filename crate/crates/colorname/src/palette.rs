//! Palette construction: attaching corpus names to cluster centroids, and
//! the palette file format.

use std::collections::{HashMap, HashSet};
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clustering::ClusterModel;
use crate::color::{lab_to_rgb, HexCode, LabPoint, RgbColor};
use crate::corpus::Corpus;
use crate::lexicon::{normalize_name, NormalizedName};
use crate::util::{hex_digest, write_atomic};

/// Errors produced while building, saving, or loading palettes.
#[derive(Debug, Error)]
pub enum PaletteError {
    #[error("cluster {0} has no members")]
    EmptyCluster(usize),
    #[error("cannot read palette file {path}: {source}")]
    FileUnreadable {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cannot write {path}: {source}")]
    FileUnwritable {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("palette schema violation at {location}: {message}")]
    SchemaViolation { location: String, message: String },
}

/// At most this many names are kept per palette entry.
pub const MAX_NAMES_PER_ENTRY: usize = 5;
/// Version tag written into palette files.
pub const PALETTE_FORMAT_VERSION: u32 = 1;

/// A name with its within-cluster relative frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct NameFrequency {
    pub name: NormalizedName,
    /// Fraction of the cluster's member entries carrying this name; in
    /// (0, 1].
    pub probability: f64,
}

/// One palette color: a centroid and the names the corpus gives it.
#[derive(Debug, Clone, PartialEq)]
pub struct PaletteEntry {
    pub id: usize,
    pub centroid_lab: LabPoint,
    /// The centroid converted to sRGB.
    pub centroid_rgb: RgbColor,
    /// Up to [`MAX_NAMES_PER_ENTRY`] names, sorted by descending
    /// probability, ties broken by ascending name.
    pub names: Vec<NameFrequency>,
    /// Number of corpus entries assigned to this cluster.
    pub member_count: usize,
}

impl PaletteEntry {
    pub fn hex(&self) -> HexCode {
        self.centroid_rgb.hex()
    }

    /// The most frequent name.
    pub fn top_name(&self) -> &NormalizedName {
        &self.names[0].name
    }
}

/// What the palette was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    /// Digest of the corpus the clustering ran on.
    pub corpus_digest: String,
    /// Seed of the final k-means fit.
    pub seed: u64,
    pub k: usize,
}

/// A standardized color palette: named centroids plus provenance.
///
/// Entry ids are dense and equal to each entry's position.
#[derive(Debug, Clone, PartialEq)]
pub struct Palette {
    pub entries: Vec<PaletteEntry>,
    pub provenance: Provenance,
}

impl Palette {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// SHA-256 of the palette's canonical serialized form. Indexes built
    /// against a palette carry this digest to detect mismatched files.
    pub fn digest(&self) -> String {
        let file = PaletteFile::from_palette(self);
        hex_digest(serde_json::to_string(&file).unwrap().as_bytes())
    }
}

/// Relative name frequencies within one cluster, sorted by descending
/// frequency and then ascending name. Frequencies are exact count ratios
/// and sum to 1 over the full (untruncated) list.
pub fn name_frequencies(
    corpus: &Corpus,
    model: &ClusterModel,
    cluster: usize,
) -> Result<Vec<NameFrequency>, PaletteError> {
    let mut counts: HashMap<&NormalizedName, usize> = HashMap::new();
    let mut members = 0usize;
    for (entry, &a) in corpus.entries().iter().zip(&model.assignments) {
        if a == cluster {
            *counts.entry(&entry.name).or_insert(0) += 1;
            members += 1;
        }
    }
    if members == 0 {
        return Err(PaletteError::EmptyCluster(cluster));
    }
    let mut ranked: Vec<(&NormalizedName, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    Ok(ranked
        .into_iter()
        .map(|(name, count)| NameFrequency {
            name: name.clone(),
            probability: count as f64 / members as f64,
        })
        .collect())
}

/// Builds the palette for a fitted model: one entry per cluster, carrying
/// the centroid in CIELAB and sRGB and the cluster's top names.
pub fn build_palette(corpus: &Corpus, model: &ClusterModel) -> Result<Palette, PaletteError> {
    assert_eq!(
        corpus.len(),
        model.assignments.len(),
        "model was fitted on a different corpus"
    );
    let mut member_counts = vec![0usize; model.k];
    for &a in &model.assignments {
        member_counts[a] += 1;
    }
    let mut entries = Vec::with_capacity(model.k);
    for (id, &member_count) in member_counts.iter().enumerate() {
        let mut names = name_frequencies(corpus, model, id)?;
        names.truncate(MAX_NAMES_PER_ENTRY);
        let centroid_lab = model.centroids[id];
        entries.push(PaletteEntry {
            id,
            centroid_lab,
            centroid_rgb: lab_to_rgb(centroid_lab),
            names,
            member_count,
        });
    }
    Ok(Palette {
        entries,
        provenance: Provenance {
            corpus_digest: corpus.digest().to_string(),
            seed: model.seed,
            k: model.k,
        },
    })
}

#[derive(Serialize, Deserialize)]
struct PaletteFile {
    version: u32,
    provenance: ProvenanceFile,
    entries: Vec<EntryFile>,
}

#[derive(Serialize, Deserialize)]
struct ProvenanceFile {
    corpus_digest: String,
    seed: u64,
    k: usize,
}

#[derive(Serialize, Deserialize)]
struct EntryFile {
    id: usize,
    lab: [f64; 3],
    rgb: [u8; 3],
    hex: String,
    names: Vec<NameProb>,
    member_count: usize,
}

#[derive(Serialize, Deserialize)]
struct NameProb {
    name: String,
    p: f64,
}

impl PaletteFile {
    fn from_palette(palette: &Palette) -> Self {
        PaletteFile {
            version: PALETTE_FORMAT_VERSION,
            provenance: ProvenanceFile {
                corpus_digest: palette.provenance.corpus_digest.clone(),
                seed: palette.provenance.seed,
                k: palette.provenance.k,
            },
            entries: palette
                .entries
                .iter()
                .map(|e| EntryFile {
                    id: e.id,
                    lab: [e.centroid_lab.l, e.centroid_lab.a, e.centroid_lab.b],
                    rgb: [e.centroid_rgb.r, e.centroid_rgb.g, e.centroid_rgb.b],
                    hex: e.hex().to_string(),
                    names: e
                        .names
                        .iter()
                        .map(|nf| NameProb {
                            name: nf.name.as_str().to_string(),
                            p: nf.probability,
                        })
                        .collect(),
                    member_count: e.member_count,
                })
                .collect(),
        }
    }
}

fn violation<T>(location: impl Into<String>, message: impl Into<String>) -> Result<T, PaletteError> {
    Err(PaletteError::SchemaViolation {
        location: location.into(),
        message: message.into(),
    })
}

fn validate_palette(file: PaletteFile) -> Result<Palette, PaletteError> {
    if file.version != PALETTE_FORMAT_VERSION {
        return violation(
            "version",
            format!(
                "unsupported version {}, expected {PALETTE_FORMAT_VERSION}",
                file.version
            ),
        );
    }
    let p = &file.provenance;
    if p.corpus_digest.len() != 64 || !p.corpus_digest.chars().all(|c| c.is_ascii_hexdigit()) {
        return violation("provenance.corpus_digest", "not a sha256 hex digest");
    }
    if p.k != file.entries.len() {
        return violation(
            "provenance.k",
            format!("k = {} but file has {} entries", p.k, file.entries.len()),
        );
    }
    if file.entries.is_empty() {
        return violation("entries", "palette has no entries");
    }

    let mut entries = Vec::with_capacity(file.entries.len());
    for (i, e) in file.entries.iter().enumerate() {
        let at = |field: &str| format!("entries[{i}].{field}");
        if e.id != i {
            return violation(at("id"), format!("expected dense id {i}, found {}", e.id));
        }
        let [l, a, b] = e.lab;
        if !(l.is_finite() && a.is_finite() && b.is_finite()) || !(0.0..=100.0).contains(&l) {
            return violation(at("lab"), format!("invalid coordinates [{l}, {a}, {b}]"));
        }
        let centroid_lab = LabPoint::new(l, a, b);
        let centroid_rgb = RgbColor::new(e.rgb[0], e.rgb[1], e.rgb[2]);
        if lab_to_rgb(centroid_lab) != centroid_rgb {
            return violation(at("rgb"), "rgb does not match the lab centroid");
        }
        let hex = match HexCode::parse(&e.hex) {
            Ok(hex) => hex,
            Err(err) => return violation(at("hex"), err.to_string()),
        };
        if hex != centroid_rgb.hex() {
            return violation(at("hex"), format!("hex {hex} does not encode rgb {centroid_rgb}"));
        }
        if e.names.is_empty() || e.names.len() > MAX_NAMES_PER_ENTRY {
            return violation(at("names"), format!("expected 1 to 5 names, found {}", e.names.len()));
        }
        if e.member_count == 0 {
            return violation(at("member_count"), "entry has no members");
        }
        let mut names = Vec::with_capacity(e.names.len());
        let mut seen = HashSet::new();
        let mut sum = 0.0;
        for (j, np) in e.names.iter().enumerate() {
            let at = |field: &str| format!("entries[{i}].names[{j}].{field}");
            let name = match normalize_name(&np.name) {
                Ok(name) if name.as_str() == np.name => name,
                _ => return violation(at("name"), format!("{:?} is not in canonical form", np.name)),
            };
            if !seen.insert(name.clone()) {
                return violation(at("name"), format!("duplicate name {:?}", np.name));
            }
            if !np.p.is_finite() || np.p <= 0.0 || np.p > 1.0 {
                return violation(at("p"), format!("probability {} out of (0, 1]", np.p));
            }
            if let Some(prev) = e.names.get(j.wrapping_sub(1)) {
                if np.p > prev.p || (np.p == prev.p && np.name <= prev.name) {
                    return violation(at("p"), "names are not sorted by (probability desc, name asc)");
                }
            }
            sum += np.p;
            names.push(NameFrequency {
                name,
                probability: np.p,
            });
        }
        if sum > 1.0 + 1e-9 {
            return violation(at("names"), format!("probabilities sum to {sum}"));
        }
        entries.push(PaletteEntry {
            id: e.id,
            centroid_lab,
            centroid_rgb,
            names,
            member_count: e.member_count,
        });
    }

    Ok(Palette {
        entries,
        provenance: Provenance {
            corpus_digest: file.provenance.corpus_digest,
            seed: file.provenance.seed,
            k: file.provenance.k,
        },
    })
}

/// Writes the palette as pretty-printed JSON, atomically.
pub fn save_palette(palette: &Palette, path: &Path) -> Result<(), PaletteError> {
    let file = PaletteFile::from_palette(palette);
    let mut bytes = serde_json::to_vec_pretty(&file).unwrap();
    bytes.push(b'\n');
    write_atomic(path, &bytes).map_err(|e| PaletteError::FileUnwritable {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Reads a palette file, validating the schema and every invariant the
/// builder guarantees. `save_palette` followed by `load_palette` returns
/// the identical palette.
pub fn load_palette(path: &Path) -> Result<Palette, PaletteError> {
    let bytes = std::fs::read(path).map_err(|e| PaletteError::FileUnreadable {
        path: path.to_path_buf(),
        source: e,
    })?;
    let file: PaletteFile = serde_json::from_slice(&bytes).map_err(|e| PaletteError::SchemaViolation {
        location: "$".to_string(),
        message: e.to_string(),
    })?;
    validate_palette(file)
}

/// Sort order for the swatch sheet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SwatchSort {
    /// By HSV hue angle, then id.
    #[default]
    Hue,
    /// By entry id.
    Id,
}

/// HSV hue in degrees; gray counts as 0.
fn hue_degrees(c: RgbColor) -> f64 {
    let r = c.r as f64 / 255.0;
    let g = c.g as f64 / 255.0;
    let b = c.b as f64 / 255.0;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    if delta == 0.0 {
        return 0.0;
    }
    let h = if max == r {
        ((g - b) / delta).rem_euclid(6.0)
    } else if max == g {
        (b - r) / delta + 2.0
    } else {
        (r - g) / delta + 4.0
    };
    60.0 * h
}

/// Renders the palette as an SVG sheet of labeled swatches.
pub fn export_swatches(palette: &Palette, path: &Path, sort: SwatchSort) -> Result<(), PaletteError> {
    const CELL_W: f64 = 120.0;
    const CELL_H: f64 = 84.0;
    let mut order: Vec<&PaletteEntry> = palette.entries.iter().collect();
    if sort == SwatchSort::Hue {
        order.sort_by(|a, b| {
            hue_degrees(a.centroid_rgb)
                .partial_cmp(&hue_degrees(b.centroid_rgb))
                .unwrap()
                .then(a.id.cmp(&b.id))
        });
    }
    let cols = (order.len() as f64).sqrt().ceil() as usize;
    let rows = order.len().div_ceil(cols);
    let width = cols as f64 * CELL_W;
    let height = rows as f64 * CELL_H;

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\">\n"
    );
    for (i, entry) in order.iter().enumerate() {
        let x = (i % cols) as f64 * CELL_W;
        let y = (i / cols) as f64 * CELL_H;
        let hex = entry.hex();
        // Dark text on light swatches, light text on dark ones.
        let luma = 0.2126 * entry.centroid_rgb.r as f64
            + 0.7152 * entry.centroid_rgb.g as f64
            + 0.0722 * entry.centroid_rgb.b as f64;
        let text = if luma < 128.0 { "#ffffff" } else { "#000000" };
        svg.push_str(&format!(
            "<rect x=\"{x}\" y=\"{y}\" width=\"{CELL_W}\" height=\"{CELL_H}\" fill=\"{hex}\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" fill=\"{text}\">{}</text>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\" fill=\"{text}\">{} · {}</text>\n",
            x + 6.0,
            y + CELL_H - 22.0,
            entry.top_name(),
            x + 6.0,
            y + CELL_H - 8.0,
            hex,
            entry.id,
        ));
    }
    svg.push_str("</svg>\n");
    write_atomic(path, svg.as_bytes()).map_err(|e| PaletteError::FileUnwritable {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Writes the centroids as an `id,r,g,b,top_name` CSV for plotting the
/// palette inside the RGB cube.
pub fn export_rgb_cube_csv(palette: &Palette, path: &Path) -> Result<(), PaletteError> {
    let mut out = String::from("id,r,g,b,top_name\n");
    for e in &palette.entries {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            e.id, e.centroid_rgb.r, e.centroid_rgb.g, e.centroid_rgb.b, e.top_name()
        ));
    }
    write_atomic(path, out.as_bytes()).map_err(|e| PaletteError::FileUnwritable {
        path: path.to_path_buf(),
        source: e,
    })
}
