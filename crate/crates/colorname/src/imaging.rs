//! Image tagging and retrieval: dominant-color extraction, palette-based
//! tags, and a persistent image index.

use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::RgbColor;
use crate::lexicon::normalize_name;
use crate::palette::{NameFrequency, Palette};
use crate::query::{lookup_by_name, name_color, QueryError};
use crate::util::write_atomic;

/// Errors produced by image tagging and indexing.
#[derive(Debug, Error)]
pub enum ImagingError {
    #[error("image has no pixels to sample")]
    EmptyImage,
    #[error("cannot decode image {path}: {message}")]
    UndecodableImage { path: PathBuf, message: String },
    #[error("no decodable images found in {dir}")]
    NoImagesFound { dir: PathBuf },
    #[error(
        "index was built against palette {index_digest} but the supplied palette is {palette_digest}"
    )]
    PaletteMismatch {
        index_digest: String,
        palette_digest: String,
    },
    #[error("cannot read {path}: {source}")]
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
    #[error("index schema violation at {location}: {message}")]
    SchemaViolation { location: String, message: String },
    #[error(transparent)]
    Query(#[from] QueryError),
}

/// Version tag written into index files.
pub const INDEX_FORMAT_VERSION: u32 = 1;
/// Default pixel subsampling stride.
pub const DEFAULT_STRIDE: usize = 10;

/// Sampling options for [`tag_image`] and [`build_index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TagOptions {
    /// Keep every `stride`-th pixel of the flattened image.
    pub stride: usize,
    /// Drop near-white pixels (all channels > 250) before quantization;
    /// useful for product shots on white backdrops. Off by default.
    pub filter_white: bool,
}

impl Default for TagOptions {
    fn default() -> Self {
        TagOptions {
            stride: DEFAULT_STRIDE,
            filter_white: false,
        }
    }
}

/// A dominant color with the fraction of sampled pixels it covers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominantColor {
    pub rgb: RgbColor,
    /// Fraction of sampled pixels in this color's quantization cell; the
    /// populations of one extraction sum to 1.
    pub population: f64,
}

/// Extracts the `n` most dominant colors by median-cut quantization.
///
/// The color histogram is split `n - 1` times; each split halves the most
/// populated box along its longest channel axis at the median pixel. Box
/// averages become the dominant colors, ordered by descending population
/// (ties by ascending RGB). Returns fewer than `n` colors when the image
/// has fewer distinct values. Deterministic for a given pixel multiset.
pub fn dominant_colors(
    pixels: &[RgbColor],
    n: usize,
) -> Result<Vec<DominantColor>, ImagingError> {
    assert!(n > 0, "n must be positive");
    if pixels.is_empty() {
        return Err(ImagingError::EmptyImage);
    }
    // Histogram in sorted color order, so box contents are deterministic.
    let mut hist: std::collections::HashMap<RgbColor, usize> = std::collections::HashMap::new();
    for &p in pixels {
        *hist.entry(p).or_insert(0) += 1;
    }
    let mut colors: Vec<(RgbColor, usize)> = hist.into_iter().collect();
    colors.sort();

    #[derive(Clone, Copy)]
    struct ColorBox {
        lo: usize,
        hi: usize,
        count: usize,
    }
    let total: usize = colors.iter().map(|c| c.1).sum();
    let mut boxes = vec![ColorBox {
        lo: 0,
        hi: colors.len(),
        count: total,
    }];

    while boxes.len() < n {
        // Split the most populated box that still has two distinct colors.
        let candidate = boxes
            .iter()
            .enumerate()
            .filter(|(_, b)| b.hi - b.lo >= 2)
            .max_by(|(i, a), (j, b)| a.count.cmp(&b.count).then(j.cmp(i)))
            .map(|(i, _)| i);
        let Some(bi) = candidate else { break };
        let bx = boxes[bi];
        let slice = &mut colors[bx.lo..bx.hi];

        // Longest channel axis; ties prefer r, then g, then b.
        let mut min = [u8::MAX; 3];
        let mut max = [u8::MIN; 3];
        for (c, _) in slice.iter() {
            for (ch, v) in [c.r, c.g, c.b].into_iter().enumerate() {
                min[ch] = min[ch].min(v);
                max[ch] = max[ch].max(v);
            }
        }
        let ranges = [max[0] - min[0], max[1] - min[1], max[2] - min[2]];
        let axis = (0..3).max_by_key(|&ch| (ranges[ch], 2 - ch)).unwrap();
        slice.sort_by_key(|(c, _)| {
            let key = [c.r, c.g, c.b][axis];
            (key, *c)
        });

        // Median pixel split, clamped so both halves stay non-empty.
        let half = bx.count / 2;
        let mut acc = 0usize;
        let mut split = bx.lo + 1;
        for (i, (_, cnt)) in slice.iter().enumerate() {
            acc += cnt;
            if acc >= half {
                split = bx.lo + i + 1;
                break;
            }
        }
        let split = split.clamp(bx.lo + 1, bx.hi - 1);
        let left_count: usize = colors[bx.lo..split].iter().map(|c| c.1).sum();
        boxes[bi] = ColorBox {
            lo: bx.lo,
            hi: split,
            count: left_count,
        };
        boxes.push(ColorBox {
            lo: split,
            hi: bx.hi,
            count: bx.count - left_count,
        });
    }

    let mut dominant: Vec<DominantColor> = boxes
        .iter()
        .map(|b| {
            let mut sum = [0u64; 3];
            for (c, cnt) in &colors[b.lo..b.hi] {
                sum[0] += c.r as u64 * *cnt as u64;
                sum[1] += c.g as u64 * *cnt as u64;
                sum[2] += c.b as u64 * *cnt as u64;
            }
            let m = b.count as f64;
            let channel = |s: u64| (s as f64 / m).round() as u8;
            DominantColor {
                rgb: RgbColor::new(channel(sum[0]), channel(sum[1]), channel(sum[2])),
                population: b.count as f64 / total as f64,
            }
        })
        .collect();
    dominant.sort_by(|a, b| {
        b.population
            .partial_cmp(&a.population)
            .unwrap()
            .then_with(|| a.rgb.cmp(&b.rgb))
    });
    Ok(dominant)
}

/// A tagged image: its dominant color resolved against a palette.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageTag {
    /// Path or file name identifying the image.
    pub image_id: String,
    pub dominant: DominantColor,
    /// Nearest palette entry to the dominant color.
    pub entry_id: usize,
    /// That entry's stored names.
    pub names: Vec<NameFrequency>,
    /// CIEDE2000 from the dominant color to the entry.
    pub distance: f64,
}

fn sample_pixels(image: &image::RgbImage, opts: TagOptions) -> Vec<RgbColor> {
    let stride = opts.stride.max(1);
    let keep = |p: &image::Rgb<u8>| {
        !(opts.filter_white && p.0[0] > 250 && p.0[1] > 250 && p.0[2] > 250)
    };
    let sampled: Vec<RgbColor> = image
        .pixels()
        .step_by(stride)
        .filter(|p| keep(p))
        .map(|p| RgbColor::new(p.0[0], p.0[1], p.0[2]))
        .collect();
    if !sampled.is_empty() {
        return sampled;
    }
    // An all-white image with the filter on falls back to unfiltered.
    image
        .pixels()
        .step_by(stride)
        .map(|p| RgbColor::new(p.0[0], p.0[1], p.0[2]))
        .collect()
}

/// Decodes an image and extracts its `n` dominant colors with the given
/// sampling options.
pub fn image_dominant_colors(
    path: &Path,
    n: usize,
    opts: TagOptions,
) -> Result<Vec<DominantColor>, ImagingError> {
    let img = image::open(path).map_err(|e| ImagingError::UndecodableImage {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let pixels = sample_pixels(&img.to_rgb8(), opts);
    dominant_colors(&pixels, n)
}

/// Tags one image: subsample pixels, extract the dominant color, and name
/// it against the palette.
pub fn tag_image(
    path: &Path,
    palette: &Palette,
    opts: TagOptions,
) -> Result<ImageTag, ImagingError> {
    let dominant = image_dominant_colors(path, 1, opts)?[0];
    let named = name_color(palette, dominant.rgb)?;
    Ok(ImageTag {
        image_id: path.to_string_lossy().into_owned(),
        dominant,
        entry_id: named.entry_id,
        names: named.names,
        distance: named.distance,
    })
}

/// An index of tagged images, bound to the palette it was built with.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorIndex {
    /// Digest of the palette the tags refer to.
    pub palette_digest: String,
    /// One tag per indexed image, sorted by image id.
    pub tags: Vec<ImageTag>,
}

const IMAGE_EXTENSIONS: [&str; 3] = ["png", "jpg", "jpeg"];

/// Tags every decodable image in `dir` (non-recursive, by extension) and
/// binds the result to `palette`. Images that fail to decode are skipped
/// with a warning. File order is lexicographic, so rebuilding an unchanged
/// directory yields an identical index.
pub fn build_index(
    dir: &Path,
    palette: &Palette,
    opts: TagOptions,
) -> Result<ColorIndex, ImagingError> {
    let entries = std::fs::read_dir(dir).map_err(|e| ImagingError::FileUnreadable {
        path: dir.to_path_buf(),
        source: e,
    })?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .map(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
                .unwrap_or(false)
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(ImagingError::NoImagesFound {
            dir: dir.to_path_buf(),
        });
    }

    let tags: Vec<Option<ImageTag>> = files
        .par_iter()
        .map(|path| match tag_image(path, palette, opts) {
            Ok(mut tag) => {
                tag.image_id = path
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_else(|| tag.image_id.clone());
                Ok(Some(tag))
            }
            Err(ImagingError::UndecodableImage { path, message }) => {
                log::warn!("skipping {}: {message}", path.display());
                Ok(None)
            }
            Err(ImagingError::EmptyImage) => {
                log::warn!("skipping {}: image has no pixels", path.display());
                Ok(None)
            }
            Err(e) => Err(e),
        })
        .collect::<Result<_, ImagingError>>()?;
    let tags: Vec<ImageTag> = tags.into_iter().flatten().collect();
    if tags.is_empty() {
        return Err(ImagingError::NoImagesFound {
            dir: dir.to_path_buf(),
        });
    }
    Ok(ColorIndex {
        palette_digest: palette.digest(),
        tags,
    })
}

#[derive(Serialize, Deserialize)]
struct IndexFile {
    version: u32,
    palette_digest: String,
    tags: Vec<TagFile>,
}

#[derive(Serialize, Deserialize)]
struct TagFile {
    image: String,
    rgb: [u8; 3],
    entry_id: usize,
    names: Vec<NameProbFile>,
    de00: f64,
}

#[derive(Serialize, Deserialize)]
struct NameProbFile {
    name: String,
    p: f64,
}

/// Writes the index as pretty-printed JSON, atomically.
pub fn save_index(index: &ColorIndex, path: &Path) -> Result<(), ImagingError> {
    let file = IndexFile {
        version: INDEX_FORMAT_VERSION,
        palette_digest: index.palette_digest.clone(),
        tags: index
            .tags
            .iter()
            .map(|t| TagFile {
                image: t.image_id.clone(),
                rgb: [t.dominant.rgb.r, t.dominant.rgb.g, t.dominant.rgb.b],
                entry_id: t.entry_id,
                names: t
                    .names
                    .iter()
                    .map(|nf| NameProbFile {
                        name: nf.name.as_str().to_string(),
                        p: nf.probability,
                    })
                    .collect(),
                de00: t.distance,
            })
            .collect(),
    };
    let mut bytes = serde_json::to_vec_pretty(&file).unwrap();
    bytes.push(b'\n');
    write_atomic(path, &bytes).map_err(|e| ImagingError::FileUnwritable {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Reads an index file back. Tags regain population 1.0: the index stores
/// single-dominant-color tags, whose one quantization cell covers every
/// sampled pixel.
pub fn load_index(path: &Path) -> Result<ColorIndex, ImagingError> {
    let bytes = std::fs::read(path).map_err(|e| ImagingError::FileUnreadable {
        path: path.to_path_buf(),
        source: e,
    })?;
    let file: IndexFile =
        serde_json::from_slice(&bytes).map_err(|e| ImagingError::SchemaViolation {
            location: "$".to_string(),
            message: e.to_string(),
        })?;
    if file.version != INDEX_FORMAT_VERSION {
        return Err(ImagingError::SchemaViolation {
            location: "version".to_string(),
            message: format!(
                "unsupported version {}, expected {INDEX_FORMAT_VERSION}",
                file.version
            ),
        });
    }
    let digest_ok = file.palette_digest.len() == 64
        && file.palette_digest.chars().all(|c| c.is_ascii_hexdigit());
    if !digest_ok {
        return Err(ImagingError::SchemaViolation {
            location: "palette_digest".to_string(),
            message: "not a sha256 hex digest".to_string(),
        });
    }
    let mut tags = Vec::with_capacity(file.tags.len());
    for (i, t) in file.tags.into_iter().enumerate() {
        let at = |field: &str| format!("tags[{i}].{field}");
        if t.image.is_empty() {
            return Err(ImagingError::SchemaViolation {
                location: at("image"),
                message: "empty image id".to_string(),
            });
        }
        if !t.de00.is_finite() || t.de00 < 0.0 {
            return Err(ImagingError::SchemaViolation {
                location: at("de00"),
                message: format!("invalid distance {}", t.de00),
            });
        }
        let mut names = Vec::with_capacity(t.names.len());
        for (j, np) in t.names.into_iter().enumerate() {
            let name = match normalize_name(&np.name) {
                Ok(name) if name.as_str() == np.name => name,
                _ => {
                    return Err(ImagingError::SchemaViolation {
                        location: format!("tags[{i}].names[{j}].name"),
                        message: format!("{:?} is not in canonical form", np.name),
                    })
                }
            };
            names.push(NameFrequency {
                name,
                probability: np.p,
            });
        }
        tags.push(ImageTag {
            image_id: t.image,
            dominant: DominantColor {
                rgb: RgbColor::new(t.rgb[0], t.rgb[1], t.rgb[2]),
                population: 1.0,
            },
            entry_id: t.entry_id,
            names,
            distance: t.de00,
        });
    }
    Ok(ColorIndex {
        palette_digest: file.palette_digest,
        tags,
    })
}

/// One retrieval hit: an indexed image whose palette entry matched the
/// query name.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchHit {
    pub image_id: String,
    pub entry_id: usize,
    /// Levenshtein distance of the best name match for this entry.
    pub name_distance: usize,
    /// The tag's stored CIEDE2000 to its entry.
    pub de00: f64,
}

/// Finds indexed images whose palette entry carries a name matching
/// `query` (exactly first, then within `max_distance` edits). Refuses to
/// search with a palette other than the one the index was built against.
/// Hits sort by (name distance, de00, image id).
pub fn search_by_name(
    index: &ColorIndex,
    palette: &Palette,
    query: &str,
    max_distance: usize,
) -> Result<Vec<SearchHit>, ImagingError> {
    let palette_digest = palette.digest();
    if index.palette_digest != palette_digest {
        return Err(ImagingError::PaletteMismatch {
            index_digest: index.palette_digest.clone(),
            palette_digest,
        });
    }
    let matches = lookup_by_name(palette, query, max_distance)?;
    let mut best_per_entry: std::collections::HashMap<usize, usize> =
        std::collections::HashMap::new();
    for m in matches {
        let d = best_per_entry.entry(m.entry_id).or_insert(usize::MAX);
        *d = (*d).min(m.distance);
    }
    let mut hits: Vec<SearchHit> = index
        .tags
        .iter()
        .filter_map(|t| {
            best_per_entry.get(&t.entry_id).map(|&d| SearchHit {
                image_id: t.image_id.clone(),
                entry_id: t.entry_id,
                name_distance: d,
                de00: t.distance,
            })
        })
        .collect();
    hits.sort_by(|a, b| {
        a.name_distance
            .cmp(&b.name_distance)
            .then_with(|| a.de00.partial_cmp(&b.de00).unwrap())
            .then_with(|| a.image_id.cmp(&b.image_id))
    });
    Ok(hits)
}
