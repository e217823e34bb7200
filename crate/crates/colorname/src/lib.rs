//! Data-driven standardized color naming.
//!
//! The pipeline: ingest a color-name corpus (CSV), cluster the colors in
//! CIELAB space with k-means++, pick the cluster count at the knee of the
//! mean intra-cluster CIEDE2000 curve, and attach the most frequent corpus
//! names to each centroid. The resulting palette names arbitrary colors,
//! answers fuzzy name lookups, and tags or retrieves images by their
//! dominant color.
//!
//! ```
//! use colorname::color::{parse_hex, rgb_to_lab};
//! use colorname::delta_e::ciede2000;
//!
//! let a = rgb_to_lab(parse_hex("#f2f0eb").unwrap());
//! let b = rgb_to_lab(parse_hex("#fffafa").unwrap());
//! assert!(ciede2000(a, b) < 5.0);
//! ```

pub mod clustering;
pub mod color;
pub mod corpus;
pub mod delta_e;
pub mod imaging;
pub mod lexicon;
pub mod palette;
pub mod query;

mod util;

pub use clustering::{detect_knee, elbow_sweep, kmeans, ClusterModel, ElbowCurve};
pub use color::{lab_to_rgb, parse_hex, rgb_to_lab, HexCode, LabPoint, RgbColor};
pub use corpus::{load_corpus, ColorEntry, Corpus};
pub use delta_e::ciede2000;
pub use lexicon::{normalize_name, segment_name, NormalizedName, Vocabulary};
pub use palette::{build_palette, load_palette, save_palette, Palette, PaletteEntry};
pub use query::{lookup_by_name, name_color, nearest_entry};
