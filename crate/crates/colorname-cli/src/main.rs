//! Command-line front end for the colorname pipeline: corpus ingestion,
//! elbow-sweep clustering, palette construction, color naming, and image
//! tagging/retrieval.
//!
//! Every subcommand prints the seed and content digests it ran with, so a
//! run can be reproduced from its output alone. Stage timings are logged to
//! stderr; machine-readable results go to stdout. Failures print one
//! `error code=<label>: <message>` line and exit 2 (usage), 3 (data defect),
//! or 4 (I/O).

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use colorname::clustering::{
    detect_knee, elbow_sweep, kmeans, mean_intra_de, ClusteringError, FINAL_RESTARTS,
    SWEEP_RESTARTS,
};
use colorname::color::{parse_hex, RgbColor};
use colorname::corpus::{load_corpus, Corpus, CorpusError, RowDefect};
use colorname::imaging::{
    build_index, image_dominant_colors, load_index, save_index, search_by_name, tag_image,
    ImagingError, TagOptions, DEFAULT_STRIDE,
};
use colorname::palette::{
    build_palette, export_rgb_cube_csv, export_swatches, load_palette, save_palette, Palette,
    PaletteError, SwatchSort,
};
use colorname::query::{
    lookup_by_name, name_color, MatchKind, QueryError, DEFAULT_MAX_DISTANCE,
};

#[derive(Parser)]
#[command(
    name = "colorname",
    version,
    about = "Build standardized color palettes from color-name corpora, \
             then name colors and tag images with them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a corpus file and print its statistics
    Ingest(IngestArgs),
    /// Sweep cluster counts, write the elbow curve, and report the knee k*
    Cluster(ClusterArgs),
    /// Cluster at a chosen k and save the resulting palette
    Palette(PaletteArgs),
    /// Name a color (hex or R,G,B) against a saved palette
    Name(NameArgs),
    /// Find palette entries whose names match a query, fuzzily if needed
    Lookup(LookupArgs),
    /// Tag one image with the palette names of its dominant color
    Tag(TagArgs),
    /// Tag every image in a directory and save the index
    Index(IndexArgs),
    /// Search an index for images whose tag matches a name
    Search(SearchArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Corpus CSV with header name,hex,rgb,source
    #[arg(long)]
    corpus: PathBuf,
    /// Abort on the first defective row instead of skipping it
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct ClusterArgs {
    /// Corpus CSV with header name,hex,rgb,source
    #[arg(long)]
    corpus: PathBuf,
    /// Abort on the first defective corpus row instead of skipping it
    #[arg(long)]
    strict: bool,
    /// RNG seed for the whole sweep
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Smallest cluster count to try
    #[arg(long, default_value_t = 50)]
    k_min: usize,
    /// Largest cluster count to try
    #[arg(long, default_value_t = 990)]
    k_max: usize,
    /// Step between successive cluster counts
    #[arg(long, default_value_t = 10)]
    k_step: usize,
    /// Independent k-means restarts per sweep point
    #[arg(long, default_value_t = SWEEP_RESTARTS)]
    restarts: usize,
    /// Write the elbow curve as CSV to this path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the elbow curve as an SVG plot to this path
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct PaletteArgs {
    /// Corpus CSV with header name,hex,rgb,source
    #[arg(long)]
    corpus: PathBuf,
    /// Abort on the first defective corpus row instead of skipping it
    #[arg(long)]
    strict: bool,
    /// RNG seed for clustering
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Cluster count, typically the k* reported by `cluster`
    #[arg(long)]
    k: usize,
    /// Independent k-means restarts
    #[arg(long, default_value_t = FINAL_RESTARTS)]
    restarts: usize,
    /// Where to write the palette JSON
    #[arg(long)]
    out: PathBuf,
    /// Also export a labeled swatch sheet SVG to this path
    #[arg(long)]
    swatches: Option<PathBuf>,
    /// Swatch ordering in the sheet
    #[arg(long, value_enum, default_value_t = SortArg::Hue)]
    sort: SortArg,
    /// Also export the centroids as an RGB-cube point list CSV
    #[arg(long)]
    cube: Option<PathBuf>,
}

#[derive(Args)]
struct NameArgs {
    /// Palette JSON produced by `palette`
    #[arg(long)]
    palette: PathBuf,
    /// Color to name: "#rrggbb", "rrggbb", or "R,G,B"
    color: String,
}

#[derive(Args)]
struct LookupArgs {
    /// Palette JSON produced by `palette`
    #[arg(long)]
    palette: PathBuf,
    /// Name to search for; normalized like corpus names
    query: String,
    /// Largest Levenshtein distance a fuzzy hit may have
    #[arg(long, default_value_t = DEFAULT_MAX_DISTANCE)]
    max_distance: usize,
}

#[derive(Args)]
struct TagArgs {
    /// Palette JSON produced by `palette`
    #[arg(long)]
    palette: PathBuf,
    /// Image file to tag (PNG or JPEG)
    image: PathBuf,
    /// Sample every n-th pixel
    #[arg(long, default_value_t = DEFAULT_STRIDE)]
    stride: usize,
    /// Ignore near-white pixels (all channels > 250) when sampling
    #[arg(long)]
    filter_white: bool,
    /// Also report this many dominant colors, not just the tag's single one
    #[arg(long, default_value_t = 1)]
    colors: usize,
}

#[derive(Args)]
struct IndexArgs {
    /// Palette JSON produced by `palette`
    #[arg(long)]
    palette: PathBuf,
    /// Directory of images to tag (non-recursive, PNG/JPEG)
    images: PathBuf,
    /// Where to write the index JSON
    #[arg(long)]
    out: PathBuf,
    /// Sample every n-th pixel
    #[arg(long, default_value_t = DEFAULT_STRIDE)]
    stride: usize,
    /// Ignore near-white pixels (all channels > 250) when sampling
    #[arg(long)]
    filter_white: bool,
}

#[derive(Args)]
struct SearchArgs {
    /// Palette JSON the index was built against
    #[arg(long)]
    palette: PathBuf,
    /// Index JSON produced by `index`
    #[arg(long)]
    index: PathBuf,
    /// Name to search for; normalized like corpus names
    query: String,
    /// Largest Levenshtein distance a fuzzy hit may have
    #[arg(long, default_value_t = DEFAULT_MAX_DISTANCE)]
    max_distance: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum SortArg {
    /// Order swatches around the hue wheel
    Hue,
    /// Order swatches by entry id
    Id,
}

impl From<SortArg> for SwatchSort {
    fn from(s: SortArg) -> Self {
        match s {
            SortArg::Hue => SwatchSort::Hue,
            SortArg::Id => SwatchSort::Id,
        }
    }
}

/// Every failure the CLI can exit with, tagged for the 2/3/4 exit classes.
enum AppError {
    /// Bad arguments discovered after clap parsing (exit 2).
    Usage { label: &'static str, message: String },
    Corpus(CorpusError),
    Clustering(ClusteringError),
    Palette(PaletteError),
    Query(QueryError),
    Imaging(ImagingError),
    /// Direct file-system failures on CLI-owned outputs (exit 4).
    Io { path: PathBuf, source: std::io::Error },
}

const EXIT_USAGE: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_IO: u8 = 4;

impl AppError {
    /// Machine-readable label and exit code for this failure.
    fn classify(&self) -> (&'static str, u8) {
        match self {
            AppError::Usage { label, .. } => (label, EXIT_USAGE),
            AppError::Corpus(e) => match e {
                CorpusError::FileUnreadable { .. } => ("corpus_unreadable", EXIT_IO),
                CorpusError::MalformedRow { .. } => ("malformed_row", EXIT_DATA),
                CorpusError::EmptyCorpus { .. } => ("empty_corpus", EXIT_DATA),
            },
            AppError::Clustering(e) => match e {
                ClusteringError::TooFewDistinctPoints { .. } => {
                    ("too_few_distinct_points", EXIT_DATA)
                }
                ClusteringError::NoKneeFound => ("no_knee_found", EXIT_DATA),
            },
            AppError::Palette(e) => match e {
                PaletteError::EmptyCluster(_) => ("empty_cluster", EXIT_DATA),
                PaletteError::FileUnreadable { .. } => ("palette_unreadable", EXIT_IO),
                PaletteError::FileUnwritable { .. } => ("palette_unwritable", EXIT_IO),
                PaletteError::SchemaViolation { .. } => ("palette_schema_violation", EXIT_DATA),
            },
            AppError::Query(e) => match e {
                QueryError::EmptyPalette => ("empty_palette", EXIT_DATA),
                QueryError::Lexicon(_) => ("bad_query", EXIT_USAGE),
            },
            AppError::Imaging(e) => match e {
                ImagingError::EmptyImage => ("empty_image", EXIT_DATA),
                ImagingError::UndecodableImage { .. } => ("undecodable_image", EXIT_IO),
                ImagingError::NoImagesFound { .. } => ("no_images_found", EXIT_IO),
                ImagingError::PaletteMismatch { .. } => ("palette_mismatch", EXIT_DATA),
                ImagingError::FileUnreadable { .. } => ("index_unreadable", EXIT_IO),
                ImagingError::FileUnwritable { .. } => ("index_unwritable", EXIT_IO),
                ImagingError::SchemaViolation { .. } => ("index_schema_violation", EXIT_DATA),
                ImagingError::Query(QueryError::EmptyPalette) => ("empty_palette", EXIT_DATA),
                ImagingError::Query(QueryError::Lexicon(_)) => ("bad_query", EXIT_USAGE),
            },
            AppError::Io { .. } => ("file_unwritable", EXIT_IO),
        }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Usage { message, .. } => f.write_str(message),
            AppError::Corpus(e) => e.fmt(f),
            AppError::Clustering(e) => e.fmt(f),
            AppError::Palette(e) => e.fmt(f),
            AppError::Query(e) => e.fmt(f),
            AppError::Imaging(e) => e.fmt(f),
            AppError::Io { path, source } => {
                write!(f, "cannot write {}: {}", path.display(), source)
            }
        }
    }
}

impl From<CorpusError> for AppError {
    fn from(e: CorpusError) -> Self {
        AppError::Corpus(e)
    }
}

impl From<ClusteringError> for AppError {
    fn from(e: ClusteringError) -> Self {
        AppError::Clustering(e)
    }
}

impl From<PaletteError> for AppError {
    fn from(e: PaletteError) -> Self {
        AppError::Palette(e)
    }
}

impl From<QueryError> for AppError {
    fn from(e: QueryError) -> Self {
        AppError::Query(e)
    }
}

impl From<ImagingError> for AppError {
    fn from(e: ImagingError) -> Self {
        AppError::Imaging(e)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .format_target(false)
        .init();
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (label, code) = e.classify();
            eprintln!("error code={label}: {e}");
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> Result<(), AppError> {
    match command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Cluster(args) => cmd_cluster(args),
        Command::Palette(args) => cmd_palette(args),
        Command::Name(args) => cmd_name(args),
        Command::Lookup(args) => cmd_lookup(args),
        Command::Tag(args) => cmd_tag(args),
        Command::Index(args) => cmd_index(args),
        Command::Search(args) => cmd_search(args),
    }
}

/// Loads and logs a corpus; shared by ingest, cluster, and palette.
fn load_corpus_stage(path: &Path, strict: bool) -> Result<(Corpus, Vec<RowDefect>), AppError> {
    let t = Instant::now();
    let (corpus, defects) = load_corpus(path, strict)?;
    log::info!(
        "stage=ingest ms={} entries={} defects={}",
        t.elapsed().as_millis(),
        corpus.len(),
        defects.len()
    );
    Ok((corpus, defects))
}

/// Loads and logs a palette; shared by every palette-consuming subcommand.
fn load_palette_stage(path: &Path) -> Result<Palette, AppError> {
    let t = Instant::now();
    let palette = load_palette(path)?;
    log::info!(
        "stage=load_palette ms={} entries={}",
        t.elapsed().as_millis(),
        palette.len()
    );
    Ok(palette)
}

/// Prints the provenance line every palette-consuming run starts with.
fn print_provenance(palette: &Palette) {
    println!(
        "palette_digest={} seed={} k={}",
        palette.digest(),
        palette.provenance.seed,
        palette.provenance.k
    );
}

/// Parses a color argument: "#rrggbb", "rrggbb", or "R,G,B" with decimal
/// components.
fn parse_color_arg(raw: &str) -> Result<RgbColor, AppError> {
    let s = raw.trim();
    if s.contains(',') {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let component = |p: &str| {
            p.parse::<u8>().map_err(|_| AppError::Usage {
                label: "bad_color",
                message: format!("malformed color {raw:?}: expected R,G,B with values 0-255"),
            })
        };
        if parts.len() != 3 {
            return Err(AppError::Usage {
                label: "bad_color",
                message: format!("malformed color {raw:?}: expected exactly three components"),
            });
        }
        return Ok(RgbColor::new(
            component(parts[0])?,
            component(parts[1])?,
            component(parts[2])?,
        ));
    }
    parse_hex(s).map_err(|e| AppError::Usage {
        label: "bad_color",
        message: e.to_string(),
    })
}

fn cmd_ingest(args: IngestArgs) -> Result<(), AppError> {
    let (corpus, defects) = load_corpus_stage(&args.corpus, args.strict)?;
    let stats = corpus.stats();
    println!("corpus_digest={}", corpus.digest());
    println!(
        "entries={} distinct_names={} distinct_rgb={} sources={}",
        stats.entries,
        stats.distinct_names,
        stats.distinct_rgb,
        stats.source_counts.len()
    );
    for (source, count) in &stats.source_counts {
        println!("source {source}={count}");
    }
    println!("defects={}", defects.len());
    for d in &defects {
        println!("defect line={}: {}", d.line, d.message);
    }
    Ok(())
}

fn cmd_cluster(args: ClusterArgs) -> Result<(), AppError> {
    if args.k_min == 0 || args.k_step == 0 || args.k_min > args.k_max {
        return Err(AppError::Usage {
            label: "bad_k_range",
            message: format!(
                "k range {}..={} step {} is empty or starts at zero",
                args.k_min, args.k_max, args.k_step
            ),
        });
    }
    if args.restarts == 0 {
        return Err(AppError::Usage {
            label: "bad_restarts",
            message: "restarts must be at least 1".into(),
        });
    }
    let (corpus, _) = load_corpus_stage(&args.corpus, args.strict)?;
    println!("seed={} corpus_digest={}", args.seed, corpus.digest());

    let points = corpus.lab_matrix();
    let ks: Vec<usize> = (args.k_min..=args.k_max).step_by(args.k_step).collect();
    let t = Instant::now();
    let curve = elbow_sweep(&points, &ks, args.seed, args.restarts)?;
    log::info!(
        "stage=sweep ms={} points={} ks={}",
        t.elapsed().as_millis(),
        points.len(),
        ks.len()
    );

    if let Some(csv) = &args.out {
        curve.write_csv(csv).map_err(|source| AppError::Io {
            path: csv.clone(),
            source,
        })?;
    }
    let knee = detect_knee(&curve);
    if let Some(svg) = &args.plot {
        curve
            .write_svg(svg, knee.as_ref().ok().copied())
            .map_err(|source| AppError::Io {
                path: svg.clone(),
                source,
            })?;
    }
    if let Some(csv) = &args.out {
        println!("elbow_csv={}", csv.display());
    }
    if let Some(svg) = &args.plot {
        println!("elbow_svg={}", svg.display());
    }
    let k_star = knee?;
    let score = curve.scores[curve.ks.iter().position(|&k| k == k_star).unwrap()];
    println!("k_star={k_star} score={score:.4}");

    let t = Instant::now();
    let model = kmeans(&points, k_star, args.seed, FINAL_RESTARTS)?;
    log::info!(
        "stage=kmeans ms={} k={} iterations={}",
        t.elapsed().as_millis(),
        k_star,
        model.iterations
    );
    println!(
        "final_objective={:.6} final_iterations={} final_mean_de00={:.4}",
        model.objective,
        model.iterations,
        mean_intra_de(&points, &model)
    );
    Ok(())
}

fn cmd_palette(args: PaletteArgs) -> Result<(), AppError> {
    if args.k == 0 {
        return Err(AppError::Usage {
            label: "bad_k",
            message: "k must be at least 1".into(),
        });
    }
    if args.restarts == 0 {
        return Err(AppError::Usage {
            label: "bad_restarts",
            message: "restarts must be at least 1".into(),
        });
    }
    let (corpus, _) = load_corpus_stage(&args.corpus, args.strict)?;
    println!("seed={} corpus_digest={}", args.seed, corpus.digest());

    let points = corpus.lab_matrix();
    let t = Instant::now();
    let model = kmeans(&points, args.k, args.seed, args.restarts)?;
    log::info!(
        "stage=kmeans ms={} k={} iterations={}",
        t.elapsed().as_millis(),
        args.k,
        model.iterations
    );
    println!(
        "k={} objective={:.6} iterations={}",
        model.k, model.objective, model.iterations
    );

    let t = Instant::now();
    let palette = build_palette(&corpus, &model)?;
    save_palette(&palette, &args.out)?;
    log::info!(
        "stage=palette ms={} entries={}",
        t.elapsed().as_millis(),
        palette.len()
    );
    println!("palette_digest={}", palette.digest());
    println!("palette={}", args.out.display());

    if let Some(path) = &args.swatches {
        export_swatches(&palette, path, args.sort.into())?;
        println!("swatches={}", path.display());
    }
    if let Some(path) = &args.cube {
        export_rgb_cube_csv(&palette, path)?;
        println!("cube={}", path.display());
    }
    Ok(())
}

fn cmd_name(args: NameArgs) -> Result<(), AppError> {
    let palette = load_palette_stage(&args.palette)?;
    print_provenance(&palette);
    let color = parse_color_arg(&args.color)?;
    let named = name_color(&palette, color)?;
    let centroid = palette.entries[named.entry_id].hex();
    println!(
        "query={} entry={} distance={:.4} centroid={}",
        color.hex(),
        named.entry_id,
        named.distance,
        centroid
    );
    for nf in &named.names {
        println!("name={} p={:.4}", nf.name.as_str(), nf.probability);
    }
    Ok(())
}

fn cmd_lookup(args: LookupArgs) -> Result<(), AppError> {
    let palette = load_palette_stage(&args.palette)?;
    print_provenance(&palette);
    let matches = lookup_by_name(&palette, &args.query, args.max_distance)?;
    println!("matches={}", matches.len());
    for m in &matches {
        let kind = match m.kind {
            MatchKind::Exact => "exact",
            MatchKind::Fuzzy => "fuzzy",
        };
        println!(
            "entry={} name={} kind={} distance={} p={:.4} centroid={}",
            m.entry_id,
            m.matched_name,
            kind,
            m.distance,
            m.probability,
            palette.entries[m.entry_id].hex()
        );
    }
    Ok(())
}

fn cmd_tag(args: TagArgs) -> Result<(), AppError> {
    if args.colors == 0 {
        return Err(AppError::Usage {
            label: "bad_colors",
            message: "colors must be at least 1".into(),
        });
    }
    let palette = load_palette_stage(&args.palette)?;
    print_provenance(&palette);
    let opts = TagOptions {
        stride: args.stride,
        filter_white: args.filter_white,
    };
    let t = Instant::now();
    let tag = tag_image(&args.image, &palette, opts)?;
    log::info!("stage=tag ms={}", t.elapsed().as_millis());
    println!("image={}", tag.image_id);
    println!(
        "dominant={} population={:.4} entry={} de00={:.4}",
        tag.dominant.rgb.hex(),
        tag.dominant.population,
        tag.entry_id,
        tag.distance
    );
    for nf in &tag.names {
        println!("name={} p={:.4}", nf.name.as_str(), nf.probability);
    }
    if args.colors > 1 {
        let extras = image_dominant_colors(&args.image, args.colors, opts)?;
        for (i, dc) in extras.iter().enumerate() {
            let named = name_color(&palette, dc.rgb)?;
            println!(
                "dominant[{i}]={} population={:.4} entry={} de00={:.4} top={}",
                dc.rgb.hex(),
                dc.population,
                named.entry_id,
                named.distance,
                palette.entries[named.entry_id].top_name().as_str()
            );
        }
    }
    Ok(())
}

fn cmd_index(args: IndexArgs) -> Result<(), AppError> {
    let palette = load_palette_stage(&args.palette)?;
    print_provenance(&palette);
    let opts = TagOptions {
        stride: args.stride,
        filter_white: args.filter_white,
    };
    let t = Instant::now();
    let index = build_index(&args.images, &palette, opts)?;
    save_index(&index, &args.out)?;
    log::info!(
        "stage=index ms={} images={}",
        t.elapsed().as_millis(),
        index.tags.len()
    );
    println!("images={}", index.tags.len());
    println!("index={}", args.out.display());
    Ok(())
}

fn cmd_search(args: SearchArgs) -> Result<(), AppError> {
    let palette = load_palette_stage(&args.palette)?;
    print_provenance(&palette);
    let index = load_index(&args.index)?;
    let t = Instant::now();
    let hits = search_by_name(&index, &palette, &args.query, args.max_distance)?;
    log::info!(
        "stage=search ms={} hits={}",
        t.elapsed().as_millis(),
        hits.len()
    );
    println!("matches={}", hits.len());
    for h in &hits {
        println!(
            "image={} entry={} name_distance={} de00={:.4}",
            h.image_id, h.entry_id, h.name_distance, h.de00
        );
    }
    Ok(())
}
