//! K-means clustering in CIELAB and elbow-based selection of the cluster
//! count.
//!
//! Clustering distance is squared Euclidean in CIELAB, which gives Lloyd
//! iterations their monotone convergence. Cluster quality for the elbow
//! curve is measured with CIEDE2000 instead, since perceptual uniformity is
//! what the palette is judged by.

use std::collections::HashSet;
use std::io;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::color::LabPoint;
use crate::delta_e::ciede2000;
use crate::util::write_atomic;

/// Errors produced by clustering and knee detection.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClusteringError {
    #[error("k = {k} exceeds the {distinct} distinct points available")]
    TooFewDistinctPoints { k: usize, distinct: usize },
    #[error("no knee found in the elbow curve")]
    NoKneeFound,
}

/// Lloyd iterations are capped; convergence is normally reached far earlier.
pub const MAX_ITERATIONS: usize = 300;
/// Restarts used per k during the elbow sweep.
pub const SWEEP_RESTARTS: usize = 4;
/// Restarts used for the final clustering at the chosen k.
pub const FINAL_RESTARTS: usize = 16;

/// A fitted k-means model.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    pub k: usize,
    /// Centroid CIELAB coordinates, indexed by cluster id.
    pub centroids: Vec<LabPoint>,
    /// Cluster id of every input point, in input order.
    pub assignments: Vec<usize>,
    /// Final within-cluster sum of squared CIELAB distances.
    pub objective: f64,
    /// Objective after each Lloyd iteration; non-increasing.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    /// The seed the model was fitted with.
    pub seed: u64,
}

fn squared_dist(p: LabPoint, q: LabPoint) -> f64 {
    let dl = p.l - q.l;
    let da = p.a - q.a;
    let db = p.b - q.b;
    dl * dl + da * da + db * db
}

/// Stretches one seed into decorrelated per-restart streams (splitmix64).
fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn count_distinct(points: &[LabPoint]) -> usize {
    points
        .iter()
        .map(|p| (p.l.to_bits(), p.a.to_bits(), p.b.to_bits()))
        .collect::<HashSet<_>>()
        .len()
}

/// k-means++ seeding: the first centroid is uniform, each further centroid
/// is drawn with probability proportional to its squared distance from the
/// nearest centroid chosen so far.
fn plus_plus_init(points: &[LabPoint], k: usize, rng: &mut ChaCha8Rng) -> Vec<LabPoint> {
    let mut centroids = Vec::with_capacity(k);
    let first = points[rng.random_range(0..points.len())];
    centroids.push(first);
    let mut min_d: Vec<f64> = points.iter().map(|p| squared_dist(*p, first)).collect();
    while centroids.len() < k {
        let total: f64 = min_d.iter().sum();
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = None;
        for (i, &d) in min_d.iter().enumerate() {
            if d > 0.0 {
                acc += d;
                chosen = Some(i);
                if acc >= target {
                    break;
                }
            }
        }
        let next = points[chosen.expect("k <= distinct points, so a positive weight remains")];
        centroids.push(next);
        for (i, p) in points.iter().enumerate() {
            min_d[i] = min_d[i].min(squared_dist(*p, next));
        }
    }
    centroids
}

struct LloydRun {
    centroids: Vec<LabPoint>,
    assignments: Vec<usize>,
    objective_trace: Vec<f64>,
}

fn lloyd(points: &[LabPoint], k: usize, rng: &mut ChaCha8Rng) -> LloydRun {
    let n = points.len();
    let mut centroids = plus_plus_init(points, k, rng);
    let mut assignments = vec![usize::MAX; n];
    let mut counts = vec![0usize; k];
    let mut trace = Vec::new();

    for _ in 0..MAX_ITERATIONS {
        // Assignment step; ties go to the lowest cluster id.
        let mut changed = false;
        counts.fill(0);
        for (i, p) in points.iter().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = squared_dist(*p, *centroid);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if assignments[i] != best {
                assignments[i] = best;
                changed = true;
            }
            counts[best] += 1;
        }

        // Empty-cluster repair: reseed onto the worst-fit point of any
        // cluster that can spare one.
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let mut worst: Option<(usize, f64)> = None;
            for (i, p) in points.iter().enumerate() {
                if counts[assignments[i]] < 2 {
                    continue;
                }
                let d = squared_dist(*p, centroids[assignments[i]]);
                if worst.is_none_or(|(_, wd)| d > wd) {
                    worst = Some((i, d));
                }
            }
            let (i, _) = worst.expect("k <= distinct points, so some cluster has two members");
            counts[assignments[i]] -= 1;
            assignments[i] = c;
            counts[c] += 1;
            centroids[c] = points[i];
            changed = true;
        }

        // Update step: centroids move to their members' mean, summed in
        // input order so reruns are bit-identical.
        let mut sums = vec![(0.0, 0.0, 0.0); k];
        for (i, p) in points.iter().enumerate() {
            let s = &mut sums[assignments[i]];
            s.0 += p.l;
            s.1 += p.a;
            s.2 += p.b;
        }
        for c in 0..k {
            let m = counts[c] as f64;
            centroids[c] = LabPoint::new(sums[c].0 / m, sums[c].1 / m, sums[c].2 / m);
        }

        let objective: f64 = points
            .iter()
            .zip(&assignments)
            .map(|(p, &a)| squared_dist(*p, centroids[a]))
            .sum();
        if let Some(&prev) = trace.last() {
            debug_assert!(
                objective <= prev * (1.0 + 1e-12) + 1e-9,
                "objective rose from {prev} to {objective}"
            );
        }
        trace.push(objective);
        if !changed {
            break;
        }
    }

    LloydRun {
        centroids,
        assignments,
        objective_trace: trace,
    }
}

/// Fits k-means with k-means++ seeding and `restarts` independent runs,
/// keeping the run with the lowest objective.
///
/// Deterministic: identical `(points, k, seed, restarts)` give bit-identical
/// models. Requires `points` to hold at least `k` distinct values.
pub fn kmeans(
    points: &[LabPoint],
    k: usize,
    seed: u64,
    restarts: usize,
) -> Result<ClusterModel, ClusteringError> {
    assert!(k > 0, "k must be positive");
    assert!(restarts > 0, "restarts must be positive");
    let distinct = count_distinct(points);
    if distinct < k {
        return Err(ClusteringError::TooFewDistinctPoints { k, distinct });
    }

    let runs: Vec<LloydRun> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, r as u64 + 1));
            lloyd(points, k, &mut rng)
        })
        .collect();

    let best = runs
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| {
            let oa = *a.objective_trace.last().unwrap();
            let ob = *b.objective_trace.last().unwrap();
            oa.partial_cmp(&ob).unwrap().then(i.cmp(j))
        })
        .map(|(_, run)| run)
        .unwrap();

    let objective = *best.objective_trace.last().unwrap();
    Ok(ClusterModel {
        k,
        centroids: best.centroids,
        assignments: best.assignments,
        objective,
        iterations: best.objective_trace.len(),
        objective_trace: best.objective_trace,
        seed,
    })
}

/// Mean CIEDE2000 between members and their centroid, averaged per cluster
/// and then across clusters, so large clusters do not drown out small ones.
pub fn mean_intra_de(points: &[LabPoint], model: &ClusterModel) -> f64 {
    debug_assert_eq!(points.len(), model.assignments.len());
    let mut sums = vec![0.0; model.k];
    let mut counts = vec![0usize; model.k];
    for (p, &a) in points.iter().zip(&model.assignments) {
        sums[a] += ciede2000(*p, model.centroids[a]);
        counts[a] += 1;
    }
    let mut total = 0.0;
    let mut clusters = 0;
    for c in 0..model.k {
        if counts[c] > 0 {
            total += sums[c] / counts[c] as f64;
            clusters += 1;
        }
    }
    if clusters == 0 {
        0.0
    } else {
        total / clusters as f64
    }
}

/// The elbow curve: mean intra-cluster CIEDE2000 per candidate k.
#[derive(Debug, Clone, PartialEq)]
pub struct ElbowCurve {
    /// Candidate cluster counts, strictly increasing.
    pub ks: Vec<usize>,
    /// `mean_intra_de` of the fitted model at each k.
    pub scores: Vec<f64>,
}

impl ElbowCurve {
    /// Writes the curve as `k,mean_de00` CSV.
    pub fn write_csv(&self, path: &Path) -> io::Result<()> {
        let mut out = String::from("k,mean_de00\n");
        for (k, s) in self.ks.iter().zip(&self.scores) {
            out.push_str(&format!("{k},{s}\n"));
        }
        write_atomic(path, out.as_bytes())
    }

    /// Renders the curve as a small standalone SVG line plot, marking the
    /// knee if one is given.
    pub fn write_svg(&self, path: &Path, knee: Option<usize>) -> io::Result<()> {
        const W: f64 = 640.0;
        const H: f64 = 400.0;
        const PAD: f64 = 48.0;
        let kmin = *self.ks.first().unwrap_or(&0) as f64;
        let kmax = *self.ks.last().unwrap_or(&1) as f64;
        let smax = self.scores.iter().cloned().fold(f64::MIN, f64::max);
        let smin = self.scores.iter().cloned().fold(f64::MAX, f64::min);
        let xspan = (kmax - kmin).max(1.0);
        let yspan = (smax - smin).max(1e-12);
        let x = |k: f64| PAD + (k - kmin) / xspan * (W - 2.0 * PAD);
        let y = |s: f64| H - PAD - (s - smin) / yspan * (H - 2.0 * PAD);

        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
             viewBox=\"0 0 {W} {H}\">\n<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
        ));
        svg.push_str(&format!(
            "<line x1=\"{PAD}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
             <line x1=\"{PAD}\" y1=\"{PAD}\" x2=\"{PAD}\" y2=\"{}\" stroke=\"black\"/>\n",
            H - PAD,
            W - PAD,
            H - PAD,
            H - PAD
        ));
        let pts: Vec<String> = self
            .ks
            .iter()
            .zip(&self.scores)
            .map(|(&k, &s)| format!("{:.2},{:.2}", x(k as f64), y(s)))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n",
            pts.join(" ")
        ));
        if let Some(kstar) = knee {
            let xs = x(kstar as f64);
            svg.push_str(&format!(
                "<line x1=\"{xs:.2}\" y1=\"{PAD}\" x2=\"{xs:.2}\" y2=\"{:.2}\" \
                 stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n\
                 <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"#d62728\">k*={kstar}</text>\n",
                H - PAD,
                xs + 4.0,
                PAD + 12.0
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">k</text>\n\
             <text x=\"10\" y=\"{:.2}\" font-size=\"12\">mean dE00</text>\n</svg>\n",
            W - PAD + 8.0,
            H - PAD + 4.0,
            PAD - 8.0
        ));
        write_atomic(path, svg.as_bytes())
    }
}

/// The default sweep grid: 50, 60, ..., 990.
pub fn default_sweep_ks() -> Vec<usize> {
    (50..=990).step_by(10).collect()
}

/// Runs `kmeans` at every candidate k (in parallel) and records the mean
/// intra-cluster CIEDE2000 of each fitted model.
///
/// Requires `ks` to be strictly increasing and every k to be feasible for
/// `points`.
pub fn elbow_sweep(
    points: &[LabPoint],
    ks: &[usize],
    seed: u64,
    restarts: usize,
) -> Result<ElbowCurve, ClusteringError> {
    debug_assert!(ks.windows(2).all(|w| w[0] < w[1]), "ks must be increasing");
    if let Some(&kmax) = ks.last() {
        let distinct = count_distinct(points);
        if distinct < kmax {
            return Err(ClusteringError::TooFewDistinctPoints { k: kmax, distinct });
        }
    }
    let scores = ks
        .par_iter()
        .map(|&k| kmeans(points, k, seed, restarts).map(|m| mean_intra_de(points, &m)))
        .collect::<Result<Vec<f64>, _>>()?;
    Ok(ElbowCurve {
        ks: ks.to_vec(),
        scores,
    })
}

/// Difference values this close to zero mean the curve has no curvature
/// worth calling a knee.
const KNEE_EPSILON: f64 = 1e-9;

/// Locates the knee of a decreasing elbow curve (the Kneedle construction):
/// min-max normalize both axes, flip the curve to a hump, and take the first
/// maximum of the smoothed difference from the diagonal.
///
/// Fails with [`ClusteringError::NoKneeFound`] when the curve is too short,
/// flat, or the maximum sits on either end.
pub fn detect_knee(curve: &ElbowCurve) -> Result<usize, ClusteringError> {
    let m = curve.ks.len();
    if m < 3 || curve.scores.len() != m {
        return Err(ClusteringError::NoKneeFound);
    }
    let kmin = curve.ks[0] as f64;
    let kmax = curve.ks[m - 1] as f64;
    let smin = curve.scores.iter().cloned().fold(f64::MAX, f64::min);
    let smax = curve.scores.iter().cloned().fold(f64::MIN, f64::max);
    if kmax <= kmin || smax - smin <= KNEE_EPSILON {
        return Err(ClusteringError::NoKneeFound);
    }

    let diff: Vec<f64> = (0..m)
        .map(|i| {
            let x = (curve.ks[i] as f64 - kmin) / (kmax - kmin);
            let y = 1.0 - (curve.scores[i] - smin) / (smax - smin);
            y - x
        })
        .collect();
    // 3-point moving average; the ends average what neighbors they have.
    let smoothed: Vec<f64> = (0..m)
        .map(|i| {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(m - 1);
            diff[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect();

    let mut best = 0;
    for (i, &v) in smoothed.iter().enumerate() {
        if v > smoothed[best] {
            best = i;
        }
    }
    if best == 0 || best == m - 1 || smoothed[best] <= KNEE_EPSILON {
        return Err(ClusteringError::NoKneeFound);
    }
    Ok(curve.ks[best])
}
