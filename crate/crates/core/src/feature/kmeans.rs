use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::codebook::{squared_distance, Codebook};
use crate::dsp::FeatureSequence;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Stop once inertia improves by less than this fraction.
    pub tolerance: f64,
    /// Frames beyond this many are uniformly subsampled before training.
    pub max_samples: usize,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            k: 64,
            seed: 0,
            max_iterations: 300,
            tolerance: 1e-4,
            max_samples: 200_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainedCodebook {
    pub codebook: Codebook,
    /// Inertia measured at each assignment step, in order.
    pub inertia_trace: Vec<f64>,
    /// Frames actually used for training (after subsampling).
    pub n_frames: usize,
}

impl TrainedCodebook {
    pub fn final_inertia(&self) -> f64 {
        self.inertia_trace.last().copied().unwrap_or(0.0)
    }
}

/// Trains a codebook with k-means++ seeding and Lloyd iterations.
pub fn train_codebook(
    corpus: &[FeatureSequence],
    config: &KMeansConfig,
    feature_kind: &str,
) -> Result<TrainedCodebook> {
    let first = corpus.first().ok_or(Error::TooFewFrames { frames: 0, k: config.k })?;
    let dim = first.dim();
    for seq in corpus {
        if seq.dim() != dim {
            return Err(Error::DimMismatch {
                expected: dim,
                found: seq.dim(),
            });
        }
        if seq.hop_seconds() != first.hop_seconds() {
            return Err(Error::InvalidArgument(format!(
                "mixed hops in corpus: {} and {}",
                first.hop_seconds(),
                seq.hop_seconds()
            )));
        }
    }
    if config.k < 2 {
        return Err(Error::InvalidArgument(format!(
            "k must be at least 2, got {}",
            config.k
        )));
    }
    let total: usize = corpus.iter().map(FeatureSequence::len).sum();
    if total < config.k {
        return Err(Error::TooFewFrames {
            frames: total,
            k: config.k,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let points = gather(corpus, total, config.max_samples.max(config.k), &mut rng);
    let (centroids, inertia_trace) = lloyd(&points, dim, config, &mut rng);
    let codebook = Codebook::new(
        centroids.chunks(dim).map(<[f64]>::to_vec).collect(),
        feature_kind,
        first.hop_seconds(),
    )?;
    Ok(TrainedCodebook {
        codebook,
        inertia_trace,
        n_frames: points.len() / dim,
    })
}

/// Flattened training frames, uniformly subsampled when over the limit.
fn gather(corpus: &[FeatureSequence], total: usize, limit: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let all = corpus.iter().flat_map(FeatureSequence::frames);
    if total <= limit {
        return all.flatten().copied().collect();
    }
    let mut keep = rand::seq::index::sample(rng, total, limit).into_vec();
    keep.sort_unstable();
    let mut out = Vec::with_capacity(limit * corpus[0].dim());
    let mut next = keep.into_iter().peekable();
    for (i, frame) in all.enumerate() {
        if next.peek() == Some(&i) {
            out.extend_from_slice(frame);
            next.next();
        }
    }
    out
}

fn nearest(point: &[f64], centroids: &[f64], dim: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (k, c) in centroids.chunks(dim).enumerate() {
        let d = squared_distance(point, c);
        if d < best.1 {
            best = (k, d);
        }
    }
    best
}

fn plus_plus_init(points: &[f64], dim: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = points.len() / dim;
    let mut centroids = Vec::with_capacity(k * dim);
    let first = rng.gen_range(0..n);
    centroids.extend_from_slice(&points[first * dim..(first + 1) * dim]);
    let mut d2: Vec<f64> = points
        .par_chunks(dim)
        .map(|p| squared_distance(p, &centroids[..dim]))
        .collect();
    for _ in 1..k {
        let pick = match WeightedIndex::new(&d2) {
            Ok(dist) => dist.sample(rng),
            // every point already coincides with a centroid
            Err(_) => rng.gen_range(0..n),
        };
        let c = points[pick * dim..(pick + 1) * dim].to_vec();
        d2.par_iter_mut()
            .zip(points.par_chunks(dim))
            .for_each(|(d, p)| *d = d.min(squared_distance(p, &c)));
        centroids.extend_from_slice(&c);
    }
    centroids
}

fn lloyd(points: &[f64], dim: usize, config: &KMeansConfig, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let k = config.k;
    let mut centroids = plus_plus_init(points, dim, k, rng);
    let mut trace: Vec<f64> = Vec::new();

    for _ in 0..config.max_iterations {
        let assigned: Vec<(usize, f64)> = points.par_chunks(dim).map(|p| nearest(p, &centroids, dim)).collect();
        let inertia = assigned.iter().fold(0.0, |acc, &(_, d)| acc + d);
        let converged = trace
            .last()
            .is_some_and(|&prev| prev == 0.0 || (prev - inertia) / prev < config.tolerance);
        trace.push(inertia);
        if converged {
            break;
        }

        let mut sums = vec![0.0; k * dim];
        let mut counts = vec![0usize; k];
        for (p, &(c, _)) in points.chunks(dim).zip(&assigned) {
            counts[c] += 1;
            for (s, v) in sums[c * dim..(c + 1) * dim].iter_mut().zip(p) {
                *s += v;
            }
        }
        let mut dist: Vec<f64> = assigned.iter().map(|&(_, d)| d).collect();
        for c in 0..k {
            let target = &mut centroids[c * dim..(c + 1) * dim];
            if counts[c] > 0 {
                let n = counts[c] as f64;
                for (t, s) in target.iter_mut().zip(&sums[c * dim..(c + 1) * dim]) {
                    *t = s / n;
                }
            } else {
                // reseed to the point farthest from its own centroid
                let far = dist
                    .iter()
                    .enumerate()
                    .fold(0, |best, (i, &d)| if d > dist[best] { i } else { best });
                target.copy_from_slice(&points[far * dim..(far + 1) * dim]);
                dist[far] = 0.0;
            }
        }
    }
    (centroids, trace)
}

/// Nearest-centroid ID per frame; ties go to the smaller ID.
pub fn assign_frames(features: &FeatureSequence, cb: &Codebook) -> Result<Vec<usize>> {
    if features.dim() != cb.dim() {
        return Err(Error::DimMismatch {
            expected: cb.dim(),
            found: features.dim(),
        });
    }
    Ok(features.frames().map(|f| cb.nearest(f).0).collect())
}
