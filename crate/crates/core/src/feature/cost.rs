use super::codebook::Codebook;
use crate::dsp::FeatureSequence;
use crate::error::{Error, Result};
use crate::segment::CostModel;

/// Span-to-centroid distance from prefix sums of `f` and `|f|^2`, so each
/// span costs O(K * dim) regardless of its length.
pub struct FeatureCostModel<'a> {
    cb: &'a Codebook,
    dim: usize,
    prefix: Vec<f64>,
    prefix_sq: Vec<f64>,
    centroid_sq: Vec<f64>,
    normalize: bool,
}

impl<'a> FeatureCostModel<'a> {
    pub fn new(features: &FeatureSequence, cb: &'a Codebook) -> Result<Self> {
        let dim = cb.dim();
        if features.dim() != dim {
            return Err(Error::DimMismatch {
                expected: dim,
                found: features.dim(),
            });
        }
        let n = features.len();
        let mut prefix = vec![0.0; (n + 1) * dim];
        let mut prefix_sq = vec![0.0; n + 1];
        for (t, f) in features.frames().enumerate() {
            let (done, rest) = prefix.split_at_mut((t + 1) * dim);
            for ((next, prev), v) in rest[..dim].iter_mut().zip(&done[t * dim..]).zip(f) {
                *next = prev + v;
            }
            prefix_sq[t + 1] = prefix_sq[t] + f.iter().map(|v| v * v).sum::<f64>();
        }
        let centroid_sq = cb.centroids().iter().map(|c| c.iter().map(|v| v * v).sum()).collect();
        Ok(Self {
            cb,
            dim,
            prefix,
            prefix_sq,
            centroid_sq,
            normalize: true,
        })
    }

    /// Reports raw summed squared distances instead of dividing by `dim`.
    pub fn unnormalized(mut self) -> Self {
        self.normalize = false;
        self
    }

    pub fn n_frames(&self) -> usize {
        self.prefix_sq.len() - 1
    }

    /// Best centroid for frames `start..start + len` and its summed squared
    /// distance (not divided by `dim`). Ties go to the smaller ID.
    pub fn best_centroid(&self, start: usize, len: usize) -> (usize, f64) {
        let end = start + len;
        let d = self.dim;
        let sum_sq = self.prefix_sq[end] - self.prefix_sq[start];
        let sum: Vec<f64> = self.prefix[end * d..(end + 1) * d]
            .iter()
            .zip(&self.prefix[start * d..(start + 1) * d])
            .map(|(a, b)| a - b)
            .collect();
        let mut best = (0, f64::INFINITY);
        for (k, c) in self.cb.centroids().iter().enumerate() {
            let dot: f64 = c.iter().zip(&sum).map(|(a, b)| a * b).sum();
            let dist = (sum_sq - 2.0 * dot + len as f64 * self.centroid_sq[k]).max(0.0);
            if dist < best.1 {
                best = (k, dist);
            }
        }
        best
    }
}

impl CostModel for FeatureCostModel<'_> {
    type Label = usize;

    fn segment_cost(&self, start: usize, len: usize) -> (usize, f64) {
        let (k, d) = self.best_centroid(start, len);
        if self.normalize {
            (k, d / self.dim as f64)
        } else {
            (k, d)
        }
    }
}

/// Summed squared distance between a span and its nearest centroid.
pub fn feature_segment_cost(
    features: &FeatureSequence,
    cb: &Codebook,
    start_frame: usize,
    length_frames: usize,
) -> Result<(usize, f64)> {
    if length_frames == 0 || start_frame + length_frames > features.len() {
        return Err(Error::InvalidArgument(format!(
            "span {start_frame}+{length_frames} outside {} frames",
            features.len()
        )));
    }
    Ok(FeatureCostModel::new(features, cb)?.best_centroid(start_frame, length_frames))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature::assign_frames;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(seed: u64, n: usize, dim: usize, k: usize) -> (FeatureSequence, Codebook) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |m: usize| -> Vec<Vec<f64>> {
            (0..m)
                .map(|_| (0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect())
                .collect()
        };
        let frames = draw(n);
        let cb = Codebook::new(draw(k), "r", 0.02).unwrap();
        (FeatureSequence::from_frames(0.02, &frames).unwrap(), cb)
    }

    #[test]
    fn span_of_centroid_copies_is_free() {
        let cb = Codebook::new(vec![vec![1.0, 2.0], vec![0.0, 0.0], vec![3.0, -1.0]], "t", 0.02).unwrap();
        let fs = FeatureSequence::from_frames(0.02, &vec![vec![3.0, -1.0]; 6]).unwrap();
        assert_eq!(feature_segment_cost(&fs, &cb, 1, 4).unwrap(), (2, 0.0));
    }

    #[test]
    fn prefix_sums_match_direct_summation() {
        for seed in 0..20 {
            let (fs, cb) = random(seed, 60, 6, 5);
            let model = FeatureCostModel::new(&fs, &cb).unwrap();
            for (start, len) in [(0, 1), (3, 7), (10, 50), (59, 1), (0, 60)] {
                let direct: Vec<f64> = cb
                    .centroids()
                    .iter()
                    .map(|c| {
                        (start..start + len)
                            .map(|t| fs.frame(t).iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
                            .sum()
                    })
                    .collect();
                let (k, d) = model.best_centroid(start, len);
                let best = direct.iter().copied().fold(f64::INFINITY, f64::min);
                assert!((d - best).abs() <= 1e-6 * best.max(1.0), "{d} vs {best}");
                assert!((direct[k] - best).abs() <= 1e-9 * best.max(1.0));
            }
        }
    }

    #[test]
    fn single_frame_matches_assignment() {
        let (fs, cb) = random(7, 100, 4, 8);
        let ids = assign_frames(&fs, &cb).unwrap();
        let model = FeatureCostModel::new(&fs, &cb).unwrap();
        for (t, id) in ids.into_iter().enumerate() {
            assert_eq!(model.best_centroid(t, 1).0, id);
        }
    }

    #[test]
    fn normalization_divides_by_dim() {
        let (fs, cb) = random(1, 10, 4, 3);
        let norm = FeatureCostModel::new(&fs, &cb).unwrap();
        let raw = FeatureCostModel::new(&fs, &cb).unwrap().unnormalized();
        let (a, b) = (norm.segment_cost(2, 5), raw.segment_cost(2, 5));
        assert_eq!(a.0, b.0);
        assert!((a.1 * 4.0 - b.1).abs() < 1e-12);
    }

    #[test]
    fn bad_span_and_dim() {
        let (fs, cb) = random(1, 10, 4, 3);
        assert!(feature_segment_cost(&fs, &cb, 8, 3).is_err());
        assert!(feature_segment_cost(&fs, &cb, 0, 0).is_err());
        let other = Codebook::new(vec![vec![0.0], vec![1.0]], "t", 0.02).unwrap();
        assert!(feature_segment_cost(&fs, &other, 0, 1).is_err());
    }
}
