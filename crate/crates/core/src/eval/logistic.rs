use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ngram::SparseVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierConfig {
    /// L2 strengths tried; the one with the best validation accuracy is kept
    /// (earliest on ties).
    pub alphas: Vec<f64>,
    pub max_epochs: usize,
    /// Stop when the loss changes by less than this between epochs.
    pub tolerance: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            alphas: vec![0.01, 0.1, 1.0],
            max_epochs: 500,
            tolerance: 1e-6,
        }
    }
}

/// Rows of count features with class indices.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabeledSplit {
    pub rows: Vec<SparseVector>,
    pub labels: Vec<usize>,
}

impl LabeledSplit {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// `log1p` of counts, scaled to unit L2 norm.
fn prepare(row: &SparseVector) -> SparseVector {
    let mut out: SparseVector = row.iter().map(|&(i, v)| (i, v.ln_1p())).collect();
    let norm = out.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        out.iter_mut().for_each(|(_, v)| *v /= norm);
    }
    out
}

/// Multinomial logistic regression with a bias per class.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    n_features: usize,
    n_classes: usize,
    // n_classes rows of n_features weights followed by the bias
    weights: Vec<f64>,
}

impl LogisticModel {
    fn row(&self, c: usize) -> &[f64] {
        let w = self.n_features + 1;
        &self.weights[c * w..(c + 1) * w]
    }

    fn scores(&self, x: &SparseVector) -> Vec<f64> {
        (0..self.n_classes)
            .map(|c| {
                let r = self.row(c);
                r[self.n_features] + x.iter().map(|&(i, v)| r[i] * v).sum::<f64>()
            })
            .collect()
    }

    /// Most probable class for a raw count row; ties go to the smaller index.
    pub fn predict(&self, counts: &SparseVector) -> usize {
        argmax(&self.scores(&prepare(counts)))
    }

    /// Full-batch gradient descent on mean cross-entropy plus `alpha/2 |W|^2`
    /// (bias unpenalized).
    pub fn train(
        data: &LabeledSplit,
        n_features: usize,
        n_classes: usize,
        alpha: f64,
        seed: u64,
        config: &ClassifierConfig,
    ) -> Self {
        let stride = n_features + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut model = Self {
            n_features,
            n_classes,
            weights: (0..n_classes * stride).map(|_| rng.gen_range(-0.01..0.01)).collect(),
        };
        let rows: Vec<SparseVector> = data.rows.iter().map(prepare).collect();
        let n = rows.len() as f64;
        // unit-norm rows plus the bias input bound the curvature by 1 + alpha
        let step = 1.0 / (1.0 + alpha);
        let mut prev_loss = f64::INFINITY;

        for _ in 0..config.max_epochs {
            let mut grad = vec![0.0; model.weights.len()];
            let mut loss = 0.0;
            for (x, &y) in rows.iter().zip(&data.labels) {
                let p = softmax(&model.scores(x));
                loss -= p[y].max(f64::MIN_POSITIVE).ln();
                for (c, &pc) in p.iter().enumerate() {
                    let err = pc - f64::from(u8::from(c == y));
                    let g = &mut grad[c * stride..(c + 1) * stride];
                    for &(i, v) in x {
                        g[i] += err * v;
                    }
                    g[n_features] += err;
                }
            }
            loss /= n;
            let mut penalty = 0.0;
            for (k, (w, g)) in model.weights.iter_mut().zip(&grad).enumerate() {
                let g = g / n;
                if k % stride == n_features {
                    *w -= step * g;
                } else {
                    penalty += *w * *w;
                    *w -= step * (g + alpha * *w);
                }
            }
            loss += 0.5 * alpha * penalty;
            if (prev_loss - loss).abs() < config.tolerance {
                break;
            }
            prev_loss = loss;
        }
        model
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / total).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierReport {
    pub alpha: f64,
    pub train_accuracy: f64,
    pub valid_accuracy: f64,
    pub test_accuracy: f64,
    /// Test confusion counts: rows are true classes, columns predictions.
    pub confusion: Vec<Vec<usize>>,
}

fn accuracy(model: &LogisticModel, data: &LabeledSplit) -> f64 {
    let hits = data
        .rows
        .iter()
        .zip(&data.labels)
        .filter(|(x, &y)| model.predict(x) == y)
        .count();
    hits as f64 / data.len() as f64
}

/// Trains one model per candidate alpha, keeps the best on `valid`, and
/// scores all three splits with it.
pub fn train_eval_classifier(
    train: &LabeledSplit,
    valid: &LabeledSplit,
    test: &LabeledSplit,
    n_features: usize,
    n_classes: usize,
    seed: u64,
    config: &ClassifierConfig,
) -> Result<ClassifierReport> {
    for (name, split) in [("train", train), ("valid", valid), ("test", test)] {
        if split.is_empty() {
            return Err(Error::EmptySplit(name));
        }
        if split.rows.len() != split.labels.len() || split.labels.iter().any(|&y| y >= n_classes) {
            return Err(Error::InvalidArgument(format!("inconsistent {name} split")));
        }
        if let Some(&(i, _)) = split.rows.iter().flatten().find(|&&(i, _)| i >= n_features) {
            return Err(Error::InvalidArgument(format!("feature {i} outside vocabulary")));
        }
    }
    if train.labels.iter().all(|&y| y == train.labels[0]) {
        return Err(Error::SingleClass);
    }
    if config.alphas.is_empty() {
        return Err(Error::InvalidArgument("no regularization strengths given".into()));
    }

    let mut best: Option<(f64, f64, LogisticModel)> = None;
    for &alpha in &config.alphas {
        let model = LogisticModel::train(train, n_features, n_classes, alpha, seed, config);
        let acc = accuracy(&model, valid);
        if best.as_ref().is_none_or(|(_, b, _)| acc > *b) {
            best = Some((alpha, acc, model));
        }
    }
    let (alpha, valid_accuracy, model) = best.expect("at least one alpha");
    let mut confusion = vec![vec![0; n_classes]; n_classes];
    for (x, &y) in test.rows.iter().zip(&test.labels) {
        confusion[y][model.predict(x)] += 1;
    }
    Ok(ClassifierReport {
        alpha,
        train_accuracy: accuracy(&model, train),
        valid_accuracy,
        test_accuracy: accuracy(&model, test),
        confusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split(rows: Vec<SparseVector>, labels: Vec<usize>) -> LabeledSplit {
        LabeledSplit { rows, labels }
    }

    /// Class c owns features 2c and 2c+1; each row lights one of them.
    fn separable(n_classes: usize, per_class: usize, rng: &mut ChaCha8Rng) -> LabeledSplit {
        let mut out = LabeledSplit::default();
        for c in 0..n_classes {
            for _ in 0..per_class {
                let f = 2 * c + rng.gen_range(0..2);
                out.rows.push(vec![(f, rng.gen_range(1..5) as f64)]);
                out.labels.push(c);
            }
        }
        out
    }

    #[test]
    fn separable_two_class() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (tr, va, te) = (
            separable(2, 20, &mut rng),
            separable(2, 5, &mut rng),
            separable(2, 10, &mut rng),
        );
        let r = train_eval_classifier(&tr, &va, &te, 4, 2, 1, &ClassifierConfig::default()).unwrap();
        assert_eq!(r.test_accuracy, 1.0);
        assert_eq!(r.train_accuracy, 1.0);
        assert_eq!(r.confusion, vec![vec![10, 0], vec![0, 10]]);
    }

    #[test]
    fn deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (tr, va, te) = (
            separable(3, 10, &mut rng),
            separable(3, 4, &mut rng),
            separable(3, 4, &mut rng),
        );
        let c = ClassifierConfig::default();
        assert_eq!(
            train_eval_classifier(&tr, &va, &te, 6, 3, 9, &c).unwrap(),
            train_eval_classifier(&tr, &va, &te, 6, 3, 9, &c).unwrap()
        );
    }

    #[test]
    fn shuffled_labels_are_near_chance() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        // features carry no label information
        let mut noise = |n: usize| {
            let rows = (0..n)
                .map(|_| {
                    let mut r: SparseVector = (0..20).filter(|_| rng.gen_bool(0.3)).map(|i| (i, 1.0)).collect();
                    if r.is_empty() {
                        r.push((0, 1.0));
                    }
                    r
                })
                .collect();
            let labels = (0..n).map(|_| rng.gen_range(0..4)).collect();
            split(rows, labels)
        };
        let (tr, va, te) = (noise(400), noise(100), noise(400));
        let r = train_eval_classifier(&tr, &va, &te, 20, 4, 0, &ClassifierConfig::default()).unwrap();
        assert!((r.test_accuracy - 0.25).abs() <= 0.1, "{}", r.test_accuracy);
    }

    #[test]
    fn errors() {
        let one = split(vec![vec![(0, 1.0)]; 3], vec![0; 3]);
        let two = split(vec![vec![(0, 1.0)], vec![(1, 1.0)]], vec![0, 1]);
        let c = ClassifierConfig::default();
        assert!(matches!(
            train_eval_classifier(&one, &two, &two, 2, 2, 0, &c),
            Err(Error::SingleClass)
        ));
        assert!(matches!(
            train_eval_classifier(&two, &two, &LabeledSplit::default(), 2, 2, 0, &c),
            Err(Error::EmptySplit("test"))
        ));
    }
}
