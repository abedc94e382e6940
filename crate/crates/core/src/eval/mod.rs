//! Token-rate metric and a bag-of-n-grams classifier over transcriptions.

mod logistic;
mod manifest;
mod ngram;

pub use logistic::{train_eval_classifier, ClassifierConfig, ClassifierReport, LabeledSplit, LogisticModel};
pub use manifest::{DatasetManifest, ManifestRow, Split};
pub use ngram::{ngram_counts, NgramVocabulary, SparseVector};

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};

/// One transcribed clip.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenDocument {
    pub tokens: Vec<String>,
    pub duration_seconds: f64,
    pub label: Option<String>,
}

impl TokenDocument {
    pub fn new(tokens: Vec<String>, duration_seconds: f64, label: Option<String>) -> Result<Self> {
        if !(duration_seconds > 0.0 && duration_seconds.is_finite()) {
            return Err(Error::InvalidArgument(format!("bad duration {duration_seconds}")));
        }
        Ok(Self {
            tokens,
            duration_seconds,
            label,
        })
    }

    /// Splits a line of token text on whitespace.
    pub fn from_line(line: &str, duration_seconds: f64, label: Option<String>) -> Result<Self> {
        Self::new(
            line.split_whitespace().map(String::from).collect(),
            duration_seconds,
            label,
        )
    }
}

/// Total tokens over total duration.
pub fn tokens_per_second<'a>(docs: impl IntoIterator<Item = &'a TokenDocument>) -> Result<f64> {
    let (mut tokens, mut seconds, mut n) = (0usize, 0.0, 0usize);
    for d in docs {
        tokens += d.tokens.len();
        seconds += d.duration_seconds;
        n += 1;
    }
    if n == 0 {
        return Err(Error::InvalidArgument("no documents".into()));
    }
    if seconds <= 0.0 {
        return Err(Error::ZeroDuration);
    }
    Ok(tokens as f64 / seconds)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitScores {
    pub train: f64,
    pub valid: f64,
    pub test: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedRun {
    pub seed: u64,
    pub alpha: f64,
    pub accuracy: SplitScores,
}

/// Evaluation summary written as JSON.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    /// Mean over seeds.
    pub accuracy: SplitScores,
    /// Sample standard deviation over seeds (0 for a single seed).
    pub accuracy_std: SplitScores,
    pub runs: Vec<SeedRun>,
    /// Measured on the training split.
    pub tokens_per_second: f64,
    pub classes: Vec<String>,
    /// Test-split confusion counts summed over seeds; rows are true classes.
    pub confusion: Vec<Vec<usize>>,
    pub vocabulary_size: usize,
    pub config: serde_json::Map<String, serde_json::Value>,
}

/// Labeled documents per split.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SplitDocuments {
    pub train: Vec<TokenDocument>,
    pub valid: Vec<TokenDocument>,
    pub test: Vec<TokenDocument>,
}

impl SplitDocuments {
    pub fn push(&mut self, split: Split, doc: TokenDocument) {
        match split {
            Split::Train => self.train.push(doc),
            Split::Valid => self.valid.push(doc),
            Split::Test => self.test.push(doc),
        }
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Fits the n-gram vocabulary on `train`, then trains and scores one
/// classifier per seed.
pub fn evaluate(docs: &SplitDocuments, n_max: usize, seeds: &[u64], config: &ClassifierConfig) -> Result<Report> {
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("at least one seed is required".into()));
    }
    for (name, split) in [("train", &docs.train), ("valid", &docs.valid), ("test", &docs.test)] {
        if split.is_empty() {
            return Err(Error::EmptySplit(name));
        }
    }
    let classes: Vec<String> = docs
        .train
        .iter()
        .map(|d| label_of(d))
        .collect::<Result<BTreeSet<_>>>()?
        .into_iter()
        .map(str::to_string)
        .collect();
    let vocab = NgramVocabulary::fit(docs.train.iter().map(|d| d.tokens.as_slice()), n_max)?;
    let featurize = |split: &[TokenDocument]| -> Result<LabeledSplit> {
        let mut out = LabeledSplit::default();
        for d in split {
            let label = label_of(d)?;
            let y = classes
                .iter()
                .position(|c| c == label)
                .ok_or_else(|| Error::InvalidArgument(format!("label {label:?} not in training split")))?;
            out.rows.push(vocab.transform(&d.tokens));
            out.labels.push(y);
        }
        Ok(out)
    };
    let (train, valid, test) = (featurize(&docs.train)?, featurize(&docs.valid)?, featurize(&docs.test)?);

    let mut runs = Vec::new();
    let mut confusion = vec![vec![0; classes.len()]; classes.len()];
    for &seed in seeds {
        let r = train_eval_classifier(&train, &valid, &test, vocab.len(), classes.len(), seed, config)?;
        for (row, add) in confusion.iter_mut().zip(&r.confusion) {
            for (c, a) in row.iter_mut().zip(add) {
                *c += a;
            }
        }
        runs.push(SeedRun {
            seed,
            alpha: r.alpha,
            accuracy: SplitScores {
                train: r.train_accuracy,
                valid: r.valid_accuracy,
                test: r.test_accuracy,
            },
        });
    }
    let stat = |f: fn(&SplitScores) -> f64| mean_std(&runs.iter().map(|r| f(&r.accuracy)).collect::<Vec<_>>());
    let (tr, va, te) = (stat(|s| s.train), stat(|s| s.valid), stat(|s| s.test));

    let mut echo = serde_json::Map::new();
    echo.insert("ngram".into(), n_max.into());
    echo.insert("seeds".into(), seeds.into());
    echo.insert("alphas".into(), config.alphas.clone().into());
    echo.insert("max_epochs".into(), config.max_epochs.into());
    echo.insert("tolerance".into(), config.tolerance.into());

    Ok(Report {
        accuracy: SplitScores {
            train: tr.0,
            valid: va.0,
            test: te.0,
        },
        accuracy_std: SplitScores {
            train: tr.1,
            valid: va.1,
            test: te.1,
        },
        runs,
        tokens_per_second: tokens_per_second(&docs.train)?,
        classes,
        confusion,
        vocabulary_size: vocab.len(),
        config: echo,
    })
}

fn label_of(d: &TokenDocument) -> Result<&str> {
    d.label
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("document without a label".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(text: &str, secs: f64, label: &str) -> TokenDocument {
        TokenDocument::from_line(text, secs, Some(label.into())).unwrap()
    }

    #[test]
    fn rate() {
        let d = doc("a b c d e f g h i j", 5.0, "x");
        assert_eq!(tokens_per_second([&d]).unwrap(), 2.0);
        assert!(TokenDocument::new(vec![], 0.0, None).is_err());
        assert!(tokens_per_second(std::iter::empty::<&TokenDocument>()).is_err());
    }

    #[test]
    fn rate_ignores_order() {
        let docs = vec![doc("a b c", 1.5, "x"), doc("a", 0.7, "x"), doc("a b c d e", 2.2, "y")];
        let fwd = tokens_per_second(&docs).unwrap();
        let rev = tokens_per_second(docs.iter().rev()).unwrap();
        assert_eq!(fwd, rev);
    }

    #[test]
    fn end_to_end_report() {
        let mut docs = SplitDocuments::default();
        for (split, n) in [(Split::Train, 8), (Split::Valid, 3), (Split::Test, 4)] {
            for i in 0..n {
                docs.push(split, doc(&format!("N5/2= N5/4= t{i}"), 3.0, "tone"));
                docs.push(split, doc(&format!("R/4 W6/8+1 R/8 n{i}"), 2.0, "burst"));
            }
        }
        let report = evaluate(&docs, 2, &[0, 1, 2], &ClassifierConfig::default()).unwrap();
        assert_eq!(report.accuracy.test, 1.0);
        assert_eq!(report.accuracy_std.test, 0.0);
        assert_eq!(report.classes, ["burst", "tone"]);
        assert_eq!(report.confusion, vec![vec![12, 0], vec![0, 12]]);
        assert_eq!(report.runs.len(), 3);
        assert!((report.tokens_per_second - 56.0 / 40.0).abs() < 1e-12);
        let again = evaluate(&docs, 2, &[0, 1, 2], &ClassifierConfig::default()).unwrap();
        assert_eq!(
            serde_json::to_string(&report).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }

    #[test]
    fn unknown_test_label() {
        let mut docs = SplitDocuments::default();
        docs.push(Split::Train, doc("a", 1.0, "x"));
        docs.push(Split::Train, doc("b", 1.0, "y"));
        docs.push(Split::Valid, doc("a", 1.0, "x"));
        docs.push(Split::Test, doc("a", 1.0, "z"));
        assert!(evaluate(&docs, 1, &[0], &ClassifierConfig::default()).is_err());
    }
}
