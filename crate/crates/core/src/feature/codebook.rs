use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const CODEBOOK_VERSION: u32 = 1;

/// k-means centroids over one kind of per-frame feature.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    dim: usize,
    centroids: Vec<Vec<f64>>,
    feature_kind: String,
    hop_seconds: f64,
    phone_labels: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct CodebookFile {
    version: u32,
    dim: usize,
    hop_seconds: f64,
    feature_kind: String,
    centroids: Vec<Vec<f64>>,
    phone_labels: Option<Vec<String>>,
}

impl Codebook {
    pub fn new(centroids: Vec<Vec<f64>>, feature_kind: impl Into<String>, hop_seconds: f64) -> Result<Self> {
        let dim = centroids.first().map_or(0, Vec::len);
        let cb = Self {
            dim,
            centroids,
            feature_kind: feature_kind.into(),
            hop_seconds,
            phone_labels: None,
        };
        cb.validate()?;
        Ok(cb)
    }

    fn validate(&self) -> Result<()> {
        if self.centroids.len() < 2 {
            return Err(Error::InvalidCodebook(format!(
                "need at least 2 centroids, found {}",
                self.centroids.len()
            )));
        }
        if self.dim == 0 {
            return Err(Error::InvalidCodebook("centroid dim is 0".into()));
        }
        for (k, c) in self.centroids.iter().enumerate() {
            if c.len() != self.dim {
                return Err(Error::DimMismatch {
                    expected: self.dim,
                    found: c.len(),
                });
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidCodebook(format!("centroid {k} is not finite")));
            }
        }
        if let Some(labels) = &self.phone_labels {
            if labels.len() != self.centroids.len() {
                return Err(Error::InvalidCodebook(format!(
                    "{} phone labels for {} centroids",
                    labels.len(),
                    self.centroids.len()
                )));
            }
            let mut seen = HashSet::new();
            for l in labels {
                if l.is_empty() || l.chars().any(char::is_whitespace) {
                    return Err(Error::InvalidCodebook(format!("bad phone label {l:?}")));
                }
                if !seen.insert(l.as_str()) {
                    return Err(Error::InvalidCodebook(format!("duplicate phone label {l:?}")));
                }
            }
        }
        Ok(())
    }

    pub fn with_phone_labels(mut self, labels: Vec<String>) -> Result<Self> {
        self.phone_labels = Some(labels);
        self.validate()?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    pub fn centroids(&self) -> &[Vec<f64>] {
        &self.centroids
    }

    pub fn centroid(&self, k: usize) -> &[f64] {
        &self.centroids[k]
    }

    pub fn feature_kind(&self) -> &str {
        &self.feature_kind
    }

    pub fn hop_seconds(&self) -> f64 {
        self.hop_seconds
    }

    pub fn phone_labels(&self) -> Option<&[String]> {
        self.phone_labels.as_deref()
    }

    /// `c<ID>` symbol used when no phone label applies.
    pub fn cluster_symbol(k: usize) -> String {
        format!("c{k}")
    }

    /// Nearest centroid by squared Euclidean distance; ties go to the smaller ID.
    pub fn nearest(&self, frame: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (k, c) in self.centroids.iter().enumerate() {
            let d = squared_distance(frame, c);
            if d < best.1 {
                best = (k, d);
            }
        }
        best
    }

    pub fn to_json(&self) -> Result<String> {
        let file = CodebookFile {
            version: CODEBOOK_VERSION,
            dim: self.dim,
            hop_seconds: self.hop_seconds,
            feature_kind: self.feature_kind.clone(),
            centroids: self.centroids.clone(),
            phone_labels: self.phone_labels.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CodebookFile = serde_json::from_str(text)?;
        if file.version != CODEBOOK_VERSION {
            return Err(Error::InvalidCodebook(format!("unsupported version {}", file.version)));
        }
        let cb = Self {
            dim: file.dim,
            centroids: file.centroids,
            feature_kind: file.feature_kind,
            hop_seconds: file.hop_seconds,
            phone_labels: file.phone_labels,
        };
        cb.validate()?;
        Ok(cb)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = self.to_json()?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
