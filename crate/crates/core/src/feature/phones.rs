use std::collections::{BTreeMap, HashSet};

use super::assignment::solve_assignment;
use super::codebook::{squared_distance, Codebook};
use crate::dsp::{FeatureSequence, PhoneInterval};
use crate::error::{Error, Result};

/// Mean feature vector per phone.
#[derive(Debug, Clone, PartialEq)]
pub struct PhoneTable {
    entries: Vec<PhoneEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhoneEntry {
    pub phone: String,
    pub mean: Vec<f64>,
    /// Frames that contributed to the mean.
    pub support: usize,
}

impl PhoneTable {
    pub fn new(entries: Vec<PhoneEntry>) -> Result<Self> {
        let mut seen = HashSet::new();
        let dim = entries.first().map_or(0, |e| e.mean.len());
        for e in &entries {
            if !seen.insert(e.phone.as_str()) {
                return Err(Error::InvalidArgument(format!("duplicate phone {:?}", e.phone)));
            }
            if e.support == 0 || e.mean.len() != dim || e.mean.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!("bad entry for phone {:?}", e.phone)));
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[PhoneEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, phone: &str) -> Option<&PhoneEntry> {
        self.entries.iter().find(|e| e.phone == phone)
    }
}

/// Averages the frames whose center falls inside each phone's intervals.
/// Returns the table (phones sorted by symbol) plus human-readable warnings
/// for clipped intervals and phones that covered no frame.
pub fn phone_mean_vectors(corpus: &[(FeatureSequence, Vec<PhoneInterval>)]) -> Result<(PhoneTable, Vec<String>)> {
    let dim = corpus.first().map_or(0, |(fs, _)| fs.dim());
    let mut sums: BTreeMap<String, (Vec<f64>, usize)> = BTreeMap::new();
    let mut warnings = Vec::new();

    for (item, (fs, intervals)) in corpus.iter().enumerate() {
        if fs.dim() != dim {
            return Err(Error::DimMismatch {
                expected: dim,
                found: fs.dim(),
            });
        }
        let t0 = fs.start_seconds();
        let t1 = t0 + fs.duration_seconds();
        let tol = 1e-6;
        // per phone, the frames covered by any of its intervals in this item
        let mut covered: BTreeMap<&str, Vec<bool>> = BTreeMap::new();
        for iv in intervals {
            let entry = covered
                .entry(iv.phone.as_str())
                .or_insert_with(|| vec![false; fs.len()]);
            if iv.start_s < t0 - tol || iv.end_s > t1 + tol {
                warnings.push(format!(
                    "item {item}: {:?} interval {:.3}-{:.3} s clipped to {t0:.3}-{t1:.3} s",
                    iv.phone, iv.start_s, iv.end_s
                ));
            }
            let (start, end) = (iv.start_s.max(t0), iv.end_s.min(t1));
            if end <= start {
                continue;
            }
            let lo = (((start - t0) / fs.hop_seconds()).floor().max(0.0)) as usize;
            let hi = ((((end - t0) / fs.hop_seconds()).ceil() as usize) + 1).min(fs.len());
            for (i, hit) in entry.iter_mut().enumerate().take(hi).skip(lo) {
                let t = fs.frame_time(i);
                if start <= t && t < end {
                    *hit = true;
                }
            }
        }
        for (phone, mask) in covered {
            let (sum, count) = sums.entry(phone.to_string()).or_insert_with(|| (vec![0.0; dim], 0));
            for (i, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
                *count += 1;
                for (s, v) in sum.iter_mut().zip(fs.frame(i)) {
                    *s += v;
                }
            }
        }
    }

    let mut entries = Vec::new();
    for (phone, (sum, support)) in sums {
        if support == 0 {
            warnings.push(format!("phone {phone:?} covers no frame centers; dropped"));
            continue;
        }
        let mean = sum.iter().map(|s| s / support as f64).collect();
        entries.push(PhoneEntry { phone, mean, support });
    }
    Ok((PhoneTable::new(entries)?, warnings))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhoneMapping {
    pub codebook: Codebook,
    /// `(phone index, centroid)` pairs chosen by the assignment.
    pub pairs: Vec<(usize, usize)>,
    /// Sum of Euclidean distances over assigned pairs.
    pub total_distance: f64,
}

/// Labels centroids with phones by a minimum-distance one-to-one matching.
/// Centroids left over get `c<ID>` labels.
pub fn map_phones(cb: &Codebook, phones: &PhoneTable) -> Result<PhoneMapping> {
    if phones.is_empty() {
        return Err(Error::NoPhones);
    }
    let cost: Vec<Vec<f64>> = phones
        .entries()
        .iter()
        .map(|e| {
            if e.mean.len() != cb.dim() {
                return Err(Error::DimMismatch {
                    expected: cb.dim(),
                    found: e.mean.len(),
                });
            }
            Ok(cb
                .centroids()
                .iter()
                .map(|c| squared_distance(&e.mean, c).sqrt())
                .collect())
        })
        .collect::<Result<_>>()?;
    let assignment = solve_assignment(&cost)?;

    let mut labels: Vec<String> = (0..cb.k()).map(Codebook::cluster_symbol).collect();
    let pairs: Vec<(usize, usize)> = assignment.pairs().collect();
    for &(p, c) in &pairs {
        labels[c] = phones.entries()[p].phone.clone();
    }
    let codebook = cb.clone().with_phone_labels(labels)?;
    Ok(PhoneMapping {
        codebook,
        pairs,
        total_distance: assignment.total,
    })
}
