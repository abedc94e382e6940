//! Feature-based transcription over a k-means codebook.
//!
//! `raw` emits the nearest centroid per frame (`c12 c12 c3 ...`). `seg` runs
//! the segmenter with [`FeatureCostModel`] over the lengths in
//! [`LENGTH_CODES`] and writes each segment as its centroid symbol plus a
//! length suffix (`c12; c3,`). `phn` does the same with phone labels taken
//! from [`map_phones`].

mod assignment;
mod codebook;
mod cost;
mod kmeans;
mod phones;
mod punct;

pub use assignment::{solve_assignment, Assignment};
pub use codebook::Codebook;
pub use cost::{feature_segment_cost, FeatureCostModel};
pub use kmeans::{assign_frames, train_codebook, KMeansConfig, TrainedCodebook};
pub use phones::{map_phones, phone_mean_vectors, PhoneEntry, PhoneMapping, PhoneTable};
pub use punct::{allowed_lengths, decode_length_punct, encode_length_punct, nearest_code_length, LENGTH_CODES};

use std::fmt;
use std::str::FromStr;

use crate::audio::{resample, Waveform, DEFAULT_SAMPLE_RATE};
use crate::dsp::{compute_mfcc, FeatureSequence, MfccConfig};
use crate::error::{Error, Result};
use crate::segment::{viterbi_segment, SegmentationConfig};

pub const DEFAULT_LAMBDA: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    #[default]
    Raw,
    Seg,
    Phn,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Raw => "raw",
            Variant::Seg => "seg",
            Variant::Phn => "phn",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Variant::Raw),
            "seg" => Ok(Variant::Seg),
            "phn" => Ok(Variant::Phn),
            other => Err(Error::InvalidArgument(format!("unknown variant {other:?}"))),
        }
    }
}

/// Built-in front end: MFCCs computed at 16 kHz.
pub fn mfcc_features(w: &Waveform, hop_seconds: f64, n_coeffs: usize) -> Result<FeatureSequence> {
    let w = resample(w, DEFAULT_SAMPLE_RATE)?;
    compute_mfcc(
        &w,
        &MfccConfig {
            n_coeffs,
            hop_seconds,
            ..MfccConfig::default()
        },
    )
}

/// Transcribes audio with MFCCs matching the codebook's dim and hop.
pub fn transcribe_audio_f(w: &Waveform, cb: &Codebook, variant: Variant, lambda: f64) -> Result<Vec<String>> {
    let features = mfcc_features(w, cb.hop_seconds(), cb.dim())?;
    transcribe_f(&features, cb, variant, lambda)
}

/// Transcribes features into tokens. `lambda` only affects `seg` and `phn`.
pub fn transcribe_f(features: &FeatureSequence, cb: &Codebook, variant: Variant, lambda: f64) -> Result<Vec<String>> {
    if features.dim() != cb.dim() {
        return Err(Error::DimMismatch {
            expected: cb.dim(),
            found: features.dim(),
        });
    }
    let labels = match variant {
        Variant::Phn => Some(cb.phone_labels().ok_or(Error::MissingPhoneLabels)?),
        _ => None,
    };
    let symbol = |k: usize| match labels {
        Some(l) => l[k].clone(),
        None => Codebook::cluster_symbol(k),
    };
    if features.is_empty() {
        return Ok(Vec::new());
    }
    if variant == Variant::Raw {
        return Ok(assign_frames(features, cb)?.into_iter().map(symbol).collect());
    }

    let model = FeatureCostModel::new(features, cb)?;
    let config = SegmentationConfig::new(lambda, allowed_lengths())?;
    viterbi_segment(features.len(), &model, &config)?
        .into_iter()
        .map(|seg| {
            let suffix = encode_length_punct(nearest_code_length(seg.len()))?;
            Ok(format!("{}{suffix}", symbol(seg.label)))
        })
        .collect()
}

/// Total frames implied by a transcription's length suffixes. `raw` tokens
/// count one frame each.
pub fn decoded_frame_count(tokens: &[String], variant: Variant, cb: &Codebook) -> Result<usize> {
    if variant == Variant::Raw {
        return Ok(tokens.len());
    }
    let symbols: Vec<String> = match (variant, cb.phone_labels()) {
        (Variant::Phn, Some(l)) => l.to_vec(),
        _ => (0..cb.k()).map(Codebook::cluster_symbol).collect(),
    };
    tokens
        .iter()
        .map(|t| decode_length_punct(t, &symbols).map(|(_, n)| n))
        .sum()
}
