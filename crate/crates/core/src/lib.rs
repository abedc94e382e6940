//! Discrete, human-readable transcription of animal and general audio.
//!
//! Two pipelines turn a [`Waveform`](audio::Waveform) into token text:
//!
//! * [`acoustic`]: pitch-tracked segments named by bandwidth, octave, note
//!   length and pitch slope (`N5/2=`, `R/4`, ...).
//! * [`feature`]: per-frame feature vectors quantized against a k-means
//!   codebook, optionally segmented (`c7..`) and relabeled with phone symbols.
//!
//! Both share the dynamic-programming segmenter in [`segment`]. The [`eval`]
//! module measures token rate and trains a bag-of-n-grams classifier over
//! the transcriptions.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acoustic;
pub mod audio;
pub mod dsp;
pub mod error;
pub mod eval;
pub mod feature;
pub mod segment;

pub use error::{Error, Result};
