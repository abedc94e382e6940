//! Per-frame representations of a waveform: MFCC features, pitch and
//! spectral bandwidth, plus readers for externally computed tracks.

mod bandwidth;
mod ispf;
mod mfcc;
mod pitch;
mod tables;

pub use bandwidth::{spectral_bandwidth, BandwidthTrack};
pub use ispf::{export_features, import_features, read_ispf, write_ispf, ISPF_MAGIC, ISPF_VERSION};
pub use mfcc::{compute_mfcc, MfccConfig};
pub use pitch::{estimate_pitch, PitchConfig, PitchTrack};
pub use tables::{import_alignment, import_pitch, read_alignment, read_pitch_csv, write_pitch_csv, PhoneInterval};

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::audio::{frame_center, frame_count, hann, padded_slice, Waveform};
use crate::error::{Error, Result};

/// A sequence of equal-length feature vectors on a fixed hop grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSequence {
    hop_seconds: f64,
    start_seconds: f64,
    dim: usize,
    data: Vec<f64>,
}

impl FeatureSequence {
    /// Builds a sequence from row-major `data` (`n_frames * dim` values).
    pub fn new(hop_seconds: f64, start_seconds: f64, dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("feature dim must be >= 1".into()));
        }
        if !(hop_seconds > 0.0 && hop_seconds.is_finite()) {
            return Err(Error::InvalidArgument(format!("bad hop {hop_seconds}")));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidArgument(format!(
                "{} values do not divide into frames of dim {dim}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite value in frame {}", i / dim)));
        }
        Ok(Self {
            hop_seconds,
            start_seconds,
            dim,
            data,
        })
    }

    pub fn from_frames(hop_seconds: f64, frames: &[Vec<f64>]) -> Result<Self> {
        let dim = frames.first().map_or(0, Vec::len);
        if let Some(bad) = frames.iter().find(|f| f.len() != dim) {
            return Err(Error::DimMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Self::new(hop_seconds, 0.0, dim, frames.concat())
    }

    pub fn hop_seconds(&self) -> f64 {
        self.hop_seconds
    }

    pub fn start_seconds(&self) -> f64 {
        self.start_seconds
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn frame(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn frames(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Center time of frame `i`.
    pub fn frame_time(&self, i: usize) -> f64 {
        self.start_seconds + i as f64 * self.hop_seconds
    }

    pub fn duration_seconds(&self) -> f64 {
        self.len() as f64 * self.hop_seconds
    }
}

/// Hann-windowed short-time spectra on a centered frame grid.
pub(crate) struct Stft {
    window: Vec<f64>,
    n_fft: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl Stft {
    pub(crate) fn new(win_len: usize) -> Self {
        let n_fft = win_len.next_power_of_two();
        Self {
            window: hann(win_len),
            n_fft,
            fft: FftPlanner::new().plan_fft_forward(n_fft),
        }
    }

    pub(crate) fn n_fft(&self) -> usize {
        self.n_fft
    }

    /// Magnitudes of bins `0..=n_fft/2` for each frame of the `hop_seconds` grid.
    pub(crate) fn magnitudes(&self, w: &Waveform, hop_seconds: f64) -> Vec<Vec<f64>> {
        let sr = w.sample_rate();
        let win_len = self.window.len();
        let mut buf = vec![Complex::new(0.0, 0.0); self.n_fft];
        (0..frame_count(w.len(), sr, hop_seconds))
            .map(|i| {
                let start = frame_center(i, sr, hop_seconds) - (win_len / 2) as isize;
                let frame = padded_slice(w.samples(), start, win_len);
                buf.iter_mut().for_each(|c| *c = Complex::new(0.0, 0.0));
                for ((b, s), wv) in buf.iter_mut().zip(&frame).zip(&self.window) {
                    b.re = s * wv;
                }
                self.fft.process(&mut buf);
                buf[..=self.n_fft / 2].iter().map(|c| c.norm()).collect()
            })
            .collect()
    }
}
