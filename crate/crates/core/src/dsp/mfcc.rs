use std::f64::consts::PI;

use super::{FeatureSequence, Stft};
use crate::audio::Waveform;
use crate::error::{Error, Result};

const LOG_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct MfccConfig {
    pub n_coeffs: usize,
    pub hop_seconds: f64,
    pub n_mels: usize,
}

impl Default for MfccConfig {
    fn default() -> Self {
        Self {
            n_coeffs: 40,
            hop_seconds: 0.020,
            n_mels: 64,
        }
    }
}

fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular filters spaced evenly on the mel scale between 0 and Nyquist.
fn mel_filterbank(n_mels: usize, n_fft: usize, sample_rate: u32) -> Vec<Vec<f64>> {
    let nyquist = sample_rate as f64 / 2.0;
    let top = hz_to_mel(nyquist);
    let edges: Vec<f64> = (0..n_mels + 2)
        .map(|i| mel_to_hz(top * i as f64 / (n_mels + 1) as f64))
        .collect();
    let bin_hz: Vec<f64> = (0..=n_fft / 2)
        .map(|k| k as f64 * sample_rate as f64 / n_fft as f64)
        .collect();
    (0..n_mels)
        .map(|m| {
            let (lo, mid, hi) = (edges[m], edges[m + 1], edges[m + 2]);
            bin_hz
                .iter()
                .map(|&f| {
                    if f <= lo || f >= hi {
                        0.0
                    } else if f <= mid {
                        (f - lo) / (mid - lo)
                    } else {
                        (hi - f) / (hi - mid)
                    }
                })
                .collect()
        })
        .collect()
}

/// Orthonormal DCT-II rows `0..n_out` for inputs of length `n_in`.
fn dct_matrix(n_out: usize, n_in: usize) -> Vec<Vec<f64>> {
    (0..n_out)
        .map(|k| {
            let scale = if k == 0 {
                (1.0 / n_in as f64).sqrt()
            } else {
                (2.0 / n_in as f64).sqrt()
            };
            (0..n_in)
                .map(|n| scale * (PI * k as f64 * (n as f64 + 0.5) / n_in as f64).cos())
                .collect()
        })
        .collect()
}

/// Mel-frequency cepstral coefficients (coefficient 0 included).
///
/// Frames are centered every `hop_seconds` with a Hann window of twice the
/// hop, so a clip of `d` seconds yields `ceil(d / hop)` frames.
pub fn compute_mfcc(w: &Waveform, config: &MfccConfig) -> Result<FeatureSequence> {
    if !(1..=64).contains(&config.n_coeffs) {
        return Err(Error::InvalidArgument(format!(
            "n_coeffs must be in [1, 64], got {}",
            config.n_coeffs
        )));
    }
    if config.n_coeffs > config.n_mels {
        return Err(Error::InvalidArgument(format!(
            "n_coeffs ({}) exceeds mel bands ({})",
            config.n_coeffs, config.n_mels
        )));
    }
    if !(config.hop_seconds > 0.0) {
        return Err(Error::InvalidArgument("hop must be positive".into()));
    }
    let sr = w.sample_rate();
    let win_len = (2.0 * config.hop_seconds * sr as f64).round() as usize;
    if w.len() < win_len {
        return Err(Error::AudioTooShort {
            samples: w.len(),
            window: win_len,
        });
    }

    let stft = Stft::new(win_len);
    let filters = mel_filterbank(config.n_mels, stft.n_fft(), sr);
    let dct = dct_matrix(config.n_coeffs, config.n_mels);

    let mut data = Vec::new();
    let mut log_mel = vec![0.0; config.n_mels];
    for mags in stft.magnitudes(w, config.hop_seconds) {
        for (out, filt) in log_mel.iter_mut().zip(&filters) {
            let e: f64 = filt.iter().zip(&mags).map(|(f, m)| f * m * m).sum();
            *out = e.max(LOG_FLOOR).ln();
        }
        data.extend(
            dct.iter()
                .map(|row| row.iter().zip(&log_mel).map(|(a, b)| a * b).sum::<f64>()),
        );
    }
    FeatureSequence::new(config.hop_seconds, 0.0, config.n_coeffs, data)
}
