use super::Stft;
use crate::audio::Waveform;
use crate::error::{Error, Result};

/// Per-frame spectral bandwidth in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthTrack {
    pub hop_seconds: f64,
    pub values: Vec<f64>,
}

/// Second-moment spectral bandwidth around the magnitude-weighted centroid.
///
/// Uses a Hann window of twice the hop. Frames with an all-zero spectrum
/// get bandwidth 0.
pub fn spectral_bandwidth(w: &Waveform, hop_seconds: f64) -> Result<BandwidthTrack> {
    if !(hop_seconds > 0.0) {
        return Err(Error::InvalidArgument("hop must be positive".into()));
    }
    let sr = w.sample_rate() as f64;
    let win_len = ((2.0 * hop_seconds * sr).round() as usize).max(2);
    let stft = Stft::new(win_len);
    let bin_hz = sr / stft.n_fft() as f64;

    let values = stft
        .magnitudes(w, hop_seconds)
        .into_iter()
        .map(|mags| {
            let mag_sum: f64 = mags.iter().sum();
            if mag_sum <= 0.0 {
                return 0.0;
            }
            let centroid = mags.iter().enumerate().map(|(k, m)| k as f64 * bin_hz * m).sum::<f64>() / mag_sum;
            let (num, den) = mags.iter().enumerate().fold((0.0, 0.0), |(num, den), (k, m)| {
                let p = m * m;
                let d = k as f64 * bin_hz - centroid;
                (num + p * d * d, den + p)
            });
            (num / den).sqrt()
        })
        .collect();
    Ok(BandwidthTrack { hop_seconds, values })
}
