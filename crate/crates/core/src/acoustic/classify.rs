use serde::{Deserialize, Serialize};

use super::token::{Bandwidth, LengthClass};

/// Upper edges (Hz) of the U, N, M and W bandwidth classes.
///
/// A steady sinusoid measures roughly 9 Hz through the default 62.5 ms Hann
/// window, so the U/N edge sits below that: pure tones are N, and U is left
/// for frames with essentially no spectral spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandwidthThresholds {
    pub edges_hz: [f64; 4],
}

impl Default for BandwidthThresholds {
    fn default() -> Self {
        Self {
            edges_hz: [5.0, 500.0, 1200.0, 3000.0],
        }
    }
}

impl BandwidthThresholds {
    /// Places the class edges at the 20/40/60/80 % quantiles of `reference`
    /// bandwidth values, so a reference corpus fills the classes evenly.
    pub fn calibrate(reference: &[f64]) -> Option<Self> {
        let mut v: Vec<f64> = reference.iter().copied().filter(|x| x.is_finite()).collect();
        if v.len() < 5 {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let q = |p: f64| v[((v.len() - 1) as f64 * p).round() as usize];
        let edges_hz = [q(0.2), q(0.4), q(0.6), q(0.8)];
        edges_hz.windows(2).all(|w| w[0] < w[1]).then_some(Self { edges_hz })
    }

    pub fn classify(&self, median_bw_hz: f64) -> Bandwidth {
        let idx = self.edges_hz.iter().take_while(|&&e| median_bw_hz >= e).count();
        Bandwidth::ALL[idx]
    }
}

/// Bandwidth class under the default thresholds.
pub fn classify_bandwidth(median_bw_hz: f64) -> Bandwidth {
    BandwidthThresholds::default().classify(median_bw_hz)
}

/// MIDI octave number (middle C = MIDI 60 starts octave 4), clamped to 0..=9.
pub fn hz_to_octave(f0_hz: f64) -> u8 {
    let midi = 69.0 + 12.0 * (f0_hz / 440.0).log2();
    ((midi / 12.0).floor() - 1.0).clamp(0.0, 9.0) as u8
}

/// Geometric center frequency of an octave.
pub fn octave_center_hz(octave: u8) -> f64 {
    let midi = 12.0 * (octave as f64 + 1.0) + 5.5;
    440.0 * 2f64.powf((midi - 69.0) / 12.0)
}

/// Nearest length class in log2 duration; exact ties go to the longer class.
pub fn quantize_length(length_frames: usize, hop_seconds: f64) -> LengthClass {
    let target = (length_frames.max(1) as f64 * hop_seconds).log2();
    let mut best = LengthClass::ThirtySecond;
    let mut best_dist = f64::INFINITY;
    for class in LengthClass::ALL {
        let d = (class.seconds().log2() - target).abs();
        if d <= best_dist + 1e-12 {
            best = class;
            best_dist = d.min(best_dist);
        }
    }
    best
}

/// Frame counts of the length classes on a `hop_seconds` grid.
pub fn class_lengths_in_frames(hop_seconds: f64) -> Vec<usize> {
    let mut lengths: Vec<usize> = LengthClass::ALL
        .iter()
        .map(|c| (c.seconds() / hop_seconds).round() as usize)
        .filter(|&n| n > 0)
        .collect();
    lengths.dedup();
    lengths
}
