//! Acoustic transcription: pitch, bandwidth and duration tokens.
//!
//! The pipeline estimates (or imports) a pitch track on a 31.25 ms grid,
//! segments it with [`PitchCostModel`] under lengths restricted to the eight
//! note-length classes, then names each segment by bandwidth class, octave,
//! length class and slope. Segments whose median energy is below the rest
//! threshold are rests regardless of pitch.

mod classify;
mod cost;
mod synth;
mod token;

pub use classify::{
    class_lengths_in_frames, classify_bandwidth, hz_to_octave, octave_center_hz, quantize_length, BandwidthThresholds,
};
pub use cost::{AcousticLabel, CostParams, DistanceDomain, PitchCostModel, PitchSegmentModel};
pub use synth::synthesize;
pub use token::{encode_tokens, parse_tokens, Bandwidth, IspaAToken, LengthClass, ParseError, ParseErrorKind, Slope};

use crate::audio::{resample, Waveform, DEFAULT_SAMPLE_RATE};
use crate::dsp::{estimate_pitch, spectral_bandwidth, PitchConfig, PitchTrack};
use crate::error::{Error, Result};
use crate::segment::{viterbi_segment, Segment, SegmentationConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct AcousticConfig {
    /// Audio is resampled to this rate before analysis.
    pub sample_rate: u32,
    pub pitch: PitchConfig,
    pub lambda: f64,
    pub cost: CostParams,
    /// Segments with median energy below this (dBFS) are rests.
    pub rest_db: f64,
    pub bandwidth: BandwidthThresholds,
}

impl Default for AcousticConfig {
    fn default() -> Self {
        Self {
            sample_rate: DEFAULT_SAMPLE_RATE,
            pitch: PitchConfig::default(),
            lambda: 8.0,
            cost: CostParams::default(),
            rest_db: -50.0,
            bandwidth: BandwidthThresholds::default(),
        }
    }
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Transcribes audio with the built-in pitch estimator.
pub fn transcribe_a(w: &Waveform, config: &AcousticConfig) -> Result<Vec<IspaAToken>> {
    let w = resample(w, config.sample_rate)?;
    let track = estimate_pitch(&w, &config.pitch)?;
    transcribe_track(&w, &track, config)
}

/// Transcribes audio using an externally computed pitch track. The track's
/// hop defines the frame grid; bandwidth is measured on the same grid.
pub fn transcribe_track(w: &Waveform, track: &PitchTrack, config: &AcousticConfig) -> Result<Vec<IspaAToken>> {
    Ok(segment_track(w, track, config)?
        .into_iter()
        .map(|(_, token)| token)
        .collect())
}

/// Segments and tokens, in order.
pub fn segment_track(
    w: &Waveform,
    track: &PitchTrack,
    config: &AcousticConfig,
) -> Result<Vec<(Segment<AcousticLabel>, IspaAToken)>> {
    if track.is_empty() {
        return Err(Error::InvalidArgument("audio shorter than one frame".into()));
    }
    let hop = track.hop_seconds;
    let w = resample(w, config.sample_rate)?;
    let bandwidth = spectral_bandwidth(&w, hop)?;
    let seg_config = SegmentationConfig::new(config.lambda, class_lengths_in_frames(hop))?;
    let model = PitchCostModel::new(track, config.cost);
    let segments = viterbi_segment(track.len(), &model, &seg_config)?;

    Ok(segments
        .into_iter()
        .map(|seg| {
            let span = seg.start_frame..seg.end_frame;
            let length = quantize_length(seg.len(), hop);
            let energy = median(&track.energy_db[span.clone()]);
            let token = match seg.label {
                AcousticLabel::Pitched(model) if energy >= config.rest_db => {
                    let lo = span.start.min(bandwidth.values.len());
                    let hi = span.end.min(bandwidth.values.len());
                    IspaAToken::Pitched {
                        bandwidth: config.bandwidth.classify(median(&bandwidth.values[lo..hi])),
                        octave: hz_to_octave(model.hz_at(0.5)),
                        length,
                        slope: model.slope,
                    }
                }
                _ => IspaAToken::Rest { length },
            };
            (seg, token)
        })
        .collect())
}
