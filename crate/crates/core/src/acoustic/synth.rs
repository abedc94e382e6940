use std::f64::consts::PI;

use super::classify::octave_center_hz;
use super::token::IspaAToken;
use crate::audio::Waveform;
use crate::error::Result;

const AMPLITUDE: f64 = 0.3;
const RAMP_SECONDS: f64 = 0.010;

/// Renders tokens as pure tones: each pitched token becomes an exponential
/// sweep centered (geometrically) on its octave, rising or falling by the
/// slope's log2 ratio; rests become silence. Bandwidth is ignored.
pub fn synthesize(tokens: &[IspaAToken], sample_rate: u32) -> Result<Waveform> {
    let sr = sample_rate as f64;
    let mut samples = Vec::new();
    for token in tokens {
        let seconds = token.length().seconds();
        let n = (seconds * sr).round() as usize;
        match *token {
            IspaAToken::Rest { .. } => samples.extend(std::iter::repeat_n(0.0, n)),
            IspaAToken::Pitched { octave, slope, .. } => {
                let ratio = slope.log2_ratio();
                let f_start = octave_center_hz(octave) * (-ratio / 2.0).exp2();
                let ramp = (RAMP_SECONDS * sr).round().max(1.0);
                samples.extend((0..n).map(|i| {
                    let t = i as f64 / sr;
                    let phase = if ratio == 0.0 {
                        2.0 * PI * f_start * t
                    } else {
                        let k = ratio * std::f64::consts::LN_2 / seconds;
                        2.0 * PI * f_start * ((k * t).exp() - 1.0) / k
                    };
                    let edge = (i as f64).min((n - 1 - i) as f64);
                    let gain = if edge < ramp {
                        0.5 - 0.5 * (PI * edge / ramp).cos()
                    } else {
                        1.0
                    };
                    AMPLITUDE * gain * phase.sin()
                }));
            }
        }
    }
    Waveform::new(samples, sample_rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acoustic::parse_tokens;

    #[test]
    fn rest_is_silent() {
        let w = synthesize(&parse_tokens("R/4").unwrap(), 16000).unwrap();
        assert_eq!(w.len(), 16000);
        assert!(w.samples().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn flat_half_note_is_two_seconds_in_octave_five() {
        let w = synthesize(&parse_tokens("N5/2=").unwrap(), 16000).unwrap();
        assert_eq!(w.len(), 32000);
        // count zero crossings to estimate frequency
        let crossings = w.samples().windows(2).filter(|p| p[0] <= 0.0 && p[1] > 0.0).count();
        let hz = crossings as f64 / 2.0;
        assert!((500.0..1000.0).contains(&hz), "{hz}");
        assert!(w.samples().iter().all(|s| s.abs() <= AMPLITUDE));
    }
}
