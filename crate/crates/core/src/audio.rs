//! Waveform loading, resampling and frame energy.

use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};

/// Default internal processing rate for every pipeline.
pub const DEFAULT_SAMPLE_RATE: u32 = 16_000;

/// Floor applied to frame energies, in dBFS.
pub const ENERGY_FLOOR_DB: f64 = -120.0;

/// Mono PCM audio with amplitudes nominally in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidArgument("sample rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument(format!("sample {i} is not finite")));
        }
        Ok(Self { samples, sample_rate })
    }

    pub fn silence(seconds: f64, sample_rate: u32) -> Self {
        let n = (seconds * sample_rate as f64).round() as usize;
        Self {
            samples: vec![0.0; n],
            sample_rate,
        }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Multiplies every sample by `gain`.
    pub fn scaled(&self, gain: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|s| s * gain).collect(),
            sample_rate: self.sample_rate,
        }
    }

    /// Appends another waveform of the same rate.
    pub fn concat(&self, other: &Waveform) -> Result<Self> {
        if other.sample_rate != self.sample_rate {
            return Err(Error::InvalidArgument(format!(
                "cannot concatenate {} Hz and {} Hz audio",
                self.sample_rate, other.sample_rate
            )));
        }
        let mut samples = self.samples.clone();
        samples.extend_from_slice(&other.samples);
        Ok(Self {
            samples,
            sample_rate: self.sample_rate,
        })
    }
}

/// Per-frame energy in dBFS (0 dBFS is the RMS of a full-scale square wave).
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTrack {
    pub hop_seconds: f64,
    pub values: Vec<f64>,
}

/// Reads a PCM WAV file (8/16/24/32-bit integer or 32-bit float) and
/// averages all channels to mono.
pub fn load_audio(path: impl AsRef<Path>) -> Result<Waveform> {
    let path = path.as_ref();
    let wav_err = |e: hound::Error| match e {
        hound::Error::IoError(source) => Error::io(path, source),
        hound::Error::Unsupported => Error::UnsupportedEncoding(format!("{}", path.display())),
        other => Error::Wav {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    };
    let mut reader = hound::WavReader::open(path).map_err(wav_err)?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels == 0 {
        return Err(Error::UnsupportedEncoding("zero channels".into()));
    }

    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, bits @ (8 | 16 | 24 | 32)) => {
            let scale = 1.0 / (1u64 << (bits - 1)) as f64;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| v as f64 * scale))
                .collect::<std::result::Result<_, _>>()
                .map_err(wav_err)?
        }
        (hound::SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(wav_err)?,
        (format, bits) => return Err(Error::UnsupportedEncoding(format!("{bits}-bit {format:?} samples"))),
    };

    let samples: Vec<f64> = interleaved
        .chunks_exact(channels)
        .map(|frame| frame.iter().sum::<f64>() / channels as f64)
        .collect();
    if samples.is_empty() {
        return Err(Error::ZeroLengthAudio);
    }
    Waveform::new(samples, spec.sample_rate)
}

/// Writes 16-bit mono PCM.
pub fn write_wav(path: impl AsRef<Path>, w: &Waveform) -> Result<()> {
    let path = path.as_ref();
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: w.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let to_err = |e: hound::Error| match e {
        hound::Error::IoError(source) => Error::io(path, source),
        other => Error::Wav {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(to_err)?;
    for &s in &w.samples {
        let v = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        writer.write_sample(v).map_err(to_err)?;
    }
    writer.finalize().map_err(to_err)
}

/// Zero crossings of the sinc kernel kept on each side.
const SINC_ZERO_CROSSINGS: f64 = 16.0;

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

fn blackman(x: f64) -> f64 {
    // x in [-1, 1]
    if x.abs() >= 1.0 {
        0.0
    } else {
        0.42 + 0.5 * (PI * x).cos() + 0.08 * (2.0 * PI * x).cos()
    }
}

/// Band-limited resampling with a Blackman-windowed sinc kernel.
pub fn resample(w: &Waveform, target_rate: u32) -> Result<Waveform> {
    if target_rate == 0 {
        return Err(Error::InvalidArgument("target rate must be positive".into()));
    }
    if target_rate == w.sample_rate {
        return Ok(w.clone());
    }
    let src = w.sample_rate as f64;
    let dst = target_rate as f64;
    let ratio = dst / src;
    // Cutoff in cycles per input sample, slightly under the lower Nyquist.
    let cutoff = 0.5 * ratio.min(1.0) * 0.95;
    let half = SINC_ZERO_CROSSINGS / (2.0 * cutoff);
    let n_out = (w.len() as f64 * ratio).round() as usize;
    let input = &w.samples;
    let last = input.len() as isize - 1;

    let samples = (0..n_out)
        .map(|j| {
            let x = j as f64 / ratio;
            let lo = ((x - half).ceil() as isize).max(0);
            let hi = ((x + half).floor() as isize).min(last);
            let mut acc = 0.0;
            for k in lo..=hi {
                let d = x - k as f64;
                acc += input[k as usize] * 2.0 * cutoff * sinc(2.0 * cutoff * d) * blackman(d / half);
            }
            acc
        })
        .collect();
    Waveform::new(samples, target_rate)
}

/// Number of frames on a `hop_seconds` grid covering `n_samples`.
pub(crate) fn frame_count(n_samples: usize, sample_rate: u32, hop_seconds: f64) -> usize {
    let hop = hop_seconds * sample_rate as f64;
    ((n_samples as f64 / hop) - 1e-9).ceil().max(0.0) as usize
}

/// Sample index at the center of frame `i`.
pub(crate) fn frame_center(i: usize, sample_rate: u32, hop_seconds: f64) -> isize {
    (i as f64 * hop_seconds * sample_rate as f64).round() as isize
}

/// Periodic Hann window of length `n`.
pub(crate) fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect()
}

/// Copies the `len` samples starting at `start`, zero-filling outside the signal.
pub(crate) fn padded_slice(samples: &[f64], start: isize, len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| {
            let k = start + i as isize;
            if k < 0 || k as usize >= samples.len() {
                0.0
            } else {
                samples[k as usize]
            }
        })
        .collect()
}

pub(crate) fn amplitude_to_db(x: f64) -> f64 {
    if x <= 0.0 {
        ENERGY_FLOOR_DB
    } else {
        (20.0 * x.log10()).max(ENERGY_FLOOR_DB)
    }
}

/// Hann-windowed RMS energy per frame, in dBFS.
///
/// Frame `i` is centered at `i * hop_seconds`; window samples falling outside
/// the signal are excluded from both the sum and the normalization.
pub fn frame_energy(w: &Waveform, hop_seconds: f64, win_seconds: f64) -> Result<EnergyTrack> {
    if !(hop_seconds > 0.0 && hop_seconds <= win_seconds) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < hop ({hop_seconds}) <= window ({win_seconds})"
        )));
    }
    let sr = w.sample_rate;
    let win_len = ((win_seconds * sr as f64).round() as usize).max(1);
    let window = hann(win_len);
    let n = w.len() as isize;
    let values = (0..frame_count(w.len(), sr, hop_seconds))
        .map(|i| {
            let start = frame_center(i, sr, hop_seconds) - (win_len / 2) as isize;
            let (mut num, mut den) = (0.0, 0.0);
            for (j, wj) in window.iter().enumerate() {
                let k = start + j as isize;
                if k >= 0 && k < n {
                    let s = w.samples[k as usize];
                    num += wj * wj * s * s;
                    den += wj * wj;
                }
            }
            if den > 0.0 {
                amplitude_to_db((num / den).sqrt())
            } else {
                ENERGY_FLOOR_DB
            }
        })
        .collect();
    Ok(EnergyTrack { hop_seconds, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(freq: f64, amp: f64, seconds: f64, sr: u32) -> Waveform {
        let n = (seconds * sr as f64) as usize;
        let s = (0..n)
            .map(|i| amp * (2.0 * PI * freq * i as f64 / sr as f64).sin())
            .collect();
        Waveform::new(s, sr).unwrap()
    }

    #[test]
    fn rejects_bad_waveforms() {
        assert!(Waveform::new(vec![0.0], 0).is_err());
        assert!(Waveform::new(vec![f64::NAN], 16000).is_err());
    }

    #[test]
    fn resample_identity_and_length() {
        let w = sine(440.0, 0.5, 1.0, 16000);
        assert_eq!(resample(&w, 16000).unwrap(), w);
        let down = resample(&w, 8000).unwrap();
        assert!((down.len() as i64 - 8000).abs() <= 1);
        assert_eq!(down.sample_rate(), 8000);
    }

    #[test]
    fn resample_keeps_sine_frequency() {
        use rustfft::{num_complex::Complex, FftPlanner};
        let w = sine(440.0, 0.5, 1.0, 44100);
        let r = resample(&w, 16000).unwrap();
        let n = r.len();
        let mut buf: Vec<Complex<f64>> = r.samples().iter().map(|&s| Complex::new(s, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let peak = (0..n / 2)
            .max_by(|&a, &b| buf[a].norm().total_cmp(&buf[b].norm()))
            .unwrap();
        let hz = peak as f64 * 16000.0 / n as f64;
        assert!((hz - 440.0).abs() <= 1.0, "peak at {hz}");
    }

    #[test]
    fn energy_of_silence_square_and_quiet_sine() {
        let silent = Waveform::silence(1.0, 16000);
        let e = frame_energy(&silent, 0.03125, 0.0625).unwrap();
        assert_eq!(e.values.len(), 32);
        assert!(e.values.iter().all(|&v| v == ENERGY_FLOOR_DB));

        let square: Vec<f64> = (0..16000).map(|i| if (i / 40) % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let e = frame_energy(&Waveform::new(square, 16000).unwrap(), 0.03125, 0.0625).unwrap();
        assert!(e.values.iter().all(|v| v.abs() < 1e-9));

        // a / sqrt(2) with a = 0.00316 is about -53 dBFS
        let expected = 20.0 * (0.00316f64 / 2f64.sqrt()).log10();
        assert!(expected < -50.0);
        let e = frame_energy(&sine(700.0, 0.00316, 1.0, 16000), 0.03125, 0.0625).unwrap();
        assert!(e.values.iter().all(|&v| v < -50.0));
        let interior = e.values[16];
        assert!((interior - expected).abs() < 0.1, "{interior} vs {expected}");
    }

    #[test]
    fn energy_shifts_by_gain() {
        let w = sine(300.0, 0.4, 0.5, 16000);
        let base = frame_energy(&w, 0.02, 0.04).unwrap();
        let g = 0.25;
        let scaled = frame_energy(&w.scaled(g), 0.02, 0.04).unwrap();
        let shift = 20.0 * g.log10();
        for (a, b) in base.values.iter().zip(&scaled.values) {
            assert!((b - a - shift).abs() < 1e-9);
        }
    }

    #[test]
    fn energy_rejects_bad_hop() {
        let w = Waveform::silence(0.1, 16000);
        assert!(frame_energy(&w, 0.0, 0.1).is_err());
        assert!(frame_energy(&w, 0.2, 0.1).is_err());
    }
}
