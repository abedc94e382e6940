//! YIN-style fundamental frequency estimation.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::audio::{frame_center, frame_count, frame_energy, padded_slice, Waveform};
use crate::error::{Error, Result};

/// Lowest and highest f0 a pitch track may carry.
pub const F0_RANGE_HZ: (f64, f64) = (20.0, 16_000.0);

#[derive(Debug, Clone, PartialEq)]
pub struct PitchTrack {
    pub hop_seconds: f64,
    /// 0 marks an unvoiced frame.
    pub f0_hz: Vec<f64>,
    pub confidence: Vec<f64>,
    pub energy_db: Vec<f64>,
}

impl PitchTrack {
    pub fn new(hop_seconds: f64, f0_hz: Vec<f64>, confidence: Vec<f64>, energy_db: Vec<f64>) -> Result<Self> {
        if !(hop_seconds > 0.0) {
            return Err(Error::InvalidArgument(format!("bad hop {hop_seconds}")));
        }
        if f0_hz.len() != confidence.len() || f0_hz.len() != energy_db.len() {
            return Err(Error::InvalidArgument(format!(
                "track lengths differ: f0 {}, confidence {}, energy {}",
                f0_hz.len(),
                confidence.len(),
                energy_db.len()
            )));
        }
        if let Some(i) = f0_hz
            .iter()
            .position(|&f| f != 0.0 && !(F0_RANGE_HZ.0..=F0_RANGE_HZ.1).contains(&f))
        {
            return Err(Error::InvalidArgument(format!(
                "frame {i}: f0 {} Hz outside [20, 16000]",
                f0_hz[i]
            )));
        }
        Ok(Self {
            hop_seconds,
            f0_hz,
            confidence,
            energy_db,
        })
    }

    pub fn len(&self) -> usize {
        self.f0_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f0_hz.is_empty()
    }

    pub fn is_voiced(&self, i: usize) -> bool {
        self.f0_hz[i] > 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PitchConfig {
    pub hop_seconds: f64,
    pub f_min: f64,
    pub f_max: f64,
    /// CMND dip threshold for picking the first candidate period.
    pub dip_threshold: f64,
    /// Frames whose confidence falls below this are unvoiced.
    pub voicing_threshold: f64,
}

impl Default for PitchConfig {
    fn default() -> Self {
        Self {
            hop_seconds: 0.03125,
            f_min: 30.0,
            f_max: 8000.0,
            dip_threshold: 0.15,
            voicing_threshold: 0.5,
        }
    }
}

/// Per-frame f0 from the cumulative-mean-normalized difference function.
///
/// Confidence is `1 - CMND` at the chosen lag. The difference function is
/// evaluated through an FFT cross-correlation, and the lag is refined by
/// parabolic interpolation.
pub fn estimate_pitch(w: &Waveform, config: &PitchConfig) -> Result<PitchTrack> {
    let sr = w.sample_rate() as f64;
    let f_max = config.f_max.min(0.95 * sr / 2.0);
    if !(config.f_min > 0.0) || config.f_min >= f_max {
        return Err(Error::InvalidArgument(format!(
            "f_min ({}) must be below f_max ({f_max})",
            config.f_min
        )));
    }
    if !(config.hop_seconds > 0.0) {
        return Err(Error::InvalidArgument("hop must be positive".into()));
    }

    let tau_min = ((sr / f_max).floor() as usize).max(2);
    let tau_max = (sr / config.f_min).ceil() as usize;
    // Frame i analyses [i * hop, (i + 1) * hop), so a segment of frames
    // covers exactly its own stretch of audio (plus one period of lag).
    let win = ((config.hop_seconds * sr).round() as usize).max(1);
    let buf_len = win + tau_max + 1;
    let n_fft = buf_len.next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n_fft);
    let inv = planner.plan_fft_inverse(n_fft);

    let n_frames = frame_count(w.len(), w.sample_rate(), config.hop_seconds);
    let energy = frame_energy(w, config.hop_seconds, 2.0 * config.hop_seconds)?;

    let mut a = vec![Complex::new(0.0, 0.0); n_fft];
    let mut b = vec![Complex::new(0.0, 0.0); n_fft];
    let mut diff = vec![0.0; tau_max + 1];
    let mut cmnd = vec![1.0; tau_max + 1];
    let mut cumulative = vec![0.0; tau_max + 1];
    let mut f0_hz = Vec::with_capacity(n_frames);
    let mut confidence = Vec::with_capacity(n_frames);

    for i in 0..n_frames {
        let start = frame_center(i, w.sample_rate(), config.hop_seconds);
        let x = padded_slice(w.samples(), start, buf_len);

        // r(tau) = sum_{j < win} x[j] x[j + tau]
        for (k, (ak, bk)) in a.iter_mut().zip(b.iter_mut()).enumerate() {
            *ak = Complex::new(if k < win { x[k] } else { 0.0 }, 0.0);
            *bk = Complex::new(if k < buf_len { x[k] } else { 0.0 }, 0.0);
        }
        fwd.process(&mut a);
        fwd.process(&mut b);
        for (ak, bk) in a.iter_mut().zip(&b) {
            *ak = ak.conj() * bk;
        }
        inv.process(&mut a);
        let scale = 1.0 / n_fft as f64;

        let mut prefix = vec![0.0; buf_len + 1];
        for (k, v) in x.iter().enumerate() {
            prefix[k + 1] = prefix[k] + v * v;
        }
        let head = prefix[win];
        for (tau, d) in diff.iter_mut().enumerate() {
            let shifted = prefix[tau + win] - prefix[tau];
            *d = (head + shifted - 2.0 * a[tau].re * scale).max(0.0);
        }

        cmnd[0] = 1.0;
        for tau in 1..=tau_max {
            cumulative[tau] = cumulative[tau - 1] + diff[tau];
            cmnd[tau] = if cumulative[tau] > 0.0 {
                diff[tau] * tau as f64 / cumulative[tau]
            } else {
                1.0
            };
        }

        let dips = Dips {
            diff: &diff,
            cumulative: &cumulative,
            cmnd: &cmnd,
            tau_min,
            tau_max,
        };
        let (f0, conf) = dips
            .pick(config.dip_threshold)
            .map(|(tau, value)| (sr / tau, (1.0 - value).clamp(0.0, 1.0)))
            .unwrap_or((0.0, 0.0));
        let voiced = conf >= config.voicing_threshold && f0 >= config.f_min && f0 <= f_max;
        f0_hz.push(if voiced { f0 } else { 0.0 });
        confidence.push(conf);
    }

    PitchTrack::new(config.hop_seconds, f0_hz, confidence, energy.values)
}

/// Difference function, its running sum and CMND for one frame.
struct Dips<'a> {
    diff: &'a [f64],
    cumulative: &'a [f64],
    cmnd: &'a [f64],
    tau_min: usize,
    tau_max: usize,
}

impl Dips<'_> {
    /// Refined lag and CMND value of the first local minimum whose refined
    /// CMND is below `threshold`, else of the deepest one.
    ///
    /// Refining before thresholding matters at high f0: with a period of a
    /// few samples no integer lag lands near the true dip.
    fn pick(&self, threshold: f64) -> Option<(f64, f64)> {
        if self.tau_min >= self.tau_max {
            return None;
        }
        let cmnd = self.cmnd;
        let mut best: Option<(f64, f64)> = None;
        for tau in self.tau_min..=self.tau_max {
            let left = if tau > self.tau_min {
                cmnd[tau - 1]
            } else {
                f64::INFINITY
            };
            let right = if tau < self.tau_max {
                cmnd[tau + 1]
            } else {
                f64::INFINITY
            };
            if cmnd[tau] > left || cmnd[tau] > right {
                continue;
            }
            let (lag, value) = self.refine(tau);
            if value < threshold {
                return Some((lag, value));
            }
            if best.is_none_or(|(_, v)| value < v) {
                best = Some((lag, value));
            }
        }
        best.filter(|&(_, v)| v < 1.0)
    }

    /// Near a dip, d(t) of a periodic signal behaves like
    /// `a - b cos(w (t - p))` with `w = 2 pi / p`, so three samples give the
    /// offset in closed form, `tan(w delta) = tan(w / 2) (l - r) / (l + r - 2c)`,
    /// and the depth `a - b`. A parabola through the same points is off by
    /// several cents when the period is only a few samples long.
    fn refine(&self, tau: usize) -> (f64, f64) {
        let plain = (tau as f64, self.cmnd[tau]);
        if tau <= self.tau_min || tau >= self.tau_max || !(self.cumulative[tau] > 0.0) {
            return plain;
        }
        let (l, c, r) = (self.diff[tau - 1], self.diff[tau], self.diff[tau + 1]);
        let denom = l + r - 2.0 * c;
        if !(denom > 0.0) {
            return plain;
        }
        let ratio = (l - r) / denom;
        let (mut lag, mut w, mut delta) = (tau as f64, 0.0, 0.0);
        for _ in 0..2 {
            w = 2.0 * PI / lag;
            delta = ((ratio * (0.5 * w).tan()).atan() / w).clamp(-1.0, 1.0);
            lag = tau as f64 + delta;
        }
        let b = denom / (2.0 * (w * delta).cos() * (1.0 - w.cos()));
        let depth = (c - b * (1.0 - (w * delta).cos())).max(0.0);
        let value = (depth * lag / self.cumulative[tau]).min(self.cmnd[tau]);
        (lag, value)
    }
}
