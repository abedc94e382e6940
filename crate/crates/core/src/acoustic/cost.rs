//! Pitch-trajectory cost model for acoustic segmentation.

use super::token::Slope;
use crate::dsp::PitchTrack;
use crate::segment::CostModel;

/// Units of the distance between observed and modeled pitch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceDomain {
    /// `12 * |log2 f_observed - log2 f_model|`.
    #[default]
    Semitones,
    /// `|f_observed - f_model|` in Hz.
    Hz,
}

/// Exponential pitch trajectory over a segment:
/// `log2 f(x) = base_log2_hz + slope.log2_ratio() * x` for `x` in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchSegmentModel {
    pub base_log2_hz: f64,
    pub slope: Slope,
}

impl PitchSegmentModel {
    pub fn log2_hz_at(&self, fraction: f64) -> f64 {
        self.base_log2_hz + self.slope.log2_ratio() * fraction
    }

    pub fn hz_at(&self, fraction: f64) -> f64 {
        self.log2_hz_at(fraction).exp2()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AcousticLabel {
    Rest,
    Pitched(PitchSegmentModel),
}

/// Label tie-break order: rest, then flat, then shallow slopes before steep,
/// falling before rising.
const SLOPE_ORDER: [i8; 7] = [0, -1, 1, -2, 2, -3, 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams {
    /// Charged per voiced frame under the rest hypothesis.
    pub voiced_mismatch: f64,
    /// Charged per unvoiced frame under a pitched hypothesis.
    pub unvoiced_mismatch: f64,
    pub domain: DistanceDomain,
}

impl Default for CostParams {
    fn default() -> Self {
        Self {
            voiced_mismatch: 1.0,
            unvoiced_mismatch: 12.0,
            domain: DistanceDomain::Semitones,
        }
    }
}

/// Compares a pitch track against rest and the seven sloped trajectories.
pub struct PitchCostModel<'a> {
    log2_f0: Vec<f64>,
    f0: &'a [f64],
    voiced_prefix: Vec<usize>,
    params: CostParams,
}

impl<'a> PitchCostModel<'a> {
    pub fn new(track: &'a PitchTrack, params: CostParams) -> Self {
        let log2_f0 = track
            .f0_hz
            .iter()
            .map(|&f| if f > 0.0 { f.log2() } else { f64::NAN })
            .collect();
        let mut voiced_prefix = Vec::with_capacity(track.len() + 1);
        voiced_prefix.push(0);
        for &f in &track.f0_hz {
            voiced_prefix.push(voiced_prefix.last().unwrap() + usize::from(f > 0.0));
        }
        Self {
            log2_f0,
            f0: &track.f0_hz,
            voiced_prefix,
            params,
        }
    }

    pub fn n_frames(&self) -> usize {
        self.f0.len()
    }

    /// Distance of the best-fitting trajectory with the given slope.
    pub fn fit(&self, start: usize, len: usize, slope: Slope) -> (PitchSegmentModel, f64) {
        let r = slope.log2_ratio();
        let voiced: Vec<(f64, f64)> = (start..start + len)
            .filter(|&t| self.f0[t] > 0.0)
            .map(|t| {
                let x = (t - start) as f64 / len as f64;
                (self.log2_f0[t] - r * x, x)
            })
            .collect();
        let n_unvoiced = len - voiced.len();
        let mut residuals: Vec<f64> = voiced.iter().map(|v| v.0).collect();
        let base = median(&mut residuals);
        let model = PitchSegmentModel {
            base_log2_hz: base,
            slope,
        };
        let fit: f64 = match self.params.domain {
            DistanceDomain::Semitones => voiced.iter().map(|(res, _)| 12.0 * (res - base).abs()).sum(),
            DistanceDomain::Hz => voiced
                .iter()
                .map(|&(res, x)| ((res + r * x).exp2() - model.hz_at(x)).abs())
                .sum(),
        };
        (model, fit + n_unvoiced as f64 * self.params.unvoiced_mismatch)
    }
}

/// Median of `values` (mean of the middle pair for even counts); reorders the slice.
fn median(values: &mut [f64]) -> f64 {
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    let (_, hi, _) = values.select_nth_unstable_by(n / 2, f64::total_cmp);
    let hi = *hi;
    if n % 2 == 1 {
        hi
    } else {
        let lo = values[..n / 2].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lo + hi)
    }
}

impl CostModel for PitchCostModel<'_> {
    type Label = AcousticLabel;

    fn segment_cost(&self, start: usize, len: usize) -> (AcousticLabel, f64) {
        let n_voiced = self.voiced_prefix[start + len] - self.voiced_prefix[start];
        let mut best = (AcousticLabel::Rest, n_voiced as f64 * self.params.voiced_mismatch);
        if n_voiced == 0 {
            return best;
        }
        for class in SLOPE_ORDER {
            let (model, d) = self.fit(start, len, Slope::new(class).unwrap());
            if d < best.1 {
                best = (AcousticLabel::Pitched(model), d);
            }
        }
        best
    }
}
