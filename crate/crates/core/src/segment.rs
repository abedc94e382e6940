//! Minimum-cost segmentation of a frame sequence into labeled spans.
//!
//! A tiling `S` of `[0, n)` costs `sum_s D(s) + lambda * LP(len(s))`, where
//! `D` comes from a [`CostModel`] and `LP(l) = 1 / (1 + ln l)` penalizes short
//! segments. [`viterbi_segment`] finds the optimum by dynamic programming in
//! `O(n * |lengths|)` cost-model queries; [`brute_force_segment`] enumerates
//! every tiling and exists to check it.
//!
//! Ties between equal-cost tilings go to the one whose last segment is
//! longest, then the one whose second-to-last segment is longest, and so on.
//! Within a span, ties between labels are the cost model's business (it must
//! return the smallest identifier among its minimizers).

use crate::error::{Error, Result};

/// Largest frame count [`brute_force_segment`] accepts.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// `1 / (1 + ln(length))`, natural log.
pub fn length_penalty(length_frames: usize) -> f64 {
    assert!(length_frames >= 1, "segment length must be >= 1");
    1.0 / (1.0 + (length_frames as f64).ln())
}

/// A span `[start_frame, end_frame)` and its label.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment<L> {
    pub start_frame: usize,
    pub end_frame: usize,
    pub label: L,
    /// `D + lambda * LP(len)` for this span.
    pub cost: f64,
    /// Set on a trailing remainder shorter than any expressible length.
    pub padded: bool,
}

impl<L> Segment<L> {
    pub fn len(&self) -> usize {
        self.end_frame - self.start_frame
    }

    pub fn is_empty(&self) -> bool {
        self.end_frame == self.start_frame
    }
}

/// Total cost, accumulated left to right.
pub fn total_cost<L>(segments: &[Segment<L>]) -> f64 {
    segments.iter().fold(0.0, |acc, s| acc + s.cost)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationConfig {
    lambda: f64,
    allowed_lengths: Vec<usize>,
    pad_tail: bool,
}

impl SegmentationConfig {
    /// `allowed_lengths` must be non-empty, positive and strictly ascending.
    pub fn new(lambda: f64, allowed_lengths: Vec<usize>) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda must be >= 0, got {lambda}")));
        }
        if allowed_lengths.is_empty() {
            return Err(Error::InvalidArgument("no allowed segment lengths".into()));
        }
        if allowed_lengths[0] == 0 || allowed_lengths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "allowed lengths must be positive and strictly ascending: {allowed_lengths:?}"
            )));
        }
        Ok(Self {
            lambda,
            allowed_lengths,
            pad_tail: true,
        })
    }

    /// When disabled, frame counts the allowed lengths cannot tile are an error
    /// instead of producing a padded tail segment.
    pub fn with_tail_padding(mut self, pad: bool) -> Self {
        self.pad_tail = pad;
        self
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn allowed_lengths(&self) -> &[usize] {
        &self.allowed_lengths
    }

    /// Whether every positive frame count is expressible.
    pub fn tiles_everything(&self) -> bool {
        self.allowed_lengths[0] == 1
    }
}

/// Supplies the data term of the segmentation objective.
///
/// `segment_cost(start, len)` returns the best label for the span and its
/// distance `D >= 0`. Implementations must be deterministic and break label
/// ties toward the smaller identifier.
pub trait CostModel {
    type Label: Clone;

    fn segment_cost(&self, start_frame: usize, length_frames: usize) -> (Self::Label, f64);
}

impl<M: CostModel + ?Sized> CostModel for &M {
    type Label = M::Label;

    fn segment_cost(&self, start_frame: usize, length_frames: usize) -> (Self::Label, f64) {
        (**self).segment_cost(start_frame, length_frames)
    }
}

fn span_cost<M: CostModel>(model: &M, lambda: f64, start: usize, len: usize) -> (M::Label, f64) {
    let (label, d) = model.segment_cost(start, len);
    (label, d + lambda * length_penalty(len))
}

/// Largest frame count `<= n` that the allowed lengths can tile exactly.
fn reachable_prefix(n: usize, lengths: &[usize]) -> Vec<bool> {
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for t in 1..=n {
        reach[t] = lengths.iter().any(|&l| l <= t && reach[t - l]);
    }
    reach
}

fn padded_tail<M: CostModel>(
    model: &M,
    config: &SegmentationConfig,
    tiled: usize,
    n_frames: usize,
) -> Result<Option<Segment<M::Label>>> {
    if tiled == n_frames {
        return Ok(None);
    }
    if !config.pad_tail {
        return Err(Error::Untileable { frames: n_frames });
    }
    let len = n_frames - tiled;
    let (label, cost) = span_cost(model, config.lambda, tiled, len);
    Ok(Some(Segment {
        start_frame: tiled,
        end_frame: n_frames,
        label,
        cost,
        padded: true,
    }))
}

/// Optimal segmentation by dynamic programming.
///
/// `best[t] = min_l best[t - l] + D(t - l, l) + lambda * LP(l)` over allowed
/// `l <= t`. If `n_frames` cannot be tiled, the longest tileable prefix is
/// segmented and the remainder becomes one padded segment.
pub fn viterbi_segment<M: CostModel>(
    n_frames: usize,
    model: &M,
    config: &SegmentationConfig,
) -> Result<Vec<Segment<M::Label>>> {
    if n_frames == 0 {
        return Err(Error::InvalidArgument("cannot segment zero frames".into()));
    }
    let lengths = &config.allowed_lengths;
    let mut best = vec![f64::INFINITY; n_frames + 1];
    let mut choice: Vec<Option<(usize, M::Label, f64)>> = vec![None; n_frames + 1];
    best[0] = 0.0;

    for t in 1..=n_frames {
        for &len in lengths.iter().take_while(|&&l| l <= t) {
            let prev = best[t - len];
            if !prev.is_finite() {
                continue;
            }
            let (label, cost) = span_cost(model, config.lambda, t - len, len);
            let total = prev + cost;
            // lengths ascend, so `<=` keeps the longest among equal totals
            if total <= best[t] {
                best[t] = total;
                choice[t] = Some((len, label, cost));
            }
        }
    }

    let tiled = (0..=n_frames).rev().find(|&t| best[t].is_finite()).unwrap_or(0);
    let tail = padded_tail(model, config, tiled, n_frames)?;

    let mut segments = Vec::new();
    let mut t = tiled;
    while t > 0 {
        let (len, label, cost) = choice[t].take().expect("reachable frame has a back-pointer");
        segments.push(Segment {
            start_frame: t - len,
            end_frame: t,
            label,
            cost,
            padded: false,
        });
        t -= len;
    }
    segments.reverse();
    segments.extend(tail);
    Ok(segments)
}

/// Exhaustive search over every tiling; a reference for [`viterbi_segment`].
pub fn brute_force_segment<M: CostModel>(
    n_frames: usize,
    model: &M,
    config: &SegmentationConfig,
) -> Result<Vec<Segment<M::Label>>> {
    if n_frames > BRUTE_FORCE_LIMIT {
        return Err(Error::TooManyFrames {
            frames: n_frames,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if n_frames == 0 {
        return Err(Error::InvalidArgument("cannot segment zero frames".into()));
    }
    let reach = reachable_prefix(n_frames, &config.allowed_lengths);
    let tiled = (0..=n_frames).rev().find(|&t| reach[t]).unwrap_or(0);

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut current = Vec::new();
    enumerate(tiled, 0, 0.0, model, config, &mut current, &mut best);

    let mut segments = Vec::new();
    if let Some((_, lens)) = best {
        let mut start = 0;
        for len in lens {
            let (label, cost) = span_cost(model, config.lambda, start, len);
            segments.push(Segment {
                start_frame: start,
                end_frame: start + len,
                label,
                cost,
                padded: false,
            });
            start += len;
        }
    }
    segments.extend(padded_tail(model, config, tiled, n_frames)?);
    Ok(segments)
}

/// True when tiling `a` wins a cost tie against `b`.
fn prefers(a: &[usize], b: &[usize]) -> bool {
    a.iter().rev().cmp(b.iter().rev()) == std::cmp::Ordering::Greater
}

fn enumerate<M: CostModel>(
    n: usize,
    pos: usize,
    acc: f64,
    model: &M,
    config: &SegmentationConfig,
    current: &mut Vec<usize>,
    best: &mut Option<(f64, Vec<usize>)>,
) {
    if pos == n {
        let better = match best {
            None => true,
            Some((c, lens)) => acc < *c || (acc == *c && prefers(current, lens)),
        };
        if better {
            *best = Some((acc, current.clone()));
        }
        return;
    }
    for &len in &config.allowed_lengths {
        if pos + len > n {
            break;
        }
        let (_, cost) = span_cost(model, config.lambda, pos, len);
        current.push(len);
        enumerate(n, pos + len, acc + cost, model, config, current, best);
        current.pop();
    }
}
