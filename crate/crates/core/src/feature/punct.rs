//! Segment-length suffixes for feature tokens.

use crate::error::{Error, Result};

/// Encodable segment lengths in frames with their suffixes.
pub const LENGTH_CODES: [(usize, &str); 6] = [(1, ""), (2, ","), (5, ":"), (10, ";"), (20, "."), (50, "..")];

/// Segment lengths the feature segmenter may choose.
pub fn allowed_lengths() -> Vec<usize> {
    LENGTH_CODES.iter().map(|&(n, _)| n).collect()
}

/// Suffix for a length in the code table.
pub fn encode_length_punct(length_frames: usize) -> Result<&'static str> {
    LENGTH_CODES
        .iter()
        .find(|&&(n, _)| n == length_frames)
        .map(|&(_, s)| s)
        .ok_or_else(|| Error::InvalidArgument(format!("no length code for {length_frames} frames")))
}

/// Closest encodable length (by log ratio; ties go to the longer length).
pub fn nearest_code_length(length_frames: usize) -> usize {
    let target = (length_frames.max(1) as f64).ln();
    let mut best = (LENGTH_CODES[0].0, f64::INFINITY);
    for &(n, _) in &LENGTH_CODES {
        let diff = ((n as f64).ln() - target).abs();
        if diff <= best.1 {
            best = (n, diff);
        }
    }
    best.0
}

/// Splits a token into its symbol and length. When `symbols` is given, a
/// reading that leaves a known symbol wins, so labels that themselves end in
/// punctuation (`a:`) still decode.
pub fn decode_length_punct<'t>(token: &'t str, symbols: &[String]) -> Result<(&'t str, usize)> {
    let mut candidates: Vec<(&'t str, usize)> = LENGTH_CODES
        .iter()
        .filter_map(|&(n, suffix)| token.strip_suffix(suffix).map(|s| (s, n)))
        .filter(|(s, _)| s.chars().any(|c| !",:;.".contains(c)))
        .collect();
    candidates.sort_by_key(|&(s, _)| s.len());
    candidates
        .iter()
        .find(|(s, _)| symbols.iter().any(|k| k == s))
        .or_else(|| candidates.first())
        .copied()
        .ok_or_else(|| Error::InvalidArgument(format!("cannot decode token {token:?}")))
}
