//! Acoustic token grammar.
//!
//! ```text
//! PITCHED := BW OCTAVE LENGTH SLOPE     e.g. N5/2=   W3x2+1   M7-3
//! REST    := "R" LENGTH                 e.g. R/4     R
//! BW      := U | N | M | W | X
//! OCTAVE  := 0..9
//! LENGTH  := /32 | /16 | /8 | /4 | /2 | "" | x2 | x4
//! SLOPE   := -3 | -2 | -1 | = | +1 | +2 | +3
//! ```
//!
//! Canonical text separates tokens with a single space.

use std::fmt;

use thiserror::Error;

/// Spectral bandwidth class, narrowest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bandwidth {
    U,
    N,
    M,
    W,
    X,
}

impl Bandwidth {
    pub const ALL: [Bandwidth; 5] = [Bandwidth::U, Bandwidth::N, Bandwidth::M, Bandwidth::W, Bandwidth::X];

    pub fn letter(self) -> char {
        match self {
            Bandwidth::U => 'U',
            Bandwidth::N => 'N',
            Bandwidth::M => 'M',
            Bandwidth::W => 'W',
            Bandwidth::X => 'X',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.letter() == c)
    }
}

/// Note length at 60 bpm, from a 32nd note (0.125 s) up to four whole notes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LengthClass {
    ThirtySecond,
    Sixteenth,
    Eighth,
    Quarter,
    Half,
    Whole,
    DoubleWhole,
    QuadrupleWhole,
}

impl LengthClass {
    pub const ALL: [LengthClass; 8] = [
        LengthClass::ThirtySecond,
        LengthClass::Sixteenth,
        LengthClass::Eighth,
        LengthClass::Quarter,
        LengthClass::Half,
        LengthClass::Whole,
        LengthClass::DoubleWhole,
        LengthClass::QuadrupleWhole,
    ];

    /// Duration in seconds; a half note lasts 2 s.
    pub fn seconds(self) -> f64 {
        0.125 * f64::powi(2.0, self as i32)
    }

    pub fn code(self) -> &'static str {
        match self {
            LengthClass::ThirtySecond => "/32",
            LengthClass::Sixteenth => "/16",
            LengthClass::Eighth => "/8",
            LengthClass::Quarter => "/4",
            LengthClass::Half => "/2",
            LengthClass::Whole => "",
            LengthClass::DoubleWhole => "x2",
            LengthClass::QuadrupleWhole => "x4",
        }
    }
}

/// Pitch slope class in `-3..=3`; class `k` is a log2 pitch ratio of `k / 3`
/// across the segment (so -3 halves the pitch and +3 doubles it).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slope(i8);

impl Slope {
    pub const FLAT: Slope = Slope(0);

    pub fn new(class: i8) -> Option<Self> {
        (-3..=3).contains(&class).then_some(Slope(class))
    }

    pub fn all() -> impl Iterator<Item = Slope> {
        (-3..=3).map(Slope)
    }

    pub fn class(self) -> i8 {
        self.0
    }

    pub fn log2_ratio(self) -> f64 {
        self.0 as f64 / 3.0
    }

    pub fn code(self) -> &'static str {
        ["-3", "-2", "-1", "=", "+1", "+2", "+3"][(self.0 + 3) as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IspaAToken {
    Rest {
        length: LengthClass,
    },
    Pitched {
        bandwidth: Bandwidth,
        octave: u8,
        length: LengthClass,
        slope: Slope,
    },
}

impl IspaAToken {
    pub fn length(&self) -> LengthClass {
        match *self {
            IspaAToken::Rest { length } | IspaAToken::Pitched { length, .. } => length,
        }
    }

    pub fn is_rest(&self) -> bool {
        matches!(self, IspaAToken::Rest { .. })
    }
}

impl fmt::Display for IspaAToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            IspaAToken::Rest { length } => write!(f, "R{}", length.code()),
            IspaAToken::Pitched {
                bandwidth,
                octave,
                length,
                slope,
            } => write!(f, "{}{}{}{}", bandwidth.letter(), octave, length.code(), slope.code()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unknown leading character {0:?}")]
    UnknownLeadingChar(char),
    #[error("bad octave digit")]
    BadOctave,
    #[error("bad length")]
    BadLength,
    #[error("bad slope")]
    BadSlope,
    #[error("trailing garbage")]
    TrailingGarbage,
}

/// A token-text error with the byte offset where parsing stopped.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {position}: {kind}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

pub fn encode_tokens(tokens: &[IspaAToken]) -> String {
    tokens.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

pub fn parse_tokens(text: &str) -> Result<Vec<IspaAToken>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        if bytes[pos].is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        let (token, end) = parse_one(text, pos)?;
        tokens.push(token);
        pos = end;
    }
    Ok(tokens)
}

fn err(position: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { position, kind }
}

fn char_at(text: &str, pos: usize) -> Option<char> {
    text.get(pos..).and_then(|s| s.chars().next())
}

fn parse_one(text: &str, start: usize) -> Result<(IspaAToken, usize), ParseError> {
    let lead = char_at(text, start).expect("caller checked bounds");
    let (token, end) = if lead == 'R' {
        let (length, end) = parse_length(text, start + 1)?;
        (IspaAToken::Rest { length }, end)
    } else if let Some(bandwidth) = Bandwidth::from_letter(lead) {
        let octave = match char_at(text, start + 1) {
            Some(c @ '0'..='9') => c as u8 - b'0',
            _ => return Err(err(start + 1, ParseErrorKind::BadOctave)),
        };
        let (length, pos) = parse_length(text, start + 2)?;
        let (slope, end) = parse_slope(text, pos)?;
        (
            IspaAToken::Pitched {
                bandwidth,
                octave,
                length,
                slope,
            },
            end,
        )
    } else {
        return Err(err(start, ParseErrorKind::UnknownLeadingChar(lead)));
    };
    match char_at(text, end) {
        None => Ok((token, end)),
        Some(c) if c.is_ascii_whitespace() => Ok((token, end)),
        Some(_) => Err(err(end, ParseErrorKind::TrailingGarbage)),
    }
}

fn parse_length(text: &str, pos: usize) -> Result<(LengthClass, usize), ParseError> {
    let bytes = text.as_bytes();
    match bytes.get(pos) {
        Some(b'/') => {
            let digits = bytes[pos + 1..].iter().take_while(|b| b.is_ascii_digit()).count();
            let length = match &text[pos + 1..pos + 1 + digits] {
                "32" => LengthClass::ThirtySecond,
                "16" => LengthClass::Sixteenth,
                "8" => LengthClass::Eighth,
                "4" => LengthClass::Quarter,
                "2" => LengthClass::Half,
                _ => return Err(err(pos, ParseErrorKind::BadLength)),
            };
            Ok((length, pos + 1 + digits))
        }
        Some(b'x') => match bytes.get(pos + 1) {
            Some(b'2') => Ok((LengthClass::DoubleWhole, pos + 2)),
            Some(b'4') => Ok((LengthClass::QuadrupleWhole, pos + 2)),
            _ => Err(err(pos + 1, ParseErrorKind::BadLength)),
        },
        _ => Ok((LengthClass::Whole, pos)),
    }
}

fn parse_slope(text: &str, pos: usize) -> Result<(Slope, usize), ParseError> {
    let bytes = text.as_bytes();
    match bytes.get(pos) {
        Some(b'=') => Ok((Slope::FLAT, pos + 1)),
        Some(&sign @ (b'+' | b'-')) => match bytes.get(pos + 1) {
            Some(&d @ b'1'..=b'3') => {
                let k = (d - b'0') as i8;
                let class = if sign == b'+' { k } else { -k };
                Ok((Slope(class), pos + 2))
            }
            _ => Err(err(pos + 1, ParseErrorKind::BadSlope)),
        },
        _ => Err(err(pos, ParseErrorKind::BadSlope)),
    }
}
