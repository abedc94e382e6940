//! CSV interchange: pitch tracks and phone alignments.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::PitchTrack;
use crate::error::{Error, Result};

/// Maximum deviation of a row spacing from the inferred hop.
const HOP_TOLERANCE: f64 = 1e-4;

/// Hop assumed for a single-row pitch file.
const DEFAULT_PITCH_HOP: f64 = 0.03125;

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::MissingColumn(name.to_string()))
}

fn parse_field(rec: &csv::StringRecord, idx: usize, row: usize, name: &str) -> Result<Option<f64>> {
    let raw = rec.get(idx).unwrap_or("").trim();
    if raw.is_empty() {
        return Ok(None);
    }
    raw.parse::<f64>()
        .map(Some)
        .map_err(|_| Error::InvalidArgument(format!("row {row}: bad {name} value {raw:?}")))
}

/// Reads `time_s,f0_hz,confidence,energy_db` rows. An empty or zero f0 marks
/// an unvoiced frame; the hop is inferred from the row spacing.
pub fn read_pitch_csv<R: Read>(reader: R) -> Result<PitchTrack> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let (ti, fi, ci, ei) = (
        column(&headers, "time_s")?,
        column(&headers, "f0_hz")?,
        column(&headers, "confidence")?,
        column(&headers, "energy_db")?,
    );

    let (mut times, mut f0, mut conf, mut energy) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let t = parse_field(&rec, ti, row, "time_s")?
            .ok_or_else(|| Error::InvalidArgument(format!("row {row}: missing time_s")))?;
        let f = parse_field(&rec, fi, row, "f0_hz")?.unwrap_or(0.0);
        let c = parse_field(&rec, ci, row, "confidence")?.unwrap_or(0.0);
        let e = parse_field(&rec, ei, row, "energy_db")?
            .ok_or_else(|| Error::InvalidArgument(format!("row {row}: missing energy_db")))?;
        times.push(t);
        f0.push(if f > 0.0 { f } else { 0.0 });
        conf.push(c);
        energy.push(e);
    }

    let hop = if times.len() >= 2 {
        times[1] - times[0]
    } else {
        DEFAULT_PITCH_HOP
    };
    for (row, pair) in times.windows(2).enumerate() {
        let spacing = pair[1] - pair[0];
        if (spacing - hop).abs() > HOP_TOLERANCE || spacing <= 0.0 {
            return Err(Error::NonUniformHop {
                row: row + 1,
                spacing,
                hop,
            });
        }
    }
    PitchTrack::new(hop, f0, conf, energy)
}

pub fn import_pitch(path: impl AsRef<Path>) -> Result<PitchTrack> {
    let path = path.as_ref();
    read_pitch_csv(File::open(path).map_err(|e| Error::io(path, e))?)
}

pub fn write_pitch_csv<W: Write>(writer: W, track: &PitchTrack) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["time_s", "f0_hz", "confidence", "energy_db"])?;
    for i in 0..track.len() {
        let f0 = if track.f0_hz[i] > 0.0 {
            track.f0_hz[i].to_string()
        } else {
            String::new()
        };
        w.write_record([
            (i as f64 * track.hop_seconds).to_string(),
            f0,
            track.confidence[i].to_string(),
            track.energy_db[i].to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<pitch csv>", e))
}

/// One phone occurrence from a recognizer alignment.
#[derive(Debug, Clone, PartialEq)]
pub struct PhoneInterval {
    pub start_s: f64,
    pub end_s: f64,
    pub phone: String,
}

/// Reads `start_s,end_s,phone` rows (phones in X-SAMPA).
pub fn read_alignment<R: Read>(reader: R) -> Result<Vec<PhoneInterval>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let (si, ei, pi) = (
        column(&headers, "start_s")?,
        column(&headers, "end_s")?,
        column(&headers, "phone")?,
    );
    rdr.records()
        .enumerate()
        .map(|(row, rec)| {
            let rec = rec?;
            let start_s = parse_field(&rec, si, row, "start_s")?
                .ok_or_else(|| Error::InvalidArgument(format!("row {row}: missing start_s")))?;
            let end_s = parse_field(&rec, ei, row, "end_s")?
                .ok_or_else(|| Error::InvalidArgument(format!("row {row}: missing end_s")))?;
            let phone = rec.get(pi).unwrap_or("").trim().to_string();
            if phone.is_empty() || end_s < start_s {
                return Err(Error::InvalidArgument(format!("row {row}: bad interval")));
            }
            Ok(PhoneInterval { start_s, end_s, phone })
        })
        .collect()
}

pub fn import_alignment(path: impl AsRef<Path>) -> Result<Vec<PhoneInterval>> {
    let path = path.as_ref();
    read_alignment(File::open(path).map_err(|e| Error::io(path, e))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infers_hop() {
        let csv = "time_s,f0_hz,confidence,energy_db\n0.0,440,0.9,-10\n0.03125,441,0.9,-10\n0.0625,442,0.9,-10\n";
        let t = read_pitch_csv(csv.as_bytes()).unwrap();
        assert_eq!(t.hop_seconds, 0.03125);
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn empty_f0_is_unvoiced() {
        let csv = "time_s,f0_hz,confidence,energy_db\n0.0,,0.1,-80\n0.03125,300,0.9,-10\n";
        let t = read_pitch_csv(csv.as_bytes()).unwrap();
        assert!(!t.is_voiced(0));
        assert!(t.is_voiced(1));
    }

    #[test]
    fn non_uniform_spacing() {
        let csv = "time_s,f0_hz,confidence,energy_db\n0.0,1,1,0\n0.03,100,1,0\n0.07,100,1,0\n";
        let err = read_pitch_csv(csv.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("non-uniform hop"), "{err}");
    }

    #[test]
    fn missing_column() {
        let csv = "time_s,f0_hz,energy_db\n0.0,100,0\n";
        assert!(matches!(read_pitch_csv(csv.as_bytes()), Err(Error::MissingColumn(c)) if c == "confidence"));
    }

    #[test]
    fn pitch_csv_round_trip() {
        let t = PitchTrack::new(0.03125, vec![0.0, 440.0], vec![0.1, 0.95], vec![-90.0, -12.5]).unwrap();
        let mut buf = Vec::new();
        write_pitch_csv(&mut buf, &t).unwrap();
        assert_eq!(read_pitch_csv(buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn alignment_rows() {
        let csv = "start_s,end_s,phone\n0.0,0.1,a\n0.1,0.25,s\n";
        let rows = read_alignment(csv.as_bytes()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].phone, "s");
        assert!(read_alignment("start_s,phone\n0,a\n".as_bytes()).is_err());
    }
}
