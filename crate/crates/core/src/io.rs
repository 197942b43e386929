//! CSV ingestion and emission.

use crate::error::{FssError, Result};
use crate::frechet::{ModulationCurve, ModulationEntry};
use crate::geometry::{norm, wrap_angle};
use crate::sample::Sample;
use crate::testing::RejectionRow;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleUnit {
    Degrees,
    Radians,
}

impl FromStr for AngleUnit {
    type Err = FssError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "deg" | "degrees" => Ok(AngleUnit::Degrees),
            "rad" | "radians" => Ok(AngleUnit::Radians),
            _ => Err(FssError::InvalidSpec(format!("unknown angle unit '{s}' (use deg or rad)"))),
        }
    }
}

impl fmt::Display for AngleUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AngleUnit::Degrees => "degrees",
            AngleUnit::Radians => "radians",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleDataset {
    pub name: String,
    /// Radians in `[-π, π)`.
    pub angles: Vec<f64>,
    pub source_unit: AngleUnit,
    pub n: usize,
    /// Rows skipped because their `calm` flag was set.
    pub calm_skipped: usize,
}

impl AngleDataset {
    pub fn sample(&self) -> Sample {
        Sample::Circle(self.angles.clone())
    }
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input)
}

fn parse_number(text: &str, row: usize, column: &str) -> Result<f64> {
    if text.is_empty() {
        return Err(FssError::Parse {
            row,
            message: format!("empty {column} cell"),
        });
    }
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(FssError::Parse {
            row,
            message: format!("invalid {column} value '{text}'"),
        }),
    }
}

fn is_calm(text: &str, row: usize) -> Result<bool> {
    match text.to_ascii_lowercase().as_str() {
        "" | "0" | "false" | "no" => Ok(false),
        "1" | "true" | "yes" => Ok(true),
        _ => Err(FssError::Parse {
            row,
            message: format!("invalid calm flag '{text}'"),
        }),
    }
}

/// Rows are numbered from 1 for the first data line after the header.
fn records<R: Read>(input: R) -> Result<(csv::StringRecord, Vec<(usize, csv::StringRecord)>)> {
    let mut rdr = reader(input);
    let header = rdr.headers()?.clone();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.iter().all(|c| c.is_empty()) {
            continue;
        }
        rows.push((i + 1, rec));
    }
    Ok((header, rows))
}

/// Reads a CSV column `angle`; degrees are converted and every value is
/// wrapped into `[-π, π)`, so 180° becomes `-π`.
pub fn read_angles<R: Read>(input: R, name: &str, unit: AngleUnit) -> Result<AngleDataset> {
    let (header, rows) = records(input)?;
    let col = header
        .iter()
        .position(|h| h == "angle")
        .ok_or_else(|| FssError::Format("missing 'angle' column".into()))?;
    let calm = header.iter().position(|h| h == "calm");
    let mut angles = Vec::with_capacity(rows.len());
    let mut calm_skipped = 0;
    for (row, rec) in rows {
        if let Some(c) = calm {
            if is_calm(rec.get(c).unwrap_or(""), row)? {
                calm_skipped += 1;
                continue;
            }
        }
        let v = parse_number(rec.get(col).unwrap_or(""), row, "angle")?;
        let rad = match unit {
            AngleUnit::Degrees => v.to_radians(),
            AngleUnit::Radians => v,
        };
        angles.push(wrap_angle(rad));
    }
    Ok(AngleDataset {
        name: name.to_string(),
        n: angles.len(),
        angles,
        source_unit: unit,
        calm_skipped,
    })
}

pub fn ingest_angles(path: &Path, unit: AngleUnit) -> Result<AngleDataset> {
    let name = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    read_angles(std::fs::File::open(path)?, &name, unit)
}

/// Writes radians under an `angle` header with full precision.
pub fn write_angles<W: Write>(out: W, angles: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["angle"])?;
    for a in angles {
        w.write_record([format!("{a:?}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Points tolerated off the unit sphere before normalization.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// Reads points of `S^m` from columns `x0,…,xm`.
pub fn read_sphere_points<R: Read>(input: R, m: usize) -> Result<Sample> {
    if m < 1 {
        return Err(FssError::OutOfRange("sphere dimension must be >= 1".into()));
    }
    let (header, rows) = records(input)?;
    let cols: Vec<usize> = (0..=m)
        .map(|k| {
            let name = format!("x{k}");
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| FssError::Format(format!("missing '{name}' column")))
        })
        .collect::<Result<_>>()?;
    if header.len() != m + 1 {
        return Err(FssError::Format(format!(
            "expected {} columns x0..x{m}, found {}",
            m + 1,
            header.len()
        )));
    }
    let mut coords = Vec::with_capacity(rows.len() * (m + 1));
    for (row, rec) in rows {
        if rec.len() != m + 1 {
            return Err(FssError::Parse {
                row,
                message: format!("expected {} values, found {}", m + 1, rec.len()),
            });
        }
        let mut v = Vec::with_capacity(m + 1);
        for (k, &c) in cols.iter().enumerate() {
            v.push(parse_number(&rec[c], row, &format!("x{k}"))?);
        }
        let n = norm(&v);
        if n == 0.0 {
            return Err(FssError::Parse {
                row,
                message: "zero vector".into(),
            });
        }
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(FssError::Parse {
                row,
                message: format!("norm {n} is not within {NORM_TOLERANCE} of 1"),
            });
        }
        // already-unit rows are kept bit for bit
        if (n - 1.0).abs() <= 4.0 * f64::EPSILON {
            coords.extend(v);
        } else {
            coords.extend(v.iter().map(|x| x / n));
        }
    }
    if coords.is_empty() {
        return Err(FssError::EmptySample);
    }
    if m == 1 {
        return Ok(Sample::circle(
            coords.chunks_exact(2).map(|p| p[1].atan2(p[0])).collect(),
        ));
    }
    Sample::sphere(m, coords)
}

pub fn ingest_sphere_points(path: &Path, m: usize) -> Result<Sample> {
    read_sphere_points(std::fs::File::open(path)?, m)
}

/// Writes sphere points with columns `x0,…,xm` at full precision.
pub fn write_sphere_points<W: Write>(out: W, sample: &Sample) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let d = sample.dim() + 1;
    w.write_record((0..d).map(|k| format!("x{k}")))?;
    for p in sample.points() {
        w.write_record(p.embed().iter().map(|x| format!("{x:?}")))?;
    }
    w.flush()?;
    Ok(())
}

/// Formats like C's `%.9g`.
pub fn format_g9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.8e}", x);
    // rounding may bump the exponent, so read it back
    let (mantissa, e) = sci.split_once('e').unwrap();
    let e: i32 = e.parse().unwrap();
    if !(-4..9).contains(&e) {
        let mantissa = trim_zeros(mantissa);
        let sign = if e < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", e.abs())
    } else {
        let decimals = (8 - e).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_curve<W: Write>(out: W, curve: &ModulationCurve) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "modulation", "se", "replicates"])?;
    for e in &curve.entries {
        w.write_record([
            e.n.to_string(),
            format_g9(e.modulation),
            format_g9(e.se),
            e.replicates.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_curve<R: Read>(input: R) -> Result<ModulationCurve> {
    let (header, rows) = records(input)?;
    let want = ["n", "modulation", "se", "replicates"];
    if header.iter().ne(want.iter().copied()) {
        return Err(FssError::Format(format!(
            "curve header must be {}",
            want.join(",")
        )));
    }
    let mut entries = Vec::with_capacity(rows.len());
    for (row, rec) in rows {
        if rec.len() != 4 {
            return Err(FssError::Parse {
                row,
                message: format!("expected 4 values, found {}", rec.len()),
            });
        }
        let count = |k: usize, name: &str| {
            rec[k].parse::<u64>().map_err(|_| FssError::Parse {
                row,
                message: format!("invalid {name} '{}'", &rec[k]),
            })
        };
        entries.push(ModulationEntry {
            n: count(0, "n")?,
            modulation: parse_number(&rec[1], row, "modulation")?,
            se: parse_number(&rec[2], row, "se")?,
            replicates: count(3, "replicates")?,
        });
    }
    ModulationCurve::new(entries)
}

pub fn read_curve_file(path: &Path) -> Result<ModulationCurve> {
    read_curve(std::fs::File::open(path)?)
}

pub fn write_rejection_table<W: Write>(out: W, rows: &[RejectionRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["offset", "method", "n", "level", "rejections", "replicates", "rate", "se"])?;
    for r in rows {
        w.write_record([
            format_g9(r.offset),
            r.method.to_string(),
            r.n.to_string(),
            format_g9(r.level),
            r.rejections.to_string(),
            r.replicates.to_string(),
            format_g9(r.rate),
            format_g9(r.se),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rejection_table<R: Read>(input: R) -> Result<Vec<RejectionRow>> {
    let mut rdr = reader(input);
    let mut rows = Vec::new();
    for (i, rec) in rdr.deserialize().enumerate() {
        let row: RejectionRow = rec.map_err(|e| FssError::Parse {
            row: i + 1,
            message: e.to_string(),
        })?;
        rows.push(row);
    }
    Ok(rows)
}
