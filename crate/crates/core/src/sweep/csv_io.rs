use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::geometry::Vec2;
use crate::qualify::MaxClass;

use super::{Result, SweepError, SweepRecord};

pub const CSV_HEADER: [&str; 13] = [
    "alpha_deg",
    "beta_deg",
    "gamma_deg",
    "mu",
    "max_class",
    "max_x",
    "max_y",
    "cond13",
    "min_normal_slope",
    "symmetry_err",
    "omega_fit",
    "thin",
    "error",
];

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn row(r: &SweepRecord) -> [String; 13] {
    [
        num(r.alpha_deg),
        num(r.beta_deg),
        num(r.gamma_deg),
        opt(r.mu),
        r.max_class.map(|c| c.as_str().to_string()).unwrap_or_default(),
        opt(r.max_point.map(|p| p.x)),
        opt(r.max_point.map(|p| p.y)),
        r.cond13.to_string(),
        opt(r.min_normal_slope),
        opt(r.symmetry_err),
        opt(r.omega_fit),
        r.thin.to_string(),
        r.error.clone().unwrap_or_default(),
    ]
}

/// Header plus one row per record; refuses an empty list.
pub fn write_csv<W: Write>(records: &[SweepRecord], w: W) -> Result<()> {
    if records.is_empty() {
        return Err(SweepError::EmptyRecords);
    }
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in records {
        out.write_record(row(r))?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn emit_csv(records: &[SweepRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(SweepError::EmptyRecords);
    }
    let file = File::create(path).map_err(|source| SweepError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(records, file)
}

fn parse_f64(s: &str, line: usize, col: &str) -> Result<f64> {
    s.parse().map_err(|_| SweepError::Parse {
        line,
        msg: format!("{col}: not a number: {s:?}"),
    })
}

fn parse_opt(s: &str, line: usize, col: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_f64(s, line, col).map(Some)
    }
}

fn parse_bool(s: &str, line: usize, col: &str) -> Result<bool> {
    s.parse().map_err(|_| SweepError::Parse {
        line,
        msg: format!("{col}: not a bool: {s:?}"),
    })
}

/// Inverse of [`write_csv`]; `runtime` comes back as zero.
pub fn read_csv<R: Read>(r: R) -> Result<Vec<SweepRecord>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header = rd.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(SweepError::Parse {
            line: 1,
            msg: format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let f = |k: usize| rec.get(k).unwrap_or("");
        let max_class = match f(4) {
            "" => None,
            s => Some(s.parse::<MaxClass>().map_err(|msg| SweepError::Parse { line, msg })?),
        };
        let max_point = match (parse_opt(f(5), line, "max_x")?, parse_opt(f(6), line, "max_y")?) {
            (Some(x), Some(y)) => Some(Vec2::new(x, y)),
            _ => None,
        };
        out.push(SweepRecord {
            alpha_deg: parse_f64(f(0), line, "alpha_deg")?,
            beta_deg: parse_f64(f(1), line, "beta_deg")?,
            gamma_deg: parse_f64(f(2), line, "gamma_deg")?,
            mu: parse_opt(f(3), line, "mu")?,
            max_class,
            max_point,
            cond13: parse_bool(f(7), line, "cond13")?,
            min_normal_slope: parse_opt(f(8), line, "min_normal_slope")?,
            symmetry_err: parse_opt(f(9), line, "symmetry_err")?,
            omega_fit: parse_opt(f(10), line, "omega_fit")?,
            thin: parse_bool(f(11), line, "thin")?,
            error: Some(f(12).to_string()).filter(|s| !s.is_empty()),
            runtime: Default::default(),
        });
    }
    Ok(out)
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRecord>> {
    read_csv(text.as_bytes())
}
