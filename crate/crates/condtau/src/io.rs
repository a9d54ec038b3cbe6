//! CSV input and output for samples.
//!
//! Format: UTF-8, comma-separated, '.' decimals, LF line endings, header
//! `x1,x2,z1[,z2,...]`. Floats are written with the shortest representation
//! that round-trips, so write followed by read is the identity.

use crate::error::{Error, Result};
use crate::sample::Sample;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

/// Reads a sample from a CSV file, inferring the covariate dimension from
/// the header.
pub fn read_sample_csv(path: &Path) -> Result<Sample> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_sample(BufReader::new(file))
}

pub fn read_sample<R: BufRead>(reader: R) -> Result<Sample> {
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, Ok(line))) => line,
        Some((_, Err(e))) => return Err(Error::Io(e.to_string())),
        None => return Err(Error::Csv { line: 1, message: "empty file".into() }),
    };
    let cols: Vec<&str> = header.trim_end().split(',').collect();
    if cols.len() < 3 || cols[0] != "x1" || cols[1] != "x2" {
        return Err(Error::Csv {
            line: 1,
            message: format!("expected header x1,x2,z1[,z2,...], got '{header}'"),
        });
    }
    let p = cols.len() - 2;
    for (d, col) in cols[2..].iter().enumerate() {
        if *col != format!("z{}", d + 1) {
            return Err(Error::Csv {
                line: 1,
                message: format!("expected column z{}, got '{col}'", d + 1),
            });
        }
    }
    let mut x1 = Vec::new();
    let mut x2 = Vec::new();
    let mut z = Vec::new();
    for (idx, line) in lines {
        let line = line.map_err(|e| Error::Io(e.to_string()))?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != p + 2 {
            return Err(Error::Csv {
                line: lineno,
                message: format!("expected {} fields, got {}", p + 2, fields.len()),
            });
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|_| Error::Csv {
                line: lineno,
                message: format!("non-numeric cell '{s}'"),
            })
        };
        x1.push(parse(fields[0])?);
        x2.push(parse(fields[1])?);
        for f in &fields[2..] {
            z.push(parse(f)?);
        }
    }
    Sample::new(x1, x2, z, p)
}

/// Writes a sample in the format accepted by `read_sample_csv`.
pub fn write_sample_csv(path: &Path, sample: &Sample) -> Result<()> {
    let mut out = String::new();
    write_sample(&mut out, sample);
    std::fs::write(path, out).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_sample(out: &mut String, sample: &Sample) {
    out.push_str("x1,x2");
    for d in 1..=sample.dim() {
        out.push_str(&format!(",z{d}"));
    }
    out.push('\n');
    for i in 0..sample.len() {
        out.push_str(&format!("{},{}", sample.x1()[i], sample.x2()[i]));
        for &zd in sample.z(i) {
            out.push_str(&format!(",{zd}"));
        }
        out.push('\n');
    }
}

/// Writes a CSV table: a header line followed by rows of shortest
/// round-trip formatted floats.
pub fn write_table(path: &Path, header: &str, rows: &[Vec<String>]) -> Result<()> {
    let mut out = String::with_capacity(rows.len() * 32);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    let mut file = std::fs::File::create(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    file.write_all(out.as_bytes())
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
